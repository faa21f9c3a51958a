#include "cbrl/experiment/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "cbrl/rl/features.hpp"

namespace cbrl::experiment {

namespace {

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) {
        throw std::runtime_error("bad number '" + s + "'");
    }
    return v;
}

int parse_int(const std::string& s) {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) {
        throw std::runtime_error("bad integer '" + s + "'");
    }
    return v;
}

}  // namespace

std::string profile_column(std::string_view prefix, sim::ProfileType t) {
    return fmt::format("{}_{}", prefix, sim::to_string(t));
}

void write_traces_csv(std::ostream& out, std::string_view run_id, std::span<const sim::ProfileType> profiles,
                      std::span<const Trace> traces, int first_day, bool header) {
    if (header) {
        out << "run_id,user_id,profile,day,hour,f0,f1,f2,f3,f4,f5,f6,f7,f8,f9,action,reward\n";
    }
    fmt::memory_buffer buf;
    for (std::size_t u = 0; u < traces.size(); ++u) {
        const auto profile = sim::to_string(profiles[u]);
        for (std::size_t i = 0; i < traces[u].size(); ++i) {
            const auto& e = traces[u][i];
            buf.clear();
            const int day = first_day + static_cast<int>(i) / kHoursPerDay;
            fmt::format_to(std::back_inserter(buf), "{},{},{},{},{}", run_id, u, profile, day, e.state.hour);
            for (const double f : rl::featurize(e.state)) {
                fmt::format_to(std::back_inserter(buf), ",{}", f);
            }
            fmt::format_to(std::back_inserter(buf), ",{},{}\n", e.action, e.reward);
            out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        }
    }
}

void write_metrics_csv(std::ostream& out, std::string_view setup, std::span<const MetricsRecord> records) {
    out << "day,setup,avg_daily_reward,cumulative_avg";
    for (const auto t : sim::kAllProfiles) {
        out << ',' << profile_column("avg", t);
    }
    for (const auto t : sim::kAllProfiles) {
        out << ',' << profile_column("cumulative", t);
    }
    out << ",prompts,acceptances\n";
    for (const auto& r : records) {
        out << fmt::format("{},{},{},{}", r.day, setup, r.average, r.cumulative);
        for (const double v : r.profile_average) {
            out << fmt::format(",{}", v);
        }
        for (const double v : r.profile_cumulative) {
            out << fmt::format(",{}", v);
        }
        out << fmt::format(",{},{}\n", r.prompts, r.acceptances);
    }
}

void write_clusters_csv(std::ostream& out, std::span<const sim::ProfileType> profiles,
                        const cluster::Partition& partition) {
    out << "user_id,true_profile,cluster_label,silhouette_overall\n";
    const std::string sil = partition.clusters ? fmt::format("{}", partition.clusters->silhouette) : "";
    for (std::size_t u = 0; u < partition.group_of_user.size(); ++u) {
        out << fmt::format("{},{},{},{}\n", u, sim::to_string(profiles[u]), partition.group_of_user[u], sil);
    }
}

void write_stats_csv(std::ostream& out, std::span<const PairwiseTest> tests) {
    out << "setup_a,setup_b,mean_a,mean_b,w_plus,w_minus,n,z,p_value\n";
    for (const auto& t : tests) {
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", t.setup_a, t.setup_b, t.mean_a, t.mean_b, t.test.w_plus,
                           t.test.w_minus, t.test.n, t.test.z, t.test.p);
    }
}

void write_summary_csv(std::ostream& out, std::span<const RunOutcome> runs) {
    out << "setup,learner,strategy,status,groups,avg_daily_reward,final_cumulative";
    for (const auto t : sim::kAllProfiles) {
        out << ',' << profile_column("avg", t);
    }
    out << ",nonconverged_fits,error\n";
    for (const auto& r : runs) {
        out << fmt::format("{},{},{},{}", r.spec.id(), to_string(r.spec.learner), cluster::to_string(r.spec.strategy),
                           r.result ? "ok" : "failed");
        if (r.result) {
            const auto& m = r.result->metrics;
            out << fmt::format(",{},{},{}", r.result->partition.groups, average_daily_reward(m), m.back().cumulative);
            for (std::size_t p = 0; p < sim::kProfileCount; ++p) {
                double sum = 0.0;
                for (const auto& rec : m) {
                    sum += rec.profile_average[p];
                }
                out << fmt::format(",{}", sum / static_cast<double>(m.size()));
            }
            out << fmt::format(",{},\n", r.result->nonconverged_fits);
        } else {
            out << ",,,";
            for (std::size_t p = 0; p < sim::kProfileCount; ++p) {
                out << ',';
            }
            out << ',' << quote(r.error) << '\n';
        }
    }
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw std::runtime_error(fmt::format("missing column '{}'", name));
    }
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV input");
    }
    t.header = split_csv_line(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto row = split_csv_line(line);
        if (row.size() != t.header.size()) {
            throw std::runtime_error(fmt::format("CSV line {}: expected {} fields, found {}", line_no,
                                                 t.header.size(), row.size()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    try {
        return read_csv(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

TraceTable read_traces_csv(std::istream& in, std::string_view run_id) {
    const CsvTable t = read_csv(in);
    const std::size_t c_run = t.column("run_id");
    const std::size_t c_user = t.column("user_id");
    const std::size_t c_profile = t.column("profile");
    const std::size_t c_day = t.column("day");
    const std::size_t c_hour = t.column("hour");
    const std::size_t c_f0 = t.column("f0");
    const std::size_t c_action = t.column("action");
    const std::size_t c_reward = t.column("reward");
    if (t.column("f9") != c_f0 + 9) {
        throw std::runtime_error("feature columns f0..f9 must be adjacent");
    }

    struct Row {
        int day;
        int hour;
        Experience e;
    };
    std::map<int, std::pair<sim::ProfileType, std::vector<Row>>> users;
    for (const auto& r : t.rows) {
        if (!run_id.empty() && r[c_run] != run_id) {
            continue;
        }
        const int user = parse_int(r[c_user]);
        const auto profile = sim::profile_from_string(r[c_profile]);
        if (!profile) {
            throw std::runtime_error("unknown profile '" + r[c_profile] + "'");
        }
        std::array<double, rl::kFeatureCount> f{};
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] = parse_double(r[c_f0 + i]);
        }
        Row row{parse_int(r[c_day]), parse_int(r[c_hour]), {}};
        auto& s = row.e.state;
        s.hour = static_cast<int>(std::lround(f[0] * 23.0));
        s.weekday = static_cast<int>(std::lround(f[1] * 6.0));
        s.worked_out_today = f[2] > 0.5;
        s.fatigue = static_cast<int>(std::lround(f[3] * 7.0));
        for (std::size_t a = 0; a < kActivityCount; ++a) {
            s.last_hour[a] = f[4 + a] > 0.5;
        }
        s.validate();
        if (rl::featurize(s) != f || s.hour != row.hour) {
            throw std::runtime_error(fmt::format("user {} day {} hour {}: features do not describe a valid state",
                                                 user, row.day, row.hour));
        }
        row.e.action = parse_int(r[c_action]);
        row.e.reward = parse_double(r[c_reward]);
        auto [it, inserted] = users.try_emplace(user, *profile, std::vector<Row>{});
        if (it->second.first != *profile) {
            throw std::runtime_error(fmt::format("user {} has more than one profile", user));
        }
        it->second.second.push_back(row);
    }

    TraceTable out;
    for (auto& [id, entry] : users) {
        auto& rows = entry.second;
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return std::tie(a.day, a.hour) < std::tie(b.day, b.hour); });
        Trace trace;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            Experience e = rows[i].e;
            e.next = i + 1 < rows.size() ? rows[i + 1].e.state : e.state;
            trace.push_back(e);
        }
        out.user_ids.push_back(id);
        out.profiles.push_back(entry.first);
        out.traces.push_back(std::move(trace));
    }
    return out;
}

void write_run(const std::filesystem::path& dir, const WarmupResult& warmup, const RunResult& run,
               int warmup_days) {
    std::filesystem::create_directories(dir);
    const std::string id = run.spec.id();
    {
        const auto path = dir / "traces.csv";
        auto out = open_out(path);
        write_traces_csv(out, id, warmup.profiles, warmup.traces, 0, true);
        write_traces_csv(out, id, warmup.profiles, run.traces, warmup_days, false);
        close_out(out, path);
    }
    {
        const auto path = dir / "metrics.csv";
        auto out = open_out(path);
        write_metrics_csv(out, id, run.metrics);
        close_out(out, path);
    }
    {
        const auto path = dir / "clusters.csv";
        auto out = open_out(path);
        write_clusters_csv(out, warmup.profiles, run.partition);
        close_out(out, path);
    }
    {
        const auto path = dir / "policy.txt";
        auto out = open_out(path);
        out << run.policy;
        close_out(out, path);
    }
}

void write_protocol_summary(const std::filesystem::path& dir, const ExperimentConfig& config,
                            const ProtocolResult& result) {
    std::filesystem::create_directories(dir);
    {
        const auto path = dir / "config.json";
        auto out = open_out(path);
        out << to_json(config);
        close_out(out, path);
    }
    {
        const auto path = dir / "stats.csv";
        auto out = open_out(path);
        write_stats_csv(out, result.tests);
        close_out(out, path);
    }
    {
        const auto path = dir / "summary.csv";
        auto out = open_out(path);
        write_summary_csv(out, result.runs);
        close_out(out, path);
    }
}

}  // namespace cbrl::experiment

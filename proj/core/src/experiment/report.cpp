#include "cbrl/experiment/report.hpp"

#include <fstream>
#include <map>

#include <fmt/format.h>

#include "cbrl/experiment/config.hpp"
#include "cbrl/experiment/output.hpp"

namespace cbrl::experiment {

namespace {

struct RunData {
    RunSpec spec;
    CsvTable metrics;
    CsvTable clusters;
};

class LongWriter {
public:
    explicit LongWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) {
            throw ReportError("cannot write " + path.string());
        }
        out_ << "day,setup,metric,value\n";
    }
    void row(const std::string& day, const std::string& setup, const std::string& metric, const std::string& value) {
        out_ << day << ',' << setup << ',' << metric << ',' << value << '\n';
    }
    std::filesystem::path finish() {
        out_.close();
        if (!out_) {
            throw ReportError("failed writing " + path_.string());
        }
        return path_;
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

}  // namespace

std::vector<std::filesystem::path> write_report(const std::filesystem::path& results_dir) {
    std::vector<RunData> runs;
    std::vector<std::string> problems;
    for (const auto& spec : all_runs()) {
        const auto dir = results_dir / spec.id();
        if (!std::filesystem::is_directory(dir)) {
            continue;
        }
        RunData data{spec, {}, {}};
        bool ok = true;
        for (const char* name : {"metrics.csv", "clusters.csv"}) {
            const auto path = dir / name;
            if (!std::filesystem::is_regular_file(path)) {
                problems.push_back("missing " + path.string());
                ok = false;
                continue;
            }
            try {
                (std::string_view(name) == "metrics.csv" ? data.metrics : data.clusters) = read_csv_file(path);
            } catch (const std::exception& e) {
                problems.push_back(e.what());
                ok = false;
            }
        }
        if (ok) {
            runs.push_back(std::move(data));
        }
    }
    if (!problems.empty()) {
        std::string msg = "incomplete results in " + results_dir.string() + ":";
        for (const auto& p : problems) {
            msg += "\n  " + p;
        }
        throw ReportError(msg);
    }
    if (runs.empty()) {
        std::string msg = "no run results in " + results_dir.string() + "; expected <run>/metrics.csv and "
                          "<run>/clusters.csv for at least one of:";
        for (const auto& spec : all_runs()) {
            msg += " " + spec.id();
        }
        throw ReportError(msg);
    }

    const auto out_dir = results_dir / "report";
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    try {
        LongWriter fig1(out_dir / "fig1_average_daily_reward.csv");
        for (const auto& r : runs) {
            const auto c_avg = r.metrics.column("avg_daily_reward");
            double sum = 0.0;
            for (const auto& row : r.metrics.rows) {
                sum += std::stod(row[c_avg]);
            }
            const double mean = r.metrics.rows.empty() ? 0.0 : sum / static_cast<double>(r.metrics.rows.size());
            fig1.row("", r.spec.id(), "avg_daily_reward", fmt::format("{}", mean));
        }
        written.push_back(fig1.finish());

        for (const auto learner : kAllLearners) {
            LongWriter cum(out_dir / fmt::format("cumulative_{}.csv", to_string(learner)));
            for (const auto& r : runs) {
                if (r.spec.learner != learner) {
                    continue;
                }
                const auto c_day = r.metrics.column("day");
                const auto c_cum = r.metrics.column("cumulative_avg");
                for (const auto& row : r.metrics.rows) {
                    cum.row(row[c_day], r.spec.id(), "cumulative_avg", row[c_cum]);
                }
            }
            written.push_back(cum.finish());
        }

        LongWriter per_profile(out_dir / "per_profile.csv");
        for (const auto& r : runs) {
            const auto c_day = r.metrics.column("day");
            for (const char* prefix : {"avg", "cumulative"}) {
                for (const auto t : sim::kAllProfiles) {
                    const auto name = profile_column(prefix, t);
                    const auto c = r.metrics.column(name);
                    for (const auto& row : r.metrics.rows) {
                        per_profile.row(row[c_day], r.spec.id(), name, row[c]);
                    }
                }
            }
        }
        written.push_back(per_profile.finish());

        const auto comp_path = out_dir / "cluster_composition.csv";
        std::ofstream comp(comp_path, std::ios::binary);
        comp << "setup,cluster_label,profile,users\n";
        for (const auto& r : runs) {
            const auto c_label = r.clusters.column("cluster_label");
            const auto c_profile = r.clusters.column("true_profile");
            std::map<int, std::map<std::string, int>> counts;
            for (const auto& row : r.clusters.rows) {
                ++counts[std::stoi(row[c_label])][row[c_profile]];
            }
            for (const auto& [label, per] : counts) {
                for (const auto t : sim::kAllProfiles) {
                    const std::string name(sim::to_string(t));
                    const auto it = per.find(name);
                    comp << fmt::format("{},{},{},{}\n", r.spec.id(), label, name, it == per.end() ? 0 : it->second);
                }
            }
        }
        comp.close();
        if (!comp) {
            throw ReportError("failed writing " + comp_path.string());
        }
        written.push_back(comp_path);
    } catch (const ReportError&) {
        throw;
    } catch (const std::exception& e) {
        throw ReportError(fmt::format("malformed results in {}: {}", results_dir.string(), e.what()));
    }
    return written;
}

}  // namespace cbrl::experiment

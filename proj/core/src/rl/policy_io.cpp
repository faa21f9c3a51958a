#include "cbrl/rl/policy_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace cbrl::rl {

namespace {

void check_group(std::string_view group) {
    if (group.empty() || group.find_first_of(" \t\r\n") != std::string_view::npos) {
        throw std::invalid_argument("policy group name must be a non-empty token");
    }
}

template <class T>
T parse_number(const std::string& token, std::size_t line) {
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error(fmt::format("policy line {}: bad number '{}'", line, token));
    }
    return value;
}

}  // namespace

void write_linear(std::ostream& out, std::string_view group, const Eigen::VectorXd& weights) {
    check_group(group);
    std::string line = fmt::format("linear {} {}", group, weights.size());
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        line += fmt::format(" {}", weights(i));
    }
    out << line << '\n';
}

void write_qtable(std::ostream& out, std::string_view group, const QTable& table) {
    check_group(group);
    for (const auto& [key, values] : table.sorted_entries()) {
        const Observation s = Observation::from_key(key);
        std::string flags;
        for (const bool f : s.last_hour) {
            flags += f ? '1' : '0';
        }
        for (int a = 0; a < kActionCount; ++a) {
            out << fmt::format("q {} {} {} {} {} {} {} {}\n", group, s.hour, s.weekday, s.worked_out_today ? 1 : 0,
                               s.fatigue, flags, a, values[static_cast<std::size_t>(a)]);
        }
    }
}

PolicySnapshot read_policy(std::istream& in) {
    PolicySnapshot snap;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        std::istringstream fields(text);
        std::string kind;
        if (!(fields >> kind) || kind.front() == '#') {
            continue;
        }
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) {
            tok.push_back(t);
        }
        if (kind == "linear") {
            if (tok.size() < 2) {
                throw std::runtime_error(fmt::format("policy line {}: truncated linear record", line_no));
            }
            const auto dim = parse_number<std::size_t>(tok[1], line_no);
            if (tok.size() != dim + 2) {
                throw std::runtime_error(
                    fmt::format("policy line {}: expected {} weights, found {}", line_no, dim, tok.size() - 2));
            }
            LinearSnapshot s{tok[0], Eigen::VectorXd(static_cast<Eigen::Index>(dim))};
            for (std::size_t i = 0; i < dim; ++i) {
                s.weights(static_cast<Eigen::Index>(i)) = parse_number<double>(tok[i + 2], line_no);
            }
            snap.linear.push_back(std::move(s));
        } else if (kind == "q") {
            if (tok.size() != 8 || tok[5].size() != kActivityCount) {
                throw std::runtime_error(fmt::format("policy line {}: malformed q record", line_no));
            }
            QRow row;
            row.group = tok[0];
            row.state.hour = parse_number<int>(tok[1], line_no);
            row.state.weekday = parse_number<int>(tok[2], line_no);
            row.state.worked_out_today = parse_number<int>(tok[3], line_no) != 0;
            row.state.fatigue = parse_number<int>(tok[4], line_no);
            for (std::size_t i = 0; i < kActivityCount; ++i) {
                const char c = tok[5][i];
                if (c != '0' && c != '1') {
                    throw std::runtime_error(fmt::format("policy line {}: bad activity flags", line_no));
                }
                row.state.last_hour[i] = c == '1';
            }
            row.action = parse_number<int>(tok[6], line_no);
            row.value = parse_number<double>(tok[7], line_no);
            try {
                row.state.validate();
            } catch (const std::out_of_range& e) {
                throw std::runtime_error(fmt::format("policy line {}: {}", line_no, e.what()));
            }
            if (row.action < 0 || row.action >= kActionCount) {
                throw std::runtime_error(fmt::format("policy line {}: bad action", line_no));
            }
            snap.tabular.push_back(std::move(row));
        } else {
            throw std::runtime_error(fmt::format("policy line {}: unknown record '{}'", line_no, kind));
        }
    }
    return snap;
}

}  // namespace cbrl::rl

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "frogld/cli/cli.hpp"
#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"
#include "frogld/core/stats.hpp"
#include "frogld/opt/optimizer.hpp"

namespace frogld::cli {

namespace {

std::string first_line(const std::string& text) {
    auto e = text.find_first_of("\r\n");
    return text.substr(0, e);
}

double parse_num(const std::string& s) {
    if (s.empty()) return NAN;
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
}

}  // namespace

std::string report_csv_header() { return tail_csv_header() + ",r2_sqrt_n,r2_n,predicted_rate"; }

std::string report_csv(const Report& r) {
    std::ostringstream os;
    os << report_csv_header() << '\n';
    for (const auto& row : r.rows)
        os << tail_csv_row(row.tail) << ',' << format_double(row.r2_sqrt_n) << ',' << format_double(row.r2_n) << ','
           << (row.predicted_rate ? format_double(*row.predicted_rate) : "") << '\n';
    return os.str();
}

Report parse_report_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty() || rows[0].size() != 12) throw DomainError("report CSV: unexpected header");
    if (first_line(text) != report_csv_header()) throw DomainError("report CSV: unexpected header");
    std::ostringstream tail;
    tail << tail_csv_header() << '\n';
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 12) throw DomainError("report CSV: wrong column count in row " + std::to_string(r));
        for (std::size_t c = 0; c < 9; ++c) tail << (c ? "," : "") << rows[r][c];
        tail << '\n';
    }
    const auto tails = parse_tail_csv(tail.str());
    Report out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        ReportRow row{tails[r - 1], 0, 0, std::nullopt};
        try {
            row.r2_sqrt_n = parse_num(rows[r][9]);
            row.r2_n = parse_num(rows[r][10]);
            if (!rows[r][11].empty()) row.predicted_rate = parse_num(rows[r][11]);
        } catch (const std::exception&) {
            throw DomainError("report CSV: malformed number in row " + std::to_string(r));
        }
        out.rows.push_back(row);
    }
    return out;
}

std::string report(const std::vector<std::string>& paths) {
    require(!paths.empty(), "report: no input files");
    if (paths.size() == 1) return read_file(paths[0]);

    std::vector<TailEstimate> tails;
    std::optional<double> r_unit;  // r(1)
    for (const auto& p : paths) {
        const std::string text = read_file(p);
        const std::string head = first_line(text);
        if (head == tail_csv_header()) {
            for (auto& t : parse_tail_csv(text)) tails.push_back(t);
        } else if (head == "xi,r_hat,r_hat_over_sqrt_xi") {
            const auto rows = parse_csv(text);
            // the best per-unit value over the curve
            std::optional<double> best;
            for (std::size_t r = 1; r < rows.size(); ++r) {
                if (rows[r].size() != 3) throw DomainError("report: malformed rate curve " + p);
                const double v = parse_num(rows[r][2]);
                if (!best || v < *best) best = v;
            }
            if (best) {
                if (!r_unit || *best < *r_unit) r_unit = best;
            }
        } else if (!text.empty() && (text[0] == '{' || text[0] == '[')) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception&) {
                throw DomainError("report: unreadable JSON " + p);
            }
            const auto items = j.is_array() ? j : nlohmann::json::array({j});
            for (const auto& item : items) {
                if (!item.is_object() || !item.contains("r_hat") || !item.contains("best_profile"))
                    throw DomainError("report: schema mismatch in " + p + " (expected a rate estimate)");
                const auto est = rate_from_json(item);
                const double r1 = est.r_hat / std::sqrt(est.xi);
                if (!r_unit || r1 < *r_unit) r_unit = r1;
            }
        } else {
            throw DomainError("report: schema mismatch in " + p);
        }
    }
    if (tails.empty()) throw DomainError("report: no tail table among the inputs");

    std::vector<double> xs, xn, y;
    for (const auto& t : tails) {
        if (t.hits < 1 || t.p_hat <= 0) continue;
        xs.push_back(std::sqrt(static_cast<double>(t.n)));
        xn.push_back(static_cast<double>(t.n));
        y.push_back(-std::log(t.p_hat));
    }
    double r2s = NAN, r2n = NAN;
    const bool spread = std::any_of(xn.begin(), xn.end(), [&](double v) { return v != xn.front(); });
    if (y.size() >= 2 && spread) {
        r2s = least_squares(xs, y).r2;
        r2n = least_squares(xn, y).r2;
    }
    Report rep;
    for (const auto& t : tails) {
        ReportRow row{t, r2s, r2n, std::nullopt};
        if (r_unit) row.predicted_rate = *r_unit * std::sqrt(t.xi);
        rep.rows.push_back(row);
    }
    return report_csv(rep);
}

}  // namespace frogld::cli

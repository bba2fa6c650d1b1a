#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <optional>

#include <json.hpp>

#include "frogld/frog/estimators.hpp"

namespace frogld::cli {

enum ExitCode { kOk = 0, kDomainError = 1, kUsageError = 2 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Runs the invariant suites; suite == "" runs all of them.
bool verify(std::ostream& out, const std::string& suite = "");
std::vector<std::string> verify_suites();

// Merged tail table: tail columns plus fit quality of -log p_hat against
// sqrt(n) and against n, and the predicted rate when an optimizer result is
// among the inputs.
struct ReportRow {
    TailEstimate tail;
    double r2_sqrt_n = 0;
    double r2_n = 0;
    std::optional<double> predicted_rate;
};
struct Report {
    std::vector<ReportRow> rows;
};

// One input is passed through unchanged.  Several inputs must be tail CSVs,
// optionally with RateEstimate JSON or rate-curve CSV files.
std::string report(const std::vector<std::string>& paths);
std::string report_csv(const Report& r);
Report parse_report_csv(const std::string& text);
std::string report_csv_header();

}  // namespace frogld::cli

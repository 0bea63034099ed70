#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edcast/diagnostics.hpp"
#include "edcast/forecast.hpp"
#include "edcast/sarima.hpp"

namespace edcast::cli {

/// Missing or unreadable input, unwritable output, malformed input documents (exit code 2).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Runs one subcommand: generate, decompose, diagnose, fit, select, forecast,
 * evaluate or compare. Returns 0 on success, 1 on a domain error and 2 on a
 * usage or IO error; messages go to `err`.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Model document: format_version, order, coefficients, fit statistics and the
// training window (start, end, step_seconds, values).
[[nodiscard]] std::string model_to_json(const sarima::SarimaFit& fit);
/// @throws IoError on malformed documents.
[[nodiscard]] sarima::SarimaFit model_from_json(std::string_view text);

/// "95" for 0.95, "97.5" for 0.975.
[[nodiscard]] std::string level_label(double level);

/// `timestamp,point,lo<level>,hi<level>...` with levels ascending.
void write_forecast_csv(std::ostream& out, const Forecast& forecast);

/// Parses "10,20,95" (percent) into fractions.
[[nodiscard]] std::vector<double> parse_levels(std::string_view text);

struct ReportInput {
    Series series;
    int d = 1;
    int D = 0;
    int s = 0;
    std::size_t max_lag = 48;
    const sarima::SarimaFit* model = nullptr;
};

/// Diagnostic report JSON (report_version 1).
[[nodiscard]] std::string diagnostic_report_json(const ReportInput& input);

[[nodiscard]] Series read_series_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace edcast::cli

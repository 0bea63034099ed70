#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edcast/forecast.hpp"
#include "edcast/series.hpp"

namespace edcast::evaluation {

/// Mean of (actual - predicted). Positive values mean the forecasts were too low.
[[nodiscard]] double mean_error(std::span<const double> actual, std::span<const double> predicted);
[[nodiscard]] inline double mean_error(const Series& actual, std::span<const double> predicted) {
    return mean_error(actual.values(), predicted);
}

/// Root mean squared error.
[[nodiscard]] double rmse(std::span<const double> actual, std::span<const double> predicted);
[[nodiscard]] inline double rmse(const Series& actual, std::span<const double> predicted) {
    return rmse(actual.values(), predicted);
}

/// Fraction of actuals inside [lower, upper] (inclusive), per forecast level.
[[nodiscard]] std::map<double, double> interval_coverage(std::span<const double> actual,
                                                         const Forecast& forecast);
[[nodiscard]] inline std::map<double, double> interval_coverage(const Series& actual,
                                                                const Forecast& forecast) {
    return interval_coverage(actual.values(), forecast);
}

struct OriginScore {
    std::size_t origin = 0;
    double me = 0.0;
    double rmse = 0.0;
};

struct EvalReport {
    std::string model_name;
    double me = 0.0;
    double rmse = 0.0;
    std::map<double, double> coverage;
    std::size_t n_points = 0;
    std::vector<OriginScore> per_origin;
};

/// Produces an h-step forecast after `train` at the given levels.
using ModelSpec =
    std::function<Forecast(const Series& train, std::size_t h, std::span<const double> levels)>;

/**
 * Fits on [0, o) and scores the forecast of [o, o + h) for origins
 * o = first_origin, first_origin + step, ... while o + h <= n. Errors and
 * coverage hits are pooled over every (origin, step) pair.
 *
 * @throws std::invalid_argument if step < 1, h < 1 or no origin fits.
 */
[[nodiscard]] EvalReport rolling_origin_backtest(const Series& series, const ModelSpec& model,
                                                 std::size_t first_origin, std::size_t step,
                                                 std::size_t h,
                                                 std::span<const double> levels = {},
                                                 std::string model_name = {});

}  // namespace edcast::evaluation

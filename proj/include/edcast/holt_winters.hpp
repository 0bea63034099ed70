#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "edcast/forecast.hpp"
#include "edcast/numeric.hpp"
#include "edcast/series.hpp"

namespace edcast::holt_winters {

enum class Variant { additive, multiplicative };

struct Params {
    double alpha = 0.2;
    double beta = 0.1;
    double gamma = 0.1;
};

struct FitOptions {
    std::optional<Params> params;  ///< fixed smoothing weights; optimized when absent
    /// Overrides the initial seasonal indices (length = period), skipping re-centering.
    std::optional<std::vector<double>> initial_seasonal;
    numeric::OptimConfig optim{.initial_step = 0.5};
};

/**
 * @brief Fitted Holt-Winters state after the last observation.
 *
 * `seasonal[k]` is the index for phase k, where the phase of observation t
 * is t mod period. The recursions start at t = period; `residuals[i]` is the
 * one-step error for observation period + i.
 */
struct HwModel {
    std::size_t period = 0;
    Variant variant = Variant::additive;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    double level = 0.0, trend = 0.0;
    std::vector<double> seasonal;
    double sse = 0.0;
    std::vector<double> residuals;
    std::size_t n = 0;
    Timestamp start{};
    Duration step = kHour;

    [[nodiscard]] Series residual_series() const;
};

/**
 * Fits triple exponential smoothing.
 *
 * Initialization: level = mean of the first period, trend = (mean of the
 * second period - mean of the first) / period, seasonal = first-period
 * deviations (additive) or ratios (multiplicative), re-centered to sum zero
 * or normalized to mean one. Without fixed params, (alpha, beta, gamma) minimize
 * the one-step SSE over the open unit cube (logit transform), starting at
 * (0.2, 0.1, 0.1).
 *
 * @throws std::invalid_argument when the series is shorter than 2 * period, or
 *         has non-positive values under the multiplicative variant.
 */
[[nodiscard]] HwModel hw_fit(const Series& series, std::size_t period,
                             Variant variant = Variant::additive, const FitOptions& options = {});

/// One-step SSE of the recursions at fixed weights (the optimizer's objective).
[[nodiscard]] double hw_sse(std::span<const double> values, std::size_t period, Variant variant,
                            const Params& params);

/**
 * point(h) = level + h * trend (+ or x) seasonal[(n + h - 1) mod period].
 * Intervals are point +/- z * sigma_e * sqrt(h) and flagged approximate.
 */
[[nodiscard]] Forecast hw_forecast(const HwModel& model, std::size_t h,
                                   std::span<const double> levels);

}  // namespace edcast::holt_winters

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "edcast/series.hpp"

namespace edcast::decomposition {

/**
 * @brief Classical additive decomposition observed = trend + seasonal + remainder.
 *
 * Trend and remainder are absent (nullopt) in the half-window margins where
 * the centred moving average is undefined.
 */
struct Decomposition {
    std::vector<double> observed;
    std::vector<std::optional<double>> trend;
    std::vector<double> seasonal;
    std::vector<std::optional<double>> remainder;
    std::vector<double> seasonal_pattern;  ///< one value per phase, sums to zero
    std::size_t period = 0;
};

/// Centred moving average trend (2 x period MA for even periods), phase-mean seasonal.
[[nodiscard]] Decomposition classical_decompose(const Series& series, std::size_t period);

/// Mean of observations at each phase index mod `period`.
[[nodiscard]] std::vector<double> mean_profile(const Series& series, std::size_t period);

/// Seasonal strength max(0, 1 - Var(remainder) / Var(seasonal + remainder)) over interior points.
[[nodiscard]] double seasonal_strength(const Decomposition& d);

/// Sums consecutive blocks of `block` values (e.g. 24 hourly counts into a daily total).
/// A trailing partial block is dropped.
[[nodiscard]] Series aggregate(const Series& series, std::size_t block);

}  // namespace edcast::decomposition

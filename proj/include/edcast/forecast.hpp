#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "edcast/series.hpp"

namespace edcast {

/**
 * @brief Point forecasts with central prediction intervals.
 *
 * `lower[i]` / `upper[i]` hold the bounds for `levels[i]` at every step.
 * Levels are stored in ascending order.
 */
struct Forecast {
    Timestamp start{};  ///< timestamp of the first forecast step
    Duration step = kHour;
    std::vector<double> points;
    std::vector<double> se;  ///< per-step standard errors (empty for simulated intervals)
    std::vector<double> levels;
    std::vector<std::vector<double>> lower;
    std::vector<std::vector<double>> upper;
    bool approximate = false;  ///< intervals are a heuristic, not model-exact

    [[nodiscard]] std::size_t horizon() const noexcept { return points.size(); }
    [[nodiscard]] Timestamp time_at(std::size_t h) const noexcept {
        return start + step * static_cast<long long>(h);
    }
};

/// Validates and sorts confidence levels; each must lie in (0, 1). Duplicates are removed.
[[nodiscard]] std::vector<double> normalize_levels(std::span<const double> levels);

/// Fills symmetric Gaussian bounds point ± z((1+γ)/2) · se for every level.
void fill_normal_intervals(Forecast& f, std::span<const double> levels);

}  // namespace edcast

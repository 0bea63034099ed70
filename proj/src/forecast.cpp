#include "edcast/forecast.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "edcast/numeric.hpp"

namespace edcast {

std::vector<double> normalize_levels(std::span<const double> levels) {
    std::vector<double> out(levels.begin(), levels.end());
    for (double l : out) {
        if (!(l > 0.0 && l < 1.0)) {
            throw std::invalid_argument(
                fmt::format("confidence level {} is outside (0, 1)", l));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

void fill_normal_intervals(Forecast& f, std::span<const double> levels) {
    f.levels = normalize_levels(levels);
    f.lower.assign(f.levels.size(), std::vector<double>(f.horizon()));
    f.upper.assign(f.levels.size(), std::vector<double>(f.horizon()));
    for (std::size_t i = 0; i < f.levels.size(); ++i) {
        const double z = numeric::normal_quantile(0.5 * (1.0 + f.levels[i]));
        for (std::size_t h = 0; h < f.horizon(); ++h) {
            f.lower[i][h] = f.points[h] - z * f.se[h];
            f.upper[i][h] = f.points[h] + z * f.se[h];
        }
    }
}

}  // namespace edcast

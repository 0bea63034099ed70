#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "edcast/series.hpp"

namespace edcast::arrivals {

/**
 * @brief Parameters of the synthetic hourly arrival process.
 *
 * Rate at hour i (time t = start + i hours):
 *   base_rate * (1 + trend_pct_per_year / 100)^years(t) * diurnal[hour(t)]
 *   * day_of_week[weekday(t)] * (1 + annual_amplitude * sin(2π dayofyear(t) / 365.25))
 * with years(t) = i / 8766 and day_of_week indexed Monday = 0.
 */
struct ArrivalGenConfig {
    Timestamp start{};
    std::size_t n_hours = 0;
    double base_rate = 6.0;
    double trend_pct_per_year = 0.0;
    std::array<double, 24> diurnal{};
    std::array<double, 7> day_of_week{};
    double annual_amplitude = 0.0;
    std::uint64_t seed = 42;

    /// @throws std::invalid_argument on any invalid field.
    void validate() const;
};

/// Flat profile: all multipliers 1, no trend, no annual cycle.
[[nodiscard]] ArrivalGenConfig flat_config(Timestamp start, std::size_t n_hours, double base_rate,
                                           std::uint64_t seed);

/// The configuration shipped as data/ed_default.ini.
[[nodiscard]] ArrivalGenConfig default_config();

/**
 * Reads an INI config. Sections and keys:
 *   [generator] start, n_hours, base_rate, trend_pct_per_year, annual_amplitude, noise, seed
 *   [profile]   diurnal (24 comma-separated values), day_of_week (7 values, Monday first)
 * Missing keys take default_config() values; `noise` must be `poisson`.
 */
[[nodiscard]] ArrivalGenConfig read_config(std::istream& in);
[[nodiscard]] ArrivalGenConfig read_config_file(const std::filesystem::path& path);

/// Expected arrivals λ for hour index i.
[[nodiscard]] double arrival_rate(const ArrivalGenConfig& config, std::size_t i);

/// Poisson draws from arrival_rate(); deterministic per seed.
[[nodiscard]] Series generate_arrivals(const ArrivalGenConfig& config);

}  // namespace edcast::arrivals

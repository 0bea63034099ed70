#include "edcast/decomposition.hpp"

#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast::decomposition {

Decomposition classical_decompose(const Series& series, std::size_t period) {
    const std::size_t n = series.size();
    if (period < 2) {
        throw std::invalid_argument("decomposition period must be at least 2");
    }
    if (n < 2 * period) {
        throw std::invalid_argument(fmt::format(
            "series of length {} is shorter than two periods of {}", n, period));
    }
    const auto y = series.values();

    Decomposition d;
    d.period = period;
    d.observed.assign(y.begin(), y.end());
    d.trend.assign(n, std::nullopt);
    d.remainder.assign(n, std::nullopt);

    const std::size_t half = period / 2;
    const double inv = 1.0 / static_cast<double>(period);
    for (std::size_t t = half; t + half < n; ++t) {
        double acc = 0.0;
        if (period % 2 == 0) {
            acc = 0.5 * (y[t - half] + y[t + half]);
            for (std::size_t j = t - half + 1; j < t + half; ++j) acc += y[j];
        } else {
            for (std::size_t j = t - half; j <= t + half; ++j) acc += y[j];
        }
        d.trend[t] = acc * inv;
    }

    std::vector<double> phase_sum(period, 0.0);
    std::vector<std::size_t> phase_count(period, 0);
    for (std::size_t t = 0; t < n; ++t) {
        if (!d.trend[t]) continue;
        phase_sum[t % period] += y[t] - *d.trend[t];
        ++phase_count[t % period];
    }
    d.seasonal_pattern.resize(period);
    for (std::size_t j = 0; j < period; ++j) {
        d.seasonal_pattern[j] = phase_sum[j] / static_cast<double>(phase_count[j]);
    }
    const double centre =
        std::accumulate(d.seasonal_pattern.begin(), d.seasonal_pattern.end(), 0.0) * inv;
    for (auto& s : d.seasonal_pattern) s -= centre;

    d.seasonal.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        d.seasonal[t] = d.seasonal_pattern[t % period];
        if (d.trend[t]) d.remainder[t] = y[t] - *d.trend[t] - d.seasonal[t];
    }
    return d;
}

std::vector<double> mean_profile(const Series& series, std::size_t period) {
    if (period < 2 || period > series.size()) {
        throw std::invalid_argument(fmt::format(
            "profile period must be in [2, n] (got {} for n = {})", period, series.size()));
    }
    std::vector<double> sum(period, 0.0);
    std::vector<std::size_t> count(period, 0);
    for (std::size_t t = 0; t < series.size(); ++t) {
        sum[t % period] += series[t];
        ++count[t % period];
    }
    for (std::size_t j = 0; j < period; ++j) sum[j] /= static_cast<double>(count[j]);
    return sum;
}

double seasonal_strength(const Decomposition& d) {
    std::vector<double> rem;
    std::vector<double> sr;
    for (std::size_t t = 0; t < d.observed.size(); ++t) {
        if (!d.remainder[t]) continue;
        rem.push_back(*d.remainder[t]);
        sr.push_back(*d.remainder[t] + d.seasonal[t]);
    }
    auto var = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return s / static_cast<double>(v.size());
    };
    const double total = var(sr);
    if (!(total > 0.0)) return 0.0;
    return std::max(0.0, 1.0 - var(rem) / total);
}

Series aggregate(const Series& series, std::size_t block) {
    if (block == 0 || series.size() < block) {
        throw std::invalid_argument("aggregation block must be in [1, n]");
    }
    std::vector<double> out(series.size() / block, 0.0);
    for (std::size_t i = 0; i < out.size() * block; ++i) out[i / block] += series[i];
    return Series(series.start(), std::move(out), series.step() * static_cast<long long>(block),
                  series.label());
}

}  // namespace edcast::decomposition

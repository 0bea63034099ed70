#include "edcast/evaluation.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast::evaluation {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.empty()) throw std::invalid_argument("accuracy metrics need at least one value");
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument(fmt::format("length mismatch: {} actual vs {} predicted",
                                                actual.size(), predicted.size()));
    }
}

}  // namespace

double mean_error(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) sum += actual[i] - predicted[i];
    return sum / static_cast<double>(actual.size());
}

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

std::map<double, double> interval_coverage(std::span<const double> actual, const Forecast& forecast) {
    if (actual.size() != forecast.horizon()) {
        throw std::invalid_argument(fmt::format("length mismatch: {} actual vs horizon {}",
                                                actual.size(), forecast.horizon()));
    }
    std::map<double, double> out;
    if (actual.empty()) return out;
    for (std::size_t i = 0; i < forecast.levels.size(); ++i) {
        std::size_t hits = 0;
        for (std::size_t h = 0; h < actual.size(); ++h) {
            if (actual[h] >= forecast.lower[i][h] && actual[h] <= forecast.upper[i][h]) ++hits;
        }
        out[forecast.levels[i]] = static_cast<double>(hits) / static_cast<double>(actual.size());
    }
    return out;
}

EvalReport rolling_origin_backtest(const Series& series, const ModelSpec& model,
                                   std::size_t first_origin, std::size_t step, std::size_t h,
                                   std::span<const double> levels, std::string model_name) {
    if (step < 1) throw std::invalid_argument("backtest step must be at least 1");
    if (h < 1) throw std::invalid_argument("backtest horizon must be at least 1");
    if (first_origin < 1 || first_origin + h > series.size()) {
        throw std::invalid_argument(fmt::format(
            "no valid origin: first origin {} with horizon {} on {} observations", first_origin, h,
            series.size()));
    }
    const auto y = series.values();
    const auto wanted = normalize_levels(levels);
    EvalReport report;
    report.model_name = std::move(model_name);
    double sum_e = 0.0, sum_e2 = 0.0;
    std::map<double, std::size_t> hits;
    for (std::size_t o = first_origin; o + h <= series.size(); o += step) {
        const Forecast f = model(series.slice(0, o), h, wanted);
        if (f.horizon() != h) {
            throw std::runtime_error(fmt::format("model returned {} steps, expected {}", f.horizon(), h));
        }
        const auto actual = y.subspan(o, h);
        OriginScore score{o, mean_error(actual, f.points), rmse(actual, f.points)};
        report.per_origin.push_back(score);
        for (std::size_t k = 0; k < h; ++k) {
            const double e = actual[k] - f.points[k];
            sum_e += e;
            sum_e2 += e * e;
        }
        for (std::size_t i = 0; i < f.levels.size(); ++i) {
            auto& count = hits[f.levels[i]];
            for (std::size_t k = 0; k < h; ++k) {
                if (actual[k] >= f.lower[i][k] && actual[k] <= f.upper[i][k]) ++count;
            }
        }
        report.n_points += h;
    }
    const double n = static_cast<double>(report.n_points);
    report.me = sum_e / n;
    report.rmse = std::sqrt(sum_e2 / n);
    for (const auto& [level, count] : hits) report.coverage[level] = static_cast<double>(count) / n;
    return report;
}

}  // namespace edcast::evaluation

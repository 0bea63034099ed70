#include "edcast/holt_winters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast::holt_winters {

namespace {

struct State {
    double level;
    double trend;
    std::vector<double> seasonal;
};

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void check_input(std::span<const double> values, std::size_t period, Variant variant) {
    if (period < 2) {
        throw std::invalid_argument("Holt-Winters period must be at least 2");
    }
    if (values.size() < 2 * period) {
        throw std::invalid_argument(fmt::format(
            "Holt-Winters needs at least two periods ({} values), got {}", 2 * period, values.size()));
    }
    if (variant == Variant::multiplicative &&
        std::any_of(values.begin(), values.end(), [](double v) { return !(v > 0.0); })) {
        throw std::invalid_argument("multiplicative Holt-Winters requires strictly positive data");
    }
}

State initial_state(std::span<const double> y, std::size_t m, Variant variant,
                    const std::optional<std::vector<double>>& seasonal_override) {
    State s;
    const double first = mean_of(y.first(m));
    const double second = mean_of(y.subspan(m, m));
    s.level = first;
    s.trend = (second - first) / static_cast<double>(m);
    if (seasonal_override) {
        if (seasonal_override->size() != m) {
            throw std::invalid_argument("initial seasonal override must have one value per phase");
        }
        s.seasonal = *seasonal_override;
        return s;
    }
    s.seasonal.resize(m);
    if (variant == Variant::additive) {
        for (std::size_t k = 0; k < m; ++k) s.seasonal[k] = y[k] - first;
        const double c = mean_of(s.seasonal);
        for (auto& v : s.seasonal) v -= c;
    } else {
        for (std::size_t k = 0; k < m; ++k) s.seasonal[k] = y[k] / first;
        const double c = mean_of(s.seasonal);
        for (auto& v : s.seasonal) v /= c;
    }
    return s;
}

// Runs the recursions from t = m; returns the SSE and optionally the errors.
double run(std::span<const double> y, std::size_t m, Variant variant, const Params& p, State& s,
           std::vector<double>* errors) {
    double sse = 0.0;
    if (errors) errors->reserve(y.size() - m);
    for (std::size_t t = m; t < y.size(); ++t) {
        const std::size_t k = t % m;
        const double base = s.level + s.trend;
        double pred, level;
        if (variant == Variant::additive) {
            pred = base + s.seasonal[k];
            level = p.alpha * (y[t] - s.seasonal[k]) + (1.0 - p.alpha) * base;
        } else {
            pred = base * s.seasonal[k];
            level = p.alpha * (y[t] / s.seasonal[k]) + (1.0 - p.alpha) * base;
        }
        const double e = y[t] - pred;
        sse += e * e;
        if (errors) errors->push_back(e);
        s.trend = p.beta * (level - s.level) + (1.0 - p.beta) * s.trend;
        s.level = level;
        if (variant == Variant::additive) {
            s.seasonal[k] = p.gamma * (y[t] - level) + (1.0 - p.gamma) * s.seasonal[k];
        } else {
            s.seasonal[k] = p.gamma * (y[t] / level) + (1.0 - p.gamma) * s.seasonal[k];
        }
    }
    return sse;
}

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

Series HwModel::residual_series() const {
    return Series(start + step * static_cast<long long>(period), residuals, step, "residuals");
}

double hw_sse(std::span<const double> values, std::size_t period, Variant variant,
              const Params& params) {
    check_input(values, period, variant);
    State s = initial_state(values, period, variant, std::nullopt);
    return run(values, period, variant, params, s, nullptr);
}

HwModel hw_fit(const Series& series, std::size_t period, Variant variant, const FitOptions& options) {
    const auto y = series.values();
    check_input(y, period, variant);
    const State init = initial_state(y, period, variant, options.initial_seasonal);

    Params params;
    if (options.params) {
        params = *options.params;
        for (double w : {params.alpha, params.beta, params.gamma}) {
            if (!(w >= 0.0 && w <= 1.0)) {
                throw std::invalid_argument("smoothing weights must lie in [0, 1]");
            }
        }
    } else {
        auto objective = [&](std::span<const double> u) {
            State s = init;
            const Params trial{logistic(u[0]), logistic(u[1]), logistic(u[2])};
            return run(y, period, variant, trial, s, nullptr);
        };
        const Params start;
        auto res = numeric::minimize(objective, {logit(start.alpha), logit(start.beta), logit(start.gamma)},
                                     options.optim);
        params = Params{logistic(res.argmin[0]), logistic(res.argmin[1]), logistic(res.argmin[2])};
    }

    HwModel model;
    model.period = period;
    model.variant = variant;
    model.alpha = params.alpha;
    model.beta = params.beta;
    model.gamma = params.gamma;
    State s = init;
    model.sse = run(y, period, variant, params, s, &model.residuals);
    model.level = s.level;
    model.trend = s.trend;
    model.seasonal = std::move(s.seasonal);
    model.n = y.size();
    model.start = series.start();
    model.step = series.step();
    return model;
}

Forecast hw_forecast(const HwModel& model, std::size_t h, std::span<const double> levels) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    if (levels.empty()) throw std::invalid_argument("at least one confidence level is required");
    Forecast f;
    f.start = model.start + model.step * static_cast<long long>(model.n);
    f.step = model.step;
    f.points.resize(h);
    f.se.resize(h);
    const double sigma = model.residuals.empty()
                             ? 0.0
                             : std::sqrt(model.sse / static_cast<double>(model.residuals.size()));
    for (std::size_t k = 1; k <= h; ++k) {
        const double season = model.seasonal[(model.n + k - 1) % model.period];
        const double base = model.level + static_cast<double>(k) * model.trend;
        f.points[k - 1] = model.variant == Variant::additive ? base + season : base * season;
        f.se[k - 1] = sigma * std::sqrt(static_cast<double>(k));
    }
    fill_normal_intervals(f, levels);
    f.approximate = true;
    return f;
}

}  // namespace edcast::holt_winters

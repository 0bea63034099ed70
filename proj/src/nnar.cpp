#include "edcast/nnar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast::nnar {

namespace {

constexpr double kInitRange = 0.5;

Network random_network(std::size_t inputs, std::size_t hidden, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-kInitRange, kInitRange);
    Network net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.w1.resize(inputs * hidden);
    net.b1.resize(hidden);
    net.w2.resize(hidden);
    for (auto& w : net.w1) w = u(rng);
    for (auto& w : net.b1) w = u(rng);
    for (auto& w : net.w2) w = u(rng);
    net.b2 = u(rng);
    return net;
}

Network step_along(const Network& net, const Network& grad, double lr) {
    Network out = net;
    for (std::size_t i = 0; i < out.w1.size(); ++i) out.w1[i] -= lr * grad.w1[i];
    for (std::size_t i = 0; i < out.b1.size(); ++i) out.b1[i] -= lr * grad.b1[i];
    for (std::size_t i = 0; i < out.w2.size(); ++i) out.w2[i] -= lr * grad.w2[i];
    out.b2 -= lr * grad.b2;
    return out;
}

// Type-7 sample quantile of sorted data.
double quantile(const std::vector<double>& sorted, double prob) {
    const double pos = prob * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double Network::predict(std::span<const double> x) const {
    double out = b2;
    for (std::size_t j = 0; j < hidden; ++j) {
        double a = b1[j];
        for (std::size_t i = 0; i < inputs; ++i) a += w1[j * inputs + i] * x[i];
        out += w2[j] * std::tanh(a);
    }
    return out;
}

double mse_loss(const Network& net, std::span<const double> x, std::span<const double> y,
                Network* gradient) {
    const std::size_t rows = y.size();
    if (rows == 0 || x.size() != rows * net.inputs) {
        throw std::invalid_argument("mse_loss: input rows do not match targets");
    }
    if (gradient) {
        gradient->inputs = net.inputs;
        gradient->hidden = net.hidden;
        gradient->w1.assign(net.w1.size(), 0.0);
        gradient->b1.assign(net.b1.size(), 0.0);
        gradient->w2.assign(net.w2.size(), 0.0);
        gradient->b2 = 0.0;
    }
    const double scale = 1.0 / static_cast<double>(rows);
    std::vector<double> act(net.hidden);
    double loss = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.data() + r * net.inputs;
        double out = net.b2;
        for (std::size_t j = 0; j < net.hidden; ++j) {
            double a = net.b1[j];
            for (std::size_t i = 0; i < net.inputs; ++i) a += net.w1[j * net.inputs + i] * xr[i];
            act[j] = std::tanh(a);
            out += net.w2[j] * act[j];
        }
        const double err = out - y[r];
        loss += err * err;
        if (!gradient) continue;
        const double delta = 2.0 * err * scale;
        gradient->b2 += delta;
        for (std::size_t j = 0; j < net.hidden; ++j) {
            gradient->w2[j] += delta * act[j];
            const double dh = delta * net.w2[j] * (1.0 - act[j] * act[j]);
            gradient->b1[j] += dh;
            for (std::size_t i = 0; i < net.inputs; ++i) gradient->w1[j * net.inputs + i] += dh * xr[i];
        }
    }
    return loss * scale;
}

std::vector<std::size_t> NnarModel::lags() const {
    std::vector<std::size_t> out;
    for (int i = 1; i <= p; ++i) out.push_back(static_cast<std::size_t>(i));
    for (int k = 1; k <= P; ++k) out.push_back(static_cast<std::size_t>(k * s));
    return out;
}

std::size_t NnarModel::max_lag() const {
    return std::max(static_cast<std::size_t>(p), static_cast<std::size_t>(P * s));
}

double NnarModel::predict_at(std::span<const double> values, std::size_t t) const {
    const auto l = lags();
    std::vector<double> x(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) x[i] = scaling.scale(values[t - l[i]]);
    double sum = 0.0;
    for (const auto& net : ensemble) sum += net.predict(x);
    return scaling.unscale(sum / static_cast<double>(ensemble.size()));
}

Series NnarModel::residual_series() const {
    return Series(start + step * static_cast<long long>(max_lag()), residuals, step, "residuals");
}

NnarModel nnar_fit(const Series& series, const NnarOptions& options) {
    if (options.p < 0 || options.P < 0 || options.p + options.P < 1) {
        throw std::invalid_argument("NNAR needs p + P >= 1 with non-negative orders");
    }
    if (options.P > 0 && options.s < 2) {
        throw std::invalid_argument("seasonal lags require a period s >= 2");
    }
    if (options.restarts < 1 || options.max_epochs < 0 || !(options.learning_rate > 0.0)) {
        throw std::invalid_argument("NNAR restarts must be >= 1 and the learning rate positive");
    }
    NnarModel model;
    model.p = options.p;
    model.P = options.P;
    model.s = options.P > 0 ? options.s : 0;
    const int inputs = options.p + options.P;
    const int hidden = options.hidden.value_or((inputs + 2) / 2);
    if (hidden < 1) throw std::invalid_argument("NNAR needs at least one hidden unit");
    model.hidden = static_cast<std::size_t>(hidden);

    const auto y = series.values();
    const std::size_t lag = model.max_lag();
    if (y.size() <= lag + 10) {
        throw std::invalid_argument(fmt::format(
            "NNAR needs more than {} observations (max lag {} + 10), got {}", lag + 10, lag, y.size()));
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (!(*hi > *lo)) {
        throw std::domain_error("degenerate scaling: the series is constant");
    }
    model.scaling = Scaling{*lo, *hi};

    const auto l = model.lags();
    const std::size_t rows = y.size() - lag;
    std::vector<double> x(rows * l.size()), target(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = lag + r;
        target[r] = model.scaling.scale(y[t]);
        for (std::size_t i = 0; i < l.size(); ++i) x[r * l.size() + i] = model.scaling.scale(y[t - l[i]]);
    }

    std::mt19937_64 rng(options.seed);
    for (int k = 0; k < options.restarts; ++k) {
        Network net = random_network(l.size(), model.hidden, rng);
        Network grad;
        double loss = mse_loss(net, x, target, &grad);
        std::vector<double> trace{loss};
        double lr = options.learning_rate;
        for (int epoch = 0; epoch < options.max_epochs && lr > 1e-12; ++epoch) {
            Network trial = step_along(net, grad, lr);
            Network trial_grad;
            const double trial_loss = mse_loss(trial, x, target, &trial_grad);
            if (trial_loss < loss) {
                net = std::move(trial);
                grad = std::move(trial_grad);
                loss = trial_loss;
                trace.push_back(loss);
                lr *= 1.05;
            } else {
                lr *= 0.5;
            }
        }
        model.ensemble.push_back(std::move(net));
        model.loss_trace.push_back(std::move(trace));
    }

    model.residuals.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) model.residuals[r] = y[lag + r] - model.predict_at(y, lag + r);
    model.history.assign(y.begin(), y.end());
    model.start = series.start();
    model.step = series.step();
    model.seed = options.seed;
    return model;
}

Forecast nnar_forecast(const NnarModel& model, std::size_t h, std::span<const double> levels,
                       const NnarForecastOptions& options) {
    const Series history(model.start, model.history, model.step);
    return nnar_forecast(model, history, h, levels, options);
}

Forecast nnar_forecast(const NnarModel& model, const Series& history, std::size_t h,
                       std::span<const double> levels, const NnarForecastOptions& options) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    if (!levels.empty() && options.paths < 100) {
        throw std::invalid_argument("simulated intervals need at least 100 paths");
    }
    if (history.size() < model.max_lag()) {
        throw std::invalid_argument("history is shorter than the model's largest lag");
    }
    const std::size_t n = history.size();
    std::vector<double> values(history.values().begin(), history.values().end());
    values.resize(n + h);
    for (std::size_t k = 0; k < h; ++k) values[n + k] = model.predict_at(values, n + k);

    Forecast f;
    f.start = history.time_at(n);
    f.step = history.step();
    f.points.assign(values.begin() + static_cast<std::ptrdiff_t>(n), values.end());
    if (levels.empty()) return f;

    f.levels = normalize_levels(levels);
    f.approximate = true;
    std::mt19937_64 rng(options.seed);
    std::vector<std::vector<double>> draws(h, std::vector<double>(options.paths));
    std::vector<double> path(values.begin(), values.end());
    for (std::size_t j = 0; j < options.paths; ++j) {
        for (std::size_t k = 0; k < h; ++k) {
            double e = 0.0;
            if (!model.residuals.empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, model.residuals.size() - 1);
                e = model.residuals[pick(rng)];
            }
            path[n + k] = model.predict_at(path, n + k) + e;
            draws[k][j] = path[n + k];
        }
    }
    f.lower.assign(f.levels.size(), std::vector<double>(h));
    f.upper.assign(f.levels.size(), std::vector<double>(h));
    for (std::size_t k = 0; k < h; ++k) {
        std::sort(draws[k].begin(), draws[k].end());
        for (std::size_t i = 0; i < f.levels.size(); ++i) {
            const double tail = 0.5 * (1.0 - f.levels[i]);
            f.lower[i][k] = std::min(quantile(draws[k], tail), f.points[k]);
            f.upper[i][k] = std::max(quantile(draws[k], 1.0 - tail), f.points[k]);
        }
    }
    return f;
}

}  // namespace edcast::nnar

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "edcast/forecast.hpp"
#include "edcast/series.hpp"

namespace edcast::nnar {

/**
 * @brief Single-hidden-layer network: y = b2 + Σ_j w2[j] tanh(b1[j] + Σ_i w1[j][i] x_i).
 *
 * `w1` is row-major with one row of `inputs` weights per hidden unit.
 */
struct Network {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;

    [[nodiscard]] double predict(std::span<const double> x) const;
};

/**
 * Mean squared error of `net` over the rows of `x` (row-major, one row per
 * target). When `gradient` is non-null it receives dLoss/dWeights with the
 * same shape as `net`.
 */
double mse_loss(const Network& net, std::span<const double> x, std::span<const double> y,
                Network* gradient = nullptr);

/// Affine map of [min, max] onto [-1, 1].
struct Scaling {
    double min = 0.0;
    double max = 1.0;

    [[nodiscard]] double scale(double v) const { return 2.0 * (v - min) / (max - min) - 1.0; }
    [[nodiscard]] double unscale(double u) const { return min + 0.5 * (u + 1.0) * (max - min); }
};

struct NnarOptions {
    int p = 1;
    int P = 0;
    int s = 0;
    std::optional<int> hidden;  ///< default round((p + P + 1) / 2)
    int restarts = 20;
    int max_epochs = 2000;
    double learning_rate = 0.1;
    std::uint64_t seed = 42;
};

/**
 * @brief Ensemble of networks trained on lagged, min-max scaled values.
 *
 * Inputs are lags {1..p} and {s, 2s, ..., Ps}. The model output is the mean of
 * the ensemble members' outputs, mapped back to the data scale.
 */
struct NnarModel {
    int p = 0;
    int P = 0;
    int s = 0;
    std::size_t hidden = 0;
    std::vector<Network> ensemble;
    Scaling scaling;
    std::vector<double> residuals;  ///< in-sample one-step errors, data scale
    std::vector<double> history;    ///< training values
    Timestamp start{};
    Duration step = kHour;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> loss_trace;  ///< accepted-epoch losses per restart

    /// Lags in input order.
    [[nodiscard]] std::vector<std::size_t> lags() const;
    [[nodiscard]] std::size_t max_lag() const;
    /// One-step prediction for position `t` of `values` from values[t - lag].
    [[nodiscard]] double predict_at(std::span<const double> values, std::size_t t) const;
    [[nodiscard]] Series residual_series() const;
};

/**
 * Trains `restarts` networks by full-batch gradient descent on MSE. A step is
 * accepted only if it lowers the loss; the learning rate then grows by 5%,
 * otherwise it halves. Deterministic given the seed.
 *
 * @throws std::invalid_argument on bad orders or a series no longer than max lag + 10.
 * @throws std::domain_error when the series is constant (degenerate scaling).
 */
[[nodiscard]] NnarModel nnar_fit(const Series& series, const NnarOptions& options);

struct NnarForecastOptions {
    std::size_t paths = 1000;
    std::uint64_t seed = 42;
};

/**
 * Iterates the network, feeding predictions back as lags. With levels, draws
 * `paths` trajectories with bootstrap-resampled residuals and reports
 * empirical quantiles (widened to contain the point forecast).
 *
 * @throws std::invalid_argument if h < 1 or levels are requested with fewer than 100 paths.
 */
[[nodiscard]] Forecast nnar_forecast(const NnarModel& model, std::size_t h,
                                     std::span<const double> levels,
                                     const NnarForecastOptions& options = {});

/// Same as above, continuing `history` with the trained weights held fixed.
[[nodiscard]] Forecast nnar_forecast(const NnarModel& model, const Series& history, std::size_t h,
                                     std::span<const double> levels,
                                     const NnarForecastOptions& options = {});

}  // namespace edcast::nnar

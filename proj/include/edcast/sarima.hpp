#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edcast/forecast.hpp"
#include "edcast/numeric.hpp"
#include "edcast/series.hpp"

namespace edcast::sarima {

/**
 * @brief Seasonal ARIMA order (p,d,q)(P,D,Q)_s.
 *
 * s == 0 denotes a non-seasonal model and requires P == D == Q == 0.
 */
struct SarimaOrder {
    int p = 0, d = 0, q = 0;
    int P = 0, D = 0, Q = 0;
    int s = 0;

    void validate() const;
    [[nodiscard]] int arma_params() const noexcept { return p + q + P + Q; }
    [[nodiscard]] std::string to_string() const;
    bool operator==(const SarimaOrder&) const = default;
};

/// Parses "p,d,q,P,D,Q,s" (seven integers) or "p,d,q" (non-seasonal).
[[nodiscard]] SarimaOrder parse_order(std::string_view text);

/// Coefficients in the sign convention φ(B) = 1 - Σφ_i B^i, θ(B) = 1 + Σθ_i B^i.
struct SarimaCoefficients {
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<double> seasonal_ar;
    std::vector<double> seasonal_ma;
};

/// Expanded AR coefficients of (1 - Σφ_i B^i)(1 - ΣΦ_k B^{sk}), length p + sP.
[[nodiscard]] std::vector<double> expand_ar(std::span<const double> ar,
                                            std::span<const double> seasonal_ar, int s);
/// Expanded MA coefficients of (1 + Σθ_i B^i)(1 + ΣΘ_k B^{sk}), length q + sQ.
[[nodiscard]] std::vector<double> expand_ma(std::span<const double> ma,
                                            std::span<const double> seasonal_ma, int s);

/// Coefficients δ_j of (1-B)^d (1-B^s)^D = 1 - Σ δ_j B^j.
[[nodiscard]] std::vector<double> differencing_polynomial(int d, int D, int s);

enum class MeanMode { automatic, on, off };

struct FitOptions {
    MeanMode mean = MeanMode::automatic;
    numeric::OptimConfig optim{};
};

/**
 * @brief A fitted seasonal ARIMA model.
 *
 * `history` is the undifferenced training series; forecasts are produced by
 * re-filtering it with the fitted coefficients, so a fit restored from disk
 * forecasts identically.
 */
struct SarimaFit {
    SarimaOrder order;
    std::vector<double> ar;
    std::vector<double> ma;
    std::vector<double> seasonal_ar;
    std::vector<double> seasonal_ma;
    std::optional<double> mean;
    double sigma2 = 0.0;
    double loglik = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    std::vector<double> residuals;  ///< standardized innovations on the data scale
    std::size_t n_effective = 0;
    bool converged = true;
    int iterations = 0;
    double initial_loglik = 0.0;  ///< log-likelihood at the Hannan-Rissanen start
    Series history;

    /// Number of estimated parameters: ARMA terms, mean if present, and σ².
    [[nodiscard]] int num_params() const noexcept {
        return order.arma_params() + (mean ? 1 : 0) + 1;
    }
    /// Residuals as a series aligned with the differenced training data.
    [[nodiscard]] Series residual_series() const;
};

/// (aic, bic) = (-2 loglik + 2k, -2 loglik + k ln n).
[[nodiscard]] std::pair<double, double> information_criteria(double loglik, int k, std::size_t n);

/**
 * Simulates Gaussian-innovation SARIMA draws: the expanded ARMA is run for
 * `burn_in + n` steps, then integrated d times and D times at lag s.
 * `mean` is the mean of the differenced (stationary) process.
 */
[[nodiscard]] Series simulate(const SarimaOrder& order, const SarimaCoefficients& coefficients,
                              double mean, double sigma2, std::size_t n, std::size_t burn_in,
                              std::uint64_t seed, Timestamp start = Timestamp{},
                              Duration step = kHour);

/**
 * @brief Exact maximum-likelihood fit.
 *
 * Differences the series, then maximizes the Kalman-filter likelihood of the
 * expanded ARMA with σ² (and the mean, when present) concentrated out. Each
 * of the four polynomials is parametrized through partial autocorrelations,
 * so every iterate is stationary and invertible. Starting values come from
 * Hannan-Rissanen regression.
 */
[[nodiscard]] SarimaFit fit(const Series& series, const SarimaOrder& order,
                            const FitOptions& options = {});

enum class Criterion { aic, bic };
enum class Strategy { stepwise, full_grid };

struct SelectBounds {
    int max_p = 5, max_q = 5;
    int max_P = 2, max_Q = 2;
    int max_d = 2, max_D = 1;
};

struct CandidateScore {
    SarimaOrder order;
    double score = 0.0;
    bool ok = false;
};

struct SelectOptions {
    int s = 0;
    SelectBounds bounds{};
    Criterion criterion = Criterion::aic;
    Strategy strategy = Strategy::stepwise;
    FitOptions fit{};
    std::optional<int> fixed_d;
    std::optional<int> fixed_D;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    std::function<void(std::string_view)> log;
    std::vector<CandidateScore>* trace = nullptr;
};

/**
 * Chooses D by seasonal strength (D = 1 iff F_s >= 0.64), d by repeated KPSS
 * tests on the seasonally differenced series, then searches (p, q, P, Q) by
 * the information criterion. Non-convergent candidates are skipped.
 *
 * @throws std::runtime_error when no candidate converges.
 */
[[nodiscard]] SarimaFit auto_select(const Series& series, const SelectOptions& options);

/// Forecasts from the fit's own training history.
[[nodiscard]] Forecast forecast(const SarimaFit& fit, std::size_t h,
                                std::span<const double> levels);

/// Forecasts after `history` with the fitted coefficients held fixed (no re-estimation).
[[nodiscard]] Forecast forecast(const SarimaFit& fit, const Series& history, std::size_t h,
                                std::span<const double> levels);

}  // namespace edcast::sarima

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace edcast::state_space {

// ARMA conventions used throughout:
//   (1 - ar[0] B - ... - ar[p-1] B^p) x_t = (1 + ma[0] B + ... + ma[q-1] B^q) e_t
// and the state vector follows Harvey's form with dimension r = max(p, q + 1).

/// ψ_0..ψ_{count-1} of the MA(∞) representation.
[[nodiscard]] std::vector<double> psi_weights(std::span<const double> ar,
                                              std::span<const double> ma, std::size_t count);

/// Autocovariances γ(0..max_lag) for unit innovation variance.
[[nodiscard]] std::vector<double> arma_autocovariance(std::span<const double> ar,
                                                      std::span<const double> ma,
                                                      std::size_t max_lag);

/// Stationary state covariance P0 solving P = T P T' + R R' (unit innovation variance).
[[nodiscard]] Eigen::MatrixXd stationary_covariance(std::span<const double> ar,
                                                    std::span<const double> ma);

enum class MeanHandling { zero, fixed, estimate };

struct FilterResult {
    double ssq = 0.0;        ///< Σ v_t² / F_t after mean removal
    double sum_log_f = 0.0;  ///< Σ ln F_t
    double mean = 0.0;       ///< fixed or GLS-estimated mean
    std::size_t n = 0;
    std::vector<double> standardized;  ///< v_t / √F_t (only when requested)
    std::vector<double> next_state;    ///< predicted state a_{n+1} of the demeaned process

    [[nodiscard]] double sigma2() const { return ssq / static_cast<double>(n); }
    /// Exact Gaussian log-likelihood with σ² concentrated out.
    [[nodiscard]] double loglik() const;
};

/**
 * @brief Exact-likelihood Kalman filter for a stationary ARMA process.
 *
 * The filter is run with unit innovation variance and initialized at the
 * stationary state covariance. Once the predicted covariance reaches its
 * steady state (R R') the recursion drops to O(r) per step.
 *
 * With MeanHandling::estimate the mean is concentrated out by GLS: the
 * constant regressor is filtered alongside the data with shared gains.
 *
 * @throws std::domain_error when a prediction variance collapses to zero.
 */
[[nodiscard]] FilterResult kalman_filter(std::span<const double> w, std::span<const double> ar,
                                         std::span<const double> ma, MeanHandling mean_handling,
                                         double fixed_mean = 0.0, bool keep_residuals = false);

/// Maps partial autocorrelations in (-1, 1) to coefficients of a stationary AR polynomial.
[[nodiscard]] std::vector<double> pacf_to_ar(std::span<const double> pacf);

/// Inverse of pacf_to_ar; std::nullopt when the polynomial is not stationary.
[[nodiscard]] std::optional<std::vector<double>> ar_to_pacf(std::span<const double> ar);

/// True when 1 - Σ ar_j z^j has every root strictly outside the unit circle.
[[nodiscard]] bool is_stationary(std::span<const double> ar);

}  // namespace edcast::state_space

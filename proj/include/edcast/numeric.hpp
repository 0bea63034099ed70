#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace edcast::numeric {

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
[[nodiscard]] double ln_gamma(double x);

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
[[nodiscard]] double gamma_q(double a, double x);

/// Upper-tail probability of a chi-square variate with `df` degrees of freedom.
[[nodiscard]] double chi_square_sf(double x, int df);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double z);

/// Inverse of the standard normal CDF on (0, 1).
[[nodiscard]] double normal_quantile(double p);

struct OptimConfig {
    double x_tolerance = 1e-8;
    double f_tolerance = 1e-8;
    int max_iterations = 5000;
    double initial_step = 0.1;
};

struct OptimResult {
    std::vector<double> argmin;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/**
 * @brief Nelder-Mead simplex minimization.
 *
 * Converges when the objective spread across the simplex falls below
 * f_tolerance * (|f_best| + f_tolerance) and the simplex centroid is no
 * better than the best vertex, or when the simplex diameter (max coordinate
 * distance from the best vertex) falls below x_tolerance. Non-finite
 * objective values are treated as +inf. The objective is never called
 * concurrently.
 *
 * @throws std::invalid_argument if the objective is not finite at `start`.
 */
[[nodiscard]] OptimResult minimize(const Objective& objective, std::vector<double> start,
                                   const OptimConfig& config = {});

}  // namespace edcast::numeric

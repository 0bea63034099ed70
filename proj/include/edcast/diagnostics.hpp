#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edcast/series.hpp"

namespace edcast::diagnostics {

/**
 * @brief Outcome of one hypothesis test.
 *
 * `reject_null` is always exactly `p_value < alpha`. When the p-value comes
 * from a bounded critical-value table (ADF, KPSS) it is clamped to the table
 * range and `p_clamped` is set.
 */
struct TestResult {
    std::string test_name;
    double statistic = 0.0;
    double p_value = 1.0;
    bool p_clamped = false;
    int df_or_bandwidth = 0;  ///< chi-square df, ADF lag order or KPSS bandwidth
    double alpha = 0.05;
    bool reject_null = false;
    std::string inference;
};

struct CorrelogramResult {
    std::vector<double> coefficients;  ///< coefficients[k-1] is lag k
    double band = 0.0;                 ///< ±1.96/√n
    std::size_t n = 0;
};

/// Sample autocorrelations r_1..r_max_lag with the divisor-n convention.
[[nodiscard]] CorrelogramResult acf(std::span<const double> values, std::size_t max_lag);
[[nodiscard]] inline CorrelogramResult acf(const Series& s, std::size_t max_lag) {
    return acf(s.values(), max_lag);
}

/// Partial autocorrelations φ_kk via Durbin-Levinson on the sample acf.
[[nodiscard]] CorrelogramResult pacf(std::span<const double> values, std::size_t max_lag);
[[nodiscard]] inline CorrelogramResult pacf(const Series& s, std::size_t max_lag) {
    return pacf(s.values(), max_lag);
}

/// Durbin-Levinson recursion: PACF from autocorrelations rho[0..K-1] = r_1..r_K.
[[nodiscard]] std::vector<double> durbin_levinson(std::span<const double> rho);

/**
 * Ljung-Box portmanteau test on the first `h` residual autocorrelations.
 * Degrees of freedom are h - fitted_params.
 */
[[nodiscard]] TestResult ljung_box(std::span<const double> residuals, std::size_t h,
                                   std::size_t fitted_params = 0, double alpha = 0.05);

/// Jarque-Bera normality test (moments with divisor n, chi-square(2) p-value).
[[nodiscard]] TestResult jarque_bera(std::span<const double> residuals, double alpha = 0.05);

/// Anderson-Darling normality test with estimated mean and variance.
[[nodiscard]] TestResult anderson_darling(std::span<const double> residuals, double alpha = 0.05);

enum class AdfTrend { constant, constant_and_trend };

/**
 * Augmented Dickey-Fuller test. Null: unit root.
 *
 * Default lag order is floor((n-1)^(1/3)). The p-value is interpolated in
 * the Dickey-Fuller tau table and clamped to [0.01, 0.99].
 */
[[nodiscard]] TestResult adf_test(std::span<const double> values,
                                  std::optional<std::size_t> lag_order = std::nullopt,
                                  AdfTrend trend = AdfTrend::constant_and_trend,
                                  double alpha = 0.05);

/**
 * KPSS level-stationarity test. Null: stationarity.
 *
 * Bartlett-kernel long-run variance with default bandwidth
 * floor(4 (n/100)^(1/4)); p-value clamped to [0.01, 0.10].
 */
[[nodiscard]] TestResult kpss_test(std::span<const double> values,
                                   std::optional<std::size_t> bandwidth = std::nullopt,
                                   double alpha = 0.05);

/// Default Ljung-Box lag: 2s for seasonal series, min(10, n/5) otherwise.
[[nodiscard]] std::size_t default_ljung_box_lag(std::size_t n, std::size_t period);

}  // namespace edcast::diagnostics

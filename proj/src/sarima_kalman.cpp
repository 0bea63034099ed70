#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "edcast/state_space.hpp"

namespace edcast::state_space {

namespace {

// Steady-state switch: max |P_pred - R R'| below this freezes the gain.
constexpr double kSteadyTolerance = 1e-12;

}  // namespace

std::vector<double> psi_weights(std::span<const double> ar, std::span<const double> ma,
                                std::size_t count) {
    std::vector<double> psi(count, 0.0);
    if (count == 0) return psi;
    psi[0] = 1.0;
    for (std::size_t j = 1; j < count; ++j) {
        double v = j <= ma.size() ? ma[j - 1] : 0.0;
        const std::size_t top = std::min(j, ar.size());
        for (std::size_t i = 1; i <= top; ++i) v += ar[i - 1] * psi[j - i];
        psi[j] = v;
    }
    return psi;
}

std::vector<double> arma_autocovariance(std::span<const double> ar, std::span<const double> ma,
                                        std::size_t max_lag) {
    const std::size_t p = ar.size();
    const std::size_t q = ma.size();
    const auto psi = psi_weights(ar, ma, q + 1);
    auto theta = [&](std::size_t j) { return j == 0 ? 1.0 : (j <= q ? ma[j - 1] : 0.0); };
    // rhs_k = Σ_{j=k..q} θ_j ψ_{j-k}
    auto rhs = [&](std::size_t k) {
        double v = 0.0;
        for (std::size_t j = k; j <= q; ++j) v += theta(j) * psi[j - k];
        return v;
    };

    std::vector<double> gamma(std::max(max_lag, p) + 1, 0.0);
    if (p == 0) {
        for (std::size_t k = 0; k < gamma.size(); ++k) gamma[k] = rhs(k);
    } else {
        Eigen::MatrixXd A = Eigen::MatrixXd::Identity(p + 1, p + 1);
        Eigen::VectorXd b(p + 1);
        for (std::size_t k = 0; k <= p; ++k) {
            for (std::size_t j = 1; j <= p; ++j) {
                const std::size_t lag = k > j ? k - j : j - k;
                A(k, lag) -= ar[j - 1];
            }
            b(k) = rhs(k);
        }
        const Eigen::VectorXd g = A.partialPivLu().solve(b);
        for (std::size_t k = 0; k <= p; ++k) gamma[k] = g(k);
        for (std::size_t k = p + 1; k < gamma.size(); ++k) {
            double v = rhs(k);
            for (std::size_t j = 1; j <= p; ++j) v += ar[j - 1] * gamma[k - j];
            gamma[k] = v;
        }
    }
    gamma.resize(max_lag + 1);
    return gamma;
}

Eigen::MatrixXd stationary_covariance(std::span<const double> ar, std::span<const double> ma) {
    const std::size_t p = ar.size();
    const std::size_t q = ma.size();
    const std::size_t r = std::max(p, q + 1);
    const auto gamma = arma_autocovariance(ar, ma, r);
    const auto psi = psi_weights(ar, ma, r + 1);
    auto phi = [&](std::size_t j) { return (j >= 1 && j <= p) ? ar[j - 1] : 0.0; };
    auto theta = [&](std::size_t j) { return j == 0 ? 1.0 : (j <= q ? ma[j - 1] : 0.0); };

    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(r, r);
    // First row: Cov(y_t, α_m) with α_m = Σ_{k≥m} φ_{k+1} y_{t+m-1-k} + θ_k e_{t+m-k}.
    for (std::size_t m = 0; m < r; ++m) {
        double v = 0.0;
        for (std::size_t k = m; k < r; ++k) {
            v += phi(k + 1) * gamma[k + 1 - m] + theta(k) * psi[k - m];
        }
        P(0, m) = v;
        P(m, 0) = v;
    }
    // Remaining entries from P = T P T' + R R', filled from the bottom-right corner.
    auto at = [&](std::size_t i, std::size_t j) { return (i < r && j < r) ? P(i, j) : 0.0; };
    for (std::size_t i = r - 1; i >= 1; --i) {
        for (std::size_t j = r - 1; j >= i; --j) {
            const double v = phi(i + 1) * phi(j + 1) * P(0, 0) + phi(i + 1) * at(0, j + 1) +
                             phi(j + 1) * at(i + 1, 0) + at(i + 1, j + 1) + theta(i) * theta(j);
            P(i, j) = v;
            P(j, i) = v;
        }
    }
    return P;
}

double FilterResult::loglik() const {
    const double nd = static_cast<double>(n);
    return -0.5 * (nd * std::log(2.0 * std::numbers::pi * sigma2()) + sum_log_f + nd);
}

FilterResult kalman_filter(std::span<const double> w, std::span<const double> ar,
                           std::span<const double> ma, MeanHandling mean_handling,
                           double fixed_mean, bool keep_residuals) {
    const std::size_t n = w.size();
    const std::size_t p = ar.size();
    const std::size_t q = ma.size();
    const std::size_t r = std::max(p, q + 1);
    if (n == 0) {
        throw std::invalid_argument("kalman_filter requires at least one observation");
    }

    std::vector<double> phi(r, 0.0);
    std::copy(ar.begin(), ar.end(), phi.begin());
    std::vector<double> R(r, 0.0);
    R[0] = 1.0;
    for (std::size_t j = 0; j < q; ++j) R[j + 1] = ma[j];

    // Work on data shifted by a reference level; GLS then only estimates a small correction.
    double shift = 0.0;
    if (mean_handling == MeanHandling::fixed) {
        shift = fixed_mean;
    } else if (mean_handling == MeanHandling::estimate) {
        for (double v : w) shift += v;
        shift /= static_cast<double>(n);
    }
    const bool estimate = mean_handling == MeanHandling::estimate;

    const Eigen::MatrixXd P0 = stationary_covariance(ar, ma);
    std::vector<double> P(r * r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) P[i * r + j] = P0(i, j);
    }

    std::vector<double> a(r, 0.0), a1(r, 0.0), m(r, 0.0);
    std::vector<double> v_data, v_ones, f_store;
    if (keep_residuals) {
        v_data.reserve(n);
        f_store.reserve(n);
        if (estimate) v_ones.reserve(n);
    }

    double svv = 0.0, sv1 = 0.0, s11 = 0.0, sum_log_f = 0.0;
    bool steady = false;
    for (std::size_t t = 0; t < n; ++t) {
        double F = 1.0;
        if (steady) {
            std::copy(R.begin(), R.end(), m.begin());
        } else {
            for (std::size_t i = 0; i < r; ++i) m[i] = P[i * r];
            F = m[0];
            if (!(F > 0.0) || !std::isfinite(F)) {
                throw std::domain_error("Kalman prediction variance is not positive");
            }
        }
        const double obs = w[t] - shift;
        const double v = obs - a[0];
        const double v1 = estimate ? 1.0 - a1[0] : 0.0;
        svv += v * v / F;
        if (estimate) {
            sv1 += v * v1 / F;
            s11 += v1 * v1 / F;
        }
        sum_log_f += std::log(F);
        if (keep_residuals) {
            v_data.push_back(v);
            f_store.push_back(F);
            if (estimate) v_ones.push_back(v1);
        }

        // a_{t+1} = T (a + m v / F); the first updated component equals the observation.
        const double gv = v / F;
        const double first = a[0] + m[0] * gv;
        for (std::size_t i = 0; i + 1 < r; ++i) a[i] = phi[i] * first + a[i + 1] + m[i + 1] * gv;
        a[r - 1] = phi[r - 1] * first;
        if (estimate) {
            const double g1 = v1 / F;
            const double first1 = a1[0] + m[0] * g1;
            for (std::size_t i = 0; i + 1 < r; ++i) {
                a1[i] = phi[i] * first1 + a1[i + 1] + m[i + 1] * g1;
            }
            a1[r - 1] = phi[r - 1] * first1;
        }

        if (!steady) {
            // P_{t+1}[i][j] = P[i+1][j+1] - m[i+1] m[j+1] / F + R_i R_j (updated row 0 is zero).
            double dev = 0.0;
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = i; j < r; ++j) {
                    double shifted = 0.0;
                    if (i + 1 < r && j + 1 < r) {
                        shifted = P[(i + 1) * r + (j + 1)] - m[i + 1] * m[j + 1] / F;
                    }
                    dev = std::max(dev, std::abs(shifted));
                    const double val = shifted + R[i] * R[j];
                    P[i * r + j] = val;
                }
            }
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < i; ++j) P[i * r + j] = P[j * r + i];
            }
            steady = dev < kSteadyTolerance;
        }
    }

    FilterResult out;
    out.n = n;
    out.sum_log_f = sum_log_f;
    double correction = 0.0;
    if (estimate) {
        correction = sv1 / s11;
        out.ssq = std::max(svv - correction * sv1, 0.0);
        for (std::size_t i = 0; i < r; ++i) a[i] -= correction * a1[i];
    } else {
        out.ssq = svv;
    }
    out.mean = shift + correction;
    out.next_state = std::move(a);
    if (keep_residuals) {
        out.standardized.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            const double v = estimate ? v_data[t] - correction * v_ones[t] : v_data[t];
            out.standardized[t] = v / std::sqrt(f_store[t]);
        }
    }
    return out;
}

std::vector<double> pacf_to_ar(std::span<const double> pacf) {
    std::vector<double> phi(pacf.size(), 0.0);
    std::vector<double> prev(pacf.size(), 0.0);
    for (std::size_t k = 0; k < pacf.size(); ++k) {
        phi[k] = pacf[k];
        for (std::size_t j = 0; j < k; ++j) phi[j] = prev[j] - pacf[k] * prev[k - 1 - j];
        std::copy(phi.begin(), phi.begin() + static_cast<std::ptrdiff_t>(k + 1), prev.begin());
    }
    return phi;
}

std::optional<std::vector<double>> ar_to_pacf(std::span<const double> ar) {
    std::vector<double> a(ar.begin(), ar.end());
    std::vector<double> pacf(a.size(), 0.0);
    for (std::size_t k = a.size(); k-- > 0;) {
        const double rk = a[k];
        if (!(std::abs(rk) < 1.0)) return std::nullopt;
        pacf[k] = rk;
        const double denom = 1.0 - rk * rk;
        std::vector<double> next(k);
        for (std::size_t j = 0; j < k; ++j) next[j] = (a[j] + rk * a[k - 1 - j]) / denom;
        std::copy(next.begin(), next.end(), a.begin());
    }
    return pacf;
}

bool is_stationary(std::span<const double> ar) { return ar_to_pacf(ar).has_value(); }

}  // namespace edcast::state_space

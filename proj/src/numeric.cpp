#include "edcast/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace edcast::numeric {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Lanczos coefficients for g = 7, n = 9.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - ln_gamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_continued_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - ln_gamma(a)) * h;
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::invalid_argument(fmt::format("ln_gamma requires x > 0 (got {})", x));
    }
    if (x < 0.5) {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return ln_gamma(x + 1.0) - std::log(x);
    }
    const double z = x - 1.0;
    double sum = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) {
        sum += kLanczos[i] / (z + static_cast<double>(i));
    }
    const double t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw std::invalid_argument("gamma_q requires a > 0 and x >= 0");
    }
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double x, int df) {
    if (df < 1) {
        throw std::invalid_argument(fmt::format("chi-square df must be >= 1 (got {})", df));
    }
    if (x < 0.0 || std::isnan(x)) {
        throw std::invalid_argument(fmt::format("chi-square statistic must be >= 0 (got {})", x));
    }
    return std::clamp(gamma_q(0.5 * df, 0.5 * x), 0.0, 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument(fmt::format("normal_quantile requires 0 < p < 1 (got {})", p));
    }
    // Acklam's rational approximation, then one Halley step against erfc.
    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x = 0.0;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Halley step; the residual is formed in whichever tail keeps it well conditioned.
    const double e = (x <= 0.0) ? normal_cdf(x) - p : (1.0 - p) - normal_cdf(-x);
    const double u = e * std::sqrt(2.0 * kPi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

OptimResult minimize(const Objective& objective, std::vector<double> start,
                     const OptimConfig& config) {
    const std::size_t dim = start.size();
    auto eval = [&](std::span<const double> x) {
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    const double f0 = objective(start);
    if (!std::isfinite(f0)) {
        throw std::invalid_argument("objective is not finite at the starting point");
    }
    if (dim == 0) {
        return OptimResult{std::move(start), f0, 0, true};
    }

    std::vector<std::vector<double>> simplex(dim + 1, start);
    std::vector<double> values(dim + 1, f0);
    for (std::size_t i = 0; i < dim; ++i) {
        const double h = start[i] != 0.0 ? config.initial_step * std::max(1.0, std::abs(start[i]))
                                         : config.initial_step;
        simplex[i + 1][i] += h;
        values[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim);
    std::vector<double> trial(dim);
    std::vector<double> trial2(dim);

    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    };

    OptimResult result;
    int iter = 0;
    bool converged = false;
    sort_simplex();
    while (true) {
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[dim - 1];

        double diameter = 0.0;
        for (std::size_t v = 0; v <= dim; ++v) {
            for (std::size_t i = 0; i < dim; ++i) {
                diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
            }
        }
        const double spread = values[worst] - values[best];
        const double f_tol = config.f_tolerance * (std::abs(values[best]) + config.f_tolerance);
        if (diameter < config.x_tolerance) {
            converged = true;
            break;
        }
        if (iter >= config.max_iterations) break;
        if (spread <= f_tol) {
            // A flat simplex can straddle a minimum; accept only if its centroid is no better.
            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (const auto& v : simplex) {
                for (std::size_t i = 0; i < dim; ++i) centroid[i] += v[i];
            }
            for (auto& c : centroid) c /= static_cast<double>(dim + 1);
            const double f_centre = eval(centroid);
            if (!(f_centre < values[best] - f_tol)) {
                converged = true;
                break;
            }
            ++iter;
            simplex[worst] = centroid;
            values[worst] = f_centre;
            sort_simplex();
            continue;
        }
        ++iter;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t v = 0; v <= dim; ++v) {
            if (v == worst) continue;
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[v][i];
        }
        for (auto& c : centroid) c /= static_cast<double>(dim);

        for (std::size_t i = 0; i < dim; ++i) {
            trial[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
        }
        const double f_reflect = eval(trial);

        if (f_reflect < values[best]) {
            for (std::size_t i = 0; i < dim; ++i) {
                trial2[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
            }
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                values[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                values[worst] = f_reflect;
            }
        } else if (f_reflect < values[second_worst]) {
            simplex[worst] = trial;
            values[worst] = f_reflect;
        } else {
            const bool outside = f_reflect < values[worst];
            for (std::size_t i = 0; i < dim; ++i) {
                trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                                    : centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
            }
            const double f_contract = eval(trial2);
            if (f_contract < std::min(f_reflect, values[worst])) {
                simplex[worst] = trial2;
                values[worst] = f_contract;
            } else {
                // shrink toward the best vertex
                for (std::size_t v = 0; v <= dim; ++v) {
                    if (v == best) continue;
                    for (std::size_t i = 0; i < dim; ++i) {
                        simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
                    }
                    values[v] = eval(simplex[v]);
                }
            }
        }
        sort_simplex();
    }

    result.argmin = simplex[order.front()];
    result.objective = values[order.front()];
    result.iterations = iter;
    result.converged = converged && std::isfinite(result.objective);
    return result;
}

}  // namespace edcast::numeric

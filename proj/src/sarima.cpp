#include "edcast/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "edcast/decomposition.hpp"
#include "edcast/diagnostics.hpp"
#include "edcast/state_space.hpp"

namespace edcast::sarima {

namespace ss = state_space;

namespace {

constexpr double kPacfStartLimit = 0.95;

std::vector<double> poly_multiply(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

// Full polynomial 1 + sign * Σ c_j B^{lag*j}.
std::vector<double> lag_polynomial(std::span<const double> c, int lag, double sign) {
    std::vector<double> out(c.size() * static_cast<std::size_t>(lag) + 1, 0.0);
    out[0] = 1.0;
    for (std::size_t j = 0; j < c.size(); ++j) out[(j + 1) * static_cast<std::size_t>(lag)] = sign * c[j];
    return out;
}

std::vector<double> apply_differencing(std::span<const double> y, const SarimaOrder& o) {
    std::vector<double> w(y.begin(), y.end());
    if (o.d > 0) w = difference(w, 1, static_cast<std::size_t>(o.d));
    if (o.D > 0) w = difference(w, static_cast<std::size_t>(o.s), static_cast<std::size_t>(o.D));
    return w;
}

bool use_mean(const SarimaOrder& o, MeanMode mode) {
    switch (mode) {
        case MeanMode::on: return true;
        case MeanMode::off: return false;
        case MeanMode::automatic: return o.d + o.D == 0;
    }
    return false;
}

// Least squares with a rank check; std::nullopt when the design is deficient.
std::optional<Eigen::VectorXd> ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() <= X.cols()) return std::nullopt;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) return std::nullopt;
    return Eigen::VectorXd(qr.solve(y));
}

// Hannan-Rissanen: long AR for innovations, then one regression on lagged values and
// lagged innovations. Seasonal lags enter additively (cross terms are ignored).
SarimaCoefficients hannan_rissanen(std::span<const double> w, const SarimaOrder& o) {
    SarimaCoefficients c;
    c.ar.assign(static_cast<std::size_t>(o.p), 0.0);
    c.ma.assign(static_cast<std::size_t>(o.q), 0.0);
    c.seasonal_ar.assign(static_cast<std::size_t>(o.P), 0.0);
    c.seasonal_ma.assign(static_cast<std::size_t>(o.Q), 0.0);
    if (o.arma_params() == 0) return c;

    const std::size_t n = w.size();
    const std::size_t s = static_cast<std::size_t>(o.s);
    const std::size_t p_exp = static_cast<std::size_t>(o.p) + s * static_cast<std::size_t>(o.P);
    const std::size_t q_exp = static_cast<std::size_t>(o.q) + s * static_cast<std::size_t>(o.Q);

    std::vector<double> innov(n, 0.0);
    std::size_t first_innov = 0;
    if (q_exp > 0) {
        std::size_t m = std::max<std::size_t>(
            p_exp + q_exp, static_cast<std::size_t>(std::ceil(10.0 * std::log10(double(n)))));
        m = std::min(m, n / 3);
        if (m < 1) return c;
        Eigen::MatrixXd X(n - m, m);
        Eigen::VectorXd y(n - m);
        for (std::size_t t = m; t < n; ++t) {
            y(t - m) = w[t];
            for (std::size_t j = 1; j <= m; ++j) X(t - m, j - 1) = w[t - j];
        }
        const auto beta = ols(X, y);
        if (!beta) return c;
        const Eigen::VectorXd e = y - X * *beta;
        for (std::size_t t = m; t < n; ++t) innov[t] = e(t - m);
        first_innov = m;
    }

    std::vector<std::size_t> ar_lags, ma_lags;
    for (int i = 1; i <= o.p; ++i) ar_lags.push_back(static_cast<std::size_t>(i));
    for (int k = 1; k <= o.P; ++k) ar_lags.push_back(s * static_cast<std::size_t>(k));
    for (int j = 1; j <= o.q; ++j) ma_lags.push_back(static_cast<std::size_t>(j));
    for (int k = 1; k <= o.Q; ++k) ma_lags.push_back(s * static_cast<std::size_t>(k));
    const std::size_t max_ar = ar_lags.empty() ? 0 : *std::max_element(ar_lags.begin(), ar_lags.end());
    const std::size_t max_ma = ma_lags.empty() ? 0 : *std::max_element(ma_lags.begin(), ma_lags.end());
    const std::size_t t0 = std::max(max_ar, first_innov + max_ma);
    if (t0 >= n) return c;

    const std::size_t rows = n - t0;
    const std::size_t cols = ar_lags.size() + ma_lags.size();
    Eigen::MatrixXd X(rows, cols);
    Eigen::VectorXd y(rows);
    for (std::size_t t = t0; t < n; ++t) {
        y(t - t0) = w[t];
        std::size_t col = 0;
        for (auto lag : ar_lags) X(t - t0, col++) = w[t - lag];
        for (auto lag : ma_lags) X(t - t0, col++) = innov[t - lag];
    }
    const auto beta = ols(X, y);
    if (!beta) return c;
    std::size_t col = 0;
    for (auto& v : c.ar) v = (*beta)(col++);
    for (auto& v : c.seasonal_ar) v = (*beta)(col++);
    for (auto& v : c.ma) v = (*beta)(col++);
    for (auto& v : c.seasonal_ma) v = (*beta)(col++);
    return c;
}

// Unconstrained parameters for one polynomial: atanh of its partial autocorrelations.
void append_unconstrained(std::vector<double>& u, std::span<const double> coefs, bool is_ma) {
    std::vector<double> ar(coefs.begin(), coefs.end());
    if (is_ma) {
        for (auto& v : ar) v = -v;
    }
    auto pacf = ss::ar_to_pacf(ar);
    if (!pacf) pacf = std::vector<double>(ar.size(), 0.0);
    for (double r : *pacf) {
        u.push_back(std::atanh(std::clamp(r, -kPacfStartLimit, kPacfStartLimit)));
    }
}

std::vector<double> constrained(std::span<const double> u, bool is_ma) {
    std::vector<double> pacf(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) pacf[i] = std::tanh(u[i]);
    auto coefs = ss::pacf_to_ar(pacf);
    if (is_ma) {
        for (auto& v : coefs) v = -v;
    }
    return coefs;
}

SarimaCoefficients unpack(std::span<const double> u, const SarimaOrder& o) {
    SarimaCoefficients c;
    std::size_t at = 0;
    auto take = [&](int count, bool is_ma) {
        auto part = constrained(u.subspan(at, static_cast<std::size_t>(count)), is_ma);
        at += static_cast<std::size_t>(count);
        return part;
    };
    c.ar = take(o.p, false);
    c.ma = take(o.q, true);
    c.seasonal_ar = take(o.P, false);
    c.seasonal_ma = take(o.Q, true);
    return c;
}

std::vector<double> pack(const SarimaCoefficients& c) {
    std::vector<double> u;
    append_unconstrained(u, c.ar, false);
    append_unconstrained(u, c.ma, true);
    append_unconstrained(u, c.seasonal_ar, false);
    append_unconstrained(u, c.seasonal_ma, true);
    return u;
}

ss::FilterResult run_filter(std::span<const double> w, const SarimaCoefficients& c, int s,
                            bool with_mean, bool keep_residuals) {
    const auto ar = expand_ar(c.ar, c.seasonal_ar, s);
    const auto ma = expand_ma(c.ma, c.seasonal_ma, s);
    return ss::kalman_filter(w, ar, ma,
                             with_mean ? ss::MeanHandling::estimate : ss::MeanHandling::zero, 0.0,
                             keep_residuals);
}

double profile_objective(const ss::FilterResult& f) {
    const double nd = static_cast<double>(f.n);
    return 0.5 * std::log(f.ssq / nd) + 0.5 * f.sum_log_f / nd;
}

bool scores_tie(double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

// Criterion-minimal, then fewer parameters, then lexicographic (p, q, P, Q).
bool better(const CandidateScore& a, const CandidateScore& b) {
    if (!a.ok) return false;
    if (!b.ok) return true;
    if (!scores_tie(a.score, b.score)) return a.score < b.score;
    const int ka = a.order.arma_params();
    const int kb = b.order.arma_params();
    if (ka != kb) return ka < kb;
    return std::tie(a.order.p, a.order.q, a.order.P, a.order.Q) <
           std::tie(b.order.p, b.order.q, b.order.P, b.order.Q);
}

}  // namespace

void SarimaOrder::validate() const {
    if (p < 0 || d < 0 || q < 0 || P < 0 || D < 0 || Q < 0 || s < 0) {
        throw std::invalid_argument(fmt::format("orders must be non-negative: {}", to_string()));
    }
    if (s == 1) {
        throw std::invalid_argument("seasonal period must be 0 or at least 2");
    }
    if (s == 0 && (P != 0 || D != 0 || Q != 0)) {
        throw std::invalid_argument("seasonal orders require a seasonal period s >= 2");
    }
}

std::string SarimaOrder::to_string() const {
    if (s == 0) return fmt::format("ARIMA({},{},{})", p, d, q);
    return fmt::format("ARIMA({},{},{})({},{},{})[{}]", p, d, q, P, D, Q, s);
}

SarimaOrder parse_order(std::string_view text) {
    std::vector<int> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const auto field = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
        try {
            std::size_t used = 0;
            const std::string s(field);
            parts.push_back(std::stoi(s, &used));
            if (used != s.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("cannot parse order '{}'", text));
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    SarimaOrder o;
    if (parts.size() == 3) {
        o = SarimaOrder{parts[0], parts[1], parts[2], 0, 0, 0, 0};
    } else if (parts.size() == 7) {
        o = SarimaOrder{parts[0], parts[1], parts[2], parts[3], parts[4], parts[5], parts[6]};
    } else {
        throw std::invalid_argument(
            fmt::format("order '{}' must have 3 or 7 comma-separated integers", text));
    }
    o.validate();
    return o;
}

std::vector<double> expand_ar(std::span<const double> ar, std::span<const double> seasonal_ar,
                              int s) {
    if (seasonal_ar.empty()) return {ar.begin(), ar.end()};
    const auto full = poly_multiply(lag_polynomial(ar, 1, -1.0), lag_polynomial(seasonal_ar, s, -1.0));
    std::vector<double> out(full.size() - 1);
    for (std::size_t j = 1; j < full.size(); ++j) out[j - 1] = -full[j];
    return out;
}

std::vector<double> expand_ma(std::span<const double> ma, std::span<const double> seasonal_ma,
                              int s) {
    if (seasonal_ma.empty()) return {ma.begin(), ma.end()};
    const auto full = poly_multiply(lag_polynomial(ma, 1, 1.0), lag_polynomial(seasonal_ma, s, 1.0));
    return {full.begin() + 1, full.end()};
}

std::vector<double> differencing_polynomial(int d, int D, int s) {
    std::vector<double> poly{1.0};
    const std::vector<double> one{1.0};
    for (int i = 0; i < d; ++i) poly = poly_multiply(poly, lag_polynomial(one, 1, -1.0));
    for (int i = 0; i < D; ++i) poly = poly_multiply(poly, lag_polynomial(one, s, -1.0));
    std::vector<double> delta(poly.size() - 1);
    for (std::size_t j = 1; j < poly.size(); ++j) delta[j - 1] = -poly[j];
    return delta;
}

Series SarimaFit::residual_series() const {
    const auto offset = static_cast<std::size_t>(order.d + order.D * order.s);
    return Series(history.time_at(offset), residuals, history.step(), "residuals");
}

std::pair<double, double> information_criteria(double loglik, int k, std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("information criteria require n >= 1");
    }
    const double kd = static_cast<double>(k);
    return {-2.0 * loglik + 2.0 * kd, -2.0 * loglik + kd * std::log(static_cast<double>(n))};
}

Series simulate(const SarimaOrder& order, const SarimaCoefficients& c, double mean,
                double sigma2, std::size_t n, std::size_t burn_in, std::uint64_t seed,
                Timestamp start, Duration step) {
    order.validate();
    if (n == 0) throw std::invalid_argument("simulation length must be positive");
    if (sigma2 < 0.0) throw std::invalid_argument("sigma2 must be non-negative");
    if (c.ar.size() != static_cast<std::size_t>(order.p) ||
        c.ma.size() != static_cast<std::size_t>(order.q) ||
        c.seasonal_ar.size() != static_cast<std::size_t>(order.P) ||
        c.seasonal_ma.size() != static_cast<std::size_t>(order.Q)) {
        throw std::invalid_argument("coefficient counts do not match the order");
    }
    auto negated = [](std::span<const double> v) {
        std::vector<double> out(v.begin(), v.end());
        for (auto& x : out) x = -x;
        return out;
    };
    if (!ss::is_stationary(c.ar) || !ss::is_stationary(c.seasonal_ar)) {
        throw std::invalid_argument("AR coefficients are not stationary");
    }
    if (!ss::is_stationary(negated(c.ma)) || !ss::is_stationary(negated(c.seasonal_ma))) {
        throw std::invalid_argument("MA coefficients are not invertible");
    }

    const auto ar = expand_ar(c.ar, c.seasonal_ar, order.s);
    const auto ma = expand_ma(c.ma, c.seasonal_ma, order.s);
    const std::size_t total = burn_in + n;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double sigma = std::sqrt(sigma2);

    std::vector<double> e(total), x(total, 0.0);
    for (auto& v : e) v = sigma * normal(rng);
    for (std::size_t t = 0; t < total; ++t) {
        double v = e[t];
        for (std::size_t i = 1; i <= ar.size() && i <= t; ++i) v += ar[i - 1] * x[t - i];
        for (std::size_t j = 1; j <= ma.size() && j <= t; ++j) v += ma[j - 1] * e[t - j];
        x[t] = v;
    }

    std::vector<double> y(n);
    const auto delta = differencing_polynomial(order.d, order.D, order.s);
    for (std::size_t t = 0; t < n; ++t) {
        double v = mean + x[burn_in + t];
        for (std::size_t j = 1; j <= delta.size() && j <= t; ++j) v += delta[j - 1] * y[t - j];
        y[t] = v;
    }
    return Series(start, std::move(y), step, "simulated");
}

SarimaFit fit(const Series& series, const SarimaOrder& order, const FitOptions& options) {
    order.validate();
    const std::size_t lost = static_cast<std::size_t>(order.d + order.D * order.s);
    if (series.size() <= lost) {
        throw std::invalid_argument(fmt::format("series of length {} is too short to difference {}",
                                                series.size(), order.to_string()));
    }
    const auto w = apply_differencing(series.values(), order);
    const std::size_t n = w.size();
    const std::size_t needed = 10 * static_cast<std::size_t>(order.arma_params() + 1);
    if (n < needed) {
        throw std::invalid_argument(fmt::format(
            "{} needs at least {} observations after differencing (have {})", order.to_string(),
            needed, n));
    }
    {
        const double m = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
        double var = 0.0;
        for (double v : w) var += (v - m) * (v - m);
        if (!(var > 0.0)) {
            throw std::domain_error("cannot fit a zero-variance (differenced) series");
        }
    }
    const bool with_mean = use_mean(order, options.mean);

    std::vector<double> centred = w;
    if (with_mean) {
        const double m = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
        for (auto& v : centred) v -= m;
    }
    const auto start_coefs = hannan_rissanen(centred, order);
    const auto u0 = pack(start_coefs);

    auto objective = [&](std::span<const double> u) {
        try {
            return profile_objective(run_filter(w, unpack(u, order), order.s, with_mean, false));
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto start_filter = run_filter(w, unpack(u0, order), order.s, with_mean, false);
    std::vector<double> u_best = u0;
    bool converged = true;
    int iterations = 0;
    if (!u0.empty()) {
        auto res = numeric::minimize(objective, u0, options.optim);
        iterations = res.iterations;
        // restart from the optimum with a fresh simplex to escape premature collapse
        auto again = numeric::minimize(objective, res.argmin, options.optim);
        iterations += again.iterations;
        u_best = again.objective <= res.objective ? again.argmin : res.argmin;
        converged = again.converged;
    }

    auto coefs = unpack(u_best, order);
    const auto final_filter = run_filter(w, coefs, order.s, with_mean, true);

    SarimaFit out{
        .order = order,
        .ar = std::move(coefs.ar),
        .ma = std::move(coefs.ma),
        .seasonal_ar = std::move(coefs.seasonal_ar),
        .seasonal_ma = std::move(coefs.seasonal_ma),
        .mean = with_mean ? std::optional<double>(final_filter.mean) : std::nullopt,
        .sigma2 = final_filter.sigma2(),
        .loglik = final_filter.loglik(),
        .aic = 0.0,
        .bic = 0.0,
        .residuals = final_filter.standardized,
        .n_effective = n,
        .converged = converged,
        .iterations = iterations,
        .initial_loglik = start_filter.loglik(),
        .history = series,
    };
    std::tie(out.aic, out.bic) = information_criteria(out.loglik, out.num_params(), n);
    return out;
}

namespace {

struct SearchContext {
    const Series& series;
    const SelectOptions& options;
    int d;
    int D;
    std::map<std::tuple<int, int, int, int>, CandidateScore> seen;
    std::map<std::tuple<int, int, int, int>, std::optional<SarimaFit>> fits;
};

SarimaOrder make_order(const SearchContext& ctx, int p, int q, int P, int Q) {
    return SarimaOrder{p, ctx.d, q, P, ctx.D, Q, ctx.options.s};
}

// Evaluates candidates not yet seen; runs up to `threads` fits at once.
void evaluate(SearchContext& ctx, const std::vector<SarimaOrder>& orders) {
    std::vector<SarimaOrder> todo;
    for (const auto& o : orders) {
        const auto key = std::make_tuple(o.p, o.q, o.P, o.Q);
        if (ctx.seen.count(key) == 0 &&
            std::none_of(todo.begin(), todo.end(), [&](const SarimaOrder& t) { return t == o; })) {
            todo.push_back(o);
        }
    }
    unsigned threads = ctx.options.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

    auto run_one = [&](const SarimaOrder& o) -> std::optional<SarimaFit> {
        try {
            auto f = fit(ctx.series, o, ctx.options.fit);
            if (!f.converged) return std::nullopt;
            return f;
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };

    std::vector<std::optional<SarimaFit>> results(todo.size());
    for (std::size_t begin = 0; begin < todo.size(); begin += threads) {
        const std::size_t end = std::min(todo.size(), begin + threads);
        if (threads == 1) {
            results[begin] = run_one(todo[begin]);
            continue;
        }
        std::vector<std::future<std::optional<SarimaFit>>> jobs;
        for (std::size_t i = begin; i < end; ++i) {
            jobs.push_back(std::async(std::launch::async, run_one, std::cref(todo[i])));
        }
        for (std::size_t i = begin; i < end; ++i) results[i] = jobs[i - begin].get();
    }

    for (std::size_t i = 0; i < todo.size(); ++i) {
        const auto& o = todo[i];
        CandidateScore cs{o, std::numeric_limits<double>::infinity(), false};
        if (results[i]) {
            cs.ok = true;
            cs.score = ctx.options.criterion == Criterion::aic ? results[i]->aic : results[i]->bic;
        }
        if (ctx.options.log) {
            ctx.options.log(cs.ok ? fmt::format("  {} {} = {:.4f}", o.to_string(),
                                                ctx.options.criterion == Criterion::aic ? "AIC" : "BIC",
                                                cs.score)
                                  : fmt::format("  {} skipped (failed or non-convergent)",
                                                o.to_string()));
        }
        if (ctx.options.trace) ctx.options.trace->push_back(cs);
        const auto key = std::make_tuple(o.p, o.q, o.P, o.Q);
        ctx.seen[key] = cs;
        ctx.fits[key] = std::move(results[i]);
    }
}

bool feasible(const SearchContext& ctx, int p, int q, int P, int Q) {
    const auto& b = ctx.options.bounds;
    if (p < 0 || q < 0 || P < 0 || Q < 0) return false;
    if (p > b.max_p || q > b.max_q || P > b.max_P || Q > b.max_Q) return false;
    if (ctx.options.s == 0 && (P > 0 || Q > 0)) return false;
    const std::size_t lost = static_cast<std::size_t>(ctx.d + ctx.D * ctx.options.s);
    const std::size_t n_eff = ctx.series.size() > lost ? ctx.series.size() - lost : 0;
    return n_eff >= 10 * static_cast<std::size_t>(p + q + P + Q + 1);
}

}  // namespace

SarimaFit auto_select(const Series& series, const SelectOptions& options) {
    const auto& b = options.bounds;
    if (b.max_p < 0 || b.max_q < 0 || b.max_P < 0 || b.max_Q < 0 || b.max_d < 0 || b.max_D < 0) {
        throw std::invalid_argument("search bounds must be non-negative");
    }
    if (b.max_D > 1) {
        throw std::invalid_argument("seasonal differencing order is limited to D <= 1");
    }
    if (options.s == 1 || options.s < 0) {
        throw std::invalid_argument("seasonal period must be 0 or at least 2");
    }
    auto log = [&](const std::string& msg) {
        if (options.log) options.log(msg);
    };

    int D = 0;
    if (options.fixed_D) {
        D = *options.fixed_D;
    } else if (options.s >= 2 && b.max_D >= 1 &&
               series.size() >= 2 * static_cast<std::size_t>(options.s)) {
        const auto dec = decomposition::classical_decompose(series, static_cast<std::size_t>(options.s));
        const double fs = decomposition::seasonal_strength(dec);
        D = fs >= 0.64 ? 1 : 0;
        log(fmt::format("seasonal strength F_s = {:.4f} -> D = {}", fs, D));
    }

    std::vector<double> w(series.values().begin(), series.values().end());
    if (D > 0) w = difference(w, static_cast<std::size_t>(options.s), static_cast<std::size_t>(D));
    int d = 0;
    if (options.fixed_d) {
        d = *options.fixed_d;
    } else {
        while (d < b.max_d && w.size() >= 21) {
            const auto k = diagnostics::kpss_test(w, std::nullopt, 0.05);
            if (!k.reject_null) break;
            w = difference(w, 1, 1);
            ++d;
        }
        log(fmt::format("KPSS differencing -> d = {}", d));
    }

    SearchContext ctx{series, options, d, D, {}, {}};
    const int max_P = options.s == 0 ? 0 : b.max_P;
    const int max_Q = options.s == 0 ? 0 : b.max_Q;

    if (options.strategy == Strategy::full_grid) {
        std::vector<SarimaOrder> all;
        for (int p = 0; p <= b.max_p; ++p)
            for (int q = 0; q <= b.max_q; ++q)
                for (int P = 0; P <= max_P; ++P)
                    for (int Q = 0; Q <= max_Q; ++Q)
                        if (feasible(ctx, p, q, P, Q)) all.push_back(make_order(ctx, p, q, P, Q));
        if (all.size() > 200) {
            log(fmt::format("warning: full grid over {} candidate models; this may take a long time",
                            all.size()));
        }
        evaluate(ctx, all);
    } else {
        auto clip = [](int v, int hi) { return std::clamp(v, 0, hi); };
        SarimaOrder current = make_order(ctx, clip(2, b.max_p), clip(2, b.max_q), clip(1, max_P),
                                         clip(1, max_Q));
        while (!feasible(ctx, current.p, current.q, current.P, current.Q) &&
               current.arma_params() > 0) {
            if (current.p > 0) --current.p;
            else if (current.q > 0) --current.q;
            else if (current.P > 0) --current.P;
            else --current.Q;
        }
        evaluate(ctx, {current});
        if (!ctx.seen[{current.p, current.q, current.P, current.Q}].ok && current.arma_params() > 0) {
            current = make_order(ctx, 0, 0, 0, 0);
            evaluate(ctx, {current});
        }
        while (true) {
            std::vector<SarimaOrder> neighbours;
            const int deltas[2] = {-1, 1};
            for (int dlt : deltas) {
                const int cand[4][4] = {{current.p + dlt, current.q, current.P, current.Q},
                                        {current.p, current.q + dlt, current.P, current.Q},
                                        {current.p, current.q, current.P + dlt, current.Q},
                                        {current.p, current.q, current.P, current.Q + dlt}};
                for (const auto& c : cand) {
                    if (feasible(ctx, c[0], c[1], c[2], c[3])) {
                        neighbours.push_back(make_order(ctx, c[0], c[1], c[2], c[3]));
                    }
                }
            }
            evaluate(ctx, neighbours);
            CandidateScore best = ctx.seen[{current.p, current.q, current.P, current.Q}];
            for (const auto& o : neighbours) {
                const auto& cs = ctx.seen[{o.p, o.q, o.P, o.Q}];
                if (better(cs, best)) best = cs;
            }
            if (best.order == current) break;
            current = best.order;
        }
    }

    const CandidateScore* best = nullptr;
    for (const auto& [key, cs] : ctx.seen) {
        if (cs.ok && (best == nullptr || better(cs, *best))) best = &cs;
    }
    if (best == nullptr) {
        throw std::runtime_error("no candidate model converged");
    }
    const auto& o = best->order;
    log(fmt::format("selected {}", o.to_string()));
    return *ctx.fits[{o.p, o.q, o.P, o.Q}];
}

Forecast forecast(const SarimaFit& fit, std::size_t h, std::span<const double> levels) {
    return forecast(fit, fit.history, h, levels);
}

Forecast forecast(const SarimaFit& fit, const Series& history, std::size_t h,
                  std::span<const double> levels) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be at least 1");
    if (levels.empty()) throw std::invalid_argument("at least one confidence level is required");
    const auto& o = fit.order;
    const auto w = apply_differencing(history.values(), o);
    const auto ar = expand_ar(fit.ar, fit.seasonal_ar, o.s);
    const auto ma = expand_ma(fit.ma, fit.seasonal_ma, o.s);
    const double mu = fit.mean.value_or(0.0);
    const auto filtered = ss::kalman_filter(w, ar, ma, ss::MeanHandling::fixed, mu, false);

    // Future values of the differenced process: iterate the state transition.
    std::vector<double> state = filtered.next_state;
    const std::size_t r = state.size();
    std::vector<double> w_hat(h);
    for (std::size_t k = 0; k < h; ++k) {
        w_hat[k] = mu + state[0];
        const double first = state[0];
        for (std::size_t i = 0; i + 1 < r; ++i) state[i] = (i < ar.size() ? ar[i] : 0.0) * first + state[i + 1];
        state[r - 1] = (r - 1 < ar.size() ? ar[r - 1] : 0.0) * first;
    }

    // Undo differencing: y_t = w_t + Σ δ_j y_{t-j}.
    const auto delta = differencing_polynomial(o.d, o.D, o.s);
    std::vector<double> y(history.values().begin(), history.values().end());
    const std::size_t n = y.size();
    y.resize(n + h);
    for (std::size_t k = 0; k < h; ++k) {
        double v = w_hat[k];
        for (std::size_t j = 1; j <= delta.size(); ++j) v += delta[j - 1] * y[n + k - j];
        y[n + k] = v;
    }

    // ψ-weights of the integrated model φ(B)δ(B) x = θ(B) e.
    std::vector<double> phi_full{1.0};
    for (double a : ar) phi_full.push_back(-a);
    std::vector<double> delta_full{1.0};
    for (double dj : delta) delta_full.push_back(-dj);
    const auto prod = poly_multiply(phi_full, delta_full);
    std::vector<double> ar_star(prod.size() - 1);
    for (std::size_t j = 1; j < prod.size(); ++j) ar_star[j - 1] = -prod[j];
    const auto psi = ss::psi_weights(ar_star, ma, h);

    Forecast f;
    f.start = history.time_at(n);
    f.step = history.step();
    f.points.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
    f.se.resize(h);
    double acc = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
        acc += psi[k] * psi[k];
        f.se[k] = std::sqrt(fit.sigma2 * acc);
    }
    fill_normal_intervals(f, levels);
    return f;
}

}  // namespace edcast::sarima

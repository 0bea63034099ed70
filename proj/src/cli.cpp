#include "edcast/cli.hpp"

#include <algorithm>
#include <functional>
#include <ios>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "edcast/arrivals.hpp"
#include "edcast/decomposition.hpp"
#include "edcast/evaluation.hpp"
#include "edcast/holt_winters.hpp"
#include "edcast/nnar.hpp"
#include "edcast/svg.hpp"

namespace edcast::cli {

namespace {

const std::vector<double> kEvalLevels{0.80, 0.95};

struct Options {
    std::uint64_t seed = 42;

    std::string in, out, svg, config, model, order, split, levels = "80,95", history;
    std::string daily_profile, monthly_profile;
    std::string criterion = "aic", strategy = "stepwise", mean = "auto";
    std::string model_spec, models = "sarima,hw,nnar";
    int period = 24;
    int d = 1, D = 0;
    std::optional<int> fixed_d, fixed_D;
    int max_p = 5, max_q = 5, max_P = 2, max_Q = 2, max_d = 2, max_D = 1;
    unsigned threads = 1;
    std::size_t h = 24;
    std::size_t max_lag = 48;
    std::optional<std::size_t> eval_h;
    int nnar_p = 3, nnar_P = 1, restarts = 20;
    std::size_t paths = 1000;
    bool verbose = false;
};

// Fitted model with its parameters frozen; forecasts continue any prefix of the data.
struct FrozenModel {
    std::string name;
    evaluation::ModelSpec spec;
};

Series training_part(const Series& y, const std::string& split_at) {
    if (split_at.empty()) return y;
    return split(y, SplitSpec::at_time(parse_timestamp(split_at))).first;
}

sarima::SarimaFit select_model(const Series& train, const Options& o, std::ostream& err) {
    sarima::SelectOptions so;
    so.s = o.period;
    so.bounds = {o.max_p, o.max_q, o.max_P, o.max_Q, o.max_d, o.max_D};
    if (o.criterion == "aic") so.criterion = sarima::Criterion::aic;
    else if (o.criterion == "bic") so.criterion = sarima::Criterion::bic;
    else throw std::invalid_argument(fmt::format("unknown criterion '{}'", o.criterion));
    if (o.strategy == "stepwise") so.strategy = sarima::Strategy::stepwise;
    else if (o.strategy == "full-grid") so.strategy = sarima::Strategy::full_grid;
    else throw std::invalid_argument(fmt::format("unknown strategy '{}'", o.strategy));
    so.fixed_d = o.fixed_d;
    so.fixed_D = o.fixed_D;
    so.threads = o.threads;
    if (o.verbose) so.log = [&err](std::string_view msg) { err << msg << '\n'; };
    return sarima::auto_select(train, so);
}

sarima::MeanMode mean_mode(const std::string& text) {
    if (text == "auto") return sarima::MeanMode::automatic;
    if (text == "on") return sarima::MeanMode::on;
    if (text == "off") return sarima::MeanMode::off;
    throw std::invalid_argument(fmt::format("unknown mean mode '{}'", text));
}

FrozenModel frozen_sarima(const Series& train, const std::string& arg, const Options& o,
                          std::ostream& err) {
    sarima::SarimaFit fit = arg.empty() || arg == "auto"
                                ? select_model(train, o, err)
                                : sarima::fit(train, sarima::parse_order(arg), {mean_mode(o.mean), {}});
    if (o.verbose) err << "sarima: " << fit.order.to_string() << '\n';
    auto shared = std::make_shared<const sarima::SarimaFit>(std::move(fit));
    return {"sarima", [shared](const Series& prefix, std::size_t h, std::span<const double> levels) {
                return sarima::forecast(*shared, prefix, h, levels);
            }};
}

FrozenModel frozen_hw(const Series& train, const std::string& arg, const Options& o) {
    holt_winters::Variant variant = holt_winters::Variant::additive;
    if (arg == "multiplicative") variant = holt_winters::Variant::multiplicative;
    else if (!arg.empty() && arg != "additive") {
        throw std::invalid_argument(fmt::format("unknown Holt-Winters variant '{}'", arg));
    }
    const auto period = static_cast<std::size_t>(o.period);
    const auto model = holt_winters::hw_fit(train, period, variant);
    holt_winters::FitOptions fixed;
    fixed.params = holt_winters::Params{model.alpha, model.beta, model.gamma};
    return {"hw", [period, variant, fixed](const Series& prefix, std::size_t h,
                                           std::span<const double> levels) {
                return holt_winters::hw_forecast(holt_winters::hw_fit(prefix, period, variant, fixed), h,
                                                 levels);
            }};
}

FrozenModel frozen_nnar(const Series& train, const std::string& arg, const Options& o) {
    nnar::NnarOptions no;
    no.p = o.nnar_p;
    no.P = o.nnar_P;
    no.s = o.period;
    no.restarts = o.restarts;
    no.seed = o.seed;
    if (!arg.empty()) {
        const auto comma = arg.find(',');
        try {
            no.p = std::stoi(arg.substr(0, comma));
            if (comma != std::string::npos) no.P = std::stoi(arg.substr(comma + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("cannot parse NNAR lags '{}'", arg));
        }
    }
    auto model = std::make_shared<const nnar::NnarModel>(nnar::nnar_fit(train, no));
    const nnar::NnarForecastOptions fo{o.paths, o.seed};
    return {"nnar", [model, fo](const Series& prefix, std::size_t h, std::span<const double> levels) {
                return nnar::nnar_forecast(*model, prefix, h, levels, fo);
            }};
}

// "family" or "family:argument", e.g. sarima:3,0,0,2,1,0,24, hw:multiplicative, nnar:3,1.
FrozenModel build_model(const Series& train, const std::string& spec, const Options& o,
                        std::ostream& err) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (family == "sarima") return frozen_sarima(train, arg.empty() ? o.order : arg, o, err);
    if (family == "hw") return frozen_hw(train, arg, o);
    if (family == "nnar") return frozen_nnar(train, arg, o);
    throw std::invalid_argument(fmt::format("unknown model family '{}'", family));
}

void append_rows(std::string& csv, const Series& y, std::size_t origin, std::size_t h,
                 const FrozenModel& m) {
    auto row = [&](const evaluation::EvalReport& r) {
        csv += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", r.model_name, r.me, r.rmse,
                           r.coverage.at(0.80), r.coverage.at(0.95), r.n_points);
    };
    row(evaluation::rolling_origin_backtest(y, m.spec, origin, 1, 1, kEvalLevels, m.name + "/one-step"));
    row(evaluation::rolling_origin_backtest(y, m.spec, origin, h, h, kEvalLevels,
                                            m.name + "/multi-step"));
}

std::size_t split_index(const Series& y, const std::string& at) {
    const std::size_t idx = y.index_of(parse_timestamp(at));
    if (idx == 0 || idx >= y.size()) {
        throw std::invalid_argument(fmt::format("split {} leaves an empty train or test part", at));
    }
    return idx;
}

int cmd_generate(const Options& o, bool seed_given) {
    auto config = arrivals::read_config_file(o.config);
    if (seed_given) config.seed = o.seed;
    std::ostringstream csv;
    write_series_csv(csv, arrivals::generate_arrivals(config));
    write_text_file(o.out, csv.str());
    return 0;
}

std::string opt_cell(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; }

int cmd_decompose(const Options& o) {
    const Series y = read_series_file(o.in);
    if (o.period < 2) throw std::invalid_argument("period must be at least 2");
    const auto period = static_cast<std::size_t>(o.period);
    const auto dec = decomposition::classical_decompose(y, period);
    std::string csv = "timestamp,observed,trend,seasonal,remainder\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        csv += fmt::format("{},{},{},{},{}\n", format_timestamp(y.time_at(i)), dec.observed[i],
                           opt_cell(dec.trend[i]), dec.seasonal[i], opt_cell(dec.remainder[i]));
    }
    write_text_file(o.out, csv);

    if (!o.daily_profile.empty()) {
        const auto prof = decomposition::mean_profile(y, 24);
        std::string out = "hour,mean\n";
        for (std::size_t k = 0; k < prof.size(); ++k) out += fmt::format("{},{}\n", k, prof[k]);
        write_text_file(o.daily_profile, out);
    }
    if (!o.monthly_profile.empty()) {
        const auto daily = decomposition::aggregate(y, 24);
        const auto prof = decomposition::mean_profile(daily, 30);
        std::string out = "day,mean\n";
        for (std::size_t k = 0; k < prof.size(); ++k) out += fmt::format("{},{}\n", k + 1, prof[k]);
        write_text_file(o.monthly_profile, out);
    }
    if (!o.svg.empty()) {
        svg::Chart chart;
        chart.title = fmt::format("Classical decomposition (period {})", period);
        std::vector<double> trend;
        std::size_t first = 0;
        while (first < dec.trend.size() && !dec.trend[first]) ++first;
        for (std::size_t i = first; i < dec.trend.size() && dec.trend[i]; ++i) trend.push_back(*dec.trend[i]);
        chart.lines.push_back({"observed", 0, dec.observed, "#999999"});
        chart.lines.push_back({"trend", first, trend, "#d62728"});
        chart.lines.push_back({"seasonal", 0, dec.seasonal, "#1f77b4"});
        write_text_file(o.svg, svg::render(chart));
    }
    return 0;
}

int cmd_diagnose(const Options& o) {
    ReportInput input{read_series_file(o.in), o.d, o.D, o.period, o.max_lag, nullptr};
    std::optional<sarima::SarimaFit> model;
    if (!o.model.empty()) {
        model = model_from_json(read_text_file(o.model));
        input.model = &*model;
    }
    write_text_file(o.out, diagnostic_report_json(input));
    return 0;
}

int cmd_fit(const Options& o) {
    const Series train = training_part(read_series_file(o.in), o.split);
    const auto fit = sarima::fit(train, sarima::parse_order(o.order), {mean_mode(o.mean), {}});
    write_text_file(o.out, model_to_json(fit));
    return 0;
}

int cmd_select(const Options& o, std::ostream& err) {
    const Series train = training_part(read_series_file(o.in), o.split);
    const auto fit = select_model(train, o, err);
    write_text_file(o.out, model_to_json(fit));
    return 0;
}

int cmd_forecast(const Options& o) {
    const auto fit = model_from_json(read_text_file(o.model));
    const auto levels = parse_levels(o.levels);
    std::optional<Series> history;
    if (!o.history.empty()) history = read_series_file(o.history);
    const Series& base = history ? *history : fit.history;
    const Forecast f = sarima::forecast(fit, base, o.h, levels);
    std::ostringstream csv;
    write_forecast_csv(csv, f);
    write_text_file(o.out, csv.str());
    if (!o.svg.empty()) {
        const std::size_t tail = std::min<std::size_t>(base.size(), 7 * o.h);
        svg::Chart chart;
        chart.title = fmt::format("{} forecast, h = {}", fit.order.to_string(), o.h);
        for (std::size_t i = f.levels.size(); i-- > 0;) {
            chart.bands.push_back({tail, f.lower[i], f.upper[i], "#1f77b4", 0.15});
        }
        const auto v = base.values();
        chart.lines.push_back({"history", 0, {v.end() - static_cast<std::ptrdiff_t>(tail), v.end()}, "#444444"});
        chart.lines.push_back({"forecast", tail, f.points, "#1f77b4"});
        write_text_file(o.svg, svg::render(chart));
    }
    return 0;
}

int cmd_evaluate(const Options& o, std::ostream& err) {
    const Series y = read_series_file(o.in);
    const std::size_t origin = split_index(y, o.split);
    const std::size_t h = o.eval_h.value_or(y.size() - origin);
    const auto model = build_model(y.slice(0, origin), o.model_spec, o, err);
    std::string csv = "model,me,rmse,coverage_80,coverage_95,n\n";
    append_rows(csv, y, origin, h, model);
    write_text_file(o.out, csv);
    return 0;
}

int cmd_compare(const Options& o, std::ostream& err) {
    const Series y = read_series_file(o.in);
    const std::size_t origin = split_index(y, o.split);
    const std::size_t h = o.eval_h.value_or(y.size() - origin);
    const Series train = y.slice(0, origin);
    std::string csv = "model,me,rmse,coverage_80,coverage_95,n\n";
    std::stringstream names(o.models);
    std::string name;
    while (std::getline(names, name, ',')) {
        if (name != "sarima" && name != "hw" && name != "nnar") {
            throw std::invalid_argument(fmt::format("unknown model family '{}'", name));
        }
        append_rows(csv, y, origin, h, build_model(train, name, o, err));
    }
    write_text_file(o.out, csv);
    return 0;
}

void add_bounds(CLI::App* app, Options& o) {
    app->add_option("--max-p", o.max_p, "largest non-seasonal AR order")->capture_default_str();
    app->add_option("--max-q", o.max_q, "largest non-seasonal MA order")->capture_default_str();
    app->add_option("--max-P", o.max_P, "largest seasonal AR order")->capture_default_str();
    app->add_option("--max-Q", o.max_Q, "largest seasonal MA order")->capture_default_str();
    app->add_option("--max-d", o.max_d, "largest non-seasonal difference")->capture_default_str();
    app->add_option("--max-D", o.max_D, "largest seasonal difference")->capture_default_str();
    app->add_option("--criterion", o.criterion, "aic or bic")->capture_default_str();
    app->add_option("--strategy", o.strategy, "stepwise or full-grid")->capture_default_str();
    app->add_option("--d", o.fixed_d, "fix the non-seasonal difference");
    app->add_option("--D", o.fixed_D, "fix the seasonal difference");
    app->add_option("--threads", o.threads, "parallel candidate fits (0 = all cores)")->capture_default_str();
}

void add_comparison(CLI::App* app, Options& o) {
    app->add_option("--in", o.in, "input series CSV")->required();
    app->add_option("--split", o.split, "first timestamp of the test window")->required();
    app->add_option("--out", o.out, "output CSV")->required();
    app->add_option("--s", o.period, "seasonal period")->capture_default_str();
    app->add_option("--h", o.eval_h, "multi-step horizon (default: whole test window)");
    app->add_option("--order", o.order, "SARIMA order p,d,q,P,D,Q,s (default: select)");
    app->add_option("--mean", o.mean, "SARIMA mean: auto, on or off")->capture_default_str();
    app->add_option("--nnar-p", o.nnar_p, "NNAR non-seasonal lags")->capture_default_str();
    app->add_option("--nnar-P", o.nnar_P, "NNAR seasonal lags")->capture_default_str();
    app->add_option("--restarts", o.restarts, "NNAR ensemble size")->capture_default_str();
    app->add_option("--paths", o.paths, "NNAR bootstrap paths")->capture_default_str();
    app->add_flag("--verbose", o.verbose, "log model selection to stderr");
    add_bounds(app, o);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Hourly arrival forecasting toolkit", "edcast"};
    // "--h" is the forecast horizon, so help is long-form only (inherited by subcommands).
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(1);
    app.add_option("--seed", o.seed, "random seed")->capture_default_str();

    auto* gen = app.add_subcommand("generate", "simulate hourly arrivals from a config file");
    gen->add_option("--config", o.config, "INI config")->required();
    gen->add_option("--out", o.out, "output CSV")->required();
    gen->add_option("--seed", o.seed, "overrides the config seed");

    auto* dec = app.add_subcommand("decompose", "classical seasonal decomposition");
    dec->add_option("--in", o.in, "input series CSV")->required();
    dec->add_option("--period", o.period, "seasonal period")->capture_default_str();
    dec->add_option("--out", o.out, "output CSV")->required();
    dec->add_option("--svg", o.svg, "optional chart");
    dec->add_option("--daily-profile", o.daily_profile, "average 24-hour profile CSV");
    dec->add_option("--monthly-profile", o.monthly_profile, "average 30-day profile CSV of daily totals");

    auto* diag = app.add_subcommand("diagnose", "stationarity, autocorrelation and normality report");
    diag->add_option("--in", o.in, "input series CSV")->required();
    diag->add_option("--d", o.d, "non-seasonal differences for the differenced rows")->capture_default_str();
    diag->add_option("--D", o.D, "seasonal differences for the differenced rows")->capture_default_str();
    diag->add_option("--s", o.period, "seasonal period")->capture_default_str();
    diag->add_option("--max-lag", o.max_lag, "ACF/PACF lags")->capture_default_str();
    diag->add_option("--model", o.model, "model JSON whose residuals are tested");
    diag->add_option("--out", o.out, "output JSON")->required();

    auto* fit = app.add_subcommand("fit", "fit a SARIMA model of a given order");
    fit->add_option("--in", o.in, "input series CSV")->required();
    fit->add_option("--order", o.order, "p,d,q,P,D,Q,s or p,d,q")->required();
    fit->add_option("--mean", o.mean, "auto, on or off")->capture_default_str();
    fit->add_option("--split", o.split, "fit only on data before this timestamp");
    fit->add_option("--out", o.out, "output model JSON")->required();

    auto* sel = app.add_subcommand("select", "choose a SARIMA order by AIC or BIC");
    sel->add_option("--in", o.in, "input series CSV")->required();
    sel->add_option("--s", o.period, "seasonal period (0 = none)")->capture_default_str();
    sel->add_option("--split", o.split, "select only on data before this timestamp");
    sel->add_option("--out", o.out, "output model JSON")->required();
    sel->add_flag("--verbose", o.verbose, "log candidates to stderr");
    add_bounds(sel, o);

    auto* fc = app.add_subcommand("forecast", "forecast from a saved model");
    fc->add_option("--model", o.model, "model JSON")->required();
    fc->add_option("--h", o.h, "horizon")->capture_default_str();
    fc->add_option("--levels", o.levels, "confidence levels in percent")->capture_default_str();
    fc->add_option("--history", o.history, "continue this series instead of the training data");
    fc->add_option("--out", o.out, "output CSV")->required();
    fc->add_option("--svg", o.svg, "optional chart");

    auto* ev = app.add_subcommand("evaluate", "one-step and multi-step holdout accuracy of one model");
    ev->add_option("--model-spec", o.model_spec, "sarima[:order|auto], hw[:variant] or nnar[:p,P]")
        ->required();
    add_comparison(ev, o);

    auto* cmp = app.add_subcommand("compare", "holdout accuracy across model families");
    cmp->add_option("--models", o.models, "comma-separated families")->capture_default_str();
    add_comparison(cmp, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (*gen) return cmd_generate(o, gen->count("--seed") > 0 || app.count("--seed") > 0);
        if (*dec) return cmd_decompose(o);
        if (*diag) return cmd_diagnose(o);
        if (*fit) return cmd_fit(o);
        if (*sel) return cmd_select(o, err);
        if (*fc) return cmd_forecast(o);
        if (*ev) return cmd_evaluate(o, err);
        if (*cmp) return cmd_compare(o, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::ios_base::failure& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace edcast::cli

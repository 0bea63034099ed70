#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "edcast/cli.hpp"

namespace edcast::cli {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;
constexpr int kReportVersion = 1;

json test_row(const diagnostics::TestResult& r, const char* series) {
    return json{{"test", r.test_name},
                {"series", series},
                {"statistic", r.statistic},
                {"p_value", r.p_value},
                {"p_clamped", r.p_clamped},
                {"df_or_bandwidth", r.df_or_bandwidth},
                {"reject_at_0.05", r.reject_null},
                {"inference", r.inference}};
}

json correlogram(const diagnostics::CorrelogramResult& c) {
    return json{{"n", c.n}, {"band", c.band}, {"values", c.coefficients}};
}

template <class T>
T require(const json& doc, const char* key) {
    if (!doc.contains(key)) throw IoError(fmt::format("model file: missing field '{}'", key));
    return doc.at(key).get<T>();
}

}  // namespace

std::string model_to_json(const sarima::SarimaFit& fit) {
    const auto& o = fit.order;
    const auto& h = fit.history;
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["order"] = {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"s", o.s}};
    doc["ar"] = fit.ar;
    doc["ma"] = fit.ma;
    doc["seasonal_ar"] = fit.seasonal_ar;
    doc["seasonal_ma"] = fit.seasonal_ma;
    doc["mean"] = fit.mean ? json(*fit.mean) : json(nullptr);
    doc["sigma2"] = fit.sigma2;
    doc["loglik"] = fit.loglik;
    doc["aic"] = fit.aic;
    doc["bic"] = fit.bic;
    doc["n_effective"] = fit.n_effective;
    doc["converged"] = fit.converged;
    doc["residuals"] = fit.residuals;
    doc["training"] = {{"start", format_timestamp(h.start())},
                       {"end", format_timestamp(h.time_at(h.size() - 1))},
                       {"step_seconds", h.step().count()},
                       {"label", h.label()},
                       {"values", h.values()}};
    return doc.dump(2) + "\n";
}

sarima::SarimaFit model_from_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(fmt::format("model file is not valid JSON: {}", e.what()));
    }
    try {
        const int version = require<int>(doc, "format_version");
        if (version != kModelFormatVersion) {
            throw IoError(fmt::format("unsupported model format_version {}", version));
        }
        const auto& jo = doc.at("order");
        sarima::SarimaOrder order{jo.at("p").get<int>(), jo.at("d").get<int>(), jo.at("q").get<int>(),
                                  jo.at("P").get<int>(), jo.at("D").get<int>(), jo.at("Q").get<int>(),
                                  jo.at("s").get<int>()};
        order.validate();
        const auto& tr = doc.at("training");
        Series history(parse_timestamp(tr.at("start").get<std::string>()),
                       tr.at("values").get<std::vector<double>>(),
                       Duration{tr.at("step_seconds").get<long long>()},
                       tr.value("label", std::string{}));
        sarima::SarimaFit fit{
            .order = order,
            .ar = require<std::vector<double>>(doc, "ar"),
            .ma = require<std::vector<double>>(doc, "ma"),
            .seasonal_ar = require<std::vector<double>>(doc, "seasonal_ar"),
            .seasonal_ma = require<std::vector<double>>(doc, "seasonal_ma"),
            .mean = doc.at("mean").is_null() ? std::nullopt
                                             : std::optional<double>(doc.at("mean").get<double>()),
            .sigma2 = require<double>(doc, "sigma2"),
            .loglik = require<double>(doc, "loglik"),
            .aic = require<double>(doc, "aic"),
            .bic = require<double>(doc, "bic"),
            .residuals = doc.value("residuals", std::vector<double>{}),
            .n_effective = require<std::size_t>(doc, "n_effective"),
            .converged = doc.value("converged", true),
            .iterations = 0,
            .initial_loglik = 0.0,
            .history = std::move(history),
        };
        if (fit.ar.size() != std::size_t(order.p) || fit.ma.size() != std::size_t(order.q) ||
            fit.seasonal_ar.size() != std::size_t(order.P) ||
            fit.seasonal_ma.size() != std::size_t(order.Q)) {
            throw IoError("model file: coefficient counts do not match the order");
        }
        return fit;
    } catch (const json::exception& e) {
        throw IoError(fmt::format("model file: {}", e.what()));
    } catch (const std::invalid_argument& e) {
        throw IoError(fmt::format("model file: {}", e.what()));
    }
}

std::string level_label(double level) {
    const double pct = std::round(level * 1e6) / 1e4;
    return fmt::format("{:g}", pct);
}

std::vector<double> parse_levels(std::string_view text) {
    std::vector<double> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        double pct = 0.0;
        try {
            std::size_t used = 0;
            pct = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("cannot parse confidence level '{}'", item));
        }
        if (!(pct > 0.0 && pct < 100.0)) {
            throw std::invalid_argument(fmt::format("confidence level {} is outside (0, 100)", item));
        }
        out.push_back(pct / 100.0);
    }
    if (out.empty()) throw std::invalid_argument("no confidence levels given");
    return normalize_levels(out);
}

void write_forecast_csv(std::ostream& out, const Forecast& f) {
    out << "timestamp,point";
    for (double l : f.levels) out << ",lo" << level_label(l) << ",hi" << level_label(l);
    out << '\n';
    for (std::size_t h = 0; h < f.horizon(); ++h) {
        out << format_timestamp(f.time_at(h)) << ',' << fmt::format("{}", f.points[h]);
        for (std::size_t i = 0; i < f.levels.size(); ++i) {
            out << ',' << fmt::format("{}", f.lower[i][h]) << ',' << fmt::format("{}", f.upper[i][h]);
        }
        out << '\n';
    }
}

std::string diagnostic_report_json(const ReportInput& in) {
    const auto& y = in.series;
    json doc;
    doc["report_version"] = kReportVersion;
    doc["series"] = {{"label", y.label()},
                     {"start", format_timestamp(y.start())},
                     {"end", format_timestamp(y.time_at(y.size() - 1))},
                     {"n", y.size()},
                     {"step_seconds", y.step().count()}};
    doc["differencing"] = {{"d", in.d}, {"D", in.D}, {"s", in.s}};

    std::vector<double> w(y.values().begin(), y.values().end());
    if (in.d > 0) w = difference(w, 1, static_cast<std::size_t>(in.d));
    if (in.D > 0) w = difference(w, static_cast<std::size_t>(in.s), static_cast<std::size_t>(in.D));

    const auto period = static_cast<std::size_t>(std::max(in.s, 0));
    json tests = json::array();
    auto add_all = [&](std::span<const double> v, const char* name) {
        tests.push_back(test_row(diagnostics::kpss_test(v), name));
        tests.push_back(test_row(diagnostics::adf_test(v), name));
        tests.push_back(test_row(
            diagnostics::ljung_box(v, diagnostics::default_ljung_box_lag(v.size(), period), 0), name));
        tests.push_back(test_row(diagnostics::jarque_bera(v), name));
        tests.push_back(test_row(diagnostics::anderson_darling(v), name));
    };
    add_all(y.values(), "raw");
    add_all(w, "differenced");

    const std::size_t lags_raw = std::min(in.max_lag, y.size() - 1);
    const std::size_t lags_diff = std::min(in.max_lag, w.size() - 1);
    doc["acf"] = {{"raw", correlogram(diagnostics::acf(y.values(), lags_raw))},
                  {"differenced", correlogram(diagnostics::acf(w, lags_diff))}};
    doc["pacf"] = {{"raw", correlogram(diagnostics::pacf(y.values(), lags_raw))},
                   {"differenced", correlogram(diagnostics::pacf(w, lags_diff))}};

    if (in.model) {
        const auto& r = in.model->residuals;
        const auto fitted = static_cast<std::size_t>(in.model->order.arma_params());
        const std::size_t h = std::max(diagnostics::default_ljung_box_lag(r.size(), period), fitted + 1);
        tests.push_back(test_row(diagnostics::ljung_box(r, h, fitted), "residuals"));
        tests.push_back(test_row(diagnostics::jarque_bera(r), "residuals"));
        tests.push_back(test_row(diagnostics::anderson_darling(r), "residuals"));
        const std::size_t lags_res = std::min(in.max_lag, r.size() - 1);
        doc["acf"]["residuals"] = correlogram(diagnostics::acf(r, lags_res));
        doc["pacf"]["residuals"] = correlogram(diagnostics::pacf(r, lags_res));
        doc["model"] = in.model->order.to_string();
    }
    doc["tests"] = std::move(tests);
    return doc.dump(2) + "\n";
}

Series read_series_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open input file {}", path.string()));
    try {
        return read_series_csv(in);
    } catch (const std::invalid_argument& e) {
        throw IoError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open output file {}", path.string()));
    out << text;
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open input file {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace edcast::cli

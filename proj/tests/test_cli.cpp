#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "edcast/cli.hpp"
#include "edcast/sarima.hpp"

using namespace edcast;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "edcast");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return cli::read_text_file(p); }

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> cells(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string c; std::getline(in, c, ',');) out.push_back(c);
    return out;
}

class CliTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = fs::temp_directory_path() / fmt_dir();
        fs::create_directories(dir_);
        std::ofstream ini(dir_ / "small.ini");
        ini << "[generator]\nstart = 2017-06-01T00:00:00\nn_hours = 840\nbase_rate = 6.0\n"
               "trend_pct_per_year = 3.0\nannual_amplitude = 0.05\nnoise = poisson\nseed = 42\n";
        ini.close();
        const auto r = run({"generate", "--config", path("small.ini"), "--out", path("small.csv")});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() { fs::remove_all(dir_); }

    static std::string fmt_dir() {
        return "edcast_cli_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
               std::to_string(reinterpret_cast<std::uintptr_t>(&dir_));
    }
    static std::string path(const std::string& name) { return (dir_ / name).string(); }

    static inline fs::path dir_;
};

const std::string kSplit = "2017-07-01T00:00:00";  // 720 training hours, 120 test hours

}  // namespace

TEST(CliHelpers, Levels) {
    EXPECT_EQ(cli::parse_levels("95,80"), (std::vector<double>{0.8, 0.95}));
    EXPECT_EQ(cli::level_label(0.8), "80");
    EXPECT_EQ(cli::level_label(0.995), "99.5");
    EXPECT_THROW((void)cli::parse_levels("80,abc"), std::invalid_argument);
    EXPECT_THROW((void)cli::parse_levels("0"), std::invalid_argument);
    EXPECT_THROW((void)cli::parse_levels("100"), std::invalid_argument);
}

TEST(CliHelpers, ModelJsonErrors) {
    EXPECT_THROW((void)cli::model_from_json("{not json"), cli::IoError);
    EXPECT_THROW((void)cli::model_from_json(R"({"format_version": 2})"), cli::IoError);
    EXPECT_THROW((void)cli::model_from_json(R"({"format_version": 1})"), cli::IoError);
}

TEST(CliHelpers, ModelJsonRoundTrip) {
    const auto y = sarima::simulate({1, 0, 1, 1, 0, 0, 24}, {{0.5}, {0.2}, {0.3}, {}}, 5.0, 1.0, 600, 100, 3);
    const auto f = sarima::fit(y, {1, 0, 1, 1, 0, 0, 24});
    const auto back = cli::model_from_json(cli::model_to_json(f));
    EXPECT_EQ(back.order, f.order);
    EXPECT_EQ(back.ar, f.ar);
    EXPECT_EQ(back.ma, f.ma);
    EXPECT_EQ(back.seasonal_ar, f.seasonal_ar);
    EXPECT_EQ(back.mean, f.mean);
    EXPECT_EQ(back.sigma2, f.sigma2);
    EXPECT_EQ(back.loglik, f.loglik);
    EXPECT_EQ(back.residuals, f.residuals);
    EXPECT_TRUE(std::equal(back.history.values().begin(), back.history.values().end(),
                           f.history.values().begin(), f.history.values().end()));
    EXPECT_EQ(back.history.start(), f.history.start());
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"fit", "--in", path("small.csv"), "--bogus", "1"}).code, 2);
    EXPECT_EQ(run({"nonsense"}).code, 2);
    const auto help = run({"--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("forecast"), std::string::npos);
}

TEST_F(CliTest, MissingModelFileIsIoError) {
    const auto missing = path("no_such_model.json");
    const auto r = run({"forecast", "--model", missing, "--out", path("f.csv")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(missing), std::string::npos);
    EXPECT_EQ(run({"diagnose", "--in", path("nope.csv"), "--out", path("d.json")}).code, 2);
    EXPECT_EQ(run({"generate", "--config", path("nope.ini"), "--out", path("g.csv")}).code, 2);
}

TEST_F(CliTest, DomainErrorIsExitOne) {
    // 40 training hours cannot support five ARMA parameters.
    const auto r = run({"fit", "--in", path("small.csv"), "--order", "2,0,2", "--split", "2017-06-02T16:00:00",
                        "--out", path("m.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error: "), std::string::npos);
    EXPECT_EQ(run({"fit", "--in", path("small.csv"), "--order", "1,0", "--out", path("m.json")}).code, 1);
}

TEST_F(CliTest, GenerateIsReingestibleAndSeeded) {
    const auto y = cli::read_series_file(path("small.csv"));
    EXPECT_EQ(y.size(), 840u);
    EXPECT_EQ(y.start(), parse_timestamp("2017-06-01T00:00:00"));
    ASSERT_EQ(run({"generate", "--config", path("small.ini"), "--out", path("again.csv")}).code, 0);
    EXPECT_EQ(slurp(path("small.csv")), slurp(path("again.csv")));
    ASSERT_EQ(run({"generate", "--config", path("small.ini"), "--seed", "7", "--out", path("seed7.csv")}).code, 0);
    EXPECT_NE(slurp(path("small.csv")), slurp(path("seed7.csv")));
    ASSERT_EQ(run({"--seed", "7", "generate", "--config", path("small.ini"), "--out", path("seed7b.csv")}).code, 0);
    EXPECT_EQ(slurp(path("seed7.csv")), slurp(path("seed7b.csv")));
}

TEST_F(CliTest, DecomposeOutputs) {
    const auto r = run({"decompose", "--in", path("small.csv"), "--out", path("dec.csv"), "--svg", path("dec.svg"),
                        "--daily-profile", path("daily.csv"), "--monthly-profile", path("monthly.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto dec = lines(slurp(path("dec.csv")));
    EXPECT_EQ(dec.front(), "timestamp,observed,trend,seasonal,remainder");
    EXPECT_EQ(dec.size(), 841u);
    // Timestamped output re-ingests as a series (first two columns).
    EXPECT_EQ(cli::read_series_file(path("dec.csv")).size(), 840u);
    const auto daily = lines(slurp(path("daily.csv")));
    EXPECT_EQ(daily.front(), "hour,mean");
    EXPECT_EQ(daily.size(), 25u);
    const auto monthly = lines(slurp(path("monthly.csv")));
    EXPECT_EQ(monthly.front(), "day,mean");
    EXPECT_EQ(monthly.size(), 31u);
    EXPECT_EQ(slurp(path("dec.svg")).rfind("<svg", 0), 0u);
}

TEST_F(CliTest, DiagnoseHasFiveFamilies) {
    ASSERT_EQ(run({"fit", "--in", path("small.csv"), "--order", "2,0,0,1,0,0,24", "--out", path("diag_model.json")}).code, 0);
    const auto r = run({"diagnose", "--in", path("small.csv"), "--model", path("diag_model.json"), "--out",
                        path("diag.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto doc = nlohmann::json::parse(slurp(path("diag.json")));
    EXPECT_EQ(doc.at("report_version"), 1);
    std::set<std::string> families;
    for (const auto& row : doc.at("tests")) {
        families.insert(row.at("test").get<std::string>());
        for (const char* key : {"statistic", "p_value", "reject_at_0.05", "inference", "series"}) {
            EXPECT_TRUE(row.contains(key)) << key;
        }
        EXPECT_EQ(row.at("reject_at_0.05").get<bool>(), row.at("p_value").get<double>() < 0.05);
    }
    EXPECT_EQ(families, (std::set<std::string>{"KPSS test", "Augmented Dickey-Fuller test", "Box-Ljung test",
                                               "Jarque-Bera test", "Anderson-Darling normality test"}));
    EXPECT_EQ(doc.at("tests").size(), 13u);
    EXPECT_EQ(doc.at("acf").at("raw").at("values").size(), 48u);
    EXPECT_TRUE(doc.at("pacf").contains("residuals"));
}

TEST_F(CliTest, FitThenForecastMatchesInProcess) {
    ASSERT_EQ(run({"fit", "--in", path("small.csv"), "--order", "1,0,1,1,0,0,24", "--split", kSplit, "--out",
                   path("model.json")}).code, 0);
    const auto levels_text = std::string("10,20,30,40,50,60,70,80,90,95,99");
    const auto r = run({"forecast", "--model", path("model.json"), "--h", "12", "--levels", levels_text, "--out",
                        path("fc.csv"), "--svg", path("fc.svg")});
    ASSERT_EQ(r.code, 0) << r.err;

    const auto y = cli::read_series_file(path("small.csv"));
    const auto train = split(y, SplitSpec::at_time(parse_timestamp(kSplit))).first;
    const auto fit = sarima::fit(train, {1, 0, 1, 1, 0, 0, 24});
    const auto levels = cli::parse_levels(levels_text);
    const auto f = sarima::forecast(fit, 12, levels);

    const auto rows = lines(slurp(path("fc.csv")));
    ASSERT_EQ(rows.size(), 13u);
    const auto header = cells(rows[0]);
    ASSERT_EQ(header.size(), 2 + 2 * levels.size());
    EXPECT_EQ(header[0], "timestamp");
    EXPECT_EQ(header[1], "point");
    EXPECT_EQ(header[2], "lo10");
    EXPECT_EQ(header[3], "hi10");
    EXPECT_EQ(header.back(), "hi99");
    for (std::size_t h = 0; h < 12; ++h) {
        const auto c = cells(rows[h + 1]);
        EXPECT_EQ(c[0], format_timestamp(f.time_at(h)));
        EXPECT_EQ(std::strtod(c[1].c_str(), nullptr), f.points[h]);
        for (std::size_t i = 0; i < levels.size(); ++i) {
            EXPECT_EQ(std::strtod(c[2 + 2 * i].c_str(), nullptr), f.lower[i][h]);
            EXPECT_EQ(std::strtod(c[3 + 2 * i].c_str(), nullptr), f.upper[i][h]);
        }
    }
    EXPECT_EQ(format_timestamp(f.start), kSplit);

    // Forecast CSV re-ingests as a series of point forecasts.
    const auto back = cli::read_series_file(path("fc.csv"));
    EXPECT_EQ(back.size(), 12u);
    EXPECT_EQ(back[0], f.points[0]);

    // --history continues a longer series with the frozen coefficients.
    ASSERT_EQ(run({"forecast", "--model", path("model.json"), "--history", path("small.csv"), "--h", "3", "--out",
                   path("fc_hist.csv")}).code, 0);
    EXPECT_EQ(cells(lines(slurp(path("fc_hist.csv")))[1])[0], "2017-07-06T00:00:00");
}

TEST_F(CliTest, EvaluateAndCompareTables) {
    const auto r = run({"compare", "--in", path("small.csv"), "--split", kSplit, "--models", "sarima,hw,nnar",
                        "--order", "1,0,1,1,0,0,24", "--restarts", "2", "--paths", "200", "--out", path("cmp.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = lines(slurp(path("cmp.csv")));
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[0], "model,me,rmse,coverage_80,coverage_95,n");
    EXPECT_EQ(cells(rows[1])[0], "sarima/one-step");
    EXPECT_EQ(cells(rows[2])[0], "sarima/multi-step");
    EXPECT_EQ(cells(rows[3])[0], "hw/one-step");
    EXPECT_EQ(cells(rows[5])[0], "nnar/one-step");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto c = cells(rows[i]);
        ASSERT_EQ(c.size(), 6u);
        EXPECT_EQ(c[5], "120");
        const double me = std::stod(c[1]), rmse = std::stod(c[2]);
        EXPECT_GE(rmse * rmse + 1e-5, me * me);
        for (int k : {3, 4}) {
            EXPECT_GE(std::stod(c[k]), 0.0);
            EXPECT_LE(std::stod(c[k]), 1.0);
        }
    }

    const auto e = run({"evaluate", "--in", path("small.csv"), "--split", kSplit, "--model-spec", "hw:additive",
                        "--h", "24", "--out", path("eval.csv")});
    ASSERT_EQ(e.code, 0) << e.err;
    const auto erows = lines(slurp(path("eval.csv")));
    ASSERT_EQ(erows.size(), 3u);
    EXPECT_EQ(erows[1], rows[3]);
    EXPECT_EQ(cells(erows[2])[5], "120");
    EXPECT_EQ(run({"evaluate", "--in", path("small.csv"), "--split", kSplit, "--model-spec", "arima", "--out",
                   path("bad.csv")}).code, 1);
}

TEST_F(CliTest, DeterministicOutputs) {
    const std::vector<std::string> base{"compare", "--in", path("small.csv"), "--split", kSplit, "--models", "nnar",
                                        "--restarts", "2", "--paths", "200", "--h", "24"};
    auto a = base, b = base;
    a.insert(a.end(), {"--out", path("det_a.csv")});
    b.insert(b.end(), {"--out", path("det_b.csv")});
    ASSERT_EQ(run(a).code, 0);
    ASSERT_EQ(run(b).code, 0);
    EXPECT_EQ(slurp(path("det_a.csv")), slurp(path("det_b.csv")));
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "edcast/diagnostics.hpp"
#include "edcast/numeric.hpp"

using namespace edcast::diagnostics;

namespace {

// Standard-normal draws (numpy, seed 20240611); reference statistics below come
// from statsmodels 0.14 / scipy on the same values.
const std::vector<double> kNoise = {
    -0.21118912055729136, -0.5177334709845255, 0.1495958369624623, -1.7898968436779759,
    0.2844522535691842, -0.3216956064836901, -0.726050324449302, 0.09853727513129668,
    -1.9514738484064804, -0.15841288562715672, -0.7312848653804448, 0.40969535789355127,
    0.44244173776631784, -0.9278626907702291, -0.9331679527718499, -1.4700371639889616,
    -0.7876892940867893, 0.3194143920162998, 0.8572703661247674, 0.22879972296310866,
    0.03479925265515608, -0.8674471104434567, 0.19577021284431775, -0.8156895315256701,
    0.23962888489868106, -0.20259332624012352, 0.8560181034854327, 0.2024703525539789,
    1.3688252896097017, -0.4082144474715901, 0.7559450824466323, 0.22516072407457527,
    1.6965558201068938, -1.9620539547190585, 0.8742582951813314, -1.0236516100709405,
    -0.8686467389750054, -0.018363115062379937, -1.5105593611064696, -1.1945810265785586,
    -0.5055418749192547, -0.32248383162699573, -1.9036789280897755, -0.8736312382373598,
    -0.14591356690623353, -0.13192758477062216, -0.6623081572224156, -0.004088789106296888,
    -0.5133744270857837, 1.173498778229933, -0.8091351820079116, 0.05910379879897925,
    -0.4895950062802856, 0.8545624531310859, -0.9715485115688727, 0.8766026328650387,
    -1.1953017929996643, -1.366996897121547, -0.5484695736103665, 0.09212685627119044,
    -1.5210236133299682, -0.5041894554335143, -0.003970465709318486, -0.03555765389596433,
    0.8755659365466596, 0.7842735347855208, 0.3328312480926164, 0.9134330350514333,
    0.9397262079681602, -1.1091623712921952, 2.185262079056387, -0.04892698270045923,
    -0.6059423952504954, 0.600149321696642, -0.4885771515933718, 0.6271570321279208,
    -1.2013988771197082, 0.7253584703756797, -1.2638736463683906, 0.3757325601327688
};

// AR(1) with phi = 0.6 driven by further draws from the same generator.
const std::vector<double> kAr1 = {
    -0.21322506082178258, -0.6294180057305319, -0.2245773500746241, -0.7100548089249632,
    -1.1979758315201148, -0.3238790214742251, 1.7368794345555587, 0.04437078536554162,
    1.1817897874741954, 1.7906315663952808, -0.04570129851429705, 0.16281382625299426,
    0.621727392137754, -0.5378196286807364, 0.7565259920031042, 1.331825385300264,
    2.497532927091849, 1.888354177621288, 2.079042962999054, 3.059542302546591, 2.038715933433535,
    0.7230067702010665, -1.017110258663262, -0.32381135375404646, -1.461503349432454,
    0.22079134913354248, 0.27963986839739957, 0.9788411876016606, 0.7500182298118832,
    1.6883422978521803, 0.5566507016282001, 0.38405814364018953, 1.63054984271314,
    -0.27998112656249863, 0.024538554412559477, 0.9899805425514866, -0.4695450635473315,
    -0.9814459935543334, -1.8387785955819884, 0.07748869860979202, -0.14288629025172814,
    -0.4008844692087214, -1.6530747813372622, -2.0556329576416186, -0.3068473717680311,
    -0.3735746789755012, -0.6250313369214966, 0.41687904227043115, -0.6557428073502005,
    1.2199318122938663, 0.3637445493877029, -0.2947964116820734, -0.4420429792710273,
    -0.22788418433411411, 0.5644380252516094, -0.36017288724814883, -1.0401310359238056,
    -0.5859213034104493, -0.012606301450470592, 0.8696916764629201, 0.04506183251945983,
    0.994048810958122, -0.42346363841776735, 1.131700007438975, -0.4130518798855427,
    -0.33409534495368687, -0.005162874067791201, 1.0100706852544283, 2.066209957728649,
    1.28895702958555, 2.6690186863560754, 0.7818858062714891, 0.7962172642383044,
    0.24082973832186236, 0.7169245463228242, -0.521702929165273, -1.4108588831862856,
    0.4366453388236182, 1.3260175561898073, 1.3567287630648956, 0.11182439300780711,
    0.6591655725414094, 0.8426568951594449, 1.739057139606612, 1.2763505646119349,
    -0.848708739768611, -0.7254852444367316, -0.462736236915367, 0.5145634078492463,
    0.06096523285947841, -1.0216379080110256, 0.5374091540394906, 0.7080444135262074,
    -0.6725972163396363, -1.0673973767469291, 0.27870716241310367, -1.1821432529849827,
    0.2586900501284709, 0.1780860596594217, -0.04536778315460627, 0.8388655587249932,
    0.0791626010516484, 0.10327740191724408, 1.6969681666306393, 0.17331060358813155,
    1.925671479703027, -0.5307135383349257, -1.1748757661034526, 0.19599182535472126,
    -0.5452486042384289, -0.6454843596695234, 0.4022912991286887, 1.1991801511078686,
    1.2095407082855392, 0.18438585036512578, 0.7388982885102348, 0.5972037036331761,
    1.5375036203370953, 1.3123722897520582, -0.008505238142998306, -0.13049175841885674,
    -1.6306161397357148, -0.3491050058183153, 0.23757523323834176, 0.16131508637786723,
    -1.248791892962619, -1.1382058115712919, -0.0007210630542587859, -0.18473572630057614,
    0.009262492475651155, 1.15073340099698, 1.3239214889192068, -0.8043911282751381,
    -0.11599095032589424, -1.005455580152609, -2.8281721475928006, -0.5369300258099832,
    -1.8077559988388043, -1.4001934612615798, 0.4088548232673642, 0.9483313773439769,
    0.5069494659979216, -0.58369229093362, -0.054092727614909186, -0.1007261835250758,
    0.7609695278663277, 0.8448293933564275, 1.236018626042028, -0.7620047781408164,
    -1.3162664793257135
};

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v) x = z(rng);
    return v;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) {
    auto v = white_noise(n, seed);
    for (std::size_t i = 1; i < n; ++i) v[i] += v[i - 1];
    return v;
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
    auto v = white_noise(n, seed);
    for (std::size_t i = 1; i < n; ++i) v[i] += phi * v[i - 1];
    return v;
}

void expect_consistent(const TestResult& r) {
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    EXPECT_EQ(r.reject_null, r.p_value < r.alpha);
}

}  // namespace

TEST(Acf, HandExamples) {
    const auto a = acf(std::vector<double>{1, 2, 3, 4, 5}, 1);
    EXPECT_NEAR(a.coefficients[0], 0.4, 1e-15);
    EXPECT_NEAR(a.band, 1.96 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(acf(std::vector<double>{1, -1, 1, -1}, 1).coefficients[0], -0.75, 1e-15);
}

TEST(Acf, MatchesReference) {
    const std::vector<double> ref{-0.14079175870901217, 0.335718747641665, 0.021094560397309194,
                                  0.1209511206295211, -0.011527641822342574};
    const auto a = acf(kNoise, 10);
    ASSERT_EQ(a.coefficients.size(), 10u);
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(a.coefficients[k], ref[k], 1e-13);
}

TEST(Acf, Errors) {
    EXPECT_THROW((void)acf(std::vector<double>{2, 2, 2, 2}, 1), std::domain_error);
    EXPECT_THROW((void)acf(std::vector<double>{1, 2, 3}, 3), std::invalid_argument);
}

TEST(Pacf, MatchesReference) {
    const std::vector<double> ref{-0.14079175870901217, 0.3222848617632835, 0.11214282958177023,
                                  0.031967015817927685, -0.04217407481512397};
    const auto p = pacf(kNoise, 10);
    for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(p.coefficients[k], ref[k], 1e-12);
}

TEST(Pacf, FirstLagAndExactAr1) {
    EXPECT_NEAR(pacf(std::vector<double>{1, 2, 3, 4, 5}, 1).coefficients[0], 0.4, 1e-15);
    std::vector<double> y(50);
    y[0] = 1.0;
    for (std::size_t t = 1; t < y.size(); ++t) y[t] = 0.8 * y[t - 1];
    EXPECT_LT(std::abs(pacf(y, 2).coefficients[1]), 0.3);
}

TEST(Pacf, WhiteNoiseMostlyInsideBand) {
    const auto p = pacf(white_noise(2000, 11), 24);
    int inside = 0;
    for (double c : p.coefficients) inside += std::abs(c) < p.band;
    EXPECT_GE(inside, 22);
}

TEST(DurbinLevinson, BreakdownIsDomainError) {
    EXPECT_THROW((void)durbin_levinson(std::vector<double>{0.9, -0.9}), std::domain_error);
}

TEST(CorrelogramProperty, ShiftScaleInvariantAndBounded) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto y = ar1(300, 0.5, seed);
        std::vector<double> z(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) z[i] = -3.5 * y[i] + 12.0;
        const auto a = acf(y, 30), b = acf(z, 30);
        const auto p = pacf(y, 30);
        EXPECT_NEAR(p.coefficients[0], a.coefficients[0], 1e-15);
        for (std::size_t k = 0; k < 30; ++k) {
            EXPECT_NEAR(a.coefficients[k], b.coefficients[k], 1e-12);
            EXPECT_LE(std::abs(a.coefficients[k]), 1.0 + 1e-9);
            EXPECT_LE(std::abs(p.coefficients[k]), 1.0 + 1e-9);
        }
    }
}

TEST(LjungBox, MatchesReference) {
    const auto r = ljung_box(kNoise, 10);
    EXPECT_NEAR(r.statistic, 16.07136801258363, 1e-10);
    EXPECT_NEAR(r.p_value, 0.0976075537573008, 1e-10);
    EXPECT_EQ(r.df_or_bandwidth, 10);
    EXPECT_FALSE(r.reject_null);
    EXPECT_EQ(r.inference, "No significant autocorrelation");

    const auto r2 = ljung_box(kNoise, 10, 2);
    EXPECT_NEAR(r2.p_value, 0.04136993319297392, 1e-10);
    EXPECT_EQ(r2.df_or_bandwidth, 8);
    EXPECT_TRUE(r2.reject_null);
    EXPECT_EQ(r2.inference, "Significant autocorrelation");
}

TEST(LjungBox, HandExample) {
    // Four values with r_1 = 1/6: Q = 4 * 6 * (1/36) / 3 = 2/9.
    const std::vector<double> y{2, 0, -1, -1};
    EXPECT_NEAR(acf(y, 1).coefficients[0], 1.0 / 6.0, 1e-15);
    const auto r = ljung_box(y, 1);
    EXPECT_NEAR(r.statistic, 2.0 / 9.0, 1e-14);
    EXPECT_NEAR(r.p_value, edcast::numeric::chi_square_sf(2.0 / 9.0, 1), 1e-15);
    EXPECT_NEAR(edcast::numeric::chi_square_sf(100.0 * 102.0 * 0.09 / 99.0, 1), 0.002325911130774009,
                1e-12);
}

TEST(LjungBox, ZeroAutocorrelationGivesUnitPValue) {
    const std::vector<double> y{1, 0, -1, 0, 1, 0, -1, 0};
    EXPECT_NEAR(acf(y, 1).coefficients[0], 0.0, 1e-15);
    const auto r = ljung_box(y, 1);
    EXPECT_NEAR(r.statistic, 0.0, 1e-15);
    EXPECT_NEAR(r.p_value, 1.0, 1e-12);
    EXPECT_FALSE(r.reject_null);
}

TEST(LjungBox, Errors) {
    EXPECT_THROW((void)ljung_box(kNoise, 2, 2), std::invalid_argument);
    EXPECT_THROW((void)ljung_box(kNoise, 80), std::invalid_argument);
    EXPECT_THROW((void)ljung_box(kNoise, 0), std::invalid_argument);
}

TEST(LjungBoxProperty, MonotoneInLag) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto y = white_noise(200, seed);
        double prev = 0.0;
        for (std::size_t h = 1; h <= 40; ++h) {
            const auto r = ljung_box(y, h);
            EXPECT_GE(r.statistic, prev);
            prev = r.statistic;
            expect_consistent(r);
        }
    }
}

TEST(JarqueBera, MatchesReference) {
    const auto r = jarque_bera(kNoise);
    EXPECT_NEAR(r.statistic, 0.3907019649119872, 1e-11);
    EXPECT_NEAR(r.p_value, 0.8225459082028879, 1e-11);
    EXPECT_EQ(r.inference, "Consistent with normality");
}

TEST(JarqueBera, AlternatingSigns) {
    std::vector<double> y(100);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i % 2 ? -1.0 : 1.0;
    const auto r = jarque_bera(y);
    EXPECT_NEAR(r.statistic, 100.0 / 6.0, 1e-12);
    EXPECT_NEAR(r.p_value, 0.00024036947641951404, 1e-12);
    EXPECT_TRUE(r.reject_null);
    EXPECT_EQ(r.inference, "Rejects the null hypothesis of normality");
}

TEST(JarqueBera, Errors) {
    EXPECT_THROW((void)jarque_bera(std::vector<double>{1, 1, 1, 1, 1}), std::domain_error);
    EXPECT_THROW((void)jarque_bera(std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(JarqueBeraProperty, MatchesDirectMoments) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        auto y = white_noise(50 + 7 * seed, seed);
        for (auto& v : y) v = std::exp(0.3 * v);
        const double n = static_cast<double>(y.size());
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= n;
        double m2 = 0, m3 = 0, m4 = 0;
        for (double v : y) {
            const double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        const double s = m3 / std::pow(m2, 1.5);
        const double k = m4 / (m2 * m2);
        const double jb = n / 6.0 * (s * s + (k - 3) * (k - 3) / 4.0);
        EXPECT_NEAR(jarque_bera(y).statistic, jb, 1e-10 * std::max(1.0, jb));
    }
}

TEST(AndersonDarling, MatchesReference) {
    const auto r = anderson_darling(kNoise);
    EXPECT_NEAR(r.statistic, 0.2199693722872098, 1e-12);
    EXPECT_NEAR(r.p_value, 0.8295835997073012, 1e-10);
    EXPECT_FALSE(r.reject_null);
    EXPECT_EQ(r.inference, "Consistent with normality");
}

TEST(AndersonDarling, Errors) {
    EXPECT_THROW((void)anderson_darling(std::vector<double>(10, 3.0)), std::domain_error);
    EXPECT_THROW((void)anderson_darling(std::vector<double>{1, 2, 3}), std::invalid_argument);
}

TEST(AndersonDarling, CalibrationAndPower) {
    int normal_rejects = 0, exp_rejects = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> z;
        std::exponential_distribution<double> e(1.0);
        std::vector<double> a(200), b(200);
        for (auto& v : a) v = z(rng);
        for (auto& v : b) v = e(rng);
        normal_rejects += anderson_darling(a).reject_null;
        exp_rejects += anderson_darling(b).reject_null;
    }
    EXPECT_LE(normal_rejects, 10);
    EXPECT_GE(exp_rejects, 99);
}

TEST(AndersonDarling, ExtremeOutlierClampsAndFlags) {
    std::vector<double> y(1000, 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (i % 2 ? 1e-3 : -1e-3) * static_cast<double>(i % 7);
    y[0] = 1e6;
    const auto r = anderson_darling(y);
    EXPECT_TRUE(std::isfinite(r.statistic));
    EXPECT_TRUE(r.p_clamped);
    EXPECT_TRUE(r.reject_null);
}

TEST(Adf, MatchesReferenceStatistic) {
    const auto ct = adf_test(kAr1, 3, AdfTrend::constant_and_trend);
    EXPECT_NEAR(ct.statistic, -5.50289305273937, 1e-9);
    EXPECT_EQ(ct.df_or_bandwidth, 3);
    EXPECT_EQ(ct.p_value, 0.01);
    EXPECT_TRUE(ct.p_clamped);
    EXPECT_EQ(ct.inference, "Rejects the null hypothesis of non-stationarity");

    const auto c = adf_test(kAr1, 2, AdfTrend::constant);
    EXPECT_NEAR(c.statistic, -5.242819632696299, 1e-9);
}

TEST(Adf, DefaultLagOrder) {
    const auto r = adf_test(kAr1);
    EXPECT_EQ(r.df_or_bandwidth, static_cast<int>(std::floor(std::cbrt(149.0))));
}

TEST(Adf, InterpolatesInsideTable) {
    // A short random walk lands inside the tau table.
    const auto r = adf_test(random_walk(200, 3));
    expect_consistent(r);
    EXPECT_GT(r.p_value, 0.01);
    EXPECT_LT(r.p_value, 0.99);
    EXPECT_FALSE(r.p_clamped);
    EXPECT_EQ(r.inference, "Fails to reject the null hypothesis of non-stationarity");
}

TEST(Adf, Errors) {
    EXPECT_THROW((void)adf_test(std::vector<double>(12, 1.0), 3), std::invalid_argument);
    std::vector<double> flat(100, 5.0);
    EXPECT_THROW((void)adf_test(flat, 2), std::domain_error);
}

TEST(Kpss, MatchesReference) {
    const auto r = kpss_test(kAr1, 4);
    EXPECT_NEAR(r.statistic, 0.2042952768490748, 1e-12);
    EXPECT_EQ(r.p_value, 0.10);
    EXPECT_TRUE(r.p_clamped);
    EXPECT_FALSE(r.reject_null);
    EXPECT_EQ(r.inference, "Fails to reject the null hypothesis of stationarity");
    EXPECT_EQ(kpss_test(kAr1).df_or_bandwidth, 4);
}

TEST(Kpss, RampRejects) {
    std::vector<double> y(500);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = static_cast<double>(t);
    const auto r = kpss_test(y);
    EXPECT_TRUE(r.reject_null);
    EXPECT_EQ(r.p_value, 0.01);
    EXPECT_EQ(r.inference, "Rejects the null hypothesis of stationarity");
}

TEST(Kpss, TooShort) {
    EXPECT_THROW((void)kpss_test(white_noise(19, 1)), std::invalid_argument);
}

TEST(UnitRootProperty, AdfAndKpssAgreeOnStationaryAr1) {
    int joint = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto y = ar1(1000, 0.5, seed);
        const auto a = adf_test(y);
        const auto k = kpss_test(y);
        expect_consistent(a);
        expect_consistent(k);
        joint += a.reject_null && !k.reject_null;
    }
    EXPECT_GE(joint, 90);
}

TEST(DefaultLjungBoxLag, Convention) {
    EXPECT_EQ(default_ljung_box_lag(1000, 24), 48u);
    EXPECT_EQ(default_ljung_box_lag(1000, 0), 10u);
    EXPECT_EQ(default_ljung_box_lag(30, 0), 6u);
}

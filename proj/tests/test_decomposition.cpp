#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "edcast/decomposition.hpp"

using namespace edcast;
using namespace edcast::decomposition;

namespace {

Series make(std::vector<double> v) { return Series(parse_timestamp("2017-04-01T00:00:00"), std::move(v)); }

// Noisy period-6 sine; reference components from statsmodels seasonal_decompose.
const std::vector<double> kNoisy{9.198,  11.274, 12.35,  10.42,  8.538,  7.512,  9.447,  11.813,
                                 13.347, 11.635, 7.675,  6.169,  9.042,  14.198, 12.801, 8.268,
                                 7.318,  6.239,  9.371,  12.11,  11.885, 10.553, 7.339,  6.812,
                                 10.41,  13.428, 10.955, 9.743,  6.421,  7.229};

}  // namespace

TEST(ClassicalDecompose, PurePattern) {
    std::vector<double> y;
    for (int r = 0; r < 4; ++r) y.insert(y.end(), {2, 4, 6, 8});
    const auto d = classical_decompose(make(y), 4);
    const std::vector<double> expected{-3, -1, 1, 3};
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(d.seasonal_pattern[j], expected[j], 1e-12);
    for (std::size_t t = 2; t < 14; ++t) EXPECT_NEAR(*d.trend[t], 5.0, 1e-12);
}

TEST(ClassicalDecompose, PureLine) {
    std::vector<double> y(20);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 * static_cast<double>(t);
    const auto d = classical_decompose(make(y), 4);
    for (double s : d.seasonal_pattern) EXPECT_NEAR(s, 0.0, 1e-12);
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (t < 2 || t >= 18) {
            EXPECT_FALSE(d.trend[t].has_value());
            EXPECT_FALSE(d.remainder[t].has_value());
        } else {
            EXPECT_NEAR(*d.trend[t], y[t], 1e-12);
        }
    }
}

TEST(ClassicalDecompose, LinePlusPattern) {
    std::vector<double> y(24);
    const double pat[4] = {2, 4, 6, 8};
    for (std::size_t t = 0; t < y.size(); ++t) y[t] = 3.0 * static_cast<double>(t) + pat[t % 4];
    const auto d = classical_decompose(make(y), 4);
    const std::vector<double> expected{-3, -1, 1, 3};
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(d.seasonal_pattern[j], expected[j], 1e-12);
    for (std::size_t t = 2; t < 22; ++t) {
        EXPECT_NEAR(*d.trend[t], 3.0 * static_cast<double>(t) + 5.0, 1e-12);
        EXPECT_NEAR(*d.remainder[t], 0.0, 1e-12);
    }
    EXPECT_NEAR(seasonal_strength(d), 1.0, 1e-12);
}

TEST(ClassicalDecompose, MatchesReferenceEvenPeriod) {
    const auto d = classical_decompose(make(kNoisy), 6);
    const std::vector<double> seas{-0.3424861111111109, 3.035472222222223, 2.4452222222222213,
                                   0.3517847222222225, -2.219840277777778, -3.2701527777777777};
    const std::vector<double> trend{9.90275, 9.968416666666666, 10.096416666666666,
                                    10.280749999999998, 10.310083333333331};
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(d.seasonal_pattern[j], seas[j], 1e-12);
    for (std::size_t i = 0; i < trend.size(); ++i) EXPECT_NEAR(*d.trend[3 + i], trend[i], 1e-12);
}

TEST(ClassicalDecompose, MatchesReferenceOddPeriod) {
    const auto d = classical_decompose(make({kNoisy.begin(), kNoisy.begin() + 25}), 5);
    const std::vector<double> seas{-1.0183280000000003, -1.301178, -0.541688, 1.6940720000000002,
                                   1.1671220000000004};
    const std::vector<double> trend{10.356000000000002, 10.0188, 9.6534};
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(d.seasonal_pattern[j], seas[j], 1e-12);
    for (std::size_t i = 0; i < trend.size(); ++i) EXPECT_NEAR(*d.trend[2 + i], trend[i], 1e-12);
    EXPECT_FALSE(d.trend[1].has_value());
    EXPECT_FALSE(d.trend[23].has_value());
}

TEST(ClassicalDecompose, Errors) {
    EXPECT_THROW((void)classical_decompose(make({1, 2, 3, 4, 5}), 3), std::invalid_argument);
    EXPECT_THROW((void)classical_decompose(make({1, 2, 3, 4}), 1), std::invalid_argument);
}

TEST(DecomposeProperty, ReconstructsAndCentres) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (std::size_t period : {2u, 3u, 7u, 24u}) {
        std::vector<double> y(period * 5 + 3);
        for (auto& v : y) v = 20.0 + 5.0 * z(rng);
        const auto d = classical_decompose(make(y), period);
        EXPECT_NEAR(std::accumulate(d.seasonal_pattern.begin(), d.seasonal_pattern.end(), 0.0), 0.0,
                    1e-10);
        for (std::size_t t = 0; t < y.size(); ++t) {
            EXPECT_EQ(d.seasonal[t], d.seasonal_pattern[t % period]);
            if (d.trend[t]) EXPECT_NEAR(*d.trend[t] + d.seasonal[t] + *d.remainder[t], y[t], 1e-12);
        }
        const double fs = seasonal_strength(d);
        EXPECT_GE(fs, 0.0);
        EXPECT_LE(fs, 1.0);
    }
}

TEST(DecomposeProperty, ShiftMovesTrendOnly) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> z;
    std::vector<double> y(60), shifted(60);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = z(rng);
        shifted[t] = y[t] + 17.5;
    }
    const auto a = classical_decompose(make(y), 12);
    const auto b = classical_decompose(make(shifted), 12);
    for (std::size_t j = 0; j < 12; ++j) EXPECT_NEAR(a.seasonal_pattern[j], b.seasonal_pattern[j], 1e-12);
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!a.trend[t]) continue;
        EXPECT_NEAR(*b.trend[t], *a.trend[t] + 17.5, 1e-12);
        EXPECT_NEAR(*b.remainder[t], *a.remainder[t], 1e-12);
    }
}

TEST(MeanProfile, Examples) {
    EXPECT_EQ(mean_profile(make({1, 2, 3, 4, 5, 6}), 3), (std::vector<double>{2.5, 3.5, 4.5}));
    // Unequal phase counts: phase 0 sees 1 and 5, phase 1 only 2.
    EXPECT_EQ(mean_profile(make({1, 2, 5}), 2), (std::vector<double>{3.0, 2.0}));
    EXPECT_THROW((void)mean_profile(make({1, 2}), 3), std::invalid_argument);
}

TEST(MeanProfileProperty, PeriodicSeriesReturnsItsPattern) {
    std::vector<double> pattern(24);
    for (std::size_t h = 0; h < 24; ++h) pattern[h] = std::sin(static_cast<double>(h)) + 4.0;
    std::vector<double> y;
    for (int day = 0; day < 9; ++day) y.insert(y.end(), pattern.begin(), pattern.end());
    const auto p = mean_profile(make(y), 24);
    for (std::size_t h = 0; h < 24; ++h) EXPECT_NEAR(p[h], pattern[h], 1e-12);
}

TEST(Aggregate, SumsBlocksAndDropsTail) {
    const auto s = aggregate(make({1, 2, 3, 4, 5, 6, 7}), 3);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0], 6.0);
    EXPECT_EQ(s[1], 15.0);
    EXPECT_EQ(s.step(), 3 * kHour);
    EXPECT_THROW((void)aggregate(make({1, 2}), 3), std::invalid_argument);
}

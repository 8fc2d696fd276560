#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <mmblock/shadow.hpp>

#include "oracles.hpp"

using namespace mmblock;

namespace {

double g_oracle(const Scenario& s, double x)
{
    const auto& p = s.population;
    return oracle::g(s.tx_height_m, s.rx_height_m, s.distance_m, p.height_mean_m, p.height_std_m, x);
}

double n_oracle(const Scenario& s)
{
    return oracle::simpson([&](double x) { return g_oracle(s, x); }, 0.0, s.distance_m, 200000);
}

}  // namespace

TEST(Shadow, CircumferenceIntensityMatchesOracle)
{
    for (double r : {10.0, 30.0, 150.0}) {
        Scenario s;
        s.distance_m = r;
        const auto& p = s.population;
        const double ref = oracle::mu(s.tx_height_m, s.rx_height_m, r, p.height_mean_m, p.height_std_m,
                                      p.density_per_m2);
        EXPECT_NEAR(circumference_intensity(s) / ref, 1.0, 1e-8) << "r = " << r;
    }
    EXPECT_NEAR(circumference_intensity(Scenario{}), 1.228397, 1e-6);
}

TEST(Shadow, DistancePdfIsNormalizedAndMatchesOracle)
{
    const Scenario s;
    const auto fl = distance_pdf(s);
    EXPECT_TRUE(fl.is_normalized(1e-12));
    EXPECT_NEAR(fl.raw_mass(), 1.0, 1e-6);
    const double n = n_oracle(s);
    for (double x : {20.0, 25.0, 28.0, 29.9}) EXPECT_NEAR(fl.pdf_at(x), g_oracle(s, x) / n, 1e-4);
}

TEST(Shadow, WidthDensityMatchesOracleOnBothBranches)
{
    const Scenario s;
    const auto& p = s.population;
    const double r = s.distance_m;
    const double n = n_oracle(s);
    const double f_rd = 1.0 / (r * (p.diameter_max_m - p.diameter_min_m));
    for (double y : {0.25, 0.5, 0.79, 0.81, 1.2}) {
        const double lo = r * p.diameter_min_m / y;
        const double hi = y < p.diameter_max_m ? r : r * p.diameter_max_m / y;
        const double ref = oracle::simpson([&](double x) { return x * f_rd * g_oracle(s, x) / n; }, lo, hi, 200000);
        EXPECT_NEAR(shadow_width_density(s, normalization_constant(s), y, 1e-10), ref, 1e-8) << "y = " << y;
    }
    EXPECT_EQ(shadow_width_density(s, normalization_constant(s), 0.1, 1e-10), 0.0);
}

TEST(Shadow, WidthDistributionIsNormalized)
{
    const Scenario s;
    const auto fw = shadow_width_distribution(s);
    EXPECT_NEAR(fw.raw_mass(), 1.0, 1e-6);
    EXPECT_TRUE(fw.is_normalized(1e-12));
    EXPECT_LT(shadow_tail_prob(s, normalization_constant(s), fw.x_max()), 1e-9);
    EXPECT_DOUBLE_EQ(fw.x0(), s.population.diameter_min_m);
}

TEST(Shadow, MeanWidthMatchesMomentOracle)
{
    // E[W] = r E[D] E[1/L] with E[1/L] = integral g(x)/x dx / N.
    const Scenario s;
    const double n = n_oracle(s);
    const double inv_l =
        oracle::simpson([&](double x) { return g_oracle(s, x) / x; }, 1e-9, s.distance_m, 200000) / n;
    const double ref = s.distance_m * s.population.mean_diameter() * inv_l;
    EXPECT_NEAR(shadow_width_distribution(s).mean(), ref, 1e-6);
}

TEST(Shadow, MeanWidthMatchesSamplingOracle)
{
    // W = r D / L with L drawn by inverting a fine cumulative table of g.
    const Scenario s;
    const double r = s.distance_m;
    const int cells = 200000;
    std::vector<double> cum(cells + 1, 0.0);
    const double h = r / cells;
    for (int i = 0; i < cells; ++i)
        cum[i + 1] = cum[i] + 0.5 * h * (g_oracle(s, h * i) + g_oracle(s, h * (i + 1)));
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const int samples = 1000000;
    double sum = 0.0, sum2 = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double target = u(rng) * cum.back();
        const auto it = std::upper_bound(cum.begin(), cum.end(), target);
        const auto j = std::clamp<std::ptrdiff_t>(it - cum.begin() - 1, 0, cells - 1);
        const double frac = (target - cum[j]) / std::max(cum[j + 1] - cum[j], 1e-300);
        const double l = h * (j + std::clamp(frac, 0.0, 1.0));
        const double d = s.population.diameter_min_m +
                         (s.population.diameter_max_m - s.population.diameter_min_m) * u(rng);
        const double w = r * d / l;
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
    EXPECT_NEAR(shadow_width_distribution(s).mean(), mean, 4.0 * se);
    EXPECT_NEAR(mean, 0.5443557, 4.0 * se);
}

TEST(Shadow, UnreachableLosIsDegenerate)
{
    Scenario s;
    s.rx_height_m = 50.0;
    s.tx_height_m = 60.0;
    EXPECT_THROW(distance_pdf(s), DegenerateScenario);
    EXPECT_THROW(shadow_width_distribution(s), DegenerateScenario);
}

TEST(Shadow, HeavyTailBeyondDoublingCapThrows)
{
    // With the Tx barely above the crowd, blockers next to the Tx cast
    // huge shadows.
    Scenario s;
    s.tx_height_m = 2.0;
    NumericsOptions opt;
    opt.max_shadow_doublings = 0;
    EXPECT_THROW(shadow_width_distribution(s, opt), NumericError);
}

TEST(ShadowProperty, IntensityIsLinearInDensity)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        Scenario s;
        s.distance_m = 5.0 + 150.0 * u(rng);
        s.tx_height_m = 2.0 + 10.0 * u(rng);
        s.population.density_per_m2 = 0.01 + u(rng);
        const double k = 0.1 + 5.0 * u(rng);
        Scenario t = s;
        t.population.density_per_m2 *= k;
        EXPECT_NEAR(circumference_intensity(t), k * circumference_intensity(s),
                    1e-12 * circumference_intensity(t) + 1e-300);
    }
}

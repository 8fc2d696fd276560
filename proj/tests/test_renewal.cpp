#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <mmblock/evaluate.hpp>
#include <mmblock/renewal.hpp>
#include <mmblock/shadow.hpp>

using namespace mmblock;

namespace {

struct Solved {
    double mu;
    TabulatedDistribution shadow;
    RenewalSolution sol;
};

Solved solve(const Scenario& s, FormulaReading reading = FormulaReading::corrected)
{
    Solved out;
    out.mu = circumference_intensity(s);
    out.shadow = shadow_width_distribution(s);
    out.sol = solve_renewal(s, out.mu, out.shadow, {}, reading);
    return out;
}

}  // namespace

TEST(Renewal, CycleDensityIsNormalized)
{
    const auto r = solve(Scenario{});
    EXPECT_NEAR(r.sol.cycle_density.mass(), 1.0, 1e-6);
    EXPECT_LT(r.sol.tail_mass, 1e-8);
    EXPECT_LT(r.sol.max_clamp, 1e-6);
}

TEST(Renewal, MeanCycleIdentities)
{
    for (double dist : {10.0, 30.0, 90.0}) {
        Scenario s;
        s.distance_m = dist;
        const auto r = solve(s);
        const auto& sol = r.sol;
        const double closed = std::exp(r.mu * r.shadow.mean()) / r.mu;
        EXPECT_NEAR(sol.mean_cycle / closed, 1.0, 1e-6) << "r = " << dist;
        EXPECT_NEAR((sol.mean_unblocked + sol.mean_blocked) / sol.mean_cycle, 1.0, 1e-6) << "r = " << dist;
        EXPECT_NEAR(sol.mean_blocked / sol.mean_blocked_closed(), 1.0, 1e-6) << "r = " << dist;
    }
}

TEST(Renewal, ZeroLengthReceiverGivesVacancyComplement)
{
    Scenario s;
    s.rx_length_m = 0.0;
    const auto r = solve(s);
    const double p = blockage_prob_interval(s, r.sol).probability;
    EXPECT_NEAR(p, 1.0 - std::exp(-r.mu * r.shadow.mean()), 1e-4);
    EXPECT_NEAR(p, 0.48762, 1e-4);
}

TEST(Renewal, SmallReceiverSpecialCase)
{
    for (double l : {0.0, 0.05, 0.1, 0.19}) {
        Scenario s;
        s.rx_length_m = l;
        const auto r = solve(s);
        const auto b = interval_breakdown(s, r.sol);
        ASSERT_TRUE(b.special_case.has_value());
        const double closed = 1.0 - (1.0 + r.mu * l) * std::exp(-r.mu * r.shadow.mean());
        EXPECT_NEAR(*b.special_case, closed, 1e-15);
        EXPECT_NEAR(b.estimate.probability, closed, 1e-3) << "l = " << l;
    }
    EXPECT_NEAR(interval_blockage(Scenario{}, {}).probability, 0.424677, 1e-6);
}

TEST(Renewal, LiteralSpecialCaseDisagrees)
{
    const Scenario s;
    const auto r = solve(s);
    const auto b = interval_breakdown(s, r.sol);
    ASSERT_TRUE(b.special_case_as_printed.has_value());
    EXPECT_GT(std::abs(*b.special_case_as_printed - b.estimate.probability), 1e-3);
}

TEST(Renewal, LiteralRenewalIsNotIntegrable)
{
    Scenario s;
    s.rx_length_m = 0.5;
    const double mu = circumference_intensity(s);
    const auto w = shadow_width_distribution(s);
    NumericsOptions opt;
    opt.max_renewal_points = 20000;
    EXPECT_THROW(solve_renewal(s, mu, w, opt, FormulaReading::as_printed), NumericError);
}

TEST(Renewal, ZeroIntensityIsDegenerate)
{
    const Scenario s;
    EXPECT_THROW(solve_renewal(s, 0.0, shadow_width_distribution(s)), DegenerateScenario);
    Scenario z;
    z.population.density_per_m2 = 0.0;
    const auto e = interval_blockage(z, {});
    EXPECT_EQ(e.probability, 0.0);
    EXPECT_TRUE(e.degenerate);
}

TEST(RenewalProperty, BlockageNonincreasingInLengthAndBounded)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 6; ++i) {
        Scenario s;
        s.distance_m = 10.0 + 60.0 * u(rng);
        s.tx_height_m = 3.0 + 4.0 * u(rng);
        s.population.density_per_m2 = 0.05 + 0.5 * u(rng);
        const auto r = solve(s);
        double prev = 2.0;
        for (double l = 0.0; l <= 2.0; l += 0.1) {
            s.rx_length_m = l;
            const double p = blockage_prob_interval(s, r.sol).probability;
            EXPECT_GE(p, 0.0);
            EXPECT_LE(p, 1.0);
            EXPECT_LE(p, prev + 1e-9);
            prev = p;
        }
    }
}

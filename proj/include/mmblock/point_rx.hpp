#pragma once

// LoS probability for an infinitesimal receiver. Every blocker that could
// cut the LoS has its center in the r x d_max strip along the Tx-Rx line;
// their number is Poisson and each one independently misses the LoS
// (too narrow or too short) with probability q.

#include <algorithm>
#include <cmath>

#include "estimate.hpp"
#include "numerics.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "shadow.hpp"

namespace mmblock {

struct StripModel {
    double strip_length_m = 0.0;
    double strip_width_m = 0.0;
    double area_intensity = 0.0;    ///< Lambda = lambda_I r d_max
    double prob_radius_miss = 0.0;  ///< Pr{B0}
    double prob_height_miss = 0.0;  ///< Pr{C0}
    double per_blocker_miss = 0.0;  ///< q
};

/// Pr{B0}: a blocker with lateral offset uniform over the strip does not
/// reach the LoS line, i.e. its radius is below |offset|.
inline double prob_radius_miss(const BlockerPopulation& pop)
{
    const double r_lo = pop.radius_min();
    const double r_hi = pop.radius_max();
    const double offset_density = 1.0 / pop.diameter_max_m;
    const auto radius_cdf = [&](double t) { return std::clamp((t - r_lo) / (r_hi - r_lo), 0.0, 1.0); };
    const auto integrand = [&](double y) { return offset_density * radius_cdf(std::abs(y)); };
    // Integrand is even and has a kink at |y| = r_lo.
    QuadratureOptions opt;
    opt.rel_tol = kScalarQuadTol;
    const double half = integrate_adaptive(integrand, 0.0, r_lo, opt).value +
                        integrate_adaptive(integrand, r_lo, r_hi, opt).value;
    return std::clamp(2.0 * half, 0.0, 1.0);
}

/// Pr{C0}: a blocker placed uniformly along (0, r) is shorter than the LoS
/// above it.
inline double prob_height_miss(const Scenario& s)
{
    const double r = s.distance_m;
    const auto integrand = [&](double x) { return height_cdf(s.population, los_height(s, x)) / r; };
    return std::clamp(detail::integrate_split(integrand, 0.0, r, detail::height_crossover(s), kScalarQuadTol),
                      0.0, 1.0);
}

inline StripModel strip_model(const Scenario& s)
{
    StripModel m;
    m.strip_length_m = s.distance_m;
    m.strip_width_m = s.population.diameter_max_m;
    m.area_intensity = s.population.density_per_m2 * m.strip_length_m * m.strip_width_m;
    m.prob_radius_miss = prob_radius_miss(s.population);
    m.prob_height_miss = prob_height_miss(s);
    m.per_blocker_miss = m.prob_radius_miss + (1.0 - m.prob_radius_miss) * m.prob_height_miss;
    return m;
}

/// Sum over i of Poisson(Lambda) p_i q^i, terms added until past the mode
/// and p_i < 1e-12. NaN when Lambda is too large for p_0 to be
/// representable.
inline double los_poisson_series(double area_intensity, double q)
{
    if (area_intensity == 0.0) return 1.0;
    if (area_intensity > 700.0) return std::nan("");
    double p = std::exp(-area_intensity);
    double qi = 1.0;
    double sum = p;
    for (int i = 1; i < 100000; ++i) {
        p *= area_intensity / i;
        qi *= q;
        sum += p * qi;
        if (i > area_intensity && p < 1e-12) break;
    }
    return sum;
}

inline double los_closed_form(double area_intensity, double q)
{
    return std::exp(-area_intensity * (1.0 - q));
}

struct PointLos {
    StripModel strip;
    double p_los = 1.0;         ///< closed form
    double p_los_series = 1.0;  ///< truncated Poisson series (NaN if not evaluated)
    BlockageEstimate blockage;  ///< 1 - p_los
};

inline PointLos p_los_point(const Scenario& s)
{
    PointLos out;
    out.strip = strip_model(s);
    out.p_los = los_closed_form(out.strip.area_intensity, out.strip.per_blocker_miss);
    out.p_los_series = los_poisson_series(out.strip.area_intensity, out.strip.per_blocker_miss);
    const double err = std::isnan(out.p_los_series) ? 0.0 : std::abs(out.p_los - out.p_los_series);
    out.blockage = BlockageEstimate::analytic(1.0 - out.p_los, Method::analytic_point, err);
    return out;
}

}  // namespace mmblock

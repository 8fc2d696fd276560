#pragma once

// Shadows cast by single blockers on the circle of radius r around the Tx:
// the intensity of shadow centers along the arc and the distribution of a
// shadow's length W = r D / L (chord approximation of the arc).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "quadrature.hpp"
#include "scenario.hpp"
#include "tabulated.hpp"

namespace mmblock {

namespace detail {

// Distance at which the LoS passes the mean blocker height; g(x) rises
// steeply around it, so integrals are split there.
inline double height_crossover(const Scenario& s)
{
    const double drop = s.tx_height_m - s.rx_height_m;
    if (drop <= 0.0) return -1.0;
    return s.distance_m * (s.tx_height_m - s.population.height_mean_m) / drop;
}

template<class F>
double integrate_split(const F& f, double a, double b, double split, double rel_tol)
{
    if (!(b > a)) return 0.0;
    QuadratureOptions opt;
    opt.rel_tol = rel_tol;
    if (split > a && split < b)
        return integrate_adaptive(f, a, split, opt).value + integrate_adaptive(f, split, b, opt).value;
    return integrate_adaptive(f, a, b, opt).value;
}

}  // namespace detail

/// N = integral of g over (0, r); the normalizer of the blocker-distance law.
inline double normalization_constant(const Scenario& s)
{
    const auto g = [&](double x) { return blocking_height_prob(s, x); };
    return detail::integrate_split(g, 0.0, s.distance_m, detail::height_crossover(s), kScalarQuadTol);
}

/// mu: shadow centers per meter of arc, (lambda_I / r) * integral x g(x).
inline double circumference_intensity(const Scenario& s)
{
    if (s.population.density_per_m2 == 0.0) return 0.0;
    const auto xg = [&](double x) { return x * blocking_height_prob(s, x); };
    const double m = detail::integrate_split(xg, 0.0, s.distance_m, detail::height_crossover(s),
                                             kScalarQuadTol);
    return s.population.density_per_m2 / s.distance_m * m;
}

/// Below this N no blocker can reach the LoS.
inline constexpr double kDegenerateNormalization = 1e-300;

/// f_L(x) = g(x) / N on a uniform grid over [0, r].
inline TabulatedDistribution distance_pdf(const Scenario& s, const NumericsOptions& opt = {})
{
    const double n_const = normalization_constant(s);
    if (!(n_const > kDegenerateNormalization))
        throw DegenerateScenario("no blocker is tall enough to intersect the line of sight");
    const std::size_t n = opt.grid_points;
    const double step = s.distance_m / static_cast<double>(n - 1);
    std::vector<double> pdf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::min(s.distance_m, step * static_cast<double>(i));
        pdf[i] = blocking_height_prob(s, x) / n_const;
    }
    return TabulatedDistribution::from_pdf(0.0, step, std::move(pdf), true);
}

/// Pr{W > w}, computed directly from f_L and the diameter law.
inline double shadow_tail_prob(const Scenario& s, double n_const, double w)
{
    const auto& pop = s.population;
    const double r = s.distance_m;
    if (w <= pop.diameter_min_m) return 1.0;
    // W > w  <=>  D > w L / r.
    const auto integrand = [&](double x) {
        const double d = w * x / r;
        const double surv = std::clamp((pop.diameter_max_m - d) / (pop.diameter_max_m - pop.diameter_min_m), 0.0, 1.0);
        return blocking_height_prob(s, x) * surv;
    };
    const double upper = std::min(r, r * pop.diameter_max_m / w);
    return detail::integrate_split(integrand, 0.0, upper, detail::height_crossover(s), kScalarQuadTol) /
           n_const;
}

/// f_W(y) at one point: integral of x f_rD(y x) f_L(x) over the support.
inline double shadow_width_density(const Scenario& s, double n_const, double y, double rel_tol)
{
    const auto& pop = s.population;
    const double r = s.distance_m;
    if (y <= pop.diameter_min_m) return 0.0;
    const double f_rd = 1.0 / (r * (pop.diameter_max_m - pop.diameter_min_m));
    // r d / y can round past r when y equals d exactly.
    const double hi = y < pop.diameter_max_m ? r : std::min(r, r * pop.diameter_max_m / y);
    const double lo = std::min(hi, r * pop.diameter_min_m / y);
    const auto integrand = [&](double x) { return x * f_rd * blocking_height_prob(s, x) / n_const; };
    return detail::integrate_split(integrand, lo, hi, detail::height_crossover(s), rel_tol);
}

/// Tabulated law of the shadow length W on [d_min, w_max]. w_max starts at
/// 2 d_max and doubles until Pr{W > w_max} < tail_eps.
inline TabulatedDistribution shadow_width_distribution(const Scenario& s, const NumericsOptions& opt = {})
{
    const auto& pop = s.population;
    const double n_const = normalization_constant(s);
    if (!(n_const > kDegenerateNormalization))
        throw DegenerateScenario("no blocker is tall enough to intersect the line of sight");

    double w_max = 2.0 * pop.diameter_max_m;
    double tail = shadow_tail_prob(s, n_const, w_max);
    for (int k = 0; tail >= opt.tail_eps; ++k) {
        if (k >= opt.max_shadow_doublings) {
            throw NumericError("shadow length tail not captured: Pr{W > " + std::to_string(w_max) +
                                   "} = " + std::to_string(tail) +
                                   "; raise tail_eps or max_shadow_doublings",
                               tail);
        }
        w_max *= 2.0;
        tail = shadow_tail_prob(s, n_const, w_max);
    }

    const std::size_t n = opt.grid_points;
    const double step = (w_max - pop.diameter_min_m) / static_cast<double>(n - 1);
    std::vector<double> pdf(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = pop.diameter_min_m + step * static_cast<double>(i);
        pdf[i] = shadow_width_density(s, n_const, y, opt.quad_rel_tol);
    }
    return TabulatedDistribution::from_pdf(pop.diameter_min_m, step, std::move(pdf), true);
}

}  // namespace mmblock

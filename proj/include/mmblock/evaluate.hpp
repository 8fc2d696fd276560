#pragma once

// One entry point for "blockage of this scenario by this method", plus the
// full analytic report used by the command-line front end.

#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "estimate.hpp"
#include "monte_carlo.hpp"
#include "numerics.hpp"
#include "point_rx.hpp"
#include "renewal.hpp"
#include "scenario.hpp"
#include "shadow.hpp"

namespace mmblock {

struct AnalysisOptions {
    NumericsOptions numerics{};
    McOptions mc{};
    FormulaReading reading = FormulaReading::corrected;
};

namespace detail {

inline BlockageEstimate degenerate_estimate(Method m)
{
    BlockageEstimate e = BlockageEstimate::analytic(0.0, m);
    e.degenerate = true;
    return e;
}

}  // namespace detail

/// Receiver-of-length-l blockage from the renewal model.
inline BlockageEstimate interval_blockage(const Scenario& s, const AnalysisOptions& opt)
{
    const double mu = circumference_intensity(s);
    if (!(mu > 0.0)) return detail::degenerate_estimate(Method::analytic_interval);
    TabulatedDistribution shadow;
    try {
        shadow = shadow_width_distribution(s, opt.numerics);
    } catch (const DegenerateScenario&) {
        return detail::degenerate_estimate(Method::analytic_interval);
    }
    if (opt.reading == FormulaReading::as_printed && s.rx_length_m < s.population.diameter_min_m) {
        const double vac = std::exp(-mu * shadow.mean());
        return BlockageEstimate::analytic(1.0 - mu * vac * (1.0 + mu * s.rx_length_m),
                                          Method::analytic_interval);
    }
    const auto sol = solve_renewal(s, mu, shadow, opt.numerics, opt.reading);
    return blockage_prob_interval(s, sol);
}

inline BlockageEstimate estimate_blockage(const Scenario& s, Method m, const AnalysisOptions& opt = {})
{
    switch (m) {
    case Method::analytic_point: {
        if (s.population.density_per_m2 == 0.0) return detail::degenerate_estimate(m);
        return p_los_point(s).blockage;
    }
    case Method::analytic_interval: return interval_blockage(s, opt);
    case Method::monte_carlo: return run_trials(s, opt.mc).full;
    }
    throw DomainError("unknown method");
}

/// Everything the `analytic` command prints.
struct AnalyticReport {
    Method method = Method::analytic_point;
    BlockageEstimate blockage;
    double p_los = 1.0;
    double mu = 0.0;
    double mean_shadow = std::numeric_limits<double>::quiet_NaN();
    double mean_blocked = std::numeric_limits<double>::quiet_NaN();
    double mean_cycle = std::numeric_limits<double>::quiet_NaN();
    double vacancy_blockage = 0.0;  ///< 1 - exp(-mu E[W])
    PointLos point;
    std::optional<IntervalBreakdown> interval;
    std::optional<double> as_printed_special_case;
    std::optional<double> as_printed_blockage;  ///< interval method, literal formulas
};

inline AnalyticReport analytic_report(const Scenario& s, Method m, const AnalysisOptions& opt = {})
{
    if (m == Method::monte_carlo) throw DomainError("analytic_report: method must be analytic");
    AnalyticReport rep;
    rep.method = m;
    rep.point = p_los_point(s);
    rep.mu = circumference_intensity(s);

    std::optional<TabulatedDistribution> shadow;
    try {
        shadow = shadow_width_distribution(s, opt.numerics);
        rep.mean_shadow = shadow->mean();
    } catch (const DegenerateScenario&) {
    }

    if (shadow && rep.mu > 0.0) {
        const double x = rep.mu * rep.mean_shadow;
        rep.vacancy_blockage = -std::expm1(-x);
        rep.mean_blocked = std::expm1(x) / rep.mu;
        rep.mean_cycle = std::exp(x) / rep.mu;
        if (s.rx_length_m < s.population.diameter_min_m)
            rep.as_printed_special_case = 1.0 - rep.mu * std::exp(-x) * (1.0 + rep.mu * s.rx_length_m);
    } else if (shadow) {
        // mu -> 0 limits: blocked runs are single shadows, cycles never end.
        rep.mean_blocked = rep.mean_shadow;
        rep.mean_cycle = std::numeric_limits<double>::infinity();
    }

    if (m == Method::analytic_interval) {
        if (shadow && rep.mu > 0.0) {
            const auto sol = solve_renewal(s, rep.mu, *shadow, opt.numerics);
            rep.interval = interval_breakdown(s, sol);
            rep.blockage = rep.interval->estimate;
            rep.mean_blocked = sol.mean_blocked;
            rep.mean_cycle = sol.mean_cycle;
        } else {
            rep.blockage = detail::degenerate_estimate(m);
        }
        if (opt.reading == FormulaReading::as_printed) {
            // The literal renewal reading has no proper cycle law for
            // l >= d_min; report NaN rather than abort the corrected output.
            try {
                rep.as_printed_blockage = interval_blockage(s, opt).probability;
            } catch (const NumericError&) {
                rep.as_printed_blockage = std::numeric_limits<double>::quiet_NaN();
            }
        }
    } else {
        rep.blockage = s.population.density_per_m2 == 0.0 ? detail::degenerate_estimate(m)
                                                          : rep.point.blockage;
    }
    rep.p_los = 1.0 - rep.blockage.probability;
    return rep;
}

/// Evaluates fn(i) for i in [0, n) on up to `threads` threads; results are
/// stored by index and the first exception (by index) is rethrown.
template<class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, const Fn& fn)
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const unsigned workers = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, n)));
    const auto run = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                out[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace mmblock

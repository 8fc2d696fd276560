#pragma once

// Full blockage of a receiver of length l. Shadows form a Poisson Boolean
// model on the arc: unblocked gaps are Exp(mu), and the cycle
// (gap + blocked run) is recovered from the renewal density through the
// renewal equation, solved by forward substitution on a uniform grid.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "estimate.hpp"
#include "numerics.hpp"
#include "scenario.hpp"
#include "tabulated.hpp"

namespace mmblock {

/// `as_printed` keeps the fixed upper limit l in the renewal density and
/// renewal equation and the literal small-receiver formula; it exists for
/// side-by-side comparison only.
enum class FormulaReading { corrected, as_printed };

struct RenewalSolution {
    double mu = 0.0;
    double mean_shadow = 0.0;  ///< E[W]
    TabulatedDistribution renewal_density;  ///< f(x), not a probability law
    TabulatedDistribution cycle_density;    ///< f_xi and F_xi
    TabulatedDistribution blocked_cdf;      ///< F_eta
    double mean_unblocked = 0.0;  ///< E[omega] = 1 / mu
    double mean_blocked = 0.0;    ///< E[eta] from the tabulated F_eta
    double mean_cycle = 0.0;      ///< E[xi] from the tabulated f_xi
    double tail_mass = 0.0;       ///< 1 - F_xi at the end of the grid
    double max_clamp = 0.0;       ///< largest correction applied clamping F_eta
    FormulaReading reading = FormulaReading::corrected;

    double mean_cycle_closed() const { return std::exp(mu * mean_shadow) / mu; }
    double mean_blocked_closed() const { return std::expm1(mu * mean_shadow) / mu; }
    double vacancy() const { return std::exp(-mu * mean_shadow); }
};

inline RenewalSolution solve_renewal(const Scenario& s, double mu, const TabulatedDistribution& shadow,
                                     const NumericsOptions& opt = {},
                                     FormulaReading reading = FormulaReading::corrected)
{
    if (!(mu > 0.0)) throw DegenerateScenario("circumference intensity is zero");
    if (!shadow.is_normalized(1e-6)) throw DomainError("solve_renewal: shadow law is not normalized");

    const double mean_w = shadow.mean();
    const double h = mean_w / opt.renewal_step_divisor;
    const double l = s.rx_length_m;
    const std::size_t cap = opt.max_renewal_points;
    const bool literal = reading == FormulaReading::as_printed;
    const double literal_exponent = shadow.survival_integral(l);
    const std::size_t conv_limit =
        literal ? static_cast<std::size_t>(std::floor(l / h)) : static_cast<std::size_t>(-1);

    std::vector<double> f;    // renewal density
    std::vector<double> fx;   // cycle density
    std::vector<double> cdf;  // cycle cdf
    f.reserve(4096);
    fx.reserve(4096);
    cdf.reserve(4096);

    const auto renewal_density = [&](double x) {
        const double exponent = literal ? literal_exponent : shadow.survival_integral(x);
        return mu * shadow.cdf_at(x) * std::exp(-mu * exponent);
    };

    f.push_back(renewal_density(0.0));
    fx.push_back(f[0] / (1.0 + 0.5 * h * f[0]));
    cdf.push_back(0.0);
    // First index where f is nonzero; below it both sequences vanish.
    std::size_t first = f[0] > 0.0 ? 0 : static_cast<std::size_t>(-1);

    for (std::size_t k = 1;; ++k) {
        if (k >= cap) {
            throw NumericError("renewal grid reached " + std::to_string(cap) +
                                   " points with cycle tail " + std::to_string(1.0 - cdf.back()) +
                                   "; raise tail_eps or lower renewal_step_divisor",
                               1.0 - cdf.back());
        }
        const double x = h * static_cast<double>(k);
        const double fk = renewal_density(x);
        f.push_back(fk);
        if (first == static_cast<std::size_t>(-1) && fk > 0.0) first = k;

        // Trapezoid rule on the convolution: interior terms plus the two
        // half-weighted endpoints (y = 0 and y = x).
        double conv = 0.0;
        if (first != static_cast<std::size_t>(-1)) {
            const std::size_t j_lo = std::max<std::size_t>(first, 1);
            const std::size_t j_hi = std::min({k - 1, k - std::min(first, k), conv_limit});
            for (std::size_t j = j_lo; j <= j_hi; ++j) conv += fx[k - j] * f[j];
        }
        const double endpoint = (conv_limit >= k) ? 0.5 * fx[0] * fk : 0.0;
        const double val = (fk - h * (conv + endpoint)) / (1.0 + 0.5 * h * f[0]);
        fx.push_back(val);
        cdf.push_back(cdf.back() + 0.5 * h * (fx[k - 1] + val));

        if (x > mean_w && 1.0 - cdf.back() < opt.tail_eps && cdf.back() <= 1.0 + 1e-9) break;
    }

    RenewalSolution out;
    out.mu = mu;
    out.mean_shadow = mean_w;
    out.reading = reading;
    out.tail_mass = std::max(0.0, 1.0 - cdf.back());

    std::vector<double> blocked(fx.size());
    double clamp = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) {
        const double raw = cdf[i] + fx[i] / mu;
        blocked[i] = std::clamp(raw, 0.0, 1.0);
        clamp = std::max(clamp, std::abs(raw - blocked[i]));
    }
    out.max_clamp = clamp;

    out.renewal_density = TabulatedDistribution::from_pdf(0.0, h, std::move(f));
    out.cycle_density = TabulatedDistribution::from_pdf(0.0, h, std::move(fx));
    out.blocked_cdf = TabulatedDistribution::from_cdf(0.0, h, std::move(blocked));
    out.mean_unblocked = 1.0 / mu;
    // Survival form keeps the x * (1 - F) share of the truncated tail.
    out.mean_cycle = out.cycle_density.survival_integral(out.cycle_density.x_max());
    out.mean_blocked = out.blocked_cdf.mean();
    return out;
}

/// Every piece of the finite-receiver computation, for reporting.
struct IntervalBreakdown {
    BlockageEstimate estimate;             ///< general integral formula
    std::optional<double> special_case;    ///< 1 - (1 + mu l) e^{-mu E[W]}, l < d_min
    std::optional<double> special_case_as_printed;  ///< 1 - mu e^{-mu E[W]} (1 + mu l)
    double cross_check_diff = 0.0;         ///< |general - special| when l < d_min
};

inline IntervalBreakdown interval_breakdown(const Scenario& s, const RenewalSolution& sol)
{
    const double l = s.rx_length_m;
    if (!(l >= 0.0)) throw DomainError("receiver length must be >= 0");
    const double mu = sol.mu;
    const double vac = sol.vacancy();
    const auto& eta = sol.blocked_cdf;

    // Integral of (1 - F_eta) over [l, end of grid].
    const double tail_integral =
        l < eta.x_max() ? eta.survival_integral(eta.x_max()) - eta.survival_integral(l) : 0.0;
    const double raw = mu * vac * tail_integral;
    const double p = std::clamp(raw, 0.0, 1.0);

    // Truncation: mass beyond the grid contributes at most its own share of
    // the mean cycle length.
    const double trunc = mu * vac * (1.0 - eta.mass()) * sol.mean_cycle_closed();

    IntervalBreakdown out;
    out.estimate = BlockageEstimate::analytic(p, Method::analytic_interval, trunc + std::abs(raw - p));
    if (l < s.population.diameter_min_m) {
        out.special_case = 1.0 - (1.0 + mu * l) * vac;
        out.special_case_as_printed = 1.0 - mu * vac * (1.0 + mu * l);
        out.cross_check_diff = std::abs(*out.special_case - p);
        if (sol.reading == FormulaReading::as_printed) out.estimate.probability = *out.special_case_as_printed;
    }
    return out;
}

/// Probability that every point of the receiver is shadowed.
inline BlockageEstimate blockage_prob_interval(const Scenario& s, const RenewalSolution& sol)
{
    return interval_breakdown(s, sol).estimate;
}

}  // namespace mmblock

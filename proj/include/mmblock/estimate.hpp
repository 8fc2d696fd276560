#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace mmblock {

enum class Method { analytic_point, analytic_interval, monte_carlo };

inline std::string_view to_string(Method m)
{
    switch (m) {
    case Method::analytic_point: return "analytic-point";
    case Method::analytic_interval: return "analytic-interval";
    case Method::monte_carlo: return "monte-carlo";
    }
    return "?";
}

/// A blockage probability with its uncertainty. For Monte Carlo estimates
/// half_width_95 is the normal-approximation 95% half-width; analytic
/// estimates carry 0 there and report a numerical error bound instead.
struct BlockageEstimate {
    double probability = 0.0;
    double half_width_95 = 0.0;
    Method method = Method::analytic_point;
    std::uint64_t trials = 0;
    double numerical_error = 0.0;
    bool degenerate = false;  ///< set when no blocker can reach the LoS

    static BlockageEstimate analytic(double p, Method m, double err = 0.0)
    {
        return {p, 0.0, m, 0, err, false};
    }

    static BlockageEstimate from_counts(std::uint64_t hits, std::uint64_t trials)
    {
        const double p = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
        const double hw = trials ? 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials)) : 0.0;
        return {p, hw, Method::monte_carlo, trials, 0.0, false};
    }
};

}  // namespace mmblock

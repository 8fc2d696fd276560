#pragma once

#include <cstddef>

#include "errors.hpp"

namespace mmblock {

/// Knobs for the analytic pipeline. Defaults reproduce the published
/// accuracy targets; every field is overridable from the config file.
struct NumericsOptions {
    std::size_t grid_points = 4096;     ///< nodes in the shadow-width table
    double quad_rel_tol = 1e-8;         ///< per-node quadrature tolerance
    double tail_eps = 1e-9;             ///< tail mass dropped by every truncation
    double renewal_step_divisor = 200;  ///< renewal grid step = E[W] / divisor
    std::size_t max_renewal_points = 200000;
    int max_shadow_doublings = 8;       ///< w_max <= 2 d_max * 2^k

    bool operator==(const NumericsOptions&) const = default;
};

/// Tolerance for the scalar integrals (mu, N, strip probabilities).
inline constexpr double kScalarQuadTol = 1e-12;

inline void validate(const NumericsOptions& o)
{
    if (o.grid_points < 16) throw ValidationError("numerics.grid_points", "must be >= 16");
    if (!(o.quad_rel_tol > 0.0 && o.quad_rel_tol < 1e-2))
        throw ValidationError("numerics.quad_rel_tol", "must be in (0, 1e-2)");
    if (!(o.tail_eps > 0.0 && o.tail_eps < 1e-2))
        throw ValidationError("numerics.tail_eps", "must be in (0, 1e-2)");
    if (!(o.renewal_step_divisor >= 10.0))
        throw ValidationError("numerics.renewal_step_divisor", "must be >= 10");
    if (o.max_renewal_points < 1000)
        throw ValidationError("numerics.max_renewal_points", "must be >= 1000");
    if (o.max_shadow_doublings < 0 || o.max_shadow_doublings > 30)
        throw ValidationError("numerics.max_shadow_doublings", "must be in [0, 30]");
}

}  // namespace mmblock

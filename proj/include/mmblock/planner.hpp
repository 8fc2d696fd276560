#pragma once

// Expected path loss as a LoS/NLoS mixture, and parameter sweeps over Tx
// height, separation and blocker density.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "estimate.hpp"
#include "evaluate.hpp"
#include "scenario.hpp"

namespace mmblock {

/// Log-distance laws L(d) = intercept + 10 * exponent * log10(d), d in m.
struct PathLossModel {
    double los_intercept_db = 61.4;
    double los_exponent = 2.0;
    double nlos_intercept_db = 72.4;
    double nlos_exponent = 2.92;
    double frequency_ghz = 28.0;

    double los_db(double d) const { return los_intercept_db + 10.0 * los_exponent * std::log10(d); }
    double nlos_db(double d) const { return nlos_intercept_db + 10.0 * nlos_exponent * std::log10(d); }

    bool operator==(const PathLossModel&) const = default;
};

/// Named default: 28 GHz urban LoS/NLoS fits from published street-level
/// measurements, with the NLoS intercept nudged so the LoS/NLoS gap is at
/// least 20 dB from 10 m on. Configuration values, not ground truth.
inline constexpr const char* kDefaultPathLossProfile = "mmwave28";

inline std::optional<PathLossModel> path_loss_profile(const std::string& name)
{
    if (name == kDefaultPathLossProfile) return PathLossModel{};
    return std::nullopt;
}

inline void validate(const PathLossModel& m)
{
    if (!(m.los_exponent > 0.0)) throw ValidationError("pathloss.los_exponent", "must be > 0");
    if (!(m.nlos_exponent > 0.0)) throw ValidationError("pathloss.nlos_exponent", "must be > 0");
    if (!std::isfinite(m.los_intercept_db)) throw ValidationError("pathloss.los_intercept_db", "must be finite");
    if (!std::isfinite(m.nlos_intercept_db))
        throw ValidationError("pathloss.nlos_intercept_db", "must be finite");
    if (!(m.frequency_ghz > 0.0)) throw ValidationError("pathloss.frequency_ghz", "must be > 0");
    // Both laws are affine in log10(d); NLoS >= LoS on d >= 1 iff it holds
    // at d = 1 and the NLoS slope is not smaller.
    if (m.nlos_intercept_db < m.los_intercept_db)
        throw ValidationError("pathloss.nlos_intercept_db", "NLoS loss must not be below LoS loss at 1 m");
    if (m.nlos_exponent < m.los_exponent)
        throw ValidationError("pathloss.nlos_exponent", "NLoS exponent must not be below LoS exponent");
}

inline double mixed_path_loss(const PathLossModel& m, double p_los, double d)
{
    return p_los * m.los_db(d) + (1.0 - p_los) * m.nlos_db(d);
}

/// L_e for the scenario, with P_LoS = 1 - blockage under `method`.
inline double average_path_loss(const Scenario& s, const PathLossModel& plm, Method method,
                                const AnalysisOptions& opt = {})
{
    validate(plm);
    const double d = distance_3d(s);
    if (!(d >= 1.0)) throw ValidationError("scenario.distance_m", "Tx-Rx distance must be >= 1 m");
    const double p_los = 1.0 - estimate_blockage(s, method, opt).probability;
    return mixed_path_loss(plm, p_los, d);
}

struct SweepRange {
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
};

/// from, from + step, ... up to `to` (inclusive within rounding).
inline std::vector<double> sweep_grid(const SweepRange& r)
{
    if (!(r.step > 0.0) || !std::isfinite(r.from) || !std::isfinite(r.to))
        throw ValidationError("sweep.step", "step must be > 0 and bounds finite");
    if (r.to < r.from) throw ValidationError("sweep.to", "empty range: to < from");
    const auto n = static_cast<std::size_t>(std::floor((r.to - r.from) / r.step + 1e-9)) + 1;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = r.from + r.step * static_cast<double>(i);
    return v;
}

enum class SweepAxis { tx_height, distance, density };

inline std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::tx_height: return "tx_height";
    case SweepAxis::distance: return "distance";
    case SweepAxis::density: return "density";
    }
    return "?";
}

struct SweepOptimum {
    double axis_value = 0.0;
    double objective = 0.0;
    std::size_t index = 0;
    bool interior = false;  ///< not at either end of the grid
};

struct SweepResult {
    std::string axis_name;
    std::vector<double> axis_values;
    std::vector<BlockageEstimate> blockage;
    std::vector<double> p_los;
    std::vector<double> avg_path_loss_db;
    std::optional<SweepOptimum> optimum;
    bool blockage_nondecreasing = true;
    bool blockage_nonincreasing = true;
};

namespace detail {

inline Scenario with_axis(Scenario s, SweepAxis axis, double v)
{
    switch (axis) {
    case SweepAxis::tx_height: s.tx_height_m = v; break;
    case SweepAxis::distance: s.distance_m = v; break;
    case SweepAxis::density: s.population.density_per_m2 = v; break;
    }
    return s;
}

inline void annotate_monotonicity(SweepResult& r)
{
    for (std::size_t i = 0; i + 1 < r.blockage.size(); ++i) {
        const auto& a = r.blockage[i];
        const auto& b = r.blockage[i + 1];
        const double tol = 1e-9 + a.numerical_error + b.numerical_error + a.half_width_95 + b.half_width_95;
        if (b.probability < a.probability - tol) r.blockage_nondecreasing = false;
        if (b.probability > a.probability + tol) r.blockage_nonincreasing = false;
    }
}

}  // namespace detail

/// Evaluates blockage and L_e at every grid point of one axis.
inline SweepResult sweep(const Scenario& base, const PathLossModel& plm, SweepAxis axis, const SweepRange& range,
                         Method method, const AnalysisOptions& opt = {}, unsigned threads = 1)
{
    validate(plm);
    const auto values = sweep_grid(range);
    for (double v : values) validate(detail::with_axis(base, axis, v));

    struct Point {
        BlockageEstimate est;
        double p_los = 1.0;
        double le = 0.0;
    };
    // Monte Carlo parallelizes internally over trials.
    const unsigned outer = method == Method::monte_carlo ? 1u : threads;
    const auto pts = parallel_map<Point>(values.size(), outer, [&](std::size_t i) {
        const Scenario s = detail::with_axis(base, axis, values[i]);
        Point p;
        p.est = estimate_blockage(s, method, opt);
        p.p_los = 1.0 - p.est.probability;
        const double d = distance_3d(s);
        if (!(d >= 1.0)) throw ValidationError("scenario.distance_m", "Tx-Rx distance must be >= 1 m");
        p.le = mixed_path_loss(plm, p.p_los, d);
        return p;
    });

    SweepResult r;
    r.axis_name = to_string(axis);
    r.axis_values = values;
    for (const auto& p : pts) {
        r.blockage.push_back(p.est);
        r.p_los.push_back(p.p_los);
        r.avg_path_loss_db.push_back(p.le);
    }
    detail::annotate_monotonicity(r);
    return r;
}

/// Tx-height sweep; the optimum minimizes L_e over the grid.
inline SweepResult sweep_tx_height(const Scenario& s, const PathLossModel& plm, const SweepRange& range,
                                   Method method = Method::analytic_point, const AnalysisOptions& opt = {},
                                   unsigned threads = 1)
{
    if (!(range.from > s.rx_height_m))
        throw ValidationError("sweep.from", "Tx heights must exceed rx_height_m");
    SweepResult r = sweep(s, plm, SweepAxis::tx_height, range, method, opt, threads);
    const auto it = std::min_element(r.avg_path_loss_db.begin(), r.avg_path_loss_db.end());
    SweepOptimum o;
    o.index = static_cast<std::size_t>(it - r.avg_path_loss_db.begin());
    o.axis_value = r.axis_values[o.index];
    o.objective = *it;
    o.interior = o.index > 0 && o.index + 1 < r.axis_values.size();
    r.optimum = o;
    return r;
}

inline SweepResult sweep_distance(const Scenario& s, const PathLossModel& plm, const SweepRange& range,
                                  Method method = Method::analytic_point, const AnalysisOptions& opt = {},
                                  unsigned threads = 1)
{
    if (!(range.from > 0.0)) throw ValidationError("sweep.from", "distances must be > 0");
    return sweep(s, plm, SweepAxis::distance, range, method, opt, threads);
}

inline SweepResult sweep_density(const Scenario& s, const PathLossModel& plm, const SweepRange& range,
                                 Method method = Method::analytic_point, const AnalysisOptions& opt = {},
                                 unsigned threads = 1)
{
    if (!(range.from >= 0.0)) throw ValidationError("sweep.from", "densities must be >= 0");
    return sweep(s, plm, SweepAxis::density, range, method, opt, threads);
}

}  // namespace mmblock

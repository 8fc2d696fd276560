#pragma once

// Stochastic-geometry reference simulator. Blockers are cylinders dropped in
// a square of side 10 r centered on the Tx; the receiver is a segment of
// length l at distance r, perpendicular to the Tx-Rx line. Each LoS from
// the Tx to a receiver test point is checked for exact 3D occlusion.
//
// The field is generated cell by cell, each cell from its own counter-based
// stream keyed by (seed, trial, cell). A trial's blockers therefore do not
// depend on which cells are materialized, which is what lets the corridor
// pre-filter skip cells far from the LoS without changing any result.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <thread>
#include <vector>

#include "counter_rng.hpp"
#include "errors.hpp"
#include "estimate.hpp"
#include "scenario.hpp"

namespace mmblock {

enum class FieldMode { ppp, matern2 };

/// Radius used for the Matern hard-core test: the blocker's own radius, or
/// an independent U(0, d_max / 2) draw.
enum class HardCoreRadius { blocker, uniform_to_max };

enum class CorridorFilter { automatic, on, off };

inline std::string_view to_string(FieldMode m) { return m == FieldMode::ppp ? "ppp" : "matern2"; }

struct BlockerInstance {
    double x_m = 0.0;
    double y_m = 0.0;
    double radius_m = 0.0;
    double height_m = 0.0;
};

struct FieldOptions {
    FieldMode mode = FieldMode::ppp;
    HardCoreRadius hard_core = HardCoreRadius::blocker;
};

struct TrialOutcome {
    bool fully_blocked = false;
    bool half_blocked = false;
    bool partly_blocked = false;
};

struct McOptions {
    std::uint64_t trials = 10000;
    std::uint32_t subsegments = 10;
    std::uint64_t seed = 1;
    FieldMode mode = FieldMode::ppp;
    HardCoreRadius hard_core = HardCoreRadius::blocker;
    CorridorFilter corridor = CorridorFilter::automatic;
    unsigned threads = 1;

    bool operator==(const McOptions&) const = default;
};

/// Above this expected blocker count per field the corridor filter is used
/// when CorridorFilter::automatic is selected.
inline constexpr double kCorridorAutoThreshold = 5000.0;

inline void validate(const McOptions& o)
{
    if (o.trials < 1) throw ValidationError("mc.trials", "must be >= 1");
    if (o.subsegments < 1) throw ValidationError("mc.subsegments", "must be >= 1");
    if (o.threads < 1) throw ValidationError("threads", "must be >= 1");
}

/// True iff some cylinder intersects the 3D segment from the Tx antenna
/// (origin, height h_T) to the receiver point at rx_height.
inline bool los_blocked_at(const Scenario& s, std::span<const BlockerInstance> blockers,
                           std::array<double, 2> rx_point, double rx_height)
{
    const double dx = rx_point[0];
    const double dy = rx_point[1];
    const double len2 = dx * dx + dy * dy;
    if (!(len2 > 0.0)) return false;
    const double len = std::sqrt(len2);
    for (const auto& b : blockers) {
        // Parameter of the closest point on the infinite line, and the
        // squared distance from the blocker axis to that line.
        const double tc = (b.x_m * dx + b.y_m * dy) / len2;
        const double px = b.x_m - tc * dx;
        const double py = b.y_m - tc * dy;
        const double dist2 = px * px + py * py;
        const double r2 = b.radius_m * b.radius_m;
        if (dist2 > r2) continue;
        const double half = std::sqrt(r2 - dist2) / len;
        const double t_lo = std::max(0.0, tc - half);
        const double t_hi = std::min(1.0, tc + half);
        if (t_lo > t_hi) continue;
        // LoS height is linear in t, so its minimum over the chord is at an end.
        const double h_lo = s.tx_height_m + t_lo * (rx_height - s.tx_height_m);
        const double h_hi = s.tx_height_m + t_hi * (rx_height - s.tx_height_m);
        if (b.height_m >= std::min(h_lo, h_hi)) return true;
    }
    return false;
}

/// Generates blocker fields for one scenario; holds scratch buffers, so use
/// one instance per thread.
class FieldSampler {
  public:
    FieldSampler(const Scenario& s, FieldOptions opt) : s_(s), opt_(opt)
    {
        const double side = 10.0 * s.distance_m;
        const double target = std::max(s.population.diameter_max_m, 1.0);
        cells_per_side_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(side / target)));
        cell_ = side / static_cast<double>(cells_per_side_);
        origin_ = -0.5 * side;
        cell_mean_ = s.population.density_per_m2 * cell_ * cell_;
    }

    double cell_side() const { return cell_; }
    std::int64_t cells_per_side() const { return cells_per_side_; }
    double expected_count() const
    {
        const double side = 10.0 * s_.distance_m;
        return s_.population.density_per_m2 * side * side;
    }

    /// Every retained blocker in the square.
    const std::vector<BlockerInstance>& sample_field(std::uint64_t seed, std::uint64_t trial)
    {
        const std::int64_t last = cells_per_side_ - 1;
        return sample_window(seed, trial, {0, last, 0, last});
    }

    /// Retained blockers in the cells that can reach any Tx-receiver LoS.
    const std::vector<BlockerInstance>& sample_corridor(std::uint64_t seed, std::uint64_t trial)
    {
        const double m = s_.population.radius_max();
        const double half_l = 0.5 * s_.rx_length_m;
        return sample_window(seed, trial,
                             {cell_index(-m), cell_index(s_.distance_m + m), cell_index(-half_l - m),
                              cell_index(half_l + m)});
    }

  private:
    struct Window {
        std::int64_t ix0, ix1, iy0, iy1;
    };

    struct Candidate {
        BlockerInstance b;
        double mark;
        double hard_core_radius;
    };

    std::int64_t cell_index(double coord) const
    {
        const auto i = static_cast<std::int64_t>(std::floor((coord - origin_) / cell_));
        return std::clamp<std::int64_t>(i, 0, cells_per_side_ - 1);
    }

    // Candidates of one cell, drawn from the cell's own stream.
    void generate_cell(std::uint64_t seed, std::uint64_t trial, std::int64_t ix, std::int64_t iy,
                       std::vector<Candidate>& out)
    {
        if (cell_mean_ <= 0.0) return;
        const auto id = static_cast<std::uint64_t>(iy * cells_per_side_ + ix);
        CounterRng rng(seed, trial, id);
        std::poisson_distribution<std::uint32_t> count_dist(cell_mean_);
        std::normal_distribution<double> height_dist(s_.population.height_mean_m, s_.population.height_std_m);
        const std::uint32_t count = count_dist(rng);
        const double x0 = origin_ + cell_ * static_cast<double>(ix);
        const double y0 = origin_ + cell_ * static_cast<double>(iy);
        const double r_lo = s_.population.radius_min();
        const double r_hi = s_.population.radius_max();
        for (std::uint32_t k = 0; k < count; ++k) {
            Candidate c{};
            c.b.x_m = x0 + cell_ * rng.uniform();
            c.b.y_m = y0 + cell_ * rng.uniform();
            c.b.radius_m = r_lo + (r_hi - r_lo) * rng.uniform();
            double h = height_dist(rng);
            while (!(h > 0.0)) h = height_dist(rng);
            c.b.height_m = h;
            c.mark = rng.uniform();
            const double u = rng.uniform();
            c.hard_core_radius = opt_.hard_core == HardCoreRadius::blocker ? c.b.radius_m : u * r_hi;
            out.push_back(c);
        }
    }

    const std::vector<BlockerInstance>& sample_window(std::uint64_t seed, std::uint64_t trial, Window w)
    {
        result_.clear();
        const bool thin = opt_.mode == FieldMode::matern2;
        // Matern thinning needs the candidates of neighboring cells too.
        const std::int64_t pad = thin ? 1 : 0;
        const std::int64_t gx0 = std::max<std::int64_t>(0, w.ix0 - pad);
        const std::int64_t gx1 = std::min(cells_per_side_ - 1, w.ix1 + pad);
        const std::int64_t gy0 = std::max<std::int64_t>(0, w.iy0 - pad);
        const std::int64_t gy1 = std::min(cells_per_side_ - 1, w.iy1 + pad);
        const std::int64_t nx = gx1 - gx0 + 1;
        const std::int64_t ny = gy1 - gy0 + 1;

        candidates_.clear();
        offsets_.assign(static_cast<std::size_t>(nx * ny + 1), 0);
        for (std::int64_t iy = gy0; iy <= gy1; ++iy) {
            for (std::int64_t ix = gx0; ix <= gx1; ++ix) {
                generate_cell(seed, trial, ix, iy, candidates_);
                offsets_[static_cast<std::size_t>((iy - gy0) * nx + (ix - gx0) + 1)] = candidates_.size();
            }
        }

        const auto cell_range = [&](std::int64_t ix, std::int64_t iy) {
            const auto k = static_cast<std::size_t>((iy - gy0) * nx + (ix - gx0));
            return std::pair{offsets_[k], offsets_[k + 1]};
        };

        for (std::int64_t iy = w.iy0; iy <= w.iy1; ++iy) {
            for (std::int64_t ix = w.ix0; ix <= w.ix1; ++ix) {
                const auto [lo, hi] = cell_range(ix, iy);
                for (std::size_t i = lo; i < hi; ++i) {
                    if (!thin || survives(i, ix, iy, gx0, gx1, gy0, gy1, cell_range))
                        result_.push_back(candidates_[i].b);
                }
            }
        }
        return result_;
    }

    // Matern type II: removed if a candidate with a smaller mark lies within
    // the sum of the two hard-core radii. Cells are at least d_max wide, so
    // the 3x3 neighborhood holds every possible conflict.
    template<class Range>
    bool survives(std::size_t i, std::int64_t ix, std::int64_t iy, std::int64_t gx0, std::int64_t gx1,
                  std::int64_t gy0, std::int64_t gy1, const Range& cell_range) const
    {
        const Candidate& a = candidates_[i];
        for (std::int64_t jy = std::max(gy0, iy - 1); jy <= std::min(gy1, iy + 1); ++jy) {
            for (std::int64_t jx = std::max(gx0, ix - 1); jx <= std::min(gx1, ix + 1); ++jx) {
                const auto [lo, hi] = cell_range(jx, jy);
                for (std::size_t j = lo; j < hi; ++j) {
                    if (j == i) continue;
                    const Candidate& b = candidates_[j];
                    if (b.mark > a.mark || (b.mark == a.mark && j > i)) continue;
                    const double ddx = a.b.x_m - b.b.x_m;
                    const double ddy = a.b.y_m - b.b.y_m;
                    const double reach = a.hard_core_radius + b.hard_core_radius;
                    if (ddx * ddx + ddy * ddy < reach * reach) return false;
                }
            }
        }
        return true;
    }

    Scenario s_;
    FieldOptions opt_;
    std::int64_t cells_per_side_ = 1;
    double cell_ = 1.0;
    double origin_ = 0.0;
    double cell_mean_ = 0.0;
    std::vector<Candidate> candidates_;
    std::vector<std::size_t> offsets_;
    std::vector<BlockerInstance> result_;
};

/// Convenience wrapper around FieldSampler::sample_field.
inline std::vector<BlockerInstance> sample_field(const Scenario& s, std::uint64_t seed, std::uint64_t trial,
                                                 FieldOptions opt = {})
{
    FieldSampler sampler(s, opt);
    return sampler.sample_field(seed, trial);
}

/// Receiver test points: N + 1 equally spaced points including both ends.
inline std::vector<std::array<double, 2>> receiver_points(const Scenario& s, std::uint32_t subsegments)
{
    std::vector<std::array<double, 2>> pts;
    if (s.rx_length_m == 0.0) {
        pts.push_back({s.distance_m, 0.0});
        return pts;
    }
    for (std::uint32_t k = 0; k <= subsegments; ++k) {
        const double y = -0.5 * s.rx_length_m + s.rx_length_m * static_cast<double>(k) / subsegments;
        pts.push_back({s.distance_m, y});
    }
    return pts;
}

inline TrialOutcome classify(std::size_t blocked, std::size_t points)
{
    TrialOutcome t;
    t.fully_blocked = blocked == points;
    t.half_blocked = blocked >= (points + 1) / 2;
    t.partly_blocked = blocked >= 1;
    return t;
}

struct McResult {
    BlockageEstimate full;
    BlockageEstimate half;
    BlockageEstimate partial;
    bool corridor_filtered = false;
};

inline bool use_corridor(const Scenario& s, CorridorFilter f)
{
    if (f == CorridorFilter::on) return true;
    if (f == CorridorFilter::off) return false;
    const double side = 10.0 * s.distance_m;
    return s.population.density_per_m2 * side * side > kCorridorAutoThreshold;
}

/// Runs `trials` independent fields. Trial t always uses streams keyed by
/// (seed, t), so results do not depend on the thread count.
inline McResult run_trials(const Scenario& s, const McOptions& opt)
{
    validate(opt);
    const auto points = receiver_points(s, opt.subsegments);
    // With a point receiver every test point coincides; a single test suffices.
    const std::size_t n_points = s.rx_length_m == 0.0 ? 1 : points.size();
    const bool corridor = use_corridor(s, opt.corridor);
    const FieldOptions fopt{opt.mode, opt.hard_core};

    struct Tally {
        std::uint64_t full = 0, half = 0, partial = 0;
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(opt.threads, opt.trials));
    std::vector<Tally> tallies(threads);

    const auto work = [&](unsigned w) {
        FieldSampler sampler(s, fopt);
        const std::uint64_t begin = opt.trials * w / threads;
        const std::uint64_t end = opt.trials * (w + 1) / threads;
        Tally t;
        for (std::uint64_t trial = begin; trial < end; ++trial) {
            const auto& field = corridor ? sampler.sample_corridor(opt.seed, trial)
                                         : sampler.sample_field(opt.seed, trial);
            std::size_t blocked = 0;
            for (std::size_t k = 0; k < n_points; ++k)
                blocked += los_blocked_at(s, field, points[k], s.rx_height_m) ? 1 : 0;
            const auto o = classify(blocked, n_points);
            t.full += o.fully_blocked;
            t.half += o.half_blocked;
            t.partial += o.partly_blocked;
        }
        tallies[w] = t;
    };

    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    }

    Tally total;
    for (const auto& t : tallies) {
        total.full += t.full;
        total.half += t.half;
        total.partial += t.partial;
    }
    McResult r;
    r.full = BlockageEstimate::from_counts(total.full, opt.trials);
    r.half = BlockageEstimate::from_counts(total.half, opt.trials);
    r.partial = BlockageEstimate::from_counts(total.partial, opt.trials);
    r.corridor_filtered = corridor;
    return r;
}

}  // namespace mmblock

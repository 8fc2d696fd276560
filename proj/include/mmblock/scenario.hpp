#pragma once

// Deployment geometry, blocker population and the LoS-height geometry that
// decides which blockers are tall enough to matter at a given distance.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"

namespace mmblock {

/// Humans standing in the plane: Poisson centers, Normal heights truncated
/// at zero, diameters uniform on [diameter_min_m, diameter_max_m].
struct BlockerPopulation {
    double density_per_m2 = 0.3;
    double height_mean_m = 1.7;
    double height_std_m = 0.1;
    double diameter_min_m = 0.2;
    double diameter_max_m = 0.8;

    double mean_diameter() const { return 0.5 * (diameter_min_m + diameter_max_m); }
    double radius_min() const { return 0.5 * diameter_min_m; }
    double radius_max() const { return 0.5 * diameter_max_m; }

    bool operator==(const BlockerPopulation&) const = default;
};

/// Transmitter at height tx_height_m above the origin, receiver of extent
/// rx_length_m centered distance_m away at height rx_height_m.
/// rx_length_m == 0 is the infinitesimal receiver.
struct Scenario {
    double tx_height_m = 4.0;
    double rx_height_m = 1.3;
    double distance_m = 30.0;
    double rx_length_m = 0.1;
    BlockerPopulation population{};

    bool operator==(const Scenario&) const = default;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& msg)
{
    if (!ok) throw ValidationError(field, msg);
}

}  // namespace detail

/// Throws ValidationError on a violated invariant.
inline void validate(const BlockerPopulation& pop)
{
    using detail::require;
    require(std::isfinite(pop.density_per_m2) && pop.density_per_m2 >= 0.0,
            "population.density_per_m2", "must be finite and >= 0");
    require(std::isfinite(pop.height_mean_m), "population.height_mean_m", "must be finite");
    require(std::isfinite(pop.height_std_m) && pop.height_std_m > 0.0,
            "population.height_std_m", "must be > 0");
    require(std::isfinite(pop.diameter_min_m) && pop.diameter_min_m > 0.0,
            "population.diameter_min_m", "must be > 0");
    require(std::isfinite(pop.diameter_max_m) && pop.diameter_max_m > pop.diameter_min_m,
            "population.diameter_max_m", "must exceed diameter_min_m");
    // The height law must keep some mass above zero after truncation.
    require(pop.height_mean_m / pop.height_std_m > -30.0, "population.height_mean_m",
            "height distribution has no mass above 0");
}

/// Validates and returns advisory warnings (empty when none apply).
inline std::vector<std::string> validate(const Scenario& s)
{
    using detail::require;
    validate(s.population);
    require(std::isfinite(s.rx_height_m) && s.rx_height_m > 0.0, "scenario.rx_height_m",
            "must be > 0");
    require(std::isfinite(s.tx_height_m) && s.tx_height_m >= s.rx_height_m,
            "scenario.tx_height_m", "must be >= rx_height_m");
    require(std::isfinite(s.distance_m) && s.distance_m > 0.0, "scenario.distance_m",
            "must be > 0");
    require(std::isfinite(s.rx_length_m) && s.rx_length_m >= 0.0, "scenario.rx_length_m",
            "must be >= 0");

    std::vector<std::string> warnings;
    if (s.distance_m < 10.0 * s.population.diameter_max_m) {
        warnings.push_back("distance_m < 10 * diameter_max_m: the chord approximation of "
                           "blocker shadows is inaccurate");
    }
    return warnings;
}

/// Height of the Tx-Rx line of sight above the point at ground distance x
/// from the Tx base.
inline double los_height(const Scenario& s, double x)
{
    if (!(x >= 0.0 && x <= s.distance_m))
        throw DomainError("los_height: x outside [0, distance_m]");
    return s.tx_height_m - (s.tx_height_m - s.rx_height_m) / s.distance_m * x;
}

namespace detail {

// Standard Normal upper tail, accurate far into the tail.
inline double normal_q(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// Pr{H > 0}: the mass kept by truncating the height law at zero.
inline double height_positive_mass(const BlockerPopulation& pop)
{
    return normal_q(-pop.height_mean_m / pop.height_std_m);
}

}  // namespace detail

/// Pr{H > h} for the zero-truncated Normal height law.
inline double height_exceed_prob(const BlockerPopulation& pop, double h)
{
    if (!(h >= 0.0)) throw DomainError("height_exceed_prob: h must be >= 0");
    const double z = (h - pop.height_mean_m) / pop.height_std_m;
    return std::min(1.0, detail::normal_q(z) / detail::height_positive_mass(pop));
}

/// Pr{H <= h} for the zero-truncated Normal height law.
inline double height_cdf(const BlockerPopulation& pop, double h)
{
    if (!(h >= 0.0)) throw DomainError("height_cdf: h must be >= 0");
    const double z = (h - pop.height_mean_m) / pop.height_std_m;
    const double z0 = -pop.height_mean_m / pop.height_std_m;
    // Phi(z) - Phi(z0), each lower tail taken from erfc for accuracy.
    const double between = detail::normal_q(-z) - detail::normal_q(-z0);
    return std::clamp(between / detail::height_positive_mass(pop), 0.0, 1.0);
}

/// g(x): probability that a blocker at distance x is tall enough to cut
/// the line of sight.
inline double blocking_height_prob(const Scenario& s, double x)
{
    return height_exceed_prob(s.population, los_height(s, x));
}

/// Intensity of blockers at distance x that are tall enough to block.
inline double thinned_intensity(const Scenario& s, double x)
{
    return s.population.density_per_m2 * blocking_height_prob(s, x);
}

/// Straight-line Tx-Rx antenna distance.
inline double distance_3d(const Scenario& s)
{
    return std::hypot(s.distance_m, s.tx_height_m - s.rx_height_m);
}

}  // namespace mmblock

#pragma once

// YAML run configuration: load with line-precise diagnostics, dump with
// round-trip precision.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

#include <yaml-cpp/yaml.h>

#include <mmblock/mmblock.hpp>

namespace mmcli {

struct Config {
    mmblock::Scenario scenario{};
    mmblock::PathLossModel pathloss{};
    mmblock::NumericsOptions numerics{};
    mmblock::McOptions mc{};

    bool operator==(const Config&) const = default;
};

/// Bad config text or values; `line` is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& source, int line, const std::string& msg)
        : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : "") + ": " + msg), line_(line) {}

    int line() const noexcept { return line_; }

  private:
    int line_;
};

/// Shortest text that parses back to the same double; locale-free.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t v) { return std::to_string(v); }

inline std::string to_string(mmblock::HardCoreRadius h)
{
    return h == mmblock::HardCoreRadius::blocker ? "blocker" : "uniform_to_max";
}

inline std::string to_string(mmblock::CorridorFilter c)
{
    switch (c) {
    case mmblock::CorridorFilter::automatic: return "auto";
    case mmblock::CorridorFilter::on: return "on";
    case mmblock::CorridorFilter::off: return "off";
    }
    return "auto";
}

namespace detail {

class Loader {
  public:
    explicit Loader(std::string source) : source_(std::move(source)) {}

    Config load(const YAML::Node& root)
    {
        if (!root.IsMap()) fail(root, "top level must be a mapping");
        check_keys(root, "", {"scenario", "population", "pathloss", "numerics", "mc"});

        Config c;
        const auto scen = block(root, "scenario", true);
        read(scen, "scenario", "tx_height_m", c.scenario.tx_height_m, true);
        read(scen, "scenario", "rx_height_m", c.scenario.rx_height_m, true);
        read(scen, "scenario", "distance_m", c.scenario.distance_m, true);
        read(scen, "scenario", "rx_length_m", c.scenario.rx_length_m, true);
        check_keys(scen, "scenario", {"tx_height_m", "rx_height_m", "distance_m", "rx_length_m"});

        auto& pop = c.scenario.population;
        const auto popn = block(root, "population", true);
        read(popn, "population", "density_per_m2", pop.density_per_m2, true);
        read(popn, "population", "height_mean_m", pop.height_mean_m, true);
        read(popn, "population", "height_std_m", pop.height_std_m, true);
        read(popn, "population", "diameter_min_m", pop.diameter_min_m, true);
        read(popn, "population", "diameter_max_m", pop.diameter_max_m, true);
        check_keys(popn, "population",
                   {"density_per_m2", "height_mean_m", "height_std_m", "diameter_min_m", "diameter_max_m"});

        if (const auto pl = block(root, "pathloss", false)) {
            check_keys(pl, "pathloss", {"profile", "los_intercept_db", "los_exponent", "nlos_intercept_db",
                                        "nlos_exponent", "frequency_ghz"});
            if (pl["profile"]) {
                const auto name = scalar<std::string>(pl["profile"], "pathloss.profile");
                const auto prof = mmblock::path_loss_profile(name);
                if (!prof) fail(pl["profile"], "pathloss.profile: unknown profile '" + name + "'");
                c.pathloss = *prof;
                marks_["pathloss.profile"] = pl["profile"].Mark();
            }
            // Explicit coefficients override the profile.
            read(pl, "pathloss", "los_intercept_db", c.pathloss.los_intercept_db, false);
            read(pl, "pathloss", "los_exponent", c.pathloss.los_exponent, false);
            read(pl, "pathloss", "nlos_intercept_db", c.pathloss.nlos_intercept_db, false);
            read(pl, "pathloss", "nlos_exponent", c.pathloss.nlos_exponent, false);
            read(pl, "pathloss", "frequency_ghz", c.pathloss.frequency_ghz, false);
        }

        if (const auto nu = block(root, "numerics", false)) {
            check_keys(nu, "numerics", {"grid_points", "quad_rel_tol", "tail_eps", "renewal_step_divisor",
                                        "max_renewal_points", "max_shadow_doublings"});
            read(nu, "numerics", "grid_points", c.numerics.grid_points, false);
            read(nu, "numerics", "quad_rel_tol", c.numerics.quad_rel_tol, false);
            read(nu, "numerics", "tail_eps", c.numerics.tail_eps, false);
            read(nu, "numerics", "renewal_step_divisor", c.numerics.renewal_step_divisor, false);
            read(nu, "numerics", "max_renewal_points", c.numerics.max_renewal_points, false);
            read(nu, "numerics", "max_shadow_doublings", c.numerics.max_shadow_doublings, false);
        }

        if (const auto mc = block(root, "mc", false)) {
            check_keys(mc, "mc", {"trials", "subsegments", "seed", "mode", "hardcore_radius", "corridor_filter"});
            read(mc, "mc", "trials", c.mc.trials, false);
            read(mc, "mc", "subsegments", c.mc.subsegments, false);
            read(mc, "mc", "seed", c.mc.seed, false);
            if (mc["mode"]) c.mc.mode = parse_mode(mc["mode"]);
            if (mc["hardcore_radius"]) {
                const auto v = scalar<std::string>(mc["hardcore_radius"], "mc.hardcore_radius");
                if (v == "blocker") c.mc.hard_core = mmblock::HardCoreRadius::blocker;
                else if (v == "uniform_to_max") c.mc.hard_core = mmblock::HardCoreRadius::uniform_to_max;
                else fail(mc["hardcore_radius"], "mc.hardcore_radius: expected blocker or uniform_to_max");
            }
            if (mc["corridor_filter"]) {
                const auto v = scalar<std::string>(mc["corridor_filter"], "mc.corridor_filter");
                if (v == "auto") c.mc.corridor = mmblock::CorridorFilter::automatic;
                else if (v == "on") c.mc.corridor = mmblock::CorridorFilter::on;
                else if (v == "off") c.mc.corridor = mmblock::CorridorFilter::off;
                else fail(mc["corridor_filter"], "mc.corridor_filter: expected auto, on or off");
            }
        }

        // Re-run the library invariants and point at the offending line.
        try {
            mmblock::validate(c.scenario);
            mmblock::validate(c.pathloss);
            mmblock::validate(c.numerics);
            mmblock::validate(c.mc);
        } catch (const mmblock::ValidationError& e) {
            const auto it = marks_.find(e.field());
            throw ConfigError(source_, it == marks_.end() ? 0 : it->second.line + 1, e.what());
        }
        return c;
    }

    mmblock::FieldMode parse_mode(const YAML::Node& n)
    {
        const auto v = scalar<std::string>(n, "mc.mode");
        if (v == "ppp") return mmblock::FieldMode::ppp;
        if (v == "matern2") return mmblock::FieldMode::matern2;
        fail(n, "mc.mode: expected ppp or matern2");
    }

  private:
    [[noreturn]] void fail(const YAML::Node& n, const std::string& msg) const
    {
        throw ConfigError(source_, n.Mark().line >= 0 ? n.Mark().line + 1 : 0, msg);
    }

    YAML::Node block(const YAML::Node& root, const char* name, bool required)
    {
        const YAML::Node n = root[name];
        if (!n) {
            if (required) throw ConfigError(source_, 0, std::string("missing required block '") + name + "'");
            return n;
        }
        if (!n.IsMap()) fail(n, std::string("'") + name + "' must be a mapping");
        return n;
    }

    void check_keys(const YAML::Node& n, const std::string& prefix, std::set<std::string> allowed) const
    {
        for (const auto& kv : n) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key))
                fail(kv.first, "unknown key '" + (prefix.empty() ? key : prefix + "." + key) + "'");
        }
    }

    template<class T>
    T scalar(const YAML::Node& n, const std::string& field) const
    {
        if (!n.IsScalar()) fail(n, field + ": expected a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, field + ": cannot parse '" + n.Scalar() + "'");
        }
    }

    template<class T>
    void read(const YAML::Node& blk, const std::string& prefix, const char* key, T& out, bool required)
    {
        const std::string field = prefix + "." + key;
        const YAML::Node n = blk[key];
        if (!n) {
            if (required) fail(blk, "missing required key '" + field + "'");
            return;
        }
        marks_[field] = n.Mark();
        if constexpr (std::is_unsigned_v<T>) {
            // yaml-cpp happily wraps "-1" into a huge unsigned value.
            if (!n.Scalar().empty() && n.Scalar()[0] == '-') fail(n, field + ": must be non-negative");
        }
        out = scalar<T>(n, field);
        if constexpr (std::is_floating_point_v<T>) {
            if (!std::isfinite(out)) fail(n, field + ": must be finite");
        }
    }

    std::string source_;
    std::map<std::string, YAML::Mark> marks_;
};

}  // namespace detail

inline Config parse_config(const std::string& text, const std::string& source = "<config>")
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, e.msg);
    }
    return detail::Loader(source).load(root);
}

inline Config load_config(const std::string& path)
{
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw ConfigError(path, 0, "cannot open file");
    } catch (const YAML::ParserException& e) {
        throw ConfigError(path, e.mark.line + 1, e.msg);
    }
    return detail::Loader(path).load(root);
}

/// Full config with every field explicit; parse_config(dump_config(c)) == c.
inline std::string dump_config(const Config& c)
{
    const auto& s = c.scenario;
    const auto& p = s.population;
    const auto& pl = c.pathloss;
    const auto& n = c.numerics;
    const auto& m = c.mc;
    const auto num = [](double v) { return format_number(v); };
    std::ostringstream o;
    o << "scenario:\n"
      << "  tx_height_m: " << num(s.tx_height_m) << "\n"
      << "  rx_height_m: " << num(s.rx_height_m) << "\n"
      << "  distance_m: " << num(s.distance_m) << "\n"
      << "  rx_length_m: " << num(s.rx_length_m) << "\n"
      << "population:\n"
      << "  density_per_m2: " << num(p.density_per_m2) << "\n"
      << "  height_mean_m: " << num(p.height_mean_m) << "\n"
      << "  height_std_m: " << num(p.height_std_m) << "\n"
      << "  diameter_min_m: " << num(p.diameter_min_m) << "\n"
      << "  diameter_max_m: " << num(p.diameter_max_m) << "\n"
      << "pathloss:\n"
      << "  los_intercept_db: " << num(pl.los_intercept_db) << "\n"
      << "  los_exponent: " << num(pl.los_exponent) << "\n"
      << "  nlos_intercept_db: " << num(pl.nlos_intercept_db) << "\n"
      << "  nlos_exponent: " << num(pl.nlos_exponent) << "\n"
      << "  frequency_ghz: " << num(pl.frequency_ghz) << "\n"
      << "numerics:\n"
      << "  grid_points: " << n.grid_points << "\n"
      << "  quad_rel_tol: " << num(n.quad_rel_tol) << "\n"
      << "  tail_eps: " << num(n.tail_eps) << "\n"
      << "  renewal_step_divisor: " << num(n.renewal_step_divisor) << "\n"
      << "  max_renewal_points: " << n.max_renewal_points << "\n"
      << "  max_shadow_doublings: " << n.max_shadow_doublings << "\n"
      << "mc:\n"
      << "  trials: " << m.trials << "\n"
      << "  subsegments: " << m.subsegments << "\n"
      << "  seed: " << m.seed << "\n"
      << "  mode: " << mmblock::to_string(m.mode) << "\n"
      << "  hardcore_radius: " << to_string(m.hard_core) << "\n"
      << "  corridor_filter: " << to_string(m.corridor) << "\n";
    return o.str();
}

}  // namespace mmcli

// mmblock: command-line front end for the blockage models.
//
//   mmblock --config run.yaml analytic --method interval
//   mmblock --config run.yaml simulate --trials 10000 --seed 7
//   mmblock --config run.yaml sweep --axis tx_height --from 1.5 --to 12 --step 0.1
//   mmblock --config run.yaml compare --r-from 10 --r-to 150 --step 10
//   mmblock --config run.yaml dump-config
//
// Data goes to stdout (or --out); diagnostics go to stderr.
// Exit codes: 0 ok, 1 compare gate failed, 2 invalid input, 3 numeric failure.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"

namespace {

using mmcli::format_number;

enum ExitCode { kOk = 0, kGateFailed = 1, kInvalid = 2, kNumeric = 3 };

constexpr double kCalibrationBound = 0.1;

struct Globals {
    std::string config_path;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool as_printed = false;
    std::string out_path;
};

mmblock::AnalysisOptions analysis_options(const mmcli::Config& c, const Globals& g)
{
    mmblock::AnalysisOptions o;
    o.numerics = c.numerics;
    o.mc = c.mc;
    o.mc.threads = g.threads;
    o.reading = g.as_printed ? mmblock::FormulaReading::as_printed : mmblock::FormulaReading::corrected;
    return o;
}

mmblock::Method parse_method(const std::string& m)
{
    if (m == "point") return mmblock::Method::analytic_point;
    if (m == "interval") return mmblock::Method::analytic_interval;
    if (m == "mc") return mmblock::Method::monte_carlo;
    throw mmblock::ValidationError("--method", "expected point, interval or mc");
}

class KeyValue {
  public:
    void add(const std::string& k, double v) { lines_ << k << " = " << format_number(v) << "\n"; }
    void add(const std::string& k, const std::string& v) { lines_ << k << " = " << v << "\n"; }
    std::string str() const { return lines_.str(); }

  private:
    std::ostringstream lines_;
};

// --- analytic ---------------------------------------------------------------

struct AnalyticArgs {
    std::string method = "point";
    bool csv = false;
};

std::string cmd_analytic(const mmcli::Config& c, const Globals& g, const AnalyticArgs& a)
{
    const auto m = parse_method(a.method);
    if (m == mmblock::Method::monte_carlo)
        throw mmblock::ValidationError("--method", "analytic accepts point or interval");
    const auto opt = analysis_options(c, g);
    const auto rep = mmblock::analytic_report(c.scenario, m, opt);
    const double d = mmblock::distance_3d(c.scenario);
    if (!(d >= 1.0)) throw mmblock::ValidationError("scenario.distance_m", "Tx-Rx distance must be >= 1 m");
    const double le = mmblock::mixed_path_loss(c.pathloss, rep.p_los, d);

    std::vector<std::pair<std::string, double>> row{
        {"p_block", rep.blockage.probability},
        {"p_block_numerical_error", rep.blockage.numerical_error},
        {"p_los", rep.p_los},
        {"mu", rep.mu},
        {"mean_shadow_w", rep.mean_shadow},
        {"mean_unblocked_omega", rep.mu > 0.0 ? 1.0 / rep.mu : std::numeric_limits<double>::infinity()},
        {"mean_blocked_eta", rep.mean_blocked},
        {"mean_cycle_xi", rep.mean_cycle},
        {"vacancy_blockage", rep.vacancy_blockage},
        {"point_p_los_series", rep.point.p_los_series},
        {"strip_area_intensity", rep.point.strip.area_intensity},
        {"prob_radius_miss", rep.point.strip.prob_radius_miss},
        {"prob_height_miss", rep.point.strip.prob_height_miss},
        {"distance_3d_m", d},
        {"avg_path_loss_db", le},
    };
    if (rep.interval && rep.interval->special_case) {
        row.emplace_back("special_case", *rep.interval->special_case);
        row.emplace_back("special_case_diff", rep.interval->cross_check_diff);
    }
    if (g.as_printed) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.emplace_back("as_printed_special_case", rep.as_printed_special_case.value_or(nan));
        if (m == mmblock::Method::analytic_interval)
            row.emplace_back("as_printed_p_block", rep.as_printed_blockage.value_or(nan));
    }

    std::ostringstream out;
    if (a.csv) {
        out << "method";
        for (const auto& [k, v] : row) out << "," << k;
        out << "\n" << mmblock::to_string(m);
        for (const auto& [k, v] : row) out << "," << format_number(v);
        out << "\n";
    } else {
        KeyValue kv;
        kv.add("method", std::string(mmblock::to_string(m)));
        for (const auto& [k, v] : row) kv.add(k, v);
        out << kv.str();
    }
    return out.str();
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<std::uint32_t> subsegments;
};

std::string cmd_simulate(const mmcli::Config& c, const Globals& g, const SimulateArgs& a)
{
    auto opt = analysis_options(c, g).mc;
    if (a.trials) opt.trials = *a.trials;
    if (a.seed) opt.seed = *a.seed;
    if (a.subsegments) opt.subsegments = *a.subsegments;
    if (a.mode) {
        if (*a.mode == "ppp") opt.mode = mmblock::FieldMode::ppp;
        else if (*a.mode == "matern2") opt.mode = mmblock::FieldMode::matern2;
        else throw mmblock::ValidationError("--mode", "expected ppp or matern2");
    }
    const auto r = mmblock::run_trials(c.scenario, opt);
    std::ostringstream out;
    out << "trials,seed,mode,subsegments,full,full_ci95,half,half_ci95,partial,partial_ci95\n"
        << opt.trials << "," << opt.seed << "," << mmblock::to_string(opt.mode) << "," << opt.subsegments << ","
        << format_number(r.full.probability) << "," << format_number(r.full.half_width_95) << ","
        << format_number(r.half.probability) << "," << format_number(r.half.half_width_95) << ","
        << format_number(r.partial.probability) << "," << format_number(r.partial.half_width_95) << "\n";
    return out.str();
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    std::string axis = "tx_height";
    double from = 0.0;
    double to = 0.0;
    double step = 1.0;
    std::string method = "point";
};

std::string cmd_sweep(const mmcli::Config& c, const Globals& g, const SweepArgs& a)
{
    const auto m = parse_method(a.method);
    const auto opt = analysis_options(c, g);
    const mmblock::SweepRange range{a.from, a.to, a.step};
    mmblock::SweepResult r;
    if (a.axis == "tx_height") r = mmblock::sweep_tx_height(c.scenario, c.pathloss, range, m, opt, g.threads);
    else if (a.axis == "distance") r = mmblock::sweep_distance(c.scenario, c.pathloss, range, m, opt, g.threads);
    else if (a.axis == "density") r = mmblock::sweep_density(c.scenario, c.pathloss, range, m, opt, g.threads);
    else throw mmblock::ValidationError("--axis", "expected distance, tx_height or density");

    std::ostringstream out;
    out << "axis,value,p_block,ci95,p_los,avg_pl_db,method\n";
    for (std::size_t i = 0; i < r.axis_values.size(); ++i) {
        out << r.axis_name << "," << format_number(r.axis_values[i]) << ","
            << format_number(r.blockage[i].probability) << "," << format_number(r.blockage[i].half_width_95) << ","
            << format_number(r.p_los[i]) << "," << format_number(r.avg_path_loss_db[i]) << ","
            << mmblock::to_string(m) << "\n";
    }
    if (r.optimum) {
        std::cerr << "optimum " << r.axis_name << " = " << format_number(r.optimum->axis_value)
                  << " avg_pl_db = " << format_number(r.optimum->objective)
                  << (r.optimum->interior ? " (interior)" : " (at grid end)") << "\n";
    }
    return out.str();
}

// --- compare ----------------------------------------------------------------

struct CompareArgs {
    double r_from = 10.0;
    double r_to = 150.0;
    double step = 10.0;
    std::optional<std::uint64_t> trials;
    bool no_gate = false;
};

struct CompareOutput {
    std::string csv;
    double max_diff = 0.0;
};

CompareOutput cmd_compare(const mmcli::Config& c, const Globals& g, const CompareArgs& a)
{
    auto opt = analysis_options(c, g);
    if (a.trials) opt.mc.trials = *a.trials;
    if (!(a.r_from > 0.0)) throw mmblock::ValidationError("--r-from", "must be > 0");
    const auto rs = mmblock::sweep_grid({a.r_from, a.r_to, a.step});

    struct Row {
        double point, interval;
        mmblock::BlockageEstimate mc;
    };
    // Analytic columns in parallel over r; MC parallelizes over trials.
    const auto analytic = mmblock::parallel_map<std::pair<double, double>>(rs.size(), g.threads, [&](std::size_t i) {
        auto s = c.scenario;
        s.distance_m = rs[i];
        mmblock::validate(s);
        return std::pair{mmblock::estimate_blockage(s, mmblock::Method::analytic_point, opt).probability,
                         mmblock::estimate_blockage(s, mmblock::Method::analytic_interval, opt).probability};
    });
    std::vector<Row> rows;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        auto s = c.scenario;
        s.distance_m = rs[i];
        rows.push_back({analytic[i].first, analytic[i].second, mmblock::run_trials(s, opt.mc).full});
    }

    CompareOutput out;
    std::ostringstream csv;
    csv << "r,analytic_point,analytic_interval,mc_full,mc_ci95,abs_diff_point,abs_diff_interval\n";
    double max_point = 0.0, max_interval = 0.0, r_point = rs.front(), r_interval = rs.front();
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& row = rows[i];
        const double dp = std::abs(row.point - row.mc.probability);
        const double di = std::abs(row.interval - row.mc.probability);
        if (dp > max_point) max_point = dp, r_point = rs[i];
        if (di > max_interval) max_interval = di, r_interval = rs[i];
        csv << format_number(rs[i]) << "," << format_number(row.point) << "," << format_number(row.interval) << ","
            << format_number(row.mc.probability) << "," << format_number(row.mc.half_width_95) << ","
            << format_number(dp) << "," << format_number(di) << "\n";
    }
    out.csv = csv.str();
    out.max_diff = std::max(max_point, max_interval);
    std::cerr << "max_abs_diff_point = " << format_number(max_point) << " at r = " << format_number(r_point) << "\n"
              << "max_abs_diff_interval = " << format_number(max_interval) << " at r = " << format_number(r_interval)
              << "\n";
    return out;
}

void emit(const Globals& g, const std::string& data)
{
    if (g.out_path.empty()) {
        std::cout << data << std::flush;
        return;
    }
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) throw mmblock::ValidationError("--out", "cannot open '" + g.out_path + "' for writing");
    f << data;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Human-body blockage of mmWave line of sight: analytic models and Monte Carlo"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "YAML configuration (defaults to the built-in scenario)");
    app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--as-printed", g.as_printed, "also evaluate the literal printed formulas");
    app.add_option("--out", g.out_path, "write data to this file instead of stdout");

    AnalyticArgs aa;
    auto* analytic = app.add_subcommand("analytic", "analytic blockage report");
    analytic->add_option("--method", aa.method, "point | interval")->check(CLI::IsMember({"point", "interval"}));
    analytic->add_flag("--csv", aa.csv, "single-row CSV instead of key = value lines");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo blockage frequencies");
    simulate->add_option("--trials", sa.trials);
    simulate->add_option("--seed", sa.seed);
    simulate->add_option("--mode", sa.mode, "ppp | matern2")->check(CLI::IsMember({"ppp", "matern2"}));
    simulate->add_option("--subsegments", sa.subsegments);

    SweepArgs wa;
    auto* sweep = app.add_subcommand("sweep", "blockage and average path loss along one axis");
    sweep->add_option("--axis", wa.axis)->check(CLI::IsMember({"distance", "tx_height", "density"}));
    sweep->add_option("--from", wa.from)->required();
    sweep->add_option("--to", wa.to)->required();
    sweep->add_option("--step", wa.step)->required();
    sweep->add_option("--method", wa.method, "point | interval | mc")
        ->check(CLI::IsMember({"point", "interval", "mc"}));

    CompareArgs ca;
    auto* compare = app.add_subcommand("compare", "analytic models against Monte Carlo over distance");
    compare->add_option("--r-from", ca.r_from);
    compare->add_option("--r-to", ca.r_to);
    compare->add_option("--step", ca.step);
    compare->add_option("--trials", ca.trials);
    compare->add_flag("--no-gate", ca.no_gate, "exit 0 even if the calibration bound is exceeded");

    auto* dump = app.add_subcommand("dump-config", "print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        mmcli::Config cfg;
        if (!g.config_path.empty()) cfg = mmcli::load_config(g.config_path);
        for (const auto& w : mmblock::validate(cfg.scenario)) std::cerr << "warning: " << w << "\n";
        cfg.mc.threads = g.threads;

        if (*analytic) {
            emit(g, cmd_analytic(cfg, g, aa));
        } else if (*simulate) {
            emit(g, cmd_simulate(cfg, g, sa));
        } else if (*sweep) {
            emit(g, cmd_sweep(cfg, g, wa));
        } else if (*compare) {
            const auto res = cmd_compare(cfg, g, ca);
            emit(g, res.csv);
            if (res.max_diff > kCalibrationBound && !ca.no_gate) {
                std::cerr << "calibration gate failed: max difference " << format_number(res.max_diff) << " > "
                          << format_number(kCalibrationBound) << "\n";
                return kGateFailed;
            }
        } else if (*dump) {
            cfg.mc.threads = 1;
            emit(g, mmcli::dump_config(cfg));
        }
    } catch (const mmcli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const mmblock::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const mmblock::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInvalid;
    } catch (const mmblock::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const mmblock::DegenerateScenario& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumeric;
    }
    return kOk;
}

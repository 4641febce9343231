#pragma once

// Command-line front end: run / sweep / fieldmap / lambda-trace.
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "featnav/bench.hpp"

namespace featnav::cli {

namespace detail {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> scenario;
    std::optional<std::string> mode;
    std::optional<double> lambda;
    std::optional<double> theta_cs_deg;
    std::optional<double> radius_px;
    std::optional<double> spread_px;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<double> dropout;
    std::optional<std::string> feedback;
    std::optional<int> max_steps;
    std::optional<double> flight_height;
};

inline void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    cmd->add_option("--scenario", f.scenario,
                    "corridor_gap | l_path | diagonal_band | uniform_texture | "
                    "symmetric_bifurcation | dead_end");
    cmd->add_option("--mode", f.mode, "passive | active_fixed | active_autotune");
    cmd->add_option("--lambda", f.lambda, "goal-velocity weight in [0,1]");
    cmd->add_option("--theta-cs-deg", f.theta_cs_deg, "neutral-sector central angle, degrees");
    cmd->add_option("--radius-px", f.radius_px, "charge dead-zone radius, pixels");
    cmd->add_option("--spread-px", f.spread_px, "charge spread, pixels");
    cmd->add_option("--trials", f.trials, "number of trials");
    cmd->add_option("--seed", f.seed, "run seed (fixes the feature layout)");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--jobs", f.jobs, "worker pool width");
    cmd->add_option("--dropout", f.dropout, "per-frame feature dropout rate in [0,1)");
    cmd->add_option("--feedback", f.feedback, "estimate | ground_truth");
    cmd->add_option("--max-steps", f.max_steps, "episode step limit");
    cmd->add_option("--flight-height", f.flight_height, "camera height above ground, meters");
}

inline bench::RunConfig build_config(const CommonFlags& f) {
    bench::RunConfig cfg;
    if (!f.config_path.empty()) cfg = bench::run_config_from_json(io::read_json(f.config_path));
    if (f.scenario) cfg.kind = sim::scenario_kind_from_string(*f.scenario);
    if (f.mode) cfg.mode = sim::mode_from_string(*f.mode);
    if (f.lambda) cfg.field.lambda = *f.lambda;
    if (f.theta_cs_deg) cfg.field.theta_cs_hat = deg2rad(*f.theta_cs_deg);
    if (f.radius_px) cfg.field.dead_radius_r = *f.radius_px;
    if (f.spread_px) cfg.field.spread_s = *f.spread_px;
    if (f.trials) cfg.trials = *f.trials;
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_dir = *f.out;
    if (f.jobs) cfg.jobs = *f.jobs;
    if (f.dropout) cfg.detection.dropout_rate = *f.dropout;
    if (f.feedback) cfg.sim_cfg.feedback = sim::feedback_from_string(*f.feedback);
    if (f.max_steps) cfg.sim_cfg.max_steps = *f.max_steps;
    if (f.flight_height) cfg.sim_cfg.flight_height = *f.flight_height;
    cfg.validate();
    return cfg;
}

inline void print_aggregate(const bench::RunConfig& cfg, const bench::Aggregate& a) {
    std::printf("scenario=%s mode=%s trials=%d\n", sim::to_string(cfg.kind),
                sim::to_string(cfg.mode), a.trials);
    std::printf("  path length      %.3f +- %.3f m (overhead %.3f)\n", a.mean_path_length,
                a.std_path_length, a.mean_overhead_ratio);
    std::printf("  final distance   %.3f +- %.3f m\n", a.mean_final_distance,
                a.std_final_distance);
    std::printf("  localized frames %.3f +- %.3f\n", a.mean_localized_fraction,
                a.std_localized_fraction);
    std::printf("  goal success     %d/%d\n", a.goal_successes, a.trials);
    std::printf("  tracking success %d/%d\n", a.localization_successes, a.trials);
    std::printf("  stalled          %d/%d\n", a.stalled_count, a.trials);
}

}  // namespace detail

inline int run_main(int argc, const char* const* argv) {
    CLI::App app{"feature-aware potential-field navigation benchmark"};
    app.require_subcommand(1);

    detail::CommonFlags run_flags;
    CLI::App* cmd_run = app.add_subcommand("run", "run one scenario for N trials");
    detail::add_common_flags(cmd_run, run_flags);

    detail::CommonFlags sweep_flags;
    std::vector<double> sweep_lambdas;
    std::vector<double> sweep_thetas;
    int trials_per_cell = 1;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "lambda x theta_cs parameter study");
    detail::add_common_flags(cmd_sweep, sweep_flags);
    cmd_sweep->add_option("--lambdas", sweep_lambdas, "lambda values")->delimiter(',');
    cmd_sweep->add_option("--theta-cs-degs", sweep_thetas, "theta_cs values, degrees")
        ->delimiter(',');
    cmd_sweep->add_option("--trials-per-cell", trials_per_cell, "trials per sweep cell");

    detail::CommonFlags map_flags;
    double map_x = 2.0, map_y = 3.0;
    std::string map_out = "fieldmap.svg";
    CLI::App* cmd_map = app.add_subcommand("fieldmap", "render the field at a vehicle pose");
    detail::add_common_flags(cmd_map, map_flags);
    cmd_map->add_option("--x", map_x, "vehicle x position, meters");
    cmd_map->add_option("--y", map_y, "vehicle y position, meters");
    cmd_map->add_option("--out-file", map_out, "output svg path");

    std::string trace_log;
    std::string trace_prefix = "lambda_trace";
    CLI::App* cmd_trace = app.add_subcommand("lambda-trace", "lambda curve from a trajectory log");
    cmd_trace->add_option("--log", trace_log, "trajectory csv written by `run`")->required();
    cmd_trace->add_option("--out-prefix", trace_prefix, "output prefix for .csv/.svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_run->parsed()) {
            const bench::RunConfig cfg = detail::build_config(run_flags);
            const bench::RunResult result = bench::run(cfg);
            detail::print_aggregate(cfg, result.aggregate);
            return 0;
        }
        if (cmd_sweep->parsed()) {
            bench::RunConfig cfg = detail::build_config(sweep_flags);
            bench::SweepSpec spec;
            if (!sweep_lambdas.empty()) spec.lambdas = sweep_lambdas;
            if (!sweep_thetas.empty()) spec.theta_cs_hat_degs = sweep_thetas;
            spec.trials_per_cell = trials_per_cell;
            const bench::SweepResult grid = bench::sweep(spec, cfg);
            for (size_t it = 0; it < spec.theta_cs_hat_degs.size(); ++it) {
                std::printf("theta=%5.1f ", spec.theta_cs_hat_degs[it]);
                for (size_t il = 0; il < spec.lambdas.size(); ++il) {
                    const auto& c = grid.at(it, il);
                    std::printf("%-5s",
                                c.goal && c.localization ? "G&L" : c.goal ? "G" : c.localization ? "L" : "-");
                }
                std::printf("\n");
            }
            return 0;
        }
        if (cmd_map->parsed()) {
            const bench::RunConfig cfg = detail::build_config(map_flags);
            const sim::WorldScenario world =
                sim::make_scenario(cfg.kind, cfg.seed, cfg.scenario_params);
            const sim::VehicleState state{{map_x, map_y}, cfg.sim_cfg.flight_height, {}};
            bench::render_field_map(world, state, cfg.rig, cfg.field, map_out);
            std::printf("wrote %s\n", map_out.c_str());
            return 0;
        }
        if (cmd_trace->parsed()) {
            const sim::TrajectoryLog log = io::read_trajectory_csv(trace_log);
            bench::emit_lambda_trace(log, trace_prefix);
            std::printf("wrote %s.csv and %s.svg\n", trace_prefix.c_str(), trace_prefix.c_str());
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

}  // namespace featnav::cli

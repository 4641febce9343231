#pragma once

// Experiment harness: multi-trial runs with aggregate statistics, the
// lambda x theta_cs parameter sweep, field-map rendering and lambda traces.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "featnav/io.hpp"
#include "featnav/scenario.hpp"
#include "featnav/sim.hpp"
#include "featnav/svg.hpp"

namespace featnav::bench {

struct RunConfig {
    sim::ScenarioKind kind = sim::ScenarioKind::corridor_gap;
    std::uint64_t seed = 1;
    sim::Mode mode = sim::Mode::active_fixed;
    FieldParams field;
    LambdaSchedule schedule = default_lambda_schedule();
    sim::DetectionModel detection;
    sim::SimConfig sim_cfg;
    CameraRig rig;
    sim::ScenarioParams scenario_params;
    int trials = 1;
    int jobs = 1;
    std::string out_dir;  // empty: no files written

    void validate() const {
        if (trials < 1) throw std::invalid_argument("RunConfig: trials must be >= 1");
        if (jobs < 1) throw std::invalid_argument("RunConfig: jobs must be >= 1");
        field.validate();
        detection.validate();
        sim_cfg.validate();
        rig.validate();
    }
};

// Trial seeds are derived from the run seed; the feature layout itself is
// fixed by the run seed so every trial flies the same world.
inline std::uint64_t trial_seed(std::uint64_t run_seed, int trial) {
    return sim::detail::splitmix64(run_seed * 0x100000001b3ULL + static_cast<std::uint64_t>(trial) + 1);
}

// Config file: one JSON document with sections mirroring RunConfig. Missing
// keys keep their defaults, so partial files are valid.
inline nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["scenario"] = {{"kind", sim::to_string(c.kind)}, {"seed", c.seed}};
    j["mode"] = sim::to_string(c.mode);
    j["field"] = {{"lambda", c.field.lambda},
                  {"theta_cs_deg", rad2deg(c.field.theta_cs_hat)},
                  {"radius_px", c.field.dead_radius_r},
                  {"spread_px", c.field.spread_s}};
    j["schedule"] = {{"lambda_min", c.schedule.lambda_min},
                     {"lambda_max", c.schedule.lambda_max},
                     {"t_min", c.schedule.t_min},
                     {"t_max", c.schedule.t_max}};
    j["detection"] = {{"max_features", c.detection.max_features},
                      {"dropout_rate", c.detection.dropout_rate}};
    j["camera"] = {{"fx", c.rig.intrinsics.fx},     {"fy", c.rig.intrinsics.fy},
                   {"cx", c.rig.intrinsics.cx},     {"cy", c.rig.intrinsics.cy},
                   {"width", c.rig.intrinsics.width}, {"height", c.rig.intrinsics.height}};
    j["sim"] = {{"dt", c.sim_cfg.dt},
                {"max_speed", c.sim_cfg.max_speed},
                {"k_p", c.sim_cfg.k_p},
                {"goal_tol", c.sim_cfg.goal_tol},
                {"max_steps", c.sim_cfg.max_steps},
                {"cutoff_hz", c.sim_cfg.cutoff_hz},
                {"flight_height", c.sim_cfg.flight_height},
                {"n_min", c.sim_cfg.n_min},
                {"k_frames", c.sim_cfg.k_frames},
                {"drift_rate", c.sim_cfg.drift_rate},
                {"stall_window", c.sim_cfg.stall_window},
                {"stall_max_gap", c.sim_cfg.stall_max_gap},
                {"angle_tol_deg", rad2deg(c.sim_cfg.angle_tol)},
                {"feedback", sim::to_string(c.sim_cfg.feedback)}};
    j["run"] = {{"trials", c.trials}, {"jobs", c.jobs}, {"out", c.out_dir}};
    return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    double schedule_min = c.schedule.lambda_min, schedule_max = c.schedule.lambda_max;
    double t_min = c.schedule.t_min, t_max = c.schedule.t_max;
    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        if (s.contains("kind")) c.kind = sim::scenario_kind_from_string(s.at("kind").get<std::string>());
        if (s.contains("seed")) c.seed = s.at("seed").get<std::uint64_t>();
    }
    if (j.contains("mode")) c.mode = sim::mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("field")) {
        const auto& f = j.at("field");
        if (f.contains("lambda")) c.field.lambda = f.at("lambda").get<double>();
        if (f.contains("theta_cs_deg")) c.field.theta_cs_hat = deg2rad(f.at("theta_cs_deg").get<double>());
        if (f.contains("radius_px")) c.field.dead_radius_r = f.at("radius_px").get<double>();
        if (f.contains("spread_px")) c.field.spread_s = f.at("spread_px").get<double>();
    }
    if (j.contains("schedule")) {
        const auto& s = j.at("schedule");
        if (s.contains("lambda_min")) schedule_min = s.at("lambda_min").get<double>();
        if (s.contains("lambda_max")) schedule_max = s.at("lambda_max").get<double>();
        if (s.contains("t_min")) t_min = s.at("t_min").get<double>();
        if (s.contains("t_max")) t_max = s.at("t_max").get<double>();
    }
    c.schedule = LambdaSchedule::make(schedule_min, schedule_max, t_min, t_max);
    if (j.contains("detection")) {
        const auto& d = j.at("detection");
        if (d.contains("max_features")) c.detection.max_features = d.at("max_features").get<int>();
        if (d.contains("dropout_rate")) c.detection.dropout_rate = d.at("dropout_rate").get<double>();
    }
    if (j.contains("camera")) {
        const auto& k = j.at("camera");
        if (k.contains("fx")) c.rig.intrinsics.fx = k.at("fx").get<double>();
        if (k.contains("fy")) c.rig.intrinsics.fy = k.at("fy").get<double>();
        if (k.contains("cx")) c.rig.intrinsics.cx = k.at("cx").get<double>();
        if (k.contains("cy")) c.rig.intrinsics.cy = k.at("cy").get<double>();
        if (k.contains("width")) c.rig.intrinsics.width = k.at("width").get<int>();
        if (k.contains("height")) c.rig.intrinsics.height = k.at("height").get<int>();
    }
    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        if (s.contains("dt")) c.sim_cfg.dt = s.at("dt").get<double>();
        if (s.contains("max_speed")) c.sim_cfg.max_speed = s.at("max_speed").get<double>();
        if (s.contains("k_p")) c.sim_cfg.k_p = s.at("k_p").get<double>();
        if (s.contains("goal_tol")) c.sim_cfg.goal_tol = s.at("goal_tol").get<double>();
        if (s.contains("max_steps")) c.sim_cfg.max_steps = s.at("max_steps").get<int>();
        if (s.contains("cutoff_hz")) c.sim_cfg.cutoff_hz = s.at("cutoff_hz").get<double>();
        if (s.contains("flight_height")) c.sim_cfg.flight_height = s.at("flight_height").get<double>();
        if (s.contains("n_min")) c.sim_cfg.n_min = s.at("n_min").get<int>();
        if (s.contains("k_frames")) c.sim_cfg.k_frames = s.at("k_frames").get<int>();
        if (s.contains("drift_rate")) c.sim_cfg.drift_rate = s.at("drift_rate").get<double>();
        if (s.contains("stall_window")) c.sim_cfg.stall_window = s.at("stall_window").get<int>();
        if (s.contains("stall_max_gap")) c.sim_cfg.stall_max_gap = s.at("stall_max_gap").get<int>();
        if (s.contains("angle_tol_deg")) c.sim_cfg.angle_tol = deg2rad(s.at("angle_tol_deg").get<double>());
        if (s.contains("feedback"))
            c.sim_cfg.feedback = sim::feedback_from_string(s.at("feedback").get<std::string>());
    }
    if (j.contains("run")) {
        const auto& r = j.at("run");
        if (r.contains("trials")) c.trials = r.at("trials").get<int>();
        if (r.contains("jobs")) c.jobs = r.at("jobs").get<int>();
        if (r.contains("out")) c.out_dir = r.at("out").get<std::string>();
    }
    return c;
}

struct Aggregate {
    int trials = 0;
    double mean_path_length = 0.0;
    double std_path_length = 0.0;
    double mean_final_distance = 0.0;
    double std_final_distance = 0.0;
    double mean_localized_fraction = 0.0;
    double std_localized_fraction = 0.0;
    double mean_overhead_ratio = 0.0;
    int goal_successes = 0;
    int localization_successes = 0;
    int stalled_count = 0;
};

inline Aggregate compute_aggregate(const std::vector<sim::EpisodeMetrics>& metrics) {
    Aggregate a;
    a.trials = static_cast<int>(metrics.size());
    if (metrics.empty()) return a;
    auto mean_std = [&](auto get, double& mean, double& sd) {
        double sum = 0.0;
        for (const auto& m : metrics) sum += get(m);
        mean = sum / metrics.size();
        double var = 0.0;
        for (const auto& m : metrics) var += (get(m) - mean) * (get(m) - mean);
        sd = metrics.size() > 1 ? std::sqrt(var / (metrics.size() - 1)) : 0.0;
    };
    mean_std([](const auto& m) { return m.path_length; }, a.mean_path_length, a.std_path_length);
    mean_std([](const auto& m) { return m.final_true_distance; }, a.mean_final_distance,
             a.std_final_distance);
    mean_std([](const auto& m) { return m.localized_fraction; }, a.mean_localized_fraction,
             a.std_localized_fraction);
    double dummy;
    mean_std([](const auto& m) { return m.overhead_ratio; }, a.mean_overhead_ratio, dummy);
    for (const auto& m : metrics) {
        a.goal_successes += m.goal_success;
        a.localization_successes += m.localization_success;
        a.stalled_count += m.stalled;
    }
    return a;
}

inline nlohmann::json aggregate_to_json(const Aggregate& a) {
    return {
        {"trials", a.trials},
        {"mean_path_length", a.mean_path_length},
        {"std_path_length", a.std_path_length},
        {"mean_final_distance", a.mean_final_distance},
        {"std_final_distance", a.std_final_distance},
        {"mean_localized_fraction", a.mean_localized_fraction},
        {"std_localized_fraction", a.std_localized_fraction},
        {"mean_overhead_ratio", a.mean_overhead_ratio},
        {"goal_successes", a.goal_successes},
        {"localization_successes", a.localization_successes},
        {"stalled_count", a.stalled_count},
    };
}

namespace detail {

// Fixed-width worker pool over [0, n); results land by index so pool width
// never changes the output.
template <typename Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

struct RunResult {
    sim::WorldScenario world;
    std::vector<sim::EpisodeResult> trials;
    Aggregate aggregate;
};

// Execute the configured trials; when out_dir is set, write per-trial CSV
// logs, a metrics JSON record and a trajectory overlay.
inline RunResult run(const RunConfig& config) {
    config.validate();
    RunResult result;
    result.world = sim::make_scenario(config.kind, config.seed, config.scenario_params);
    result.trials.resize(config.trials);
    detail::parallel_for(config.trials, config.jobs, [&](int i) {
        result.trials[i] =
            sim::run_episode(result.world, config.rig, config.field, config.schedule, config.mode,
                             config.detection, config.sim_cfg, trial_seed(config.seed, i));
    });
    std::vector<sim::EpisodeMetrics> metrics;
    metrics.reserve(result.trials.size());
    for (const auto& t : result.trials) metrics.push_back(t.metrics);
    result.aggregate = compute_aggregate(metrics);

    if (!config.out_dir.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.out_dir);
        std::vector<sim::TrajectoryLog> logs;
        for (size_t i = 0; i < result.trials.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof(name), "trial_%03zu.csv", i);
            io::write_trajectory_csv((fs::path(config.out_dir) / name).string(),
                                     result.trials[i].log);
            logs.push_back(result.trials[i].log);
        }
        nlohmann::json doc;
        doc["scenario"] = sim::to_string(config.kind);
        doc["mode"] = sim::to_string(config.mode);
        doc["seed"] = config.seed;
        doc["aggregate"] = aggregate_to_json(result.aggregate);
        doc["trials"] = nlohmann::json::array();
        for (const auto& m : metrics) doc["trials"].push_back(io::metrics_to_json(m));
        io::write_json((fs::path(config.out_dir) / "metrics.json").string(), doc);
        svg::plot_trajectories((fs::path(config.out_dir) / "trajectories.svg").string(),
                               result.world, logs);
    }
    return result;
}

// One sweep cell: task outcomes for a (lambda, theta_cs_hat) pair.
struct SweepCell {
    double lambda = 0.0;
    double theta_cs_hat_deg = 0.0;
    bool goal = false;
    bool localization = false;
    sim::EpisodeMetrics metrics;
};

struct SweepSpec {
    std::vector<double> lambdas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<double> theta_cs_hat_degs{10.0, 30.0, 60.0, 90.0, 120.0};
    int trials_per_cell = 1;

    void validate() const {
        if (lambdas.empty() || theta_cs_hat_degs.empty())
            throw std::invalid_argument("SweepSpec: value lists must be non-empty");
        if (trials_per_cell < 1)
            throw std::invalid_argument("SweepSpec: trials_per_cell must be >= 1");
    }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // row-major over (theta, lambda)

    const SweepCell& at(size_t i_theta, size_t i_lambda) const {
        return cells[i_theta * spec.lambdas.size() + i_lambda];
    }
};

// Outcome classification is a pure function of the episode metrics.
inline void classify_cell(SweepCell& cell) {
    cell.goal = cell.metrics.goal_success;
    cell.localization = cell.metrics.localization_success;
}

inline void write_sweep_files(const std::string& out_dir, const SweepResult& grid);

// Fixed-layout parameter study over lambda and the neutral-sector angle.
// Cells run in the same worker pool as trials; base.mode is forced to
// active_fixed because the sweep owns lambda.
inline SweepResult sweep(const SweepSpec& spec, const RunConfig& base) {
    spec.validate();
    base.validate();
    SweepResult result;
    result.spec = spec;
    const sim::WorldScenario world =
        sim::make_scenario(base.kind, base.seed, base.scenario_params);
    const int n = static_cast<int>(spec.lambdas.size() * spec.theta_cs_hat_degs.size());
    result.cells.resize(n);
    detail::parallel_for(n, base.jobs, [&](int idx) {
        const size_t i_theta = idx / spec.lambdas.size();
        const size_t i_lambda = idx % spec.lambdas.size();
        SweepCell cell;
        cell.lambda = spec.lambdas[i_lambda];
        cell.theta_cs_hat_deg = spec.theta_cs_hat_degs[i_theta];
        FieldParams params = base.field;
        params.lambda = cell.lambda;
        params.theta_cs_hat = deg2rad(cell.theta_cs_hat_deg);
        // majority outcome across the cell's trials
        int goal_votes = 0, loc_votes = 0;
        for (int t = 0; t < spec.trials_per_cell; ++t) {
            const auto episode =
                sim::run_episode(world, base.rig, params, base.schedule, sim::Mode::active_fixed,
                                 base.detection, base.sim_cfg, trial_seed(base.seed, t));
            if (t == 0) cell.metrics = episode.metrics;
            goal_votes += episode.metrics.goal_success;
            loc_votes += episode.metrics.localization_success;
        }
        if (spec.trials_per_cell == 1) {
            classify_cell(cell);
        } else {
            cell.goal = 2 * goal_votes > spec.trials_per_cell;
            cell.localization = 2 * loc_votes > spec.trials_per_cell;
        }
        result.cells[idx] = cell;
    });
    if (!base.out_dir.empty()) write_sweep_files(base.out_dir, result);
    return result;
}

inline void write_sweep_files(const std::string& out_dir, const SweepResult& grid) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out((fs::path(out_dir) / "sweep.csv").string());
        if (!out) throw std::runtime_error("cannot write sweep.csv");
        out << "lambda,theta_cs_deg,goal,localization,label,final_true_distance,"
               "localized_fraction,stalled\n";
        for (const SweepCell& c : grid.cells) {
            const std::string label = c.goal && c.localization ? "G&L"
                                      : c.goal                 ? "G"
                                      : c.localization         ? "L"
                                                               : "none";
            out << io::format_double(c.lambda) << ',' << io::format_double(c.theta_cs_hat_deg)
                << ',' << (c.goal ? 1 : 0) << ',' << (c.localization ? 1 : 0) << ',' << label
                << ',' << io::format_double(c.metrics.final_true_distance) << ','
                << io::format_double(c.metrics.localized_fraction) << ','
                << (c.metrics.stalled ? 1 : 0) << "\n";
        }
    }
    // grid plot: lambda on x, theta on y
    const size_t n_l = grid.spec.lambdas.size();
    const size_t n_t = grid.spec.theta_cs_hat_degs.size();
    const double cell_px = 56.0, pad = 60.0;
    svg::SvgWriter w(pad + n_l * cell_px + 10, pad + n_t * cell_px + 10);
    w.rect(0, 0, pad + n_l * cell_px + 10, pad + n_t * cell_px + 10, "#ffffff");
    for (size_t it = 0; it < n_t; ++it) {
        for (size_t il = 0; il < n_l; ++il) {
            const SweepCell& c = grid.at(it, il);
            const std::string fill = c.goal && c.localization ? "#4caf50"
                                     : c.goal                 ? "#64a0e8"
                                     : c.localization         ? "#e8b64c"
                                                              : "#c8c8c8";
            const double x = pad + il * cell_px;
            const double y = 10 + (n_t - 1 - it) * cell_px;
            w.rect(x, y, cell_px - 3, cell_px - 3, fill, 0.9);
            const std::string label = c.goal && c.localization ? "G&amp;L"
                                      : c.goal                 ? "G"
                                      : c.localization         ? "L"
                                                               : "-";
            w.text(x + 8, y + cell_px / 2, label, 13, "#222");
        }
    }
    for (size_t il = 0; il < n_l; ++il) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%.2g", grid.spec.lambdas[il]);
        w.text(pad + il * cell_px + 12, 10 + n_t * cell_px + 16, buf, 11);
    }
    for (size_t it = 0; it < n_t; ++it) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%g", grid.spec.theta_cs_hat_degs[it]);
        w.text(14, 10 + (n_t - 1 - it) * cell_px + cell_px / 2, buf, 11);
    }
    w.text(pad + n_l * cell_px / 2 - 24, 10 + n_t * cell_px + 36, "lambda", 12);
    w.text(2, 10, "theta_cs [deg]", 12);
    w.save((fs::path(out_dir) / "sweep.svg").string());
}

// lambda-vs-time trace of an auto-tuned run: CSV pair plus a plot.
inline void emit_lambda_trace(const sim::TrajectoryLog& log, const std::string& out_prefix) {
    if (log.steps.empty()) throw std::invalid_argument("emit_lambda_trace: empty log");
    std::vector<std::pair<double, double>> trace;
    trace.reserve(log.steps.size());
    for (const sim::StepRecord& s : log.steps) trace.push_back({s.t, s.lambda});
    std::ofstream out(out_prefix + ".csv");
    if (!out) throw std::runtime_error("cannot write lambda trace csv");
    out << "t,lambda\n";
    for (const auto& [t, lam] : trace)
        out << io::format_double(t) << ',' << io::format_double(lam) << "\n";
    svg::plot_lambda_trace(out_prefix + ".svg", trace);
}

// Field snapshot from a vehicle pose: detection, charges and the lattice
// field, rendered to a vector-graphics file.
inline void render_field_map(const sim::WorldScenario& world, const sim::VehicleState& state,
                             const CameraRig& rig, const FieldParams& params,
                             const std::string& path, int nu = 24, int nv = 16) {
    params.validate();
    std::mt19937_64 rng(world.seed);
    sim::DetectionModel model;
    model.dropout_rate = 0.0;
    const std::vector<PixelVec> pixels = sim::detect_features(state, world, rig, model, rng);
    const Vec2 to_goal = world.goal - state.position;
    PixelVec v_g_img{1.0, 0.0};
    if (norm(to_goal) > 0.0)
        v_g_img = project_direction(rig, BodyVelocity{to_goal.x, to_goal.y});
    const GridSpec grid{rig.intrinsics.width / (2.0 * nu),
                        rig.intrinsics.height / (2.0 * nv),
                        static_cast<double>(rig.intrinsics.width) / nu,
                        static_cast<double>(rig.intrinsics.height) / nv,
                        nu,
                        nv};
    const FieldMap map = field_map(pixels, rig.optical_center(), v_g_img, params, grid);
    const auto charges = charge_map(pixels, rig.optical_center(), v_g_img, params.theta_cs_hat);
    svg::plot_field_map(path, map, charges, rig.optical_center(), v_g_img, rig.intrinsics.width,
                        rig.intrinsics.height);
}

}  // namespace featnav::bench

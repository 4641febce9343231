#pragma once

// Deterministic control-loop simulator: synthetic downward-camera feature
// detection, goal/field velocity blending, single-integrator kinematics and
// a tracking-health model that turns feature droughts into pose drift.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "featnav/autotune.hpp"
#include "featnav/camera.hpp"
#include "featnav/field.hpp"
#include "featnav/scenario.hpp"

namespace featnav::sim {

enum class Mode { passive, active_fixed, active_autotune };

inline const char* to_string(Mode m) {
    switch (m) {
        case Mode::passive: return "passive";
        case Mode::active_fixed: return "active_fixed";
        case Mode::active_autotune: return "active_autotune";
    }
    return "unknown";
}

inline Mode mode_from_string(const std::string& s) {
    if (s == "passive") return Mode::passive;
    if (s == "active_fixed") return Mode::active_fixed;
    if (s == "active_autotune") return Mode::active_autotune;
    throw std::invalid_argument("unknown mode: " + s);
}

// Pose source for the position controller. `estimate` replays the vision
// pipeline's belief (drifts when tracking is lost); `ground_truth` stands in
// for external motion-capture feedback.
enum class PoseFeedback { estimate, ground_truth };

inline const char* to_string(PoseFeedback f) {
    return f == PoseFeedback::estimate ? "estimate" : "ground_truth";
}

inline PoseFeedback feedback_from_string(const std::string& s) {
    if (s == "estimate") return PoseFeedback::estimate;
    if (s == "ground_truth") return PoseFeedback::ground_truth;
    throw std::invalid_argument("unknown feedback mode: " + s);
}

struct SimConfig {
    double dt = 1.0 / 30.0;        // camera frame period
    double max_speed = 0.5;        // m/s
    double k_p = 1.0;              // proportional gain of the position controller
    double goal_tol = 0.15;        // m, task success radius
    int max_steps = 4500;
    double cutoff_hz = 20.0;       // low-pass on the feature velocity
    double flight_height = 1.5;    // m above the ground plane
    int n_min = 8;                 // tracking needs at least this many inliers
    int k_frames = 15;             // consecutive low frames before tracking is lost
    double drift_rate = 0.02;      // m of estimate drift per lost frame
    int stall_window = 60;         // frames of persistent opposition => stalled
    int stall_max_gap = 15;        // flicker shorter than this does not reset the run
    double angle_tol = deg2rad(15.0);
    PoseFeedback feedback = PoseFeedback::estimate;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
        if (!(max_speed > 0.0)) throw std::invalid_argument("SimConfig: max_speed must be > 0");
        if (!(goal_tol > 0.0)) throw std::invalid_argument("SimConfig: goal_tol must be > 0");
        if (max_steps < 1) throw std::invalid_argument("SimConfig: max_steps must be >= 1");
        if (!(flight_height > 0.0)) throw std::invalid_argument("SimConfig: flight_height must be > 0");
        if (n_min < 0 || k_frames < 1) throw std::invalid_argument("SimConfig: bad tracking thresholds");
    }
};

struct VehicleState {
    Vec2 position;
    double height = 1.5;
    Vec2 velocity;
};

// Synthetic detector: project, cap by response score, then per-frame dropout.
struct DetectionModel {
    int max_features = 100;
    std::uint64_t response_seed = 0;
    double dropout_rate = 0.05;

    void validate() const {
        if (max_features < 1) throw std::invalid_argument("DetectionModel: max_features must be >= 1");
        if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
            throw std::invalid_argument("DetectionModel: dropout_rate must be in [0,1)");
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-feature detector response in [0,1).
inline double response_score(std::uint64_t feature_id, std::uint64_t seed) {
    const std::uint64_t h = splitmix64(splitmix64(seed) ^ (feature_id + 1));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Features visible from the current pose, strongest responses first capped at
// max_features (ties broken by feature index), returned in feature-index
// order. Dropout draws come from the episode generator, one per kept feature.
inline std::vector<PixelVec> detect_features(const VehicleState& state, const WorldScenario& world,
                                             const CameraRig& rig, const DetectionModel& model,
                                             std::mt19937_64& episode_rng) {
    struct Hit {
        std::uint64_t id;
        PixelVec pixel;
        double score;
    };
    std::vector<Hit> hits;
    const VehiclePose pose{state.position, state.height};
    for (std::uint64_t i = 0; i < world.features.size(); ++i) {
        if (auto px = project_point(rig, world.features[i], pose))
            hits.push_back({i, *px, detail::response_score(i, model.response_seed)});
    }
    if (static_cast<int>(hits.size()) > model.max_features) {
        std::nth_element(hits.begin(), hits.begin() + model.max_features, hits.end(),
                         [](const Hit& a, const Hit& b) {
                             if (a.score != b.score) return a.score > b.score;
                             return a.id < b.id;
                         });
        hits.resize(model.max_features);
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.id < b.id; });
    std::vector<PixelVec> out;
    out.reserve(hits.size());
    if (model.dropout_rate > 0.0) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const Hit& h : hits)
            if (u(episode_rng) >= model.dropout_rate) out.push_back(h.pixel);
    } else {
        for (const Hit& h : hits) out.push_back(h.pixel);
    }
    return out;
}

// Saturated proportional controller toward the goal; zero at the goal.
inline BodyVelocity goal_velocity(Vec2 position, Vec2 goal, double max_speed, double k_p) {
    if (!(max_speed > 0.0)) throw std::invalid_argument("goal_velocity: max_speed must be > 0");
    const Vec2 delta = goal - position;
    const double dist = norm(delta);
    if (dist <= 0.0) return {0.0, 0.0};
    const double speed = std::min(max_speed, k_p * dist);
    return {speed * delta.x / dist, speed * delta.y / dist};
}

inline VehicleState step_kinematics(const VehicleState& state, BodyVelocity command, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_kinematics: dt must be > 0");
    VehicleState next = state;
    next.position = state.position + Vec2{command.vx * dt, command.vy * dt};
    next.velocity = {command.vx, command.vy};
    return next;
}

// Tracking-health model. The estimate follows the true pose exactly until the
// inlier count stays below n_min for k_frames consecutive frames; from then on
// the estimate accumulates a fixed-direction drift until the count recovers.
// Accumulated drift persists after recovery (dead-reckoning bias).
struct LocalizationHealth {
    int n_min = 8;
    int k_frames = 15;
    double drift_rate = 0.02;
    Vec2 drift_direction{1.0, 0.0};  // unit vector, seeded per episode

    std::vector<int> recent;  // ring of the latest counts, newest last
    bool lost = false;
    Vec2 bias;

    void observe(int n_f) {
        recent.push_back(n_f);
        if (static_cast<int>(recent.size()) > k_frames) recent.erase(recent.begin());
        if (n_f >= n_min) {
            lost = false;
        } else if (static_cast<int>(recent.size()) == k_frames) {
            bool all_low = true;
            for (int c : recent) all_low &= c < n_min;
            if (all_low) lost = true;
        }
        if (lost) bias = bias + drift_rate * drift_direction;
    }

    Vec2 estimate(Vec2 true_position) const { return true_position + bias; }
};

inline void localization_update(LocalizationHealth& health, int n_f) { health.observe(n_f); }

struct StepDiagnostics {
    BodyVelocity v_g;
    std::optional<PixelVec> v_f;  // filtered feature velocity actually blended
    BodyVelocity command;
    double lambda = 1.0;
    int n_f = 0;
    RegionClass region = RegionClass::GoalFriendly;
    bool local_min = false;
};

namespace detail {

// Velocity logic shared by control_step and run_episode, fed with an already
// detected feature list. The command keeps the goal-velocity magnitude scaled
// by the blended norm, so an exact cancellation stalls the vehicle instead of
// reversing it at full speed.
inline StepDiagnostics control_from_detection(std::span<const PixelVec> pixels, Vec2 nav_position,
                                              const WorldScenario& world, const CameraRig& rig,
                                              const FieldParams& params,
                                              const LambdaSchedule& schedule, Mode mode,
                                              const SimConfig& cfg, LowPassFilter& filter) {
    StepDiagnostics diag;
    diag.n_f = static_cast<int>(pixels.size());
    diag.v_g = goal_velocity(nav_position, world.goal, cfg.max_speed, cfg.k_p);
    const double v_g_norm = norm(diag.v_g);
    if (v_g_norm <= 0.0 || mode == Mode::passive) {
        diag.command = diag.v_g;
        return diag;
    }

    const PixelVec p_o = rig.optical_center();
    const PixelVec v_g_img = project_direction(rig, diag.v_g);
    const PixelVec v_g_unit = (1.0 / norm(v_g_img)) * v_g_img;

    const std::vector<Charge> charges = charge_map(pixels, p_o, v_g_img, params.theta_cs_hat);
    const ForceVec f = total_force(charges, p_o, p_o, params.dead_radius_r, params.spread_s);
    if (auto v_f_raw = feature_velocity(f))
        diag.v_f = filter_step(filter, *v_f_raw, cfg.dt, cfg.cutoff_hz);

    diag.lambda = mode == Mode::active_autotune ? lambda_of(schedule, diag.n_f) : params.lambda;

    const PixelVec blended = blend(v_g_unit, diag.v_f, diag.lambda);
    const double blended_norm = norm(blended);
    if (blended_norm > 1e-12) {
        const BodyVelocity dir = lift_direction(rig, blended);
        const double speed = v_g_norm * blended_norm;
        diag.command = {speed * dir.vx, speed * dir.vy};
    }
    if (diag.v_f && norm(*diag.v_f) > kForceEpsilon) {
        diag.region = classify_point(v_g_img, *diag.v_f);
        diag.local_min = is_local_minimum(v_g_img, *diag.v_f, cfg.angle_tol);
    }
    return diag;
}

}  // namespace detail

// One full control cycle from the current pose: detect, charge, sum forces at
// the optical center, low-pass, blend with lambda and lift to the body frame.
inline StepDiagnostics control_step(const VehicleState& true_state, Vec2 nav_position,
                                    const WorldScenario& world, const CameraRig& rig,
                                    const FieldParams& params, const LambdaSchedule& schedule,
                                    Mode mode, const DetectionModel& detection,
                                    const SimConfig& cfg, LowPassFilter& filter,
                                    std::mt19937_64& episode_rng) {
    const std::vector<PixelVec> pixels =
        detect_features(true_state, world, rig, detection, episode_rng);
    return detail::control_from_detection(pixels, nav_position, world, rig, params, schedule, mode,
                                          cfg, filter);
}

struct StepRecord {
    double t = 0.0;
    Vec2 true_pos;
    Vec2 est_pos;
    BodyVelocity v_g;
    std::optional<PixelVec> v_f;
    BodyVelocity command;
    double lambda = 1.0;
    int n_f = 0;
    RegionClass region = RegionClass::GoalFriendly;
    bool local_min = false;
    bool lost = false;
};

struct TrajectoryLog {
    std::vector<StepRecord> steps;
};

struct EpisodeMetrics {
    double path_length = 0.0;
    double overhead_ratio = 1.0;  // path length over the straight chord travelled
    double final_true_distance = 0.0;
    int min_n_f = 0;
    double mean_n_f = 0.0;
    double localized_fraction = 1.0;
    bool goal_success = false;          // final true distance within goal_tol
    bool localization_success = false;  // tracking never lost
    bool reached_goal_estimate = false; // terminated by the controller, not by timeout
    bool stalled = false;
    int steps = 0;
    std::uint64_t episode_seed = 0;
};

namespace detail {

// Longest run of opposition flags, where gaps shorter than max_gap frames do
// not break the run (the raw flag flickers at field sign changes).
inline int longest_opposition_run(const std::vector<StepRecord>& steps, int max_gap) {
    int best = 0, current = 0, gap = 0;
    bool in_run = false;
    for (const StepRecord& s : steps) {
        if (s.local_min) {
            gap = 0;
            in_run = true;
            ++current;
            best = std::max(best, current);
        } else if (in_run) {
            if (++gap > max_gap) {
                in_run = false;
                current = 0;
                gap = 0;
            }
        }
    }
    return best;
}

}  // namespace detail

struct EpisodeResult {
    TrajectoryLog log;
    EpisodeMetrics metrics;
};

// Every metric is recomputable from the logged rows alone, so a parsed-back
// trajectory CSV reproduces the aggregate statistics exactly.
inline EpisodeMetrics compute_metrics(const TrajectoryLog& log, Vec2 start, Vec2 goal,
                                      const SimConfig& cfg, bool reached,
                                      std::uint64_t episode_seed) {
    EpisodeMetrics m;
    m.episode_seed = episode_seed;
    m.reached_goal_estimate = reached;
    m.steps = static_cast<int>(log.steps.size());
    if (log.steps.empty()) return m;

    double path = 0.0;
    long long n_f_sum = 0;
    int min_n_f = std::numeric_limits<int>::max();
    int localized = 0;
    for (size_t i = 0; i < log.steps.size(); ++i) {
        const StepRecord& s = log.steps[i];
        if (i + 1 < log.steps.size()) path += norm(log.steps[i + 1].true_pos - s.true_pos);
        n_f_sum += s.n_f;
        min_n_f = std::min(min_n_f, s.n_f);
        localized += s.lost ? 0 : 1;
    }
    const Vec2 final_pos = log.steps.back().true_pos;
    m.path_length = path;
    const double chord = norm(final_pos - start);
    m.overhead_ratio = chord > 1e-12 ? path / chord : 1.0;
    m.final_true_distance = norm(final_pos - goal);
    m.min_n_f = min_n_f;
    m.mean_n_f = static_cast<double>(n_f_sum) / static_cast<double>(log.steps.size());
    m.localized_fraction = static_cast<double>(localized) / static_cast<double>(log.steps.size());
    m.goal_success = m.final_true_distance < cfg.goal_tol;
    m.localization_success = localized == m.steps;
    m.stalled = detail::longest_opposition_run(log.steps, cfg.stall_max_gap) > cfg.stall_window;
    return m;
}

// Fixed-rate loop {detect, localize, control, integrate} until the fed-back
// pose reaches the goal or max_steps commands have been applied. The final
// frame is logged with a zero command so the log ends at the terminal state.
inline EpisodeResult run_episode(const WorldScenario& world, const CameraRig& rig,
                                 const FieldParams& params, const LambdaSchedule& schedule,
                                 Mode mode, DetectionModel detection, const SimConfig& cfg,
                                 std::uint64_t episode_seed) {
    cfg.validate();
    params.validate();
    detection.validate();
    rig.validate();

    EpisodeResult result;

    std::mt19937_64 rng(detail::splitmix64(episode_seed));
    if (detection.response_seed == 0)
        detection.response_seed = detail::splitmix64(episode_seed ^ 0xfeedbeefULL);

    LocalizationHealth health;
    health.n_min = cfg.n_min;
    health.k_frames = cfg.k_frames;
    health.drift_rate = cfg.drift_rate;
    {
        std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
        const double a = angle(rng);
        health.drift_direction = {std::cos(a), std::sin(a)};
    }

    VehicleState state{world.start, cfg.flight_height, {0.0, 0.0}};
    LowPassFilter filter;
    bool reached = false;

    for (int frame = 0;; ++frame) {
        const std::vector<PixelVec> pixels = detect_features(state, world, rig, detection, rng);
        const int n_f = static_cast<int>(pixels.size());
        health.observe(n_f);
        const Vec2 est_pos = health.estimate(state.position);
        const Vec2 nav_pos = cfg.feedback == PoseFeedback::estimate ? est_pos : state.position;

        reached = norm(nav_pos - world.goal) <= cfg.goal_tol;
        const bool terminal = reached || frame == cfg.max_steps;

        StepDiagnostics diag = detail::control_from_detection(pixels, nav_pos, world, rig, params,
                                                              schedule, mode, cfg, filter);
        if (terminal) diag.command = {0.0, 0.0};

        StepRecord rec;
        rec.t = frame * cfg.dt;
        rec.true_pos = state.position;
        rec.est_pos = est_pos;
        rec.v_g = diag.v_g;
        rec.v_f = diag.v_f;
        rec.command = diag.command;
        rec.lambda = diag.lambda;
        rec.n_f = n_f;
        rec.region = diag.region;
        rec.local_min = diag.local_min;
        rec.lost = health.lost;
        result.log.steps.push_back(rec);

        if (terminal) break;
        state = step_kinematics(state, diag.command, cfg.dt);
    }

    result.metrics =
        compute_metrics(result.log, world.start, world.goal, cfg, reached, episode_seed);
    return result;
}

}  // namespace featnav::sim

#pragma once

// Desk-scale 2D worlds: ground-plane feature layouts with a 10 m start-goal
// task. Layouts are built from rejection-sampled candidate points so every
// kind shares one deterministic generator.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "featnav/vec2.hpp"

namespace featnav::sim {

enum class ScenarioKind {
    corridor_gap,
    l_path,
    diagonal_band,
    uniform_texture,
    symmetric_bifurcation,
    dead_end,
};

inline const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::corridor_gap: return "corridor_gap";
        case ScenarioKind::l_path: return "l_path";
        case ScenarioKind::diagonal_band: return "diagonal_band";
        case ScenarioKind::uniform_texture: return "uniform_texture";
        case ScenarioKind::symmetric_bifurcation: return "symmetric_bifurcation";
        case ScenarioKind::dead_end: return "dead_end";
    }
    return "unknown";
}

inline ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "corridor_gap") return ScenarioKind::corridor_gap;
    if (s == "l_path") return ScenarioKind::l_path;
    if (s == "diagonal_band") return ScenarioKind::diagonal_band;
    if (s == "uniform_texture") return ScenarioKind::uniform_texture;
    if (s == "symmetric_bifurcation") return ScenarioKind::symmetric_bifurcation;
    if (s == "dead_end") return ScenarioKind::dead_end;
    throw std::invalid_argument("unknown scenario kind: " + s);
}

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
};

// Layout knobs. Defaults reproduce the benchmark scenarios; tests override
// individual fields (e.g. a lower density for counting checks). The defaults
// are sized against the camera footprint at the default flight height
// (3.6 m x 2.4 m): the gap is wide enough that a straight crossing sees no
// features for longer than the tracking-loss window, while the detour strip
// sits just outside the on-axis footprint.
struct ScenarioParams {
    Rect bounds{0.0, 0.0, 16.0, 8.0};
    Vec2 start{2.0, 4.0};
    Vec2 goal{12.0, 4.0};
    double rich_density = 12.0;  // features per m^2 in feature-rich regions

    // corridor_gap: a rich approach corridor ends at a slanted feature-free
    // band; the detour is a rich strip that starts above and to the right of
    // the corridor end, so it only comes into view near the band's wall.
    double gap_x = 2.6;            // left wall x at y = 0
    double gap_width = 5.44;       // band width along x
    double gap_slant = 0.6;        // wall dx per dy; tilts the detour upward
    double detour_y = 5.4;         // strip bottom; the band stays below it
    double approach_half_width = 1.2;  // approach corridor half-height
    double strip_x_start = 5.2;    // no strip over the early approach
    double flare_width = 1.0;      // rich wall-hugging ramp from corridor up to the strip

    // symmetric_bifurcation: mirrored feature lobes around a featureless throat.
    double approach_density = 8.0;
    double approach_x_end = 6.0;
    double lobe_x_end = 9.5;
    double throat_half_width = 0.8;
    double lobe_y_top = 7.0;

    // dead_end / diagonal_band corridor half-widths
    double corridor_half_width = 0.9;
    double band_half_width = 1.2;
};

struct WorldScenario {
    ScenarioKind kind = ScenarioKind::uniform_texture;
    std::string name;
    std::vector<Vec2> features;
    Vec2 start;
    Vec2 goal;
    Rect bounds;
    std::uint64_t seed = 0;
};

namespace detail {

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

inline bool near_polyline(Vec2 p, const std::vector<Vec2>& pts, double half_width) {
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        if (segment_distance(p, pts[i], pts[i + 1]) <= half_width) return true;
    return false;
}

// Draw round(area * density) candidates uniformly over `box` and keep the
// ones accepted by the predicate. With `mirrored`, every accepted point is
// emitted together with its exact reflection about the start-goal axis.
inline void sample_region(std::vector<Vec2>& out, std::mt19937_64& rng, const Rect& box,
                          double density, const std::function<bool(Vec2)>& accept,
                          bool mirrored, double axis_y) {
    const long n = std::lround(box.area() * density);
    std::uniform_real_distribution<double> ux(box.x0, box.x1);
    std::uniform_real_distribution<double> uy(box.y0, box.y1);
    for (long i = 0; i < n; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        if (!accept(p)) continue;
        out.push_back(p);
        if (mirrored) out.push_back({p.x, 2.0 * axis_y - p.y});
    }
}

}  // namespace detail

inline WorldScenario make_scenario(ScenarioKind kind, std::uint64_t seed,
                                   const ScenarioParams& params) {
    if (norm(params.start - params.goal) <= 0.0)
        throw std::invalid_argument("make_scenario: start and goal coincide");

    WorldScenario w;
    w.kind = kind;
    w.name = to_string(kind);
    w.start = params.start;
    w.goal = params.goal;
    w.bounds = params.bounds;
    w.seed = seed;

    std::mt19937_64 rng(seed);
    const Rect& b = params.bounds;
    const double axis_y = params.start.y;

    switch (kind) {
        case ScenarioKind::uniform_texture: {
            detail::sample_region(w.features, rng, b, params.rich_density,
                                  [](Vec2) { return true; }, false, axis_y);
            break;
        }
        case ScenarioKind::corridor_gap: {
            const auto rich = [&](Vec2 p) {
                const double wall = params.gap_x + params.gap_slant * p.y;
                if (p.y >= params.detour_y) return p.x >= params.strip_x_start;   // detour strip
                if (p.x >= wall + params.gap_width) return true;                  // far side
                if (p.x > wall) return false;                                     // the band
                if (std::abs(p.y - axis_y) <= params.approach_half_width) return true;
                // ramp along the wall from the corridor up to the strip
                return p.y > axis_y && p.x >= wall - params.flare_width;
            };
            detail::sample_region(w.features, rng, b, params.rich_density, rich, false, axis_y);
            break;
        }
        case ScenarioKind::l_path: {
            // Detour corridor: out along the axis, up, across the top, down to the goal.
            const Rect leg_in{b.x0, axis_y - 1.0, 8.2, axis_y + 1.0};
            const Rect leg_up{6.0, axis_y - 1.0, 8.2, b.y1};
            const Rect leg_top{6.0, 6.0, 13.2, b.y1};
            const Rect leg_down{11.0, axis_y - 1.0, 13.2, b.y1};
            const auto rich = [&](Vec2 p) {
                return leg_in.contains(p) || leg_up.contains(p) || leg_top.contains(p) ||
                       leg_down.contains(p);
            };
            detail::sample_region(w.features, rng, b, params.rich_density, rich, false, axis_y);
            break;
        }
        case ScenarioKind::diagonal_band: {
            const std::vector<Vec2> spine{params.start, {8.0, 6.5}, params.goal};
            detail::sample_region(
                w.features, rng, b, params.rich_density,
                [&](Vec2 p) { return detail::near_polyline(p, spine, params.band_half_width); },
                false, axis_y);
            break;
        }
        case ScenarioKind::symmetric_bifurcation: {
            // Upper half only; every point is emitted with its mirror so the
            // feature set is exactly symmetric about the start-goal axis.
            const Rect approach{b.x0, axis_y, params.approach_x_end, b.y1};
            detail::sample_region(
                w.features, rng, approach, params.approach_density,
                [&](Vec2 p) { return p.y > axis_y; }, true, axis_y);
            const Rect lobe{params.approach_x_end, axis_y + params.throat_half_width,
                            params.lobe_x_end, params.lobe_y_top};
            detail::sample_region(w.features, rng, lobe, params.rich_density,
                                  [](Vec2) { return true; }, true, axis_y);
            break;
        }
        case ScenarioKind::dead_end: {
            // Feature-rich arm that bends away from the straight path and
            // terminates in a cul-de-sac pointed back toward the goal.
            const std::vector<Vec2> arm{params.start, {4.5, 4.0}, {6.5, 5.4}, {8.2, 5.0}};
            detail::sample_region(
                w.features, rng, b, params.rich_density,
                [&](Vec2 p) { return detail::near_polyline(p, arm, params.corridor_half_width); },
                false, axis_y);
            break;
        }
    }
    return w;
}

inline WorldScenario make_scenario(ScenarioKind kind, std::uint64_t seed) {
    return make_scenario(kind, seed, ScenarioParams{});
}

}  // namespace featnav::sim

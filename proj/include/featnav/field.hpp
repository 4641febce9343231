#pragma once

// Feature-based potential field: every tracked image feature becomes a
// charge whose attractive energy depends on its bearing relative to the
// goal direction. The summed charge forces yield a feature velocity that
// is blended with the goal velocity.

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "featnav/vec2.hpp"

namespace featnav {

// Forces below this magnitude are treated as zero; the feature velocity
// is then absent and the command falls back to the pure goal velocity.
inline constexpr double kForceEpsilon = 1e-9;

// A charged image feature. `offset` is the feature position relative to
// the optical center, `energy` its attractive strength in [0,1], and
// `sector_angle` the bearing cutoff beyond which features stay neutral.
struct Charge {
    PixelVec offset;
    double energy = 0.0;
    double sector_angle = 0.0;
};

// Tunables of the field. Angles in radians, distances in pixels.
struct FieldParams {
    double lambda = 0.4;                      // goal-velocity weight in [0,1]
    double theta_cs_hat = deg2rad(60.0);      // central angle of the neutral sector, [0, 2*pi)
    double dead_radius_r = 50.0;              // no force inside this radius
    double spread_s = 150.0;                  // ramp length until the force saturates

    void validate() const {
        if (!(lambda >= 0.0 && lambda <= 1.0))
            throw std::invalid_argument("FieldParams: lambda must be in [0,1]");
        if (!(theta_cs_hat >= 0.0 && theta_cs_hat < 2.0 * kPi))
            throw std::invalid_argument("FieldParams: theta_cs_hat must be in [0, 2*pi)");
        if (!(dead_radius_r >= 0.0))
            throw std::invalid_argument("FieldParams: dead_radius_r must be >= 0");
        if (!(spread_s > 0.0))
            throw std::invalid_argument("FieldParams: spread_s must be > 0");
    }
};

// Dimensionless image-plane force.
struct ForceVec {
    double fx = 0.0;
    double fy = 0.0;
};

inline ForceVec operator+(ForceVec a, ForceVec b) { return {a.fx + b.fx, a.fy + b.fy}; }
inline double norm(ForceVec f) { return std::hypot(f.fx, f.fy); }

enum class RegionClass { GoalFriendly, FeatureFriendly };

// Bearing cutoff from the central angle of the neutral sector:
// theta_cs = pi - theta_cs_hat / 2, in (0, pi].
inline double sector_angle(double theta_cs_hat) {
    if (!(theta_cs_hat >= 0.0 && theta_cs_hat < 2.0 * kPi))
        throw std::invalid_argument("sector_angle: theta_cs_hat must be in [0, 2*pi)");
    return kPi - theta_cs_hat / 2.0;
}

// Angle in [0, pi] between the feature offset p_i - p_o and the image-frame
// goal direction. The cosine is clamped so collinear inputs cannot produce NaN.
inline double feature_angle(PixelVec p_i, PixelVec p_o, PixelVec v_g_img) {
    const PixelVec offset = p_i - p_o;
    const double n_off = norm(offset);
    const double n_goal = norm(v_g_img);
    if (n_off <= 0.0)
        throw std::invalid_argument("feature_angle: feature coincides with the optical center");
    if (n_goal <= 0.0)
        throw std::invalid_argument("feature_angle: goal direction has zero length");
    const double c = std::clamp(dot(offset, v_g_img) / (n_off * n_goal), -1.0, 1.0);
    return std::acos(c);
}

// Charging policy: energy falls linearly with bearing and is zero past the cutoff.
inline double assign_charge(double theta_i, double theta_cs) {
    if (!(theta_i >= 0.0 && theta_i <= kPi))
        throw std::invalid_argument("assign_charge: theta_i must be in [0, pi]");
    if (!(theta_cs > 0.0 && theta_cs <= kPi))
        throw std::invalid_argument("assign_charge: theta_cs must be in (0, pi]");
    if (theta_i > theta_cs) return 0.0;
    return 1.0 - theta_i / theta_cs;
}

// One charge per feature. Features exactly at the optical center carry no
// bearing information and are skipped.
inline std::vector<Charge> charge_map(std::span<const PixelVec> features, PixelVec p_o,
                                      PixelVec v_g_img, double theta_cs_hat) {
    if (norm(v_g_img) <= 0.0)
        throw std::invalid_argument("charge_map: goal direction has zero length");
    const double theta_cs = sector_angle(theta_cs_hat);
    std::vector<Charge> charges;
    charges.reserve(features.size());
    for (const PixelVec& p : features) {
        const PixelVec offset = p - p_o;
        if (norm(offset) == 0.0) continue;
        const double theta = feature_angle(p, p_o, v_g_img);
        charges.push_back({offset, assign_charge(theta, theta_cs), theta_cs});
    }
    return charges;
}

// Attractive force a single charge exerts on the evaluation point p_c.
// Zero inside the dead radius, linear ramp across the spread, then saturated
// at the charge energy. The direction points from p_c toward the charge.
inline ForceVec force_from_charge(const Charge& charge, PixelVec p_c, PixelVec p_o,
                                  double dead_radius_r, double spread_s) {
    if (!(spread_s > 0.0)) throw std::invalid_argument("force_from_charge: spread_s must be > 0");
    if (!(dead_radius_r >= 0.0))
        throw std::invalid_argument("force_from_charge: dead_radius_r must be >= 0");
    const PixelVec p_i = p_o + charge.offset;
    const PixelVec toward = p_i - p_c;
    const double d = norm(toward);
    if (d < dead_radius_r || d == 0.0) return {0.0, 0.0};
    const double ramp = std::min(1.0, (d - dead_radius_r) / spread_s);
    const double mag = ramp * charge.energy;
    return {mag * toward.u / d, mag * toward.v / d};
}

// Sum of the per-charge forces, accumulated in charge order.
inline ForceVec total_force(std::span<const Charge> charges, PixelVec p_c, PixelVec p_o,
                            double dead_radius_r, double spread_s) {
    ForceVec f;
    for (const Charge& c : charges) f = f + force_from_charge(c, p_c, p_o, dead_radius_r, spread_s);
    return f;
}

// Normalized feature velocity; absent when the total force is negligible.
inline std::optional<PixelVec> feature_velocity(ForceVec f, double eps = kForceEpsilon) {
    const double n = norm(f);
    if (n <= eps) return std::nullopt;
    return PixelVec{f.fx / n, f.fy / n};
}

// Reference direction lambda * v_g + (1 - lambda) * v_f; falls back to the
// goal direction when the feature velocity is absent.
inline PixelVec blend(PixelVec v_g_unit, const std::optional<PixelVec>& v_f, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("blend: lambda must be in [0,1]");
    if (!v_f) return v_g_unit;
    return lambda * v_g_unit + (1.0 - lambda) * (*v_f);
}

// Acute (or right) angle between goal and feature velocity means the blended
// command still makes progress toward the goal.
inline RegionClass classify_point(PixelVec v_g_img, PixelVec v_f) {
    if (norm(v_g_img) <= 0.0 || norm(v_f) <= 0.0)
        throw std::invalid_argument("classify_point: zero direction");
    return dot(v_g_img, v_f) >= 0.0 ? RegionClass::GoalFriendly : RegionClass::FeatureFriendly;
}

// True when the feature velocity opposes the goal direction to within
// angle_tol, the signature of a potential-field local minimum.
inline bool is_local_minimum(PixelVec v_g_img, PixelVec v_f, double angle_tol) {
    const double n_g = norm(v_g_img);
    const double n_f = norm(v_f);
    if (n_g <= 0.0 || n_f <= 0.0)
        throw std::invalid_argument("is_local_minimum: zero direction");
    const double c = std::clamp(dot(v_g_img, v_f) / (n_g * n_f), -1.0, 1.0);
    return std::acos(c) > kPi - angle_tol;
}

// Regular pixel lattice for field-map evaluation.
struct GridSpec {
    double u0 = 0.0;
    double v0 = 0.0;
    double du = 10.0;
    double dv = 10.0;
    int nu = 72;
    int nv = 48;
};

struct FieldMapCell {
    ForceVec force;
    RegionClass region = RegionClass::GoalFriendly;
};

struct FieldMap {
    GridSpec grid;
    std::vector<FieldMapCell> cells;  // row-major, v index outer

    const FieldMapCell& at(int iu, int iv) const { return cells[static_cast<size_t>(iv) * grid.nu + iu]; }
};

// Raw (unnormalized) total force and region class at every lattice point.
// Charges depend only on p_o and the goal direction, so they are built once.
inline FieldMap field_map(std::span<const PixelVec> features, PixelVec p_o, PixelVec v_g_img,
                          const FieldParams& params, const GridSpec& grid) {
    params.validate();
    const std::vector<Charge> charges = charge_map(features, p_o, v_g_img, params.theta_cs_hat);
    FieldMap map;
    map.grid = grid;
    map.cells.resize(static_cast<size_t>(grid.nu) * grid.nv);
    for (int iv = 0; iv < grid.nv; ++iv) {
        for (int iu = 0; iu < grid.nu; ++iu) {
            const PixelVec p_c{grid.u0 + iu * grid.du, grid.v0 + iv * grid.dv};
            const ForceVec f = total_force(charges, p_c, p_o, params.dead_radius_r, params.spread_s);
            FieldMapCell cell;
            cell.force = f;
            cell.region = dot(v_g_img, PixelVec{f.fx, f.fy}) >= 0.0 ? RegionClass::GoalFriendly
                                                                    : RegionClass::FeatureFriendly;
            map.cells[static_cast<size_t>(iv) * grid.nu + iu] = cell;
        }
    }
    return map;
}

}  // namespace featnav

#pragma once

// Pinhole camera model for a downward-looking rig and the direction
// transforms between body and image frames.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "featnav/vec2.hpp"

namespace featnav {

using Mat3 = std::array<std::array<double, 3>, 3>;

struct Intrinsics {
    double fx = 300.0;
    double fy = 300.0;
    double cx = 360.0;
    double cy = 240.0;
    int width = 720;
    int height = 480;

    void validate() const {
        if (!(fx > 0.0 && fy > 0.0)) throw std::invalid_argument("Intrinsics: focal lengths must be > 0");
        if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
            throw std::invalid_argument("Intrinsics: optical center outside image bounds");
    }

    PixelVec optical_center() const { return {cx, cy}; }
};

// Rotation and translation from body frame to the camera. The body frame is
// x forward, y right, z down, so the identity rotation is a camera looking
// straight at the ground with body x along image u and body y along image v.
struct BodyToImage {
    Mat3 rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
    std::array<double, 3> translation{0.0, 0.0, 0.0};

    void validate(double tol = 1e-9) const {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += rotation[k][i] * rotation[k][j];
                const double expect = i == j ? 1.0 : 0.0;
                if (std::abs(s - expect) > tol)
                    throw std::invalid_argument("BodyToImage: rotation is not orthonormal");
            }
        }
        const auto& r = rotation;
        const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                           r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                           r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
        if (std::abs(det - 1.0) > tol)
            throw std::invalid_argument("BodyToImage: rotation determinant is not +1");
    }

    static BodyToImage identity() { return {}; }

    // Camera yawed about the optical axis.
    static BodyToImage yawed(double yaw_rad) {
        const double c = std::cos(yaw_rad), s = std::sin(yaw_rad);
        BodyToImage t;
        t.rotation = {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
        return t;
    }
};

// Planar body velocity; vertical motion is excluded by construction.
struct BodyVelocity {
    double vx = 0.0;
    double vy = 0.0;
};

inline double norm(BodyVelocity v) { return std::hypot(v.vx, v.vy); }

struct CameraRig {
    Intrinsics intrinsics;
    BodyToImage extrinsics;

    void validate() const {
        intrinsics.validate();
        extrinsics.validate();
    }

    PixelVec optical_center() const { return intrinsics.optical_center(); }
};

namespace detail {

// Restriction of K*R to planar body directions, mapped to the first two
// homogeneous image coordinates. With a level rig the third row of R has no
// planar component and the output is an exact image direction.
inline std::array<std::array<double, 2>, 2> planar_direction_matrix(const CameraRig& rig) {
    const auto& r = rig.extrinsics.rotation;
    const auto& k = rig.intrinsics;
    return {{{k.fx * r[0][0] + k.cx * r[2][0], k.fx * r[0][1] + k.cx * r[2][1]},
             {k.fy * r[1][0] + k.cy * r[2][0], k.fy * r[1][1] + k.cy * r[2][1]}}};
}

}  // namespace detail

// Image-frame direction of a planar body velocity. The homogeneous form of
// the velocity has last coordinate zero, so the translation drops out and
// only the direction survives. Returned unnormalized.
inline PixelVec project_direction(const CameraRig& rig, BodyVelocity v_body) {
    if (norm(v_body) <= 0.0)
        throw std::invalid_argument("project_direction: zero body velocity");
    const auto m = detail::planar_direction_matrix(rig);
    const PixelVec dir{m[0][0] * v_body.vx + m[0][1] * v_body.vy,
                       m[1][0] * v_body.vx + m[1][1] * v_body.vy};
    if (norm(dir) <= 0.0)
        throw std::invalid_argument("project_direction: velocity maps to a degenerate direction");
    return dir;
}

// Planar body direction whose projection is parallel to the given image
// direction. Output is unit length; the caller applies the speed.
inline BodyVelocity lift_direction(const CameraRig& rig, PixelVec v_img) {
    if (norm(v_img) <= 0.0) throw std::invalid_argument("lift_direction: zero image direction");
    const auto m = detail::planar_direction_matrix(rig);
    const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (std::abs(det) < 1e-12)
        throw std::invalid_argument("lift_direction: rig direction map is singular");
    BodyVelocity v{(m[1][1] * v_img.u - m[0][1] * v_img.v) / det,
                   (-m[1][0] * v_img.u + m[0][0] * v_img.v) / det};
    const double n = norm(v);
    if (n <= 0.0) throw std::invalid_argument("lift_direction: degenerate lift");
    return {v.vx / n, v.vy / n};
}

// Planar vehicle pose at a fixed flight height above the ground plane.
struct VehiclePose {
    Vec2 position;
    double height = 1.5;
};

// Pixel coordinates of a ground-plane point seen by the downward camera,
// or nothing when the point is outside the image or behind the camera.
inline std::optional<PixelVec> project_point(const CameraRig& rig, Vec2 world_point,
                                             const VehiclePose& pose) {
    const auto& r = rig.extrinsics.rotation;
    const auto& t = rig.extrinsics.translation;
    const double bx = world_point.x - pose.position.x;
    const double by = world_point.y - pose.position.y;
    const double bz = pose.height;  // ground point sits below the body, z down
    const double xc = r[0][0] * bx + r[0][1] * by + r[0][2] * bz + t[0];
    const double yc = r[1][0] * bx + r[1][1] * by + r[1][2] * bz + t[1];
    const double zc = r[2][0] * bx + r[2][1] * by + r[2][2] * bz + t[2];
    if (zc <= 1e-12) return std::nullopt;
    const PixelVec p{rig.intrinsics.fx * xc / zc + rig.intrinsics.cx,
                     rig.intrinsics.fy * yc / zc + rig.intrinsics.cy};
    if (p.u < 0.0 || p.u >= rig.intrinsics.width || p.v < 0.0 || p.v >= rig.intrinsics.height)
        return std::nullopt;
    return p;
}

}  // namespace featnav

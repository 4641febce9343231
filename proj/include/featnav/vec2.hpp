#pragma once

#include <cmath>

namespace featnav {

// Planar vector in world or body coordinates (meters, m/s).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline bool is_finite(Vec2 a) { return std::isfinite(a.x) && std::isfinite(a.y); }

// Image-plane vector (pixels). u grows to the right, v grows downward,
// origin at the top-left pixel.
struct PixelVec {
    double u = 0.0;
    double v = 0.0;
};

inline PixelVec operator+(PixelVec a, PixelVec b) { return {a.u + b.u, a.v + b.v}; }
inline PixelVec operator-(PixelVec a, PixelVec b) { return {a.u - b.u, a.v - b.v}; }
inline PixelVec operator*(double s, PixelVec a) { return {s * a.u, s * a.v}; }

inline double dot(PixelVec a, PixelVec b) { return a.u * b.u + a.v * b.v; }
inline double norm(PixelVec a) { return std::hypot(a.u, a.v); }

inline bool is_finite(PixelVec a) { return std::isfinite(a.u) && std::isfinite(a.v); }

inline constexpr double deg2rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace featnav

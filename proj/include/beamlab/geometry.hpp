#pragma once

#include <cmath>
#include <numbers>
#include <optional>

namespace beamlab {

struct vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr vec2 operator+(vec2 a, vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr vec2 operator-(vec2 a, vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr vec2 operator*(double s, vec2 v) { return {s * v.x, s * v.y}; }
  friend constexpr vec2 operator*(vec2 v, double s) { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(vec2, vec2) = default;
};

constexpr double dot(vec2 a, vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(vec2 a, vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(vec2 a, vec2 b) { return norm(b - a); }
inline double azimuth(vec2 v) { return std::atan2(v.y, v.x); }

struct segment {
  vec2 a;
  vec2 b;

  double length() const { return distance(a, b); }
};

// Maps any angle to (-pi, pi].
double wrap_angle(double rad);

// Absolute angular separation in [0, pi].
double angular_offset(double a, double b);

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

vec2 closest_point(vec2 p, const segment& s);
double distance(vec2 p, const segment& s);

// Disc touches or overlaps the segment; tangency counts.
bool disc_intersects(vec2 center, double radius, const segment& s);

// Reflection of p across the infinite line through s.
vec2 mirror(vec2 p, const segment& s);

// Proper or endpoint intersection of two segments; nullopt for parallel/disjoint.
std::optional<vec2> intersect(const segment& s, const segment& t);

}  // namespace beamlab

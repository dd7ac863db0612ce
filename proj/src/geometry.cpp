#include "beamlab/geometry.hpp"

#include <algorithm>

namespace beamlab {

double wrap_angle(double rad) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(rad, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

double angular_offset(double a, double b) { return std::abs(wrap_angle(a - b)); }

vec2 closest_point(vec2 p, const segment& s) {
  const vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return s.a;
  const double u = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
  return s.a + u * d;
}

double distance(vec2 p, const segment& s) { return distance(p, closest_point(p, s)); }

bool disc_intersects(vec2 center, double radius, const segment& s) {
  return distance(center, s) <= radius;
}

vec2 mirror(vec2 p, const segment& s) {
  const vec2 d = s.b - s.a;
  const double len2 = dot(d, d);
  const vec2 foot = s.a + (dot(p - s.a, d) / len2) * d;
  return 2.0 * foot - p;
}

std::optional<vec2> intersect(const segment& s, const segment& t) {
  const vec2 r = s.b - s.a;
  const vec2 q = t.b - t.a;
  const double denom = cross(r, q);
  if (denom == 0.0) return std::nullopt;
  const vec2 w = t.a - s.a;
  const double u = cross(w, q) / denom;
  const double v = cross(w, r) / denom;
  if (u < 0.0 || u > 1.0 || v < 0.0 || v > 1.0) return std::nullopt;
  return s.a + u * r;
}

}  // namespace beamlab

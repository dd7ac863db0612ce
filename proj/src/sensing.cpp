#include "beamlab/sensing.hpp"

#include <cmath>
#include <map>

#include "beamlab/error.hpp"

namespace beamlab {

const char* to_string(sensor_kind k) noexcept {
  switch (k) {
    case sensor_kind::lidar: return "lidar";
    case sensor_kind::camera: return "camera";
    case sensor_kind::fused: return "fused";
  }
  return "?";
}

sensor_kind sensor_kind_from_string(const std::string& s) {
  if (s == "lidar") return sensor_kind::lidar;
  if (s == "camera") return sensor_kind::camera;
  if (s == "fused") return sensor_kind::fused;
  throw error(errc::parse, "unknown sensor kind '" + s + "'");
}

sensor_spec default_lidar(vec2 mount_pos, double mount_az) {
  sensor_spec s;
  s.kind = sensor_kind::lidar;
  s.mount_pos = mount_pos;
  s.mount_az = mount_az;
  s.fov_az = 2.0 * std::numbers::pi;
  s.max_range = 200.0;
  s.frame_rate = 20.0;
  s.vertical_channels = 128;
  s.horizontal_channels = 2048;
  return s;
}

sensor_spec default_camera(vec2 mount_pos, double mount_az) {
  sensor_spec s;
  s.kind = sensor_kind::camera;
  s.mount_pos = mount_pos;
  s.mount_az = mount_az;
  s.fov_az = 2.0 * std::numbers::pi / 3.0;
  s.max_range = 20.0;
  s.frame_rate = 20.0;
  return s;
}

bool on_frame_boundary(double time, double frame_rate) {
  const double frames = time * frame_rate;
  return std::abs(frames - std::round(frames)) < 1e-6;
}

std::vector<detection> sense_frame(const scene& sc, const sensor_spec& spec, double time,
                                   std::mt19937_64& rng) {
  if (!on_frame_boundary(time, spec.frame_rate))
    throw error(errc::precondition, "t=" + std::to_string(time) + " is not a " +
                                        to_string(spec.kind) + " frame boundary");
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<detection> out;
  for (const auto& o : sc.obstacles) {
    const vec2 rel = o.center - spec.mount_pos;
    if (norm(rel) > spec.max_range) continue;
    if (spec.fov_az < 2.0 * std::numbers::pi &&
        angular_offset(azimuth(rel), spec.mount_az) > spec.fov_az / 2.0)
      continue;
    vec2 pos = o.center;
    if (spec.noise_sigma > 0.0) {
      pos.x += spec.noise_sigma * noise(rng);
      pos.y += spec.noise_sigma * noise(rng);
    }
    out.push_back({o.id, pos, o.radius, time, spec.kind});
  }
  return out;
}

std::vector<detection> fuse_detections(const std::vector<std::vector<detection>>& frames) {
  struct group {
    detection first;
    vec2 sum;
    double radius_sum = 0.0;
    double latest = 0.0;
    int count = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, group> groups;
  for (const auto& frame : frames) {
    for (const auto& d : frame) {
      auto [it, fresh] = groups.try_emplace(d.object_id);
      auto& g = it->second;
      if (fresh) {
        order.push_back(d.object_id);
        g.first = d;
        g.latest = d.timestamp;
      }
      g.sum = g.sum + d.position;
      g.radius_sum += d.radius_est;
      g.latest = std::max(g.latest, d.timestamp);
      ++g.count;
    }
  }
  std::vector<detection> out;
  out.reserve(order.size());
  for (const auto& id : order) {
    const auto& g = groups.at(id);
    if (g.count == 1) {
      out.push_back(g.first);
      continue;
    }
    const double n = g.count;
    out.push_back({id, (1.0 / n) * g.sum, g.radius_sum / n, g.latest, sensor_kind::fused});
  }
  return out;
}

}  // namespace beamlab

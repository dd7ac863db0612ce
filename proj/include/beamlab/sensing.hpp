#pragma once

#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "beamlab/channel.hpp"
#include "beamlab/geometry.hpp"

namespace beamlab {

enum class sensor_kind { lidar, camera, fused };

const char* to_string(sensor_kind k) noexcept;
sensor_kind sensor_kind_from_string(const std::string& s);

struct sensor_spec {
  sensor_kind kind = sensor_kind::lidar;
  vec2 mount_pos;
  double mount_az = 0.0;  // rad
  double fov_az = 2.0 * std::numbers::pi;
  double max_range = 200.0;  // m
  double frame_rate = 20.0;  // Hz
  double noise_sigma = 0.05;  // m

  // Metadata only; no point cloud is synthesized.
  int vertical_channels = 0;
  int horizontal_channels = 0;
};

// OS-1 class lidar: 360 deg, 200 m, 20 Hz, 128/2048 channels.
sensor_spec default_lidar(vec2 mount_pos = {}, double mount_az = 0.0);
// Stereo camera with a 120 deg field of view.
sensor_spec default_camera(vec2 mount_pos = {}, double mount_az = 0.0);

struct detection {
  std::string object_id;
  vec2 position;
  double radius_est = 0.0;
  double timestamp = 0.0;
  sensor_kind source = sensor_kind::lidar;
};

bool on_frame_boundary(double time, double frame_rate);

// Oracle detector: ground-truth centers plus isotropic Gaussian noise.
std::vector<detection> sense_frame(const scene& sc, const sensor_spec& spec, double time,
                                   std::mt19937_64& rng);

std::vector<detection> fuse_detections(const std::vector<std::vector<detection>>& frames);

}  // namespace beamlab

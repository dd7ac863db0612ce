#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamlab/beam_manager.hpp"
#include "beamlab/channel.hpp"
#include "beamlab/codebook.hpp"
#include "beamlab/sensing.hpp"
#include "beamlab/ssb.hpp"
#include "beamlab/transceiver.hpp"

namespace beamlab {

struct waypoint {
  vec2 pos;
  double speed = 0.0;  // m/s on the leg that ends here
  double dwell = 0.0;  // s spent here before the next leg
};

// Piecewise-linear path with constant speed per leg.
struct obstacle_script {
  std::string obstacle_id;
  double start_time = 0.0;
  std::vector<waypoint> waypoints;
  bool loop = false;

  double cycle_duration() const;
  // Position and velocity at absolute time t.
  std::pair<vec2, vec2> state_at(double t) const;
};

struct manager_config {
  bool enabled = true;
  double margin = 1.0;
  int los_beam = 0;
  int nlos_beam = 0;
  int hysteresis_frames = 5;
  bool reselect_on_sweep = false;
};

struct scenario {
  std::string name;
  scene sc;
  std::shared_ptr<const beam_codebook> codebook;
  std::shared_ptr<const beam_codebook> ue_codebook;
  int ue_beam = 0;
  ssb_config ssb;
  transceiver_config trx;
  std::vector<sensor_spec> sensors;
  manager_config manager;
  double duration = 10.0;
  double tick_rate = 100.0;
  std::uint64_t seed = 0;
  std::vector<obstacle_script> scripts;
  bool interactive = false;
  nlohmann::json metadata = nlohmann::json::object();

  safe_zone zone() const { return {segment{sc.gnb_pos, sc.ue_pos}, manager.margin}; }
  manager_state initial_manager_state() const;
  long tick_count() const;

  // Cross-checks beam ids, obstacle ids and timing. Throws errc::validation.
  void validate() const;
};

scenario parse_scenario(const nlohmann::json& doc);
scenario load_scenario(const std::filesystem::path& path);

std::filesystem::path bundled_scenario_dir();
// Accepts a file path or the name of a bundled scenario ("demo_berlin").
std::filesystem::path resolve_scenario(const std::string& name_or_path);

double calibrate_tx_constant(double target_rsrp, double distance, double frequency);

}  // namespace beamlab

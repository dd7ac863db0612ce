#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "beamlab/channel.hpp"
#include "beamlab/geometry.hpp"
#include "beamlab/sensing.hpp"

namespace beamlab {

struct safe_zone {
  segment link;
  double margin = 1.0;  // m
};

enum class decision_reason { breach, clear, sweep_select };

const char* to_string(decision_reason r) noexcept;

struct manager_state {
  path_kind active_link = path_kind::los;
  int los_beam = 0;
  int nlos_beam = 0;
  int hysteresis_frames = 5;
  int clear_counter = 0;
  double last_decision_time = 0.0;

  int active_beam() const { return active_link == path_kind::los ? los_beam : nlos_beam; }
  friend bool operator==(const manager_state&, const manager_state&) = default;
};

struct beam_decision {
  double timestamp = 0.0;
  int target_beam = 0;
  path_kind target_link = path_kind::los;
  decision_reason reason = decision_reason::breach;

  friend bool operator==(const beam_decision&, const beam_decision&) = default;
};

bool safe_zone_breach(const safe_zone& zone, const detection& det);

// One decision tick of the proactive LOS/NLOS policy.
std::pair<manager_state, std::optional<beam_decision>> step(
    const manager_state& state, const safe_zone& zone, const std::vector<detection>& detections,
    double time);

// Beam of the strongest measurement; lowest SSB index wins ties.
int select_strongest(const std::vector<ssb_measurement>& measurements);

// Re-points the active link at the sweep winner; no decision when it is already in use.
std::pair<manager_state, std::optional<beam_decision>> sweep_select(
    const manager_state& state, const std::vector<ssb_measurement>& measurements, double time);

}  // namespace beamlab

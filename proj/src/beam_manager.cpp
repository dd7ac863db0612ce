#include "beamlab/beam_manager.hpp"

#include "beamlab/error.hpp"

namespace beamlab {

const char* to_string(decision_reason r) noexcept {
  switch (r) {
    case decision_reason::breach: return "breach";
    case decision_reason::clear: return "clear";
    case decision_reason::sweep_select: return "sweep_select";
  }
  return "?";
}

bool safe_zone_breach(const safe_zone& zone, const detection& det) {
  return distance(det.position, zone.link) <= zone.margin + det.radius_est;
}

std::pair<manager_state, std::optional<beam_decision>> step(
    const manager_state& state, const safe_zone& zone, const std::vector<detection>& detections,
    double time) {
  manager_state next = state;
  bool breached = false;
  for (const auto& d : detections) {
    if (d.timestamp > time)
      throw error(errc::precondition, "detection '" + d.object_id + "' is from the future");
    breached = breached || safe_zone_breach(zone, d);
  }

  if (breached) {
    next.clear_counter = 0;
    if (state.active_link == path_kind::los) {
      next.active_link = path_kind::nlos;
      next.last_decision_time = time;
      return {next, beam_decision{time, next.nlos_beam, path_kind::nlos, decision_reason::breach}};
    }
    return {next, std::nullopt};
  }

  if (state.active_link == path_kind::nlos) {
    next.clear_counter = std::min(state.clear_counter + 1, state.hysteresis_frames);
    if (next.clear_counter >= state.hysteresis_frames) {
      next.active_link = path_kind::los;
      next.clear_counter = 0;
      next.last_decision_time = time;
      return {next, beam_decision{time, next.los_beam, path_kind::los, decision_reason::clear}};
    }
  }
  return {next, std::nullopt};
}

int select_strongest(const std::vector<ssb_measurement>& measurements) {
  if (measurements.empty()) throw error(errc::selection, "no measurements to select from");
  const ssb_measurement* best = &measurements.front();
  for (const auto& m : measurements) {
    if (m.rsrp_dbm > best->rsrp_dbm ||
        (m.rsrp_dbm == best->rsrp_dbm && m.ssb_index < best->ssb_index))
      best = &m;
  }
  return best->beam_id;
}

std::pair<manager_state, std::optional<beam_decision>> sweep_select(
    const manager_state& state, const std::vector<ssb_measurement>& measurements, double time) {
  const int winner = select_strongest(measurements);
  if (winner == state.active_beam()) return {state, std::nullopt};
  manager_state next = state;
  (next.active_link == path_kind::los ? next.los_beam : next.nlos_beam) = winner;
  next.last_decision_time = time;
  return {next, beam_decision{time, winner, next.active_link, decision_reason::sweep_select}};
}

}  // namespace beamlab

#include "beamlab/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

#include "beamlab/error.hpp"

namespace beamlab {

using nlohmann::ordered_json;

namespace {

std::int64_t to_ms(double t) { return std::llround(t * 1000.0); }

ordered_json point_json(vec2 p) { return {{"x", p.x}, {"y", p.y}}; }

ordered_json detection_json(const detection& d) {
  return {{"object_id", d.object_id}, {"x", d.position.x}, {"y", d.position.y},
          {"radius", d.radius_est},   {"t", d.timestamp},  {"source", to_string(d.source)}};
}

ordered_json decision_json(const beam_decision& d) {
  return {{"t", d.timestamp},
          {"target_beam", d.target_beam},
          {"target_link", to_string(d.target_link)},
          {"reason", to_string(d.reason)}};
}

ordered_json obstacle_json(const obstacle& o) {
  return {{"id", o.id},        {"x", o.center.x},    {"y", o.center.y},
          {"radius", o.radius}, {"vx", o.velocity.x}, {"vy", o.velocity.y}};
}

ordered_json measurements_json(const std::vector<ssb_measurement>& ms) {
  ordered_json out = ordered_json::array();
  for (const auto& m : ms)
    out.push_back({{"ssb_index", m.ssb_index}, {"beam_id", m.beam_id}, {"rsrp_dbm", m.rsrp_dbm}});
  return out;
}

}  // namespace

ordered_json to_json(const tick_record& rec) {
  ordered_json j;
  j["tick"] = rec.tick;
  j["t"] = rec.t;
  j["obstacles"] = ordered_json::array();
  for (const auto& o : rec.obstacles) j["obstacles"].push_back(obstacle_json(o));
  j["sensor_frame"] = rec.sensor_frame;
  j["detections"] = ordered_json::array();
  for (const auto& d : rec.detections) j["detections"].push_back(detection_json(d));
  j["breach"] = rec.breach;
  if (rec.burst)
    j["burst"] = {{"t", rec.burst->t}, {"measurements", measurements_json(rec.burst->measurements)}};
  else
    j["burst"] = nullptr;
  j["burst_fresh"] = rec.burst_fresh;
  j["rsrp_dbm"] = rec.rsrp_dbm;
  j["active_link"] = to_string(rec.active_link);
  j["active_beam"] = rec.active_beam;
  j["decision"] = rec.decision ? decision_json(*rec.decision) : ordered_json(nullptr);
  j["blocked"] = {{"los", rec.los_blocked},
                  {"nlos", rec.nlos_blocked ? ordered_json(*rec.nlos_blocked) : ordered_json(nullptr)}};
  j["commands"] = ordered_json::array();
  for (const auto& c : rec.commands) j["commands"].push_back(ordered_json(c));
  return j;
}

void trace_recorder::record(const tick_record& rec) {
  out_ << to_json(rec).dump() << '\n';
  if (!out_) throw error(errc::io, "trace write failed at tick " + std::to_string(rec.tick));
  ++lines_;
}

void trace_recorder::flush() {
  out_.flush();
  if (!out_) throw error(errc::io, "trace flush failed");
}

ordered_json to_json(const sim_result& r) {
  return {{"scenario", r.scenario},
          {"policy", r.manager_enabled ? "beam_manager" : "fixed_los_beam"},
          {"ticks", r.ticks},
          {"min_rsrp_dbm", r.min_rsrp_dbm},
          {"mean_rsrp_dbm", r.mean_rsrp_dbm},
          {"switch_count", r.switch_count},
          {"blocked_ticks", r.blocked_ticks},
          {"los_blocked_ticks", r.los_blocked_ticks}};
}

// ---------------------------------------------------------------------------

engine::engine(scenario sc, sim_sinks sinks)
    : scenario_((sc.validate(), std::move(sc))),
      sinks_(sinks),
      trx_(scenario_.trx, scenario_.codebook, scenario_.manager.los_beam),
      state_(scenario_.initial_manager_state()),
      script_detached_(scenario_.scripts.size(), false) {
  for (std::size_t i = 0; i < scenario_.sensors.size(); ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(scenario_.seed),
                      static_cast<std::uint32_t>(scenario_.seed >> 32),
                      static_cast<std::uint32_t>(i)};
    sensor_rngs_.emplace_back(seq);
  }
  ticks_per_burst_ = std::max(1L, std::lround(scenario_.ssb.burst_period * scenario_.tick_rate));
  if (scenario_.interactive && sinks_.bus)
    commands_ = sinks_.bus->subscribe(topics::obstacle_cmd);
}

void engine::point_tx(double t, int beam, write_cause::kind why) {
  trx_.set_beam(t, link_direction::tx, beam);
  causes_.push_back({tick_, why});
}

void engine::advance_obstacles(double t) {
  const double dt = 1.0 / scenario_.tick_rate;
  auto& obstacles = scenario_.sc.obstacles;
  for (auto& o : obstacles) {
    bool scripted = false;
    for (std::size_t i = 0; i < scenario_.scripts.size(); ++i) {
      if (scenario_.scripts[i].obstacle_id != o.id || script_detached_[i]) continue;
      std::tie(o.center, o.velocity) = scenario_.scripts[i].state_at(t);
      scripted = true;
      break;
    }
    if (!scripted && tick_ > 0) o.center = o.center + dt * o.velocity;
  }
}

std::vector<nlohmann::json> engine::apply_commands() {
  std::vector<nlohmann::json> echoed;
  if (!commands_) return echoed;
  for (const auto& msg : commands_->drain()) {
    nlohmann::json echo = {{"topic", msg.topic}, {"payload", msg.payload}};
    const auto& p = msg.payload;
    const bool well_formed = p.is_object() && p.contains("id") && p["id"].is_string() &&
                             p.contains("x") && p["x"].is_number() && p.contains("y") &&
                             p["y"].is_number();
    auto& obstacles = scenario_.sc.obstacles;
    auto it = well_formed ? std::find_if(obstacles.begin(), obstacles.end(),
                                         [&](const obstacle& o) { return o.id == p["id"]; })
                          : obstacles.end();
    if (it == obstacles.end()) {
      echo["applied"] = false;
      echoed.push_back(std::move(echo));
      continue;
    }
    it->center = {p["x"].get<double>(), p["y"].get<double>()};
    it->velocity = {};
    for (std::size_t i = 0; i < scenario_.scripts.size(); ++i)
      if (scenario_.scripts[i].obstacle_id == it->id) script_detached_[i] = true;
    echo["applied"] = true;
    echoed.push_back(std::move(echo));
  }
  return echoed;
}

const tick_record& engine::step() {
  tick_record rec;
  rec.tick = tick_;
  rec.t = time();
  try {
    step_impl(rec);
  } catch (const error& e) {
    throw error(e.code(), "tick " + std::to_string(tick_) + ": " + e.what());
  }
  current_ = std::move(rec);
  ++tick_;
  return current_;
}

void engine::step_impl(tick_record& rec) {
  const double t = rec.t;
  const auto& cfg = scenario_;
  broker* bus = sinks_.bus;

  advance_obstacles(t);
  rec.commands = apply_commands();

  // Sensing and the proactive policy run at sensor frame boundaries only.
  std::vector<std::vector<detection>> frames;
  for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
    if (!on_frame_boundary(t, cfg.sensors[i].frame_rate)) continue;
    frames.push_back(sense_frame(cfg.sc, cfg.sensors[i], t, sensor_rngs_[i]));
  }
  if (!frames.empty()) {
    rec.sensor_frame = true;
    rec.detections = fuse_detections(frames);
    const safe_zone zone = cfg.zone();
    rec.breach = std::any_of(rec.detections.begin(), rec.detections.end(),
                             [&](const detection& d) { return safe_zone_breach(zone, d); });
    if (bus)
      for (const auto& d : rec.detections)
        bus->publish(topics::detections, to_ms(t), detection_json(d));
    if (cfg.manager.enabled) {
      auto [next, decision] = beamlab::step(state_, zone, rec.detections, t);
      state_ = next;
      if (decision) {
        point_tx(t, decision->target_beam, write_cause::kind::decision);
        rec.decision = decision;
      }
    }
  }

  if (tick_ % ticks_per_burst_ == 0) {
    const auto burst = schedule_burst(cfg.ssb, t);
    for (const auto& tx : burst) {
      apply_ssb(trx_, tx);
      causes_.push_back({tick_, write_cause::kind::ssb});
    }
    last_burst_ = burst_record{t, measure_burst(cfg.sc, *cfg.codebook, burst, *cfg.ue_codebook,
                                                cfg.ue_beam)};
    rec.burst_fresh = true;
    if (bus)
      bus->publish(topics::ssb, to_ms(t),
                   {{"t", t}, {"measurements", measurements_json(last_burst_->measurements)}});
    if (cfg.manager.enabled && cfg.manager.reselect_on_sweep && !rec.decision && !burst.empty()) {
      auto [next, decision] = sweep_select(state_, last_burst_->measurements, t);
      state_ = next;
      if (decision) {
        point_tx(burst.back().start_time, decision->target_beam, write_cause::kind::decision);
        rec.decision = decision;
      }
    }
  }
  rec.burst = last_burst_;

  if (rec.decision) {
    decisions_.push_back(*rec.decision);
    if (bus) bus->publish(topics::decision, to_ms(t), decision_json(*rec.decision));
  }

  const auto paths = all_paths(cfg.sc);
  rec.los_blocked = paths.front().blocked;
  if (paths.size() > 1) rec.nlos_blocked = paths[1].blocked;
  rec.active_link = state_.active_link;
  rec.active_beam = state_.active_beam();
  rec.rsrp_dbm = best_path_rsrp(cfg.sc, paths, *cfg.codebook, rec.active_beam, *cfg.ue_codebook,
                                cfg.ue_beam)
                     .rsrp_dbm;
  rec.obstacles = cfg.sc.obstacles;

  const bool active_blocked = rec.active_link == path_kind::los ? rec.los_blocked
                                                                : rec.nlos_blocked.value_or(true);
  blocked_ticks_ += active_blocked ? 1 : 0;
  los_blocked_ticks_ += rec.los_blocked ? 1 : 0;
  rsrp_min_ = tick_ == 0 ? rec.rsrp_dbm : std::min(rsrp_min_, rec.rsrp_dbm);
  rsrp_sum_ += rec.rsrp_dbm;

  if (sinks_.recorder) sinks_.recorder->record(rec);
  if (bus) {
    bus->publish(topics::rsrp, to_ms(t),
                 {{"t", t},
                  {"rsrp_dbm", rec.rsrp_dbm},
                  {"active_link", to_string(rec.active_link)},
                  {"active_beam", rec.active_beam}});
    nlohmann::json obstacles = nlohmann::json::array();
    for (const auto& o : rec.obstacles) obstacles.push_back(nlohmann::json(obstacle_json(o)));
    nlohmann::json reflector = nullptr;
    if (cfg.sc.reflector)
      reflector = {{"a", point_json(cfg.sc.reflector->a)}, {"b", point_json(cfg.sc.reflector->b)}};
    bus->publish(topics::scene, to_ms(t),
                 {{"t", t},
                  {"tick", rec.tick},
                  {"gnb", point_json(cfg.sc.gnb_pos)},
                  {"ue", point_json(cfg.sc.ue_pos)},
                  {"reflector", reflector},
                  {"obstacles", obstacles},
                  {"safe_zone_margin", cfg.manager.margin},
                  {"breach", rec.breach},
                  {"active_link", to_string(rec.active_link)},
                  {"active_beam", rec.active_beam},
                  {"rsrp_dbm", rec.rsrp_dbm},
                  {"blocked", {{"los", rec.los_blocked}, {"nlos", rec.nlos_blocked.value_or(false)}}}});
  }
}

sim_result engine::result() const {
  sim_result r;
  r.scenario = scenario_.name;
  r.manager_enabled = scenario_.manager.enabled;
  r.ticks = tick_;
  r.min_rsrp_dbm = tick_ > 0 ? rsrp_min_ : noise_floor_dbm;
  r.mean_rsrp_dbm = tick_ > 0 ? rsrp_sum_ / static_cast<double>(tick_) : noise_floor_dbm;
  r.switch_count = static_cast<int>(decisions_.size());
  r.blocked_ticks = blocked_ticks_;
  r.los_blocked_ticks = los_blocked_ticks_;
  return r;
}

sim_result run(const scenario& sc, sim_sinks sinks, const run_options& opts) {
  engine e(sc, sinks);
  const long limit = opts.max_ticks ? *opts.max_ticks : sc.tick_count();
  const auto start = std::chrono::steady_clock::now();
  while ((limit < 0 || e.tick() < limit) && !(opts.stop && opts.stop->load())) {
    if (opts.pace_to_wall_clock) {
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(e.time() / opts.speedup));
      std::this_thread::sleep_until(due);
    }
    e.step();
  }
  if (sinks.recorder) sinks.recorder->flush();
  return e.result();
}

}  // namespace beamlab

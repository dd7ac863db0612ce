#include "beamlab/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "beamlab/error.hpp"

#ifndef BEAMLAB_SCENARIO_DIR
#define BEAMLAB_SCENARIO_DIR "scenarios"
#endif

namespace beamlab {

using nlohmann::json;

// ---------------------------------------------------------------------------
// obstacle scripts

namespace {

struct phase {
  vec2 from;
  vec2 to;
  double duration = 0.0;
};

std::vector<phase> phases_of(const obstacle_script& s) {
  std::vector<phase> out;
  const auto& w = s.waypoints;
  auto add_leg = [&](const waypoint& a, const waypoint& b) {
    out.push_back({a.pos, b.pos, distance(a.pos, b.pos) / b.speed});
    if (b.dwell > 0.0) out.push_back({b.pos, b.pos, b.dwell});
  };
  if (w.front().dwell > 0.0) out.push_back({w.front().pos, w.front().pos, w.front().dwell});
  for (std::size_t i = 1; i < w.size(); ++i) add_leg(w[i - 1], w[i]);
  if (s.loop && w.size() > 1) add_leg(w.back(), w.front());
  return out;
}

}  // namespace

double obstacle_script::cycle_duration() const {
  double total = 0.0;
  for (const auto& p : phases_of(*this)) total += p.duration;
  return total;
}

std::pair<vec2, vec2> obstacle_script::state_at(double t) const {
  const vec2 origin = waypoints.front().pos;
  if (t <= start_time || waypoints.size() < 2) return {origin, {}};
  const auto phases = phases_of(*this);
  const double cycle = cycle_duration();
  double tau = t - start_time;
  if (loop && cycle > 0.0) tau = std::fmod(tau, cycle);
  for (const auto& p : phases) {
    if (tau < p.duration) {
      if (p.from == p.to) return {p.from, {}};
      const vec2 vel = (1.0 / p.duration) * (p.to - p.from);
      return {p.from + tau * vel, vel};
    }
    tau -= p.duration;
  }
  return {loop ? origin : waypoints.back().pos, {}};
}

// ---------------------------------------------------------------------------
// parsing helpers

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw error(errc::validation, path + ": " + what);
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double num(const json& obj, const char* key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) invalid(path + "." + key, "required number missing");
  if (!v->is_number()) invalid(path + "." + key, "expected a number");
  return v->get<double>();
}

double num_or(const json& obj, const char* key, double fallback, const std::string& path) {
  return member(obj, key) ? num(obj, key, path) : fallback;
}

int integer(const json& obj, const char* key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) invalid(path + "." + key, "required integer missing");
  if (!v->is_number_integer()) invalid(path + "." + key, "expected an integer");
  return v->get<int>();
}

int integer_or(const json& obj, const char* key, int fallback, const std::string& path) {
  return member(obj, key) ? integer(obj, key, path) : fallback;
}

bool boolean_or(const json& obj, const char* key, bool fallback, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) invalid(path + "." + key, "expected true/false");
  return v->get<bool>();
}

std::string string_or(const json& obj, const char* key, std::string fallback,
                      const std::string& path) {
  const json* v = member(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) invalid(path + "." + key, "expected a string");
  return v->get<std::string>();
}

const json& object(const json& obj, const char* key, const std::string& path) {
  const json* v = member(obj, key);
  if (!v) invalid(path + "." + key, "required object missing");
  if (!v->is_object()) invalid(path + "." + key, "expected an object");
  return *v;
}

vec2 point(const json& obj, const std::string& path) {
  if (!obj.is_object()) invalid(path, "expected {x, y}");
  return {num(obj, "x", path), num(obj, "y", path)};
}

beam_codebook parse_codebook(const json& j, const std::string& path) {
  try {
    if (const json* u = member(j, "uniform")) {
      const std::string p = path + ".uniform";
      return make_uniform_codebook(integer(*u, "n_beams", p), deg_to_rad(num(*u, "az_start_deg", p)),
                                   deg_to_rad(num(*u, "az_step_deg", p)),
                                   deg_to_rad(num(*u, "beamwidth_deg", p)),
                                   num(*u, "peak_gain_db", p), num(*u, "sidelobe_floor_db", p));
    }
    if (const json* o = member(j, "omni")) {
      return make_omni_codebook(num_or(*o, "peak_gain_db", 0.0, path + ".omni"),
                                integer_or(*o, "id", 0, path + ".omni"));
    }
    if (const json* list = member(j, "beams")) {
      if (!list->is_array()) invalid(path + ".beams", "expected an array");
      std::vector<beam> beams;
      for (std::size_t i = 0; i < list->size(); ++i) {
        const auto& b = (*list)[i];
        const std::string p = path + ".beams[" + std::to_string(i) + "]";
        const std::string kind = string_or(b, "kind", "directional", p);
        if (kind != "directional" && kind != "omni") invalid(p + ".kind", "directional|omni");
        beams.push_back({integer(b, "id", p), deg_to_rad(num_or(b, "boresight_deg", 0.0, p)),
                         deg_to_rad(num_or(b, "beamwidth_deg", 360.0, p)),
                         num(b, "peak_gain_db", p),
                         kind == "omni" ? beam_kind::omni : beam_kind::directional});
      }
      return beam_codebook(std::move(beams), num(j, "sidelobe_floor_db", path));
    }
  } catch (const error& e) {
    if (e.code() == errc::validation) throw;
    invalid(path, e.what());
  }
  invalid(path, "expected one of uniform / omni / beams");
}

sensor_spec parse_sensor(const json& j, const std::string& path) {
  const std::string kind = string_or(j, "kind", "", path);
  sensor_spec s;
  const vec2 mount{num_or(j, "x", 0.0, path), num_or(j, "y", 0.0, path)};
  const double az = deg_to_rad(num_or(j, "mount_az_deg", 0.0, path));
  if (kind == "lidar")
    s = default_lidar(mount, az);
  else if (kind == "camera")
    s = default_camera(mount, az);
  else
    invalid(path + ".kind", "expected lidar or camera");
  s.fov_az = deg_to_rad(num_or(j, "fov_deg", rad_to_deg(s.fov_az), path));
  s.max_range = num_or(j, "max_range_m", s.max_range, path);
  s.frame_rate = num_or(j, "frame_rate_hz", s.frame_rate, path);
  s.noise_sigma = num_or(j, "noise_sigma_m", s.noise_sigma, path);
  if (!(s.fov_az > 0.0)) invalid(path + ".fov_deg", "must be positive");
  if (!(s.max_range > 0.0)) invalid(path + ".max_range_m", "must be positive");
  if (!(s.frame_rate > 0.0)) invalid(path + ".frame_rate_hz", "must be positive");
  if (!(s.noise_sigma >= 0.0)) invalid(path + ".noise_sigma_m", "must be >= 0");
  return s;
}

obstacle_script parse_script(const json& j, const std::string& path) {
  obstacle_script s;
  s.obstacle_id = string_or(j, "obstacle", "", path);
  if (s.obstacle_id.empty()) invalid(path + ".obstacle", "obstacle id required");
  s.start_time = num_or(j, "start_time_s", 0.0, path);
  s.loop = boolean_or(j, "loop", false, path);
  const json* wps = member(j, "waypoints");
  if (!wps || !wps->is_array() || wps->empty()) invalid(path + ".waypoints", "non-empty array required");
  for (std::size_t i = 0; i < wps->size(); ++i) {
    const auto& w = (*wps)[i];
    const std::string p = path + ".waypoints[" + std::to_string(i) + "]";
    waypoint wp{point(w, p), num_or(w, "speed_mps", 0.0, p), num_or(w, "dwell_s", 0.0, p)};
    const bool needs_speed = i > 0 || s.loop;
    if (needs_speed && !(wp.speed > 0.0)) invalid(p + ".speed_mps", "must be positive");
    if (!(wp.dwell >= 0.0)) invalid(p + ".dwell_s", "must be >= 0");
    s.waypoints.push_back(wp);
  }
  if (!(s.start_time >= 0.0)) invalid(path + ".start_time_s", "must be >= 0");
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------

manager_state scenario::initial_manager_state() const {
  manager_state s;
  s.active_link = path_kind::los;
  s.los_beam = manager.los_beam;
  s.nlos_beam = manager.nlos_beam;
  s.hysteresis_frames = manager.hysteresis_frames;
  return s;
}

long scenario::tick_count() const {
  return static_cast<long>(std::ceil(duration * tick_rate - 1e-9));
}

void scenario::validate() const {
  try {
    sc.validate();
  } catch (const error& e) {
    invalid("scenario", e.what());
  }
  if (!(duration > 0.0)) invalid("scenario.duration_s", "must be positive");
  if (!(tick_rate > 0.0)) invalid("scenario.tick_rate_hz", "must be positive");
  if (!codebook) invalid("scenario.codebook", "missing");
  if (!ue_codebook) invalid("scenario.ue_codebook", "missing");
  if (!ue_codebook->contains(ue_beam)) invalid("scenario.ue_beam", "not in ue_codebook");

  for (std::size_t i = 0; i < sensors.size(); ++i) {
    const std::string p = "scenario.sensors[" + std::to_string(i) + "]";
    const double ratio = tick_rate / sensors[i].frame_rate;
    if (ratio < 1.0 - 1e-9) invalid(p + ".frame_rate_hz", "exceeds tick_rate_hz");
    if (std::abs(ratio - std::round(ratio)) > 1e-9)
      invalid(p + ".frame_rate_hz", "tick_rate_hz must be an integer multiple of the frame rate");
  }

  if (!(manager.margin > 0.0)) invalid("scenario.manager.safe_zone_margin_m", "must be positive");
  if (manager.hysteresis_frames < 0) invalid("scenario.manager.hysteresis_frames", "must be >= 0");
  if (!codebook->contains(manager.los_beam)) invalid("scenario.manager.los_beam", "not in codebook");
  if (!codebook->contains(manager.nlos_beam)) invalid("scenario.manager.nlos_beam", "not in codebook");

  if (!codebook->contains(ssb.fixed_beam)) invalid("scenario.ssb.fixed_beam", "not in codebook");
  for (const auto& [idx, beam] : ssb.beam_weights)
    if (!codebook->contains(beam))
      invalid("scenario.ssb.beam_weights." + std::to_string(idx), "beam " + std::to_string(beam) + " not in codebook");
  const double tick_period = 1.0 / tick_rate;
  const double bursts = ssb.burst_period / tick_period;
  if (bursts < 1.0 - 1e-9 || std::abs(bursts - std::round(bursts)) > 1e-6)
    invalid("scenario.ssb.burst_period_s", "must be a whole number of ticks");
  const auto enabled = ssb.bitmap.enabled_indices();
  if (!enabled.empty() && enabled.back() * ssb.ssb_slot_duration >= tick_period)
    invalid("scenario.ssb.ssb_slot_duration_s", "burst does not fit inside one tick");

  std::set<std::string> ids;
  for (const auto& o : sc.obstacles)
    if (!ids.insert(o.id).second) invalid("scenario.scene.obstacles", "duplicate id '" + o.id + "'");
  for (std::size_t i = 0; i < scripts.size(); ++i)
    if (!ids.contains(scripts[i].obstacle_id))
      invalid("scenario.obstacle_script[" + std::to_string(i) + "].obstacle",
              "unknown obstacle '" + scripts[i].obstacle_id + "'");

  try {
    trx.pins.validate();
  } catch (const error& e) {
    invalid("scenario.transceiver.pins", e.what());
  }
  if (trx.spi_clock_divider < 1) invalid("scenario.transceiver.spi_clock_divider", "must be >= 1");
}

scenario parse_scenario(const json& doc) {
  const std::string root = "scenario";
  if (!doc.is_object()) invalid(root, "expected a JSON object");
  scenario s;
  s.name = string_or(doc, "name", "unnamed", root);
  s.duration = num(doc, "duration_s", root);
  s.tick_rate = num_or(doc, "tick_rate_hz", 100.0, root);
  if (const json* seed = member(doc, "seed")) {
    const bool non_negative =
        seed->is_number_unsigned() || (seed->is_number_integer() && seed->get<std::int64_t>() >= 0);
    if (!non_negative) invalid(root + ".seed", "expected a non-negative integer");
    s.seed = seed->get<std::uint64_t>();
  }
  s.interactive = boolean_or(doc, "interactive", false, root);
  if (const json* m = member(doc, "metadata")) s.metadata = *m;

  // scene
  const std::string sp = root + ".scene";
  const json& sj = object(doc, "scene", root);
  const json& gnb = object(sj, "gnb", sp);
  const json& ue = object(sj, "ue", sp);
  s.sc.gnb_pos = point(gnb, sp + ".gnb");
  s.sc.ue_pos = point(ue, sp + ".ue");
  s.sc.gnb_array_az = deg_to_rad(num_or(gnb, "array_az_deg", 0.0, sp + ".gnb"));
  s.sc.ue_array_az = deg_to_rad(num_or(ue, "array_az_deg", 0.0, sp + ".ue"));
  s.sc.carrier_freq = num_or(sj, "carrier_freq_hz", s.sc.carrier_freq, sp);
  s.sc.tx_const_dbm = num_or(sj, "tx_const_dbm", s.sc.tx_const_dbm, sp);
  s.sc.blockage_loss_db = num_or(sj, "blockage_loss_db", s.sc.blockage_loss_db, sp);
  s.sc.reflection_loss_db = num_or(sj, "reflection_loss_db", s.sc.reflection_loss_db, sp);
  if (const json* r = member(sj, "reflector"); r && !r->is_null()) {
    s.sc.reflector = segment{point(object(*r, "a", sp + ".reflector"), sp + ".reflector.a"),
                             point(object(*r, "b", sp + ".reflector"), sp + ".reflector.b")};
  }
  if (const json* obs = member(sj, "obstacles")) {
    if (!obs->is_array()) invalid(sp + ".obstacles", "expected an array");
    for (std::size_t i = 0; i < obs->size(); ++i) {
      const auto& o = (*obs)[i];
      const std::string p = sp + ".obstacles[" + std::to_string(i) + "]";
      obstacle ob;
      ob.id = string_or(o, "id", "", p);
      if (ob.id.empty()) invalid(p + ".id", "required");
      ob.center = point(o, p);
      ob.radius = num_or(o, "radius_m", 0.25, p);
      ob.velocity = {num_or(o, "vx", 0.0, p), num_or(o, "vy", 0.0, p)};
      if (!(ob.radius > 0.0)) invalid(p + ".radius_m", "must be positive");
      s.sc.obstacles.push_back(ob);
    }
  }

  s.codebook = std::make_shared<const beam_codebook>(
      member(doc, "codebook") ? parse_codebook(doc["codebook"], root + ".codebook")
                              : make_default_codebook());
  s.ue_codebook = std::make_shared<const beam_codebook>(
      member(doc, "ue_codebook") ? parse_codebook(doc["ue_codebook"], root + ".ue_codebook")
                                 : make_omni_codebook());
  s.ue_beam = integer_or(doc, "ue_beam", s.ue_codebook->beams().front().id, root);

  // ssb block keeps the RAN configuration variable names
  {
    const std::string p = root + ".ssb";
    const json& j = object(doc, "ssb", root);
    const json* bm = member(j, "ssb_PositionsInBurst_Bitmap");
    if (!bm || !bm->is_string()) invalid(p + ".ssb_PositionsInBurst_Bitmap", "64-character string required");
    ssb_bitmap bitmap;
    try {
      bitmap = ssb_bitmap::parse(bm->get<std::string>());
    } catch (const error& e) {
      invalid(p + ".ssb_PositionsInBurst_Bitmap", e.what());
    }
    std::map<int, int> weights;
    if (const json* w = member(j, "beam_weights")) {
      if (!w->is_object()) invalid(p + ".beam_weights", "expected {\"ssb index\": beam id}");
      for (const auto& [key, val] : w->items()) {
        int idx = 0;
        try {
          std::size_t used = 0;
          idx = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          invalid(p + ".beam_weights." + key, "key must be an SSB index");
        }
        if (!val.is_number_integer()) invalid(p + ".beam_weights." + key, "beam id must be an integer");
        weights[idx] = val.get<int>();
      }
    }
    try {
      s.ssb = build_ssb_config(bitmap, boolean_or(j, "set_analog_beamforming", false, p),
                               std::move(weights), integer_or(j, "fixed_beam", 0, p),
                               num_or(j, "burst_period_s", 20e-3, p),
                               num_or(j, "ssb_slot_duration_s", 125e-6, p));
    } catch (const error& e) {
      if (e.code() == errc::validation) throw;
      invalid(p, e.what());
    }
  }

  if (const json* t = member(doc, "transceiver")) {
    const std::string p = root + ".transceiver";
    if (const json* pins = member(*t, "pins")) {
      const std::string pp = p + ".pins";
      auto& pm = s.trx.pins;
      pm.spi_clk = integer_or(*pins, "spi_clk", pm.spi_clk, pp);
      pm.spi_mosi = integer_or(*pins, "spi_mosi", pm.spi_mosi, pp);
      pm.spi_miso = integer_or(*pins, "spi_miso", pm.spi_miso, pp);
      pm.spi_cs_n = integer_or(*pins, "spi_cs_n", pm.spi_cs_n, pp);
      pm.tx_rx_sw = integer_or(*pins, "tx_rx_sw", pm.tx_rx_sw, pp);
      if (const json* g = member(*pins, "grounds")) {
        if (!g->is_array()) invalid(pp + ".grounds", "expected an array");
        pm.grounds = g->get<std::vector<int>>();
      }
    }
    s.trx.spi_clock_divider = integer_or(*t, "spi_clock_divider", s.trx.spi_clock_divider, p);
    s.trx.guard_time = num_or(*t, "guard_time_s", s.trx.guard_time, p);
  }

  if (const json* sensors = member(doc, "sensors")) {
    if (!sensors->is_array()) invalid(root + ".sensors", "expected an array");
    for (std::size_t i = 0; i < sensors->size(); ++i)
      s.sensors.push_back(parse_sensor((*sensors)[i], root + ".sensors[" + std::to_string(i) + "]"));
  }

  {
    const std::string p = root + ".manager";
    const json& m = object(doc, "manager", root);
    s.manager.enabled = boolean_or(m, "enabled", true, p);
    s.manager.margin = num_or(m, "safe_zone_margin_m", 1.0, p);
    s.manager.los_beam = integer(m, "los_beam", p);
    s.manager.nlos_beam = integer_or(m, "nlos_beam", s.manager.los_beam, p);
    s.manager.hysteresis_frames = integer_or(m, "hysteresis_frames", 5, p);
    s.manager.reselect_on_sweep = boolean_or(m, "reselect_on_sweep", false, p);
  }

  if (const json* scripts = member(doc, "obstacle_script")) {
    if (!scripts->is_array()) invalid(root + ".obstacle_script", "expected an array");
    for (std::size_t i = 0; i < scripts->size(); ++i)
      s.scripts.push_back(
          parse_script((*scripts)[i], root + ".obstacle_script[" + std::to_string(i) + "]"));
  }

  s.validate();

  // Optional link-budget calibration against the unobstructed LOS link.
  if (const json* cal = member(sj, "calibrate")) {
    const double target = num(*cal, "target_rsrp_dbm", sp + ".calibrate");
    scene clear = s.sc;
    clear.obstacles.clear();
    clear.tx_const_dbm = 0.0;
    const double at_zero = compute_rsrp(clear, *s.codebook, s.manager.los_beam, *s.ue_codebook,
                                        s.ue_beam, los_path(clear));
    s.sc.tx_const_dbm = target - at_zero;
  }
  return s;
}

scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open scenario file " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw error(errc::parse, "scenario file " + path.string() + " is not valid JSON");
  return parse_scenario(doc);
}

std::filesystem::path bundled_scenario_dir() {
  if (const char* env = std::getenv("BEAMLAB_SCENARIO_DIR")) return env;
  return BEAMLAB_SCENARIO_DIR;
}

std::filesystem::path resolve_scenario(const std::string& name_or_path) {
  std::filesystem::path p(name_or_path);
  if (std::filesystem::exists(p)) return p;
  auto bundled = bundled_scenario_dir() / p;
  if (!bundled.has_extension()) bundled += ".json";
  if (std::filesystem::exists(bundled)) return bundled;
  throw error(errc::io, "no scenario file or bundled scenario named '" + name_or_path + "'");
}

double calibrate_tx_constant(double target_rsrp, double distance, double frequency) {
  return target_rsrp + fspl(distance, frequency);
}

}  // namespace beamlab

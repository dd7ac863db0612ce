#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "beamlab/beam_manager.hpp"
#include "beamlab/bus.hpp"
#include "beamlab/scenario.hpp"
#include "beamlab/transceiver.hpp"

namespace beamlab {

struct burst_record {
  double t = 0.0;
  std::vector<ssb_measurement> measurements;
};

struct tick_record {
  long tick = 0;
  double t = 0.0;
  std::vector<obstacle> obstacles;
  bool sensor_frame = false;
  std::vector<detection> detections;
  bool breach = false;
  std::optional<burst_record> burst;  // latest burst
  bool burst_fresh = false;
  double rsrp_dbm = noise_floor_dbm;
  path_kind active_link = path_kind::los;
  int active_beam = 0;
  std::optional<beam_decision> decision;
  bool los_blocked = false;
  std::optional<bool> nlos_blocked;
  std::vector<nlohmann::json> commands;
};

nlohmann::ordered_json to_json(const tick_record& rec);

/// JSON-lines dataset writer, one tick per line.
class trace_recorder {
 public:
  explicit trace_recorder(std::ostream& out) : out_(out) {}

  void record(const tick_record& rec);
  void flush();
  std::size_t lines() const noexcept { return lines_; }

 private:
  std::ostream& out_;
  std::size_t lines_ = 0;
};

struct sim_result {
  std::string scenario;
  bool manager_enabled = true;
  long ticks = 0;
  double min_rsrp_dbm = 0.0;
  double mean_rsrp_dbm = 0.0;
  int switch_count = 0;
  long blocked_ticks = 0;      // active link's path blocked
  long los_blocked_ticks = 0;  // LOS path blocked regardless of link
};

nlohmann::ordered_json to_json(const sim_result& r);

struct sim_sinks {
  trace_recorder* recorder = nullptr;
  broker* bus = nullptr;
};

// Why a beam-pointer write happened, parallel to the transceiver's SPI log.
struct write_cause {
  long tick = 0;
  enum class kind { decision, ssb } source = kind::ssb;
};

class engine {
 public:
  engine(scenario sc, sim_sinks sinks);

  bool done() const noexcept { return tick_ >= scenario_.tick_count(); }
  long tick() const noexcept { return tick_; }
  double time() const noexcept { return static_cast<double>(tick_) / scenario_.tick_rate; }

  // Advances one tick. Module errors are rethrown with the tick index attached.
  const tick_record& step();

  sim_result result() const;

  const scenario& current_scenario() const noexcept { return scenario_; }
  const transceiver& trx() const noexcept { return trx_; }
  const manager_state& manager() const noexcept { return state_; }
  const std::vector<write_cause>& write_causes() const noexcept { return causes_; }
  const std::vector<beam_decision>& decisions() const noexcept { return decisions_; }

 private:
  void step_impl(tick_record& rec);
  std::vector<nlohmann::json> apply_commands();
  void advance_obstacles(double t);
  void point_tx(double t, int beam, write_cause::kind why);

  scenario scenario_;
  sim_sinks sinks_;
  transceiver trx_;
  manager_state state_;
  std::vector<std::mt19937_64> sensor_rngs_;
  std::vector<bool> script_detached_;
  subscription_ptr commands_;
  long tick_ = 0;
  long ticks_per_burst_ = 1;
  std::optional<burst_record> last_burst_;
  tick_record current_;
  std::vector<write_cause> causes_;
  std::vector<beam_decision> decisions_;

  double rsrp_min_ = 0.0;
  double rsrp_sum_ = 0.0;
  long blocked_ticks_ = 0;
  long los_blocked_ticks_ = 0;
};

struct run_options {
  bool pace_to_wall_clock = false;
  double speedup = 1.0;
  // Overrides the scenario duration; negative runs until stop is set.
  std::optional<long> max_ticks;
  const std::atomic<bool>* stop = nullptr;
};

sim_result run(const scenario& sc, sim_sinks sinks, const run_options& opts = {});

}  // namespace beamlab

// beamlab: run scenarios, verify SSB sweeps, calibrate link budgets, serve the UI bridge.

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "beamlab/bridge.hpp"
#include "beamlab/bus.hpp"
#include "beamlab/engine.hpp"
#include "beamlab/error.hpp"
#include "beamlab/scenario.hpp"
#include "beamlab/verification.hpp"

namespace fs = std::filesystem;
using namespace beamlab;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

std::atomic<bool> interrupted{false};

void on_signal(int) { interrupted = true; }

// FNV-1a over the trace bytes; printed so repeated runs can be compared at a glance.
std::uint64_t digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::optional<scenario> load(const std::string& name, std::optional<std::uint64_t> seed) {
  try {
    auto sc = load_scenario(resolve_scenario(name));
    if (seed) sc.seed = *seed;
    return sc;
  } catch (const error& e) {
    std::cerr << "beamlab: " << e.what() << '\n';
    return std::nullopt;
  }
}

int cmd_run(const std::string& name, std::optional<std::uint64_t> seed, const fs::path& out_dir,
            bool no_manager) {
  auto sc = load(name, seed);
  if (!sc) return exit_usage;
  if (no_manager) sc->manager.enabled = false;
  sc->interactive = false;

  fs::create_directories(out_dir);
  std::ostringstream trace;
  trace_recorder recorder(trace);
  const auto result = run(*sc, {&recorder, nullptr});

  const std::string stem = sc->name + (no_manager ? ".fixed" : "");
  const auto trace_path = out_dir / (stem + ".trace.jsonl");
  const auto summary_path = out_dir / (stem + ".summary.json");
  std::ofstream(trace_path, std::ios::binary) << trace.str();
  std::ofstream(summary_path) << to_json(result).dump(2) << '\n';

  std::cout << std::fixed << std::setprecision(2)
            << "scenario      " << result.scenario << '\n'
            << "policy        " << (result.manager_enabled ? "beam manager" : "fixed LOS beam") << '\n'
            << "ticks         " << result.ticks << '\n'
            << "min RSRP      " << result.min_rsrp_dbm << " dBm\n"
            << "mean RSRP     " << result.mean_rsrp_dbm << " dBm\n"
            << "switches      " << result.switch_count << '\n'
            << "blocked ticks " << result.blocked_ticks << " (LOS " << result.los_blocked_ticks << ")\n"
            << "trace         " << trace_path.string() << '\n'
            << "summary       " << summary_path.string() << '\n'
            << "trace digest  " << std::hex << std::setw(16) << std::setfill('0')
            << digest(trace.str()) << std::dec << '\n';
  return exit_ok;
}

int cmd_verify(const std::string& name) {
  auto sc = load(name, std::nullopt);
  if (!sc) return exit_usage;
  bool all = true;
  for (const auto& c : verify_sweep(*sc)) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
    all = all && c.passed;
  }
  std::cout << (all ? "PASS" : "FAIL") << '\n';
  return all ? exit_ok : exit_fail;
}

int cmd_calibrate(double rsrp, double dist, double freq) {
  try {
    std::cout << std::fixed << std::setprecision(3) << calibrate_tx_constant(rsrp, dist, freq)
              << '\n';
  } catch (const error& e) {
    std::cerr << "beamlab: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_ok;
}

int cmd_serve(const std::string& name, std::optional<std::uint64_t> seed, std::uint16_t port,
              bool no_manager, double speedup) {
  auto sc = load(name, seed);
  if (!sc) return exit_usage;
  if (no_manager) sc->manager.enabled = false;
  sc->interactive = true;

  broker bus;
  std::unique_ptr<ws_bridge> bridge;
  try {
    bridge = bridge_serve(bus, port);
  } catch (const error& e) {
    std::cerr << "beamlab: " << e.what() << '\n';
    return exit_fail;
  }
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "bridge listening on ws://127.0.0.1:" << bridge->port() << "  (Ctrl-C to stop)"
            << std::endl;

  run_options opts;
  opts.pace_to_wall_clock = true;
  opts.speedup = speedup;
  opts.max_ticks = -1;
  opts.stop = &interrupted;
  const auto result = run(*sc, {nullptr, &bus}, opts);
  bridge->stop();
  std::cout << "\nstopped after " << result.ticks << " ticks, " << result.switch_count
            << " beam switches\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beamlab: sensor-aided mm-wave beam management simulator"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool no_manager = false;
  std::uint16_t port = default_bridge_port;
  double speedup = 1.0;
  double rsrp = -53.0;
  double dist = 3.0;
  double freq = 27.533e9;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write trace + summary");
  run_cmd->add_option("scenario", scenario_name, "scenario file or bundled name")->required();
  run_cmd->add_option("--seed", seed, "override the scenario seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--no-manager", no_manager, "fixed LOS beam baseline");

  auto* verify_cmd = app.add_subcommand("verify-sweep", "check fixed-beam and sweep SSB bursts");
  scenario_name = "verify_sweep";
  verify_cmd->add_option("scenario", scenario_name, "scenario file or bundled name");

  auto* cal_cmd = app.add_subcommand("calibrate", "tx constant for a target RSRP");
  cal_cmd->add_option("--rsrp", rsrp, "target RSRP in dBm")->required();
  cal_cmd->add_option("--dist", dist, "link distance in m")->required();
  cal_cmd->add_option("--freq", freq, "carrier frequency in Hz");

  auto* serve_cmd = app.add_subcommand("serve", "interactive scenario behind the WebSocket bridge");
  serve_cmd->add_option("scenario", scenario_name, "scenario file or bundled name");
  serve_cmd->add_option("--seed", seed, "override the scenario seed");
  serve_cmd->add_option("--port", port, "bridge port");
  serve_cmd->add_option("--speedup", speedup, "simulation seconds per wall-clock second")
      ->check(CLI::PositiveNumber);
  serve_cmd->add_flag("--no-manager", no_manager, "fixed LOS beam baseline");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (*run_cmd) return cmd_run(scenario_name, seed, out_dir, no_manager);
    if (*verify_cmd) return cmd_verify(scenario_name);
    if (*cal_cmd) return cmd_calibrate(rsrp, dist, freq);
    if (*serve_cmd) {
      if (serve_cmd->count("scenario") == 0) scenario_name = "demo_berlin";
      return cmd_serve(scenario_name, seed, port, no_manager, speedup);
    }
  } catch (const std::exception& e) {
    std::cerr << "beamlab: " << e.what() << '\n';
    return exit_fail;
  }
  return exit_usage;
}

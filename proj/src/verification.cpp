#include "beamlab/verification.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "beamlab/beam_manager.hpp"
#include "beamlab/engine.hpp"

namespace beamlab {

namespace {

struct burst_log {
  std::vector<std::uint32_t> writes;
  std::vector<ssb_measurement> measurements;
};

struct variant_run {
  std::vector<burst_log> bursts;
  bool causal = true;
  int mode_violations = 0;
};

variant_run run_variant(scenario sc) {
  sc.manager.enabled = false;
  sc.sensors.clear();
  engine e(std::move(sc), {});
  variant_run out;
  std::map<long, burst_log> by_tick;
  while (!e.done()) {
    const auto& rec = e.step();
    if (rec.burst_fresh) by_tick[rec.tick].measurements = rec.burst->measurements;
  }
  const auto& log = e.trx().spi_log();
  const auto& causes = e.write_causes();
  if (causes.size() != log.size()) out.causal = false;
  for (std::size_t i = 0; i < std::min(log.size(), causes.size()); ++i) {
    if (log[i].reg != reg_bf_tx_awv_ptr) continue;
    if (causes[i].source != write_cause::kind::ssb) continue;
    if (!by_tick.contains(causes[i].tick)) out.causal = false;
    by_tick[causes[i].tick].writes.push_back(log[i].value);
  }
  for (const auto& m : e.trx().mode_log()) out.mode_violations += m.timing_violation ? 1 : 0;
  for (auto& [tick, b] : by_tick) out.bursts.push_back(std::move(b));
  return out;
}

std::string join(const std::vector<std::uint32_t>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

}  // namespace

std::vector<check_result> verify_sweep(const scenario& base) {
  std::vector<check_result> out;
  const auto enabled = base.ssb.bitmap.enabled_indices();

  // Fixed beam: every SSB on the same pointer value.
  scenario fixed = base;
  fixed.ssb.analog_beamforming = false;
  const auto f = run_variant(fixed);
  {
    bool ok = !f.bursts.empty();
    std::string detail;
    for (const auto& b : f.bursts) {
      const bool same = b.writes.size() == enabled.size() &&
                        std::all_of(b.writes.begin(), b.writes.end(), [&](std::uint32_t v) {
                          return v == static_cast<std::uint32_t>(base.ssb.fixed_beam);
                        });
      if (!same) {
        ok = false;
        detail = "burst wrote " + join(b.writes);
      }
    }
    if (ok) detail = std::to_string(f.bursts.size()) + " bursts, bf_tx_awv_ptr always " +
                     std::to_string(base.ssb.fixed_beam);
    out.push_back({"fixed beam: register log repeats the fixed beam", ok, detail});
  }
  {
    bool ok = !f.bursts.empty();
    double spread = 0.0;
    for (const auto& b : f.bursts) {
      if (b.measurements.empty()) continue;
      auto [lo, hi] = std::minmax_element(
          b.measurements.begin(), b.measurements.end(),
          [](const auto& a, const auto& c) { return a.rsrp_dbm < c.rsrp_dbm; });
      spread = std::max(spread, hi->rsrp_dbm - lo->rsrp_dbm);
    }
    ok = ok && spread <= 0.01;
    out.push_back({"fixed beam: per-SSB RSRP equal within 0.01 dB", ok,
                   "max spread " + std::to_string(spread) + " dB"});
  }

  // Sweep: pointer follows beam_weights in SSB order, LOS beam wins by a margin.
  scenario sweep = base;
  sweep.ssb.analog_beamforming = true;
  const auto s = run_variant(sweep);
  std::vector<std::uint32_t> expected;
  for (int idx : enabled) expected.push_back(static_cast<std::uint32_t>(base.ssb.beam_weights.at(idx)));
  {
    bool ok = !s.bursts.empty();
    std::string detail = "each burst wrote " + join(expected);
    for (const auto& b : s.bursts)
      if (b.writes != expected) {
        ok = false;
        detail = "burst wrote " + join(b.writes) + ", expected " + join(expected);
      }
    out.push_back({"sweep: register log follows beam_weights in SSB order", ok, detail});
  }
  {
    const int los_beam =
        base.codebook->closest_beam(los_path(base.sc).departure_az - base.sc.gnb_array_az);
    bool ok = !s.bursts.empty();
    std::string detail;
    for (const auto& b : s.bursts) {
      if (b.measurements.empty()) {
        ok = false;
        continue;
      }
      const int winner = select_strongest(b.measurements);
      double best = -1e300;
      double runner_up = -1e300;
      for (const auto& m : b.measurements) {
        if (m.beam_id == winner)
          best = std::max(best, m.rsrp_dbm);
        else
          runner_up = std::max(runner_up, m.rsrp_dbm);
      }
      const double margin = best - runner_up;
      ok = ok && winner == los_beam && margin >= 10.0;
      detail = "strongest beam " + std::to_string(winner) + " (LOS beam " +
               std::to_string(los_beam) + "), margin " + std::to_string(margin) + " dB";
    }
    out.push_back({"sweep: LOS-aligned SSB strongest by >= 10 dB", ok, detail});
  }
  out.push_back({"every beam-pointer write has a same-tick SSB cause", f.causal && s.causal,
                 f.causal && s.causal ? "ok" : "orphan write found"});
  out.push_back({"no TX/RX guard-time violations", f.mode_violations + s.mode_violations == 0,
                 std::to_string(f.mode_violations + s.mode_violations) + " violations"});
  return out;
}

}  // namespace beamlab

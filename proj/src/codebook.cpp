#include "beamlab/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "beamlab/error.hpp"
#include "beamlab/geometry.hpp"

namespace beamlab {

beam_codebook::beam_codebook(std::vector<beam> beams, double sidelobe_floor_db)
    : beams_(std::move(beams)), sidelobe_floor_db_(sidelobe_floor_db) {
  if (beams_.empty() || beams_.size() > static_cast<std::size_t>(max_codebook_beams))
    throw error(errc::configuration,
                "codebook must hold 1.." + std::to_string(max_codebook_beams) + " beams, got " +
                    std::to_string(beams_.size()));
  if (!(sidelobe_floor_db_ < 0.0))
    throw error(errc::configuration, "sidelobe_floor_db must be negative");
  std::set<int> ids;
  for (const auto& b : beams_) {
    if (b.id < 0 || b.id >= max_codebook_beams)
      throw error(errc::configuration, "beam id " + std::to_string(b.id) + " outside 0..63");
    if (!ids.insert(b.id).second)
      throw error(errc::configuration, "duplicate beam id " + std::to_string(b.id));
    if (!(b.beamwidth_3db > 0.0) || b.beamwidth_3db > 2.0 * std::numbers::pi + 1e-12)
      throw error(errc::configuration,
                  "beam " + std::to_string(b.id) + ": beamwidth must be in (0, 2pi]");
  }
}

const beam* beam_codebook::find(int beam_id) const noexcept {
  auto it = std::find_if(beams_.begin(), beams_.end(), [&](const beam& b) { return b.id == beam_id; });
  return it == beams_.end() ? nullptr : &*it;
}

const beam& beam_codebook::at(int beam_id) const {
  if (const beam* b = find(beam_id)) return *b;
  throw error(errc::lookup, "unknown beam id " + std::to_string(beam_id));
}

double beam_codebook::gain(int beam_id, double direction_az) const {
  const beam& b = at(beam_id);
  if (b.kind == beam_kind::omni) return b.peak_gain_db;
  const double delta = angular_offset(direction_az, b.boresight_az);
  const double ratio = delta / b.beamwidth_3db;
  return std::max(b.peak_gain_db - 12.0 * ratio * ratio, b.peak_gain_db + sidelobe_floor_db_);
}

int beam_codebook::closest_beam(double direction_az) const {
  const beam* best = nullptr;
  double best_off = 0.0;
  for (const auto& b : beams_) {
    const double off = angular_offset(direction_az, b.boresight_az);
    if (!best || off < best_off) {
      best = &b;
      best_off = off;
    }
  }
  return best->id;
}

beam_codebook make_uniform_codebook(int n_beams, double az_start, double az_step,
                                    double beamwidth_3db, double peak_gain_db,
                                    double sidelobe_floor_db) {
  if (n_beams < 1 || n_beams > max_codebook_beams)
    throw error(errc::configuration, "n_beams must be in 1..64, got " + std::to_string(n_beams));
  if (!(beamwidth_3db > 0.0)) throw error(errc::configuration, "beamwidth_3db must be positive");
  std::vector<beam> beams;
  beams.reserve(static_cast<std::size_t>(n_beams));
  for (int i = 0; i < n_beams; ++i)
    beams.push_back({i, az_start + i * az_step, beamwidth_3db, peak_gain_db, beam_kind::directional});
  return beam_codebook(std::move(beams), sidelobe_floor_db);
}

beam_codebook make_default_codebook() {
  return make_uniform_codebook(16, deg_to_rad(-60.0), deg_to_rad(7.5), deg_to_rad(7.5), 20.0,
                               -20.0);
}

beam_codebook make_omni_codebook(double peak_gain_db, int id) {
  return beam_codebook({{id, 0.0, 2.0 * std::numbers::pi, peak_gain_db, beam_kind::omni}}, -20.0);
}

}  // namespace beamlab

#include "beamlab/ssb.hpp"

#include <algorithm>
#include <string>

#include "beamlab/error.hpp"
#include "beamlab/transceiver.hpp"

namespace beamlab {

ssb_bitmap ssb_bitmap::parse(std::string_view text) {
  if (text.size() != max_ssb)
    throw error(errc::parse, "ssb_PositionsInBurst_Bitmap must have 64 characters, got " +
                                 std::to_string(text.size()));
  ssb_bitmap bm;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '1')
      bm.bits_.set(i);
    else if (text[i] != '0')
      throw error(errc::parse, "invalid bitmap character at position " + std::to_string(i));
  }
  return bm;
}

std::string ssb_bitmap::serialize() const {
  std::string s(max_ssb, '0');
  for (std::size_t i = 0; i < s.size(); ++i)
    if (bits_.test(i)) s[i] = '1';
  return s;
}

std::vector<int> ssb_bitmap::enabled_indices() const {
  std::vector<int> out;
  for (int i = 0; i < max_ssb; ++i)
    if (enabled(i)) out.push_back(i);
  return out;
}

ssb_config build_ssb_config(ssb_bitmap bitmap, bool analog_beamforming,
                            std::map<int, int> beam_weights, int fixed_beam, double burst_period,
                            double ssb_slot_duration) {
  if (!(ssb_slot_duration > 0.0))
    throw error(errc::configuration, "ssb_slot_duration must be positive");
  if (!(burst_period > max_ssb * ssb_slot_duration))
    throw error(errc::configuration, "burst_period must exceed 64 SSB slots");
  if (analog_beamforming) {
    for (int idx : bitmap.enabled_indices())
      if (!beam_weights.contains(idx))
        throw error(errc::configuration,
                    "enabled SSB " + std::to_string(idx) + " has no entry in beam_weights");
  }
  for (const auto& [idx, beam] : beam_weights)
    if (idx < 0 || idx >= max_ssb)
      throw error(errc::configuration, "beam_weights index " + std::to_string(idx) + " outside 0..63");
  return {bitmap, analog_beamforming, std::move(beam_weights), fixed_beam, burst_period,
          ssb_slot_duration};
}

std::vector<ssb_transmission> schedule_burst(const ssb_config& config, double burst_start) {
  std::vector<ssb_transmission> out;
  for (int idx : config.bitmap.enabled_indices()) {
    const int beam = config.analog_beamforming ? config.beam_weights.at(idx) : config.fixed_beam;
    out.push_back({idx, beam, burst_start + idx * config.ssb_slot_duration});
  }
  return out;
}

void apply_ssb(transceiver& trx, const ssb_transmission& tx) {
  trx.set_trx_mode(tx.start_time, trx_mode::tx);
  trx.set_beam(tx.start_time, link_direction::tx, tx.beam_id);
}

}  // namespace beamlab

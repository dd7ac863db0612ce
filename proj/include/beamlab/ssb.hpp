#pragma once

#include <bitset>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace beamlab {

class transceiver;

inline constexpr int max_ssb = 64;

class ssb_bitmap {
 public:
  ssb_bitmap() = default;
  explicit ssb_bitmap(std::bitset<max_ssb> bits) : bits_(bits) {}

  // Exactly 64 characters of '0'/'1'; character i is SSB index i.
  static ssb_bitmap parse(std::string_view text);
  std::string serialize() const;

  bool enabled(int index) const { return bits_.test(static_cast<std::size_t>(index)); }
  void set(int index, bool on = true) { bits_.set(static_cast<std::size_t>(index), on); }
  int popcount() const { return static_cast<int>(bits_.count()); }
  std::vector<int> enabled_indices() const;

  friend bool operator==(const ssb_bitmap&, const ssb_bitmap&) = default;

 private:
  std::bitset<max_ssb> bits_;
};

struct ssb_config {
  ssb_bitmap bitmap;
  bool analog_beamforming = false;
  std::map<int, int> beam_weights;  // SSB index -> beam id
  int fixed_beam = 0;
  double burst_period = 20e-3;        // s
  double ssb_slot_duration = 125e-6;  // s
};

ssb_config build_ssb_config(ssb_bitmap bitmap, bool analog_beamforming,
                            std::map<int, int> beam_weights, int fixed_beam,
                            double burst_period = 20e-3, double ssb_slot_duration = 125e-6);

struct ssb_transmission {
  int ssb_index = 0;
  int beam_id = 0;
  double start_time = 0.0;

  friend bool operator==(const ssb_transmission&, const ssb_transmission&) = default;
};

std::vector<ssb_transmission> schedule_burst(const ssb_config& config, double burst_start);

// Switches the array to TX and points the TX beam for one SSB.
void apply_ssb(transceiver& trx, const ssb_transmission& tx);

}  // namespace beamlab

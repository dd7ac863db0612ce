#pragma once

#include <numbers>
#include <optional>
#include <vector>

namespace beamlab {

inline constexpr int max_codebook_beams = 64;

enum class beam_kind { directional, omni };

struct beam {
  int id = 0;
  double boresight_az = 0.0;  // rad, array frame
  double beamwidth_3db = 0.0;  // rad
  double peak_gain_db = 0.0;
  beam_kind kind = beam_kind::directional;
};

/// Indexed set of beams sharing one sidelobe floor.
///
/// Directional beams follow a quadratic-in-dB main lobe clamped at
/// peak + sidelobe_floor_db. Immutable once built.
class beam_codebook {
 public:
  beam_codebook(std::vector<beam> beams, double sidelobe_floor_db);

  const std::vector<beam>& beams() const noexcept { return beams_; }
  double sidelobe_floor_db() const noexcept { return sidelobe_floor_db_; }
  std::size_t size() const noexcept { return beams_.size(); }

  bool contains(int beam_id) const noexcept { return find(beam_id) != nullptr; }
  const beam* find(int beam_id) const noexcept;
  const beam& at(int beam_id) const;

  // Gain in dB towards an array-frame azimuth. Throws errc::lookup for unknown ids.
  double gain(int beam_id, double direction_az) const;

  // Beam id with the smallest angular distance to direction_az (first on ties).
  int closest_beam(double direction_az) const;

 private:
  std::vector<beam> beams_;
  double sidelobe_floor_db_;
};

beam_codebook make_uniform_codebook(int n_beams, double az_start, double az_step,
                                    double beamwidth_3db, double peak_gain_db,
                                    double sidelobe_floor_db);

// 16 beams, -60 deg start, 7.5 deg spacing and width, 20 dB peak, -20 dB floor.
beam_codebook make_default_codebook();

beam_codebook make_omni_codebook(double peak_gain_db = 0.0, int id = 0);

inline double beam_gain(const beam_codebook& cb, int beam_id, double direction_az) {
  return cb.gain(beam_id, direction_az);
}

}  // namespace beamlab

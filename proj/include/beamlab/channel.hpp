#pragma once

#include <optional>
#include <string>
#include <vector>

#include "beamlab/codebook.hpp"
#include "beamlab/geometry.hpp"

namespace beamlab {

class ssb_bitmap;
struct ssb_transmission;

inline constexpr double speed_of_light = 299'792'458.0;  // m/s
inline constexpr double noise_floor_dbm = -120.0;

struct obstacle {
  std::string id;
  vec2 center;
  double radius = 0.25;
  vec2 velocity;
};

struct scene {
  vec2 gnb_pos;
  vec2 ue_pos{3.0, 0.0};
  double gnb_array_az = 0.0;  // rad, scene frame orientation of the array's 0 deg
  double ue_array_az = 0.0;
  std::optional<segment> reflector;
  std::vector<obstacle> obstacles;
  double carrier_freq = 27.533e9;  // Hz
  double tx_const_dbm = 17.8;
  double blockage_loss_db = 13.0;
  double reflection_loss_db = 3.0;

  // Throws errc::validation.
  void validate() const;
};

enum class path_kind { los, nlos };

const char* to_string(path_kind k) noexcept;

struct path_geometry {
  path_kind kind = path_kind::los;
  std::vector<segment> segments;
  double total_length = 0.0;
  double departure_az = 0.0;  // scene frame, at the gNB
  double arrival_az = 0.0;    // scene frame, at the UE (pointing back along the path)
  bool blocked = false;
  double extra_loss_db = 0.0;
};

double fspl(double distance, double frequency);

bool segment_blocked(const scene& sc, const segment& s);

path_geometry los_path(const scene& sc);
std::optional<path_geometry> nlos_path(const scene& sc);

// Every path that exists for the scene, LOS first.
std::vector<path_geometry> all_paths(const scene& sc);

double compute_rsrp(const scene& sc, const beam_codebook& tx_codebook, int tx_beam,
                    const beam_codebook& rx_codebook, int rx_beam, const path_geometry& path);

inline double compute_rsrp(const scene& sc, const beam_codebook& codebook, int tx_beam,
                           int rx_beam, const path_geometry& path) {
  return compute_rsrp(sc, codebook, tx_beam, codebook, rx_beam, path);
}

struct link_rsrp {
  double rsrp_dbm = noise_floor_dbm;
  std::optional<path_kind> via;
};

// Strongest path for the beam pair; LOS wins ties. Noise floor when no path exists.
link_rsrp best_path_rsrp(const scene& sc, const std::vector<path_geometry>& paths,
                         const beam_codebook& tx_codebook, int tx_beam,
                         const beam_codebook& rx_codebook, int rx_beam);

struct ssb_measurement {
  int ssb_index = 0;
  int beam_id = 0;
  double rsrp_dbm = noise_floor_dbm;
};

std::vector<ssb_measurement> measure_burst(const scene& sc, const beam_codebook& tx_codebook,
                                           const std::vector<ssb_transmission>& burst,
                                           const beam_codebook& rx_codebook, int rx_beam);

}  // namespace beamlab

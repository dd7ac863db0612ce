#include "beamlab/channel.hpp"

#include <cmath>

#include "beamlab/error.hpp"
#include "beamlab/ssb.hpp"

namespace beamlab {

const char* to_string(path_kind k) noexcept { return k == path_kind::los ? "LOS" : "NLOS"; }

void scene::validate() const {
  if (gnb_pos == ue_pos) throw error(errc::validation, "scene: gNB and UE positions coincide");
  if (!(carrier_freq > 0.0)) throw error(errc::validation, "scene: carrier_freq must be positive");
  if (!(blockage_loss_db >= 0.0)) throw error(errc::validation, "scene: blockage_loss_db < 0");
  if (!(reflection_loss_db >= 0.0)) throw error(errc::validation, "scene: reflection_loss_db < 0");
  if (reflector && reflector->a == reflector->b)
    throw error(errc::validation, "scene: reflector has zero length");
  for (const auto& o : obstacles)
    if (!(o.radius > 0.0))
      throw error(errc::validation, "scene: obstacle '" + o.id + "' radius must be positive");
}

double fspl(double distance, double frequency) {
  if (!(distance > 0.0) || !(frequency > 0.0))
    throw error(errc::domain, "fspl needs positive distance and frequency");
  return 20.0 * std::log10(4.0 * std::numbers::pi * distance * frequency / speed_of_light);
}

bool segment_blocked(const scene& sc, const segment& s) {
  for (const auto& o : sc.obstacles)
    if (disc_intersects(o.center, o.radius, s)) return true;
  return false;
}

path_geometry los_path(const scene& sc) {
  const segment leg{sc.gnb_pos, sc.ue_pos};
  path_geometry p;
  p.kind = path_kind::los;
  p.segments = {leg};
  p.total_length = leg.length();
  p.departure_az = azimuth(sc.ue_pos - sc.gnb_pos);
  p.arrival_az = azimuth(sc.gnb_pos - sc.ue_pos);
  p.blocked = segment_blocked(sc, leg);
  p.extra_loss_db = p.blocked ? sc.blockage_loss_db : 0.0;
  return p;
}

std::optional<path_geometry> nlos_path(const scene& sc) {
  if (!sc.reflector) return std::nullopt;
  const segment& wall = *sc.reflector;
  const vec2 dir = wall.b - wall.a;
  if (dot(dir, dir) == 0.0) return std::nullopt;

  // Both ends must face the same side of the reflecting surface.
  const double side_gnb = cross(dir, sc.gnb_pos - wall.a);
  const double side_ue = cross(dir, sc.ue_pos - wall.a);
  if (side_gnb == 0.0 || side_ue == 0.0 || (side_gnb > 0.0) != (side_ue > 0.0))
    return std::nullopt;

  const vec2 image = mirror(sc.gnb_pos, wall);
  const auto hit = intersect(segment{image, sc.ue_pos}, wall);
  if (!hit) return std::nullopt;

  const segment first{sc.gnb_pos, *hit};
  const segment second{*hit, sc.ue_pos};
  path_geometry p;
  p.kind = path_kind::nlos;
  p.segments = {first, second};
  p.total_length = first.length() + second.length();
  p.departure_az = azimuth(*hit - sc.gnb_pos);
  p.arrival_az = azimuth(*hit - sc.ue_pos);
  p.blocked = segment_blocked(sc, first) || segment_blocked(sc, second);
  p.extra_loss_db = sc.reflection_loss_db + (p.blocked ? sc.blockage_loss_db : 0.0);
  return p;
}

std::vector<path_geometry> all_paths(const scene& sc) {
  std::vector<path_geometry> paths{los_path(sc)};
  if (auto n = nlos_path(sc)) paths.push_back(std::move(*n));
  return paths;
}

double compute_rsrp(const scene& sc, const beam_codebook& tx_codebook, int tx_beam,
                    const beam_codebook& rx_codebook, int rx_beam, const path_geometry& path) {
  if (!tx_codebook.contains(tx_beam))
    throw error(errc::codebook, "tx beam " + std::to_string(tx_beam) + " not in codebook");
  if (!rx_codebook.contains(rx_beam))
    throw error(errc::codebook, "rx beam " + std::to_string(rx_beam) + " not in codebook");
  const double g_tx = tx_codebook.gain(tx_beam, path.departure_az - sc.gnb_array_az);
  const double g_rx = rx_codebook.gain(rx_beam, path.arrival_az - sc.ue_array_az);
  return sc.tx_const_dbm + g_tx + g_rx - fspl(path.total_length, sc.carrier_freq) -
         path.extra_loss_db;
}

link_rsrp best_path_rsrp(const scene& sc, const std::vector<path_geometry>& paths,
                         const beam_codebook& tx_codebook, int tx_beam,
                         const beam_codebook& rx_codebook, int rx_beam) {
  link_rsrp best;
  for (const auto& p : paths) {
    const double r = compute_rsrp(sc, tx_codebook, tx_beam, rx_codebook, rx_beam, p);
    if (!best.via || r > best.rsrp_dbm) best = {r, p.kind};
  }
  return best;
}

std::vector<ssb_measurement> measure_burst(const scene& sc, const beam_codebook& tx_codebook,
                                           const std::vector<ssb_transmission>& burst,
                                           const beam_codebook& rx_codebook, int rx_beam) {
  std::vector<ssb_measurement> out;
  if (burst.empty()) return out;
  const auto paths = all_paths(sc);
  out.reserve(burst.size());
  for (const auto& tx : burst) {
    const auto best = best_path_rsrp(sc, paths, tx_codebook, tx.beam_id, rx_codebook, rx_beam);
    out.push_back({tx.ssb_index, tx.beam_id, best.rsrp_dbm});
  }
  return out;
}

}  // namespace beamlab

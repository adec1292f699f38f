#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavmm/core.hpp"
#include "uavmm/geometry.hpp"
#include "uavmm/rng.hpp"

namespace uavmm {

inline constexpr double kSpeedOfLight = 299792458.0;

// Azimuth cut bottoms out at the front-to-back ratio.
inline constexpr double kFrontToBackFloorDb = -30.0;
// The vertical array factor has true nulls; this floor keeps the dB value
// finite without lifting the null above detectability.
inline constexpr double kVerticalFloorDb = -50.0;

// Vertical uniform linear array plus a parabolic azimuth cut. The array
// produces the side lobes and nulls a UAV flies through.
struct AntennaConfig {
  double azimuth_deg = 0.0;   // boresight bearing, CCW from +x, [0, 360)
  double mech_tilt_deg = 6.0; // positive = downtilt
  int element_count = 8;      // vertical ULA size
  double element_spacing_wavelengths = 0.5;
  double max_gain_dbi = 8.0;
  double azimuth_beamwidth_deg = 65.0;
};

enum class LosMode {
  Draw,      // LoS drawn per link, redrawn after the decorrelation distance
  Expected,  // deterministic probability-weighted path loss (planning grids)
};

struct PropagationParams {
  double carrier_hz = 3.6e9;
  double tx_power_dbm = 30.0;  // fallback when a cell does not override
  double pl_exponent_los = 2.2;
  double pl_exponent_nlos = 3.5;
  double nlos_extra_loss_db = 20.0;
  double los_sigmoid_a = 9.6;
  double los_sigmoid_b = 0.28;
  double shadowing_sigma_db = 0.0;
  double noise_power_dbm = -100.0;
  double detection_threshold_dbm = -110.0;
  LosMode los_mode = LosMode::Draw;
  double los_decorrelation_m = 10.0;
  double ue_tx_power_dbm = 23.0;  // uplink budget for Uplink-ID detection
};

// Static cell descriptor.
struct CellRecord {
  Ecgi ecgi = 0;
  Pci pci = 0;
  Tier tier = Tier::Small;
  Position position;
  AntennaConfig antenna;
  int freq_layer = 0;
  Rat rat = Rat::NR;
  double tx_power_dbm = 30.0;
};

// Array-factor gain of an N-element vertical ULA steered to -mech_tilt,
// in dB relative to boresight. <= 0 everywhere, exactly 0 at the steering
// angle, flat for a single element.
inline double vertical_array_gain_db(const AntennaConfig& cfg, double elevation_deg) {
  if (cfg.element_count <= 1) return 0.0;
  const double steer = std::sin(deg2rad(-cfg.mech_tilt_deg));
  const double psi = 2.0 * kPi * cfg.element_spacing_wavelengths *
                     (std::sin(deg2rad(elevation_deg)) - steer);
  const double n = static_cast<double>(cfg.element_count);
  const double den = n * std::sin(psi / 2.0);
  double af;
  if (std::abs(den) < 1e-12) {
    af = 1.0;  // steering angle or a grating lobe
  } else {
    af = std::abs(std::sin(n * psi / 2.0) / den);
  }
  if (af < 1e-12) af = 1e-12;
  return std::max(20.0 * std::log10(af), kVerticalFloorDb);
}

// Parabolic azimuth roll-off clamped at the front-to-back floor.
inline double azimuth_cut_gain_db(const AntennaConfig& cfg, double azimuth_off_deg) {
  const double off = wrap_deg_180(azimuth_off_deg);
  const double ratio = off / cfg.azimuth_beamwidth_deg;
  return std::max(-12.0 * ratio * ratio, kFrontToBackFloorDb);
}

// Total antenna gain toward (elevation, azimuth offset). Never exceeds
// max_gain_dbi; equals it exactly at boresight.
inline double antenna_gain_db(const AntennaConfig& cfg, double elevation_deg,
                              double azimuth_off_deg) {
  return cfg.max_gain_dbi + vertical_array_gain_db(cfg, elevation_deg) +
         azimuth_cut_gain_db(cfg, azimuth_off_deg);
}

// Elevation-angle sigmoid: p = 1 / (1 + a * exp(-b * (theta_deg - a))).
// Monotone non-decreasing in elevation for b >= 0; a = 0 gives p = 1.
inline double los_probability_from_angle(double theta_deg, const PropagationParams& p) {
  return 1.0 / (1.0 + p.los_sigmoid_a *
                          std::exp(-p.los_sigmoid_b * (theta_deg - p.los_sigmoid_a)));
}

inline double los_probability(const Position& ue, const Position& cell,
                              const PropagationParams& p) {
  if (ue == cell) throw std::domain_error("los_probability: zero-distance pair");
  const double theta = ray_angles(cell, ue).elevation_deg;
  return los_probability_from_angle(theta, p);
}

// Log-distance path loss anchored at the free-space loss at 1 m.
inline double path_loss_db(double distance_m, const PropagationParams& p, bool los) {
  if (distance_m <= 0.0) throw std::domain_error("path_loss_db: non-positive distance");
  const double pl_1m = 20.0 * std::log10(4.0 * kPi * p.carrier_hz / kSpeedOfLight);
  const double exponent = los ? p.pl_exponent_los : p.pl_exponent_nlos;
  double pl = pl_1m + 10.0 * exponent * std::log10(distance_m);
  if (!los) pl += p.nlos_extra_loss_db;
  return pl;
}

// Probability-weighted path loss, used wherever a deterministic field is
// needed (coverage grids, uplink budgets).
inline double expected_path_loss_db(const Position& ue, const Position& cell,
                                    const PropagationParams& p) {
  const double d = distance_3d(ue, cell);
  const double pl_los = path_loss_db(d, p, true);
  const double pl_nlos = path_loss_db(d, p, false);
  const double prob = los_probability(ue, cell, p);
  return prob * pl_los + (1.0 - prob) * pl_nlos;
}

// Per-link slow state: LoS condition and shadowing realization, redrawn only
// after the UE moves past the decorrelation distance.
struct LinkState {
  bool valid = false;
  bool los = true;
  double shadow_db = 0.0;
  Position drawn_at;
};

inline void refresh_link_state(LinkState& st, const Position& ue, const Position& cell,
                               const PropagationParams& p, Rng& rng) {
  if (st.valid && distance_3d(ue, st.drawn_at) <= p.los_decorrelation_m) return;
  st.valid = true;
  st.drawn_at = ue;
  st.los = rng.bernoulli(los_probability(ue, cell, p));
  st.shadow_db = (p.shadowing_sigma_db > 0.0) ? rng.normal(0.0, p.shadowing_sigma_db) : 0.0;
}

inline double cell_tx_power_dbm(const CellRecord& cell, const PropagationParams& p) {
  return std::isnan(cell.tx_power_dbm) ? p.tx_power_dbm : cell.tx_power_dbm;
}

inline double antenna_gain_toward(const CellRecord& cell, const Position& ue) {
  const RayAngles ray = ray_angles(cell.position, ue);
  const double az_off = wrap_deg_180(ray.azimuth_deg - cell.antenna.azimuth_deg);
  return antenna_gain_db(cell.antenna, ray.elevation_deg, az_off);
}

// Downlink RSRP with an explicit link realization.
inline double rsrp_dbm(const CellRecord& cell, const Position& ue,
                       const PropagationParams& p, const LinkState& link) {
  const double d = distance_3d(ue, cell.position);
  if (d <= 0.0) throw std::domain_error("rsrp_dbm: zero distance");
  return cell_tx_power_dbm(cell, p) + antenna_gain_toward(cell, ue) -
         path_loss_db(d, p, link.los) - link.shadow_db;
}

// Deterministic RSRP under expected path loss, shadowing off. This is the
// predicate used by coverage grids and collision/confusion detection.
inline double rsrp_expected_dbm(const CellRecord& cell, const Position& ue,
                                const PropagationParams& p) {
  const double d = distance_3d(ue, cell.position);
  if (d <= 0.0) throw std::domain_error("rsrp_expected_dbm: zero distance");
  return cell_tx_power_dbm(cell, p) + antenna_gain_toward(cell, ue) -
         expected_path_loss_db(ue, cell.position, p);
}

// Reciprocal uplink budget: UE tx power, same antenna gain and expected path
// loss as the downlink, shadowing off.
inline double uplink_rx_dbm(const CellRecord& cell, const Position& ue,
                            const PropagationParams& p) {
  const double d = distance_3d(ue, cell.position);
  if (d <= 0.0) throw std::domain_error("uplink_rx_dbm: zero distance");
  return p.ue_tx_power_dbm + antenna_gain_toward(cell, ue) -
         expected_path_loss_db(ue, cell.position, p);
}

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// SINR of cells[serving_index] given per-cell RSRPs aligned with `cells`.
// Only co-layer cells interfere.
inline double sinr_db(std::span<const CellRecord> cells, std::span<const double> rsrps,
                      std::size_t serving_index, const PropagationParams& p) {
  if (serving_index >= cells.size() || cells.size() != rsrps.size()) {
    throw std::invalid_argument("sinr_db: serving cell not among cells");
  }
  const int layer = cells[serving_index].freq_layer;
  double interference_mw = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i == serving_index || cells[i].freq_layer != layer) continue;
    interference_mw += dbm_to_mw(rsrps[i]);
  }
  const double signal_mw = dbm_to_mw(rsrps[serving_index]);
  const double noise_mw = dbm_to_mw(p.noise_power_dbm);
  return mw_to_dbm(signal_mw / (interference_mw + noise_mw));
}

// Per-(UE, cell) link realizations with independent derived streams, so
// iteration order cannot perturb the draws.
class LinkTracker {
 public:
  explicit LinkTracker(std::uint64_t seed) : seed_(seed) {}

  const LinkState& update(int ue_id, const CellRecord& cell, const Position& ue_pos,
                          const PropagationParams& p) {
    auto key = std::make_pair(ue_id, cell.ecgi);
    auto it = links_.find(key);
    if (it == links_.end()) {
      it = links_
               .emplace(key, Entry{LinkState{},
                                   Rng(derive_seed(seed_, 0x6c696e6bULL,
                                                   static_cast<std::uint64_t>(ue_id),
                                                   cell.ecgi))})
               .first;
    }
    refresh_link_state(it->second.state, ue_pos, cell.position, p, it->second.rng);
    return it->second.state;
  }

 private:
  struct Entry {
    LinkState state;
    Rng rng;
  };
  std::uint64_t seed_;
  std::map<std::pair<int, Ecgi>, Entry> links_;
};

}  // namespace uavmm

#pragma once

#include <cstdint>

#include "snapfix/snapshot.hpp"

namespace snapfix {

/// Ground truth a simulated snapshot is generated from.
struct TruthState {
  EcefPosition position;
  double bias_s = 0.0;  ///< receiver clock minus true GPS time [s]
  double drift = 0.0;   ///< clock drift [s/s]; implies frequency bias -drift * f0
  GpsTime epoch;        ///< receiver-clock capture time (snapped to the code-period grid)
};

struct NoiseSpec {
  double sigma_t = 0.0;       ///< code-phase timing noise [s]
  double sigma_d = 0.0;       ///< Doppler noise [Hz]
  bool with_doppler = true;   ///< emit Doppler measurements
  std::uint64_t seed = 1;
};

/// Snapshot plus the ground truth that produced it.
struct SimulatedSnapshot {
  Snapshot snapshot;
  std::vector<long> true_integers;  ///< whole code periods per observation
  TruthState truth;                 ///< epoch snapped to the grid actually used
};

/// Forward model: for every satellite above mask_deg at the true position, the code
/// phase observed in the receiver-clock window [epoch, epoch + code period), with
/// noise applied before the window alignment. Doppler is -range_rate/c * f0 + f_bias.
SimulatedSnapshot generate_snapshot(const TruthState& truth, const EphemerisSet& eph,
                                    const NoiseSpec& noise, const DelayModel& model = {},
                                    double mask_deg = 10.0);

/// A-priori displaced from the truth: distance_m along a great circle toward
/// azimuth_deg (height preserved), bias shifted by -time_error_s.
AprioriState perturb_apriori(const TruthState& truth, double distance_m, double azimuth_deg,
                             double time_error_s);

/// Circular 55-degree-inclination constellation of n satellites placed across the sky
/// of `site` (all above 10 degrees elevation there at toe, PDOP < 6). Deterministic in seed.
EphemerisSet synthetic_constellation(const GeodeticPosition& site, const GpsTime& toe, int n,
                                     std::uint64_t seed);

}  // namespace snapfix

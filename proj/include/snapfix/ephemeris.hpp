#pragma once

#include <map>
#include <vector>

#include "snapfix/geodesy.hpp"

namespace snapfix {

/// Broadcast GPS orbit + clock record (one upload for one satellite).
struct Ephemeris {
  int prn = 0;

  // Clock model, reference epoch toc
  GpsTime toc;
  double af0 = 0.0;  ///< clock bias [s]
  double af1 = 0.0;  ///< clock drift [s/s]
  double af2 = 0.0;  ///< clock drift rate [s/s^2]

  // Orbit, reference epoch toe (toe.week from the record's GPS-week field)
  GpsTime toe;
  double sqrt_a = 0.0;    ///< sqrt of semi-major axis [m^0.5]
  double e = 0.0;         ///< eccentricity
  double i0 = 0.0;        ///< inclination at toe [rad]
  double omega0 = 0.0;    ///< longitude of ascending node at week epoch [rad]
  double omega = 0.0;     ///< argument of perigee [rad]
  double m0 = 0.0;        ///< mean anomaly at toe [rad]
  double delta_n = 0.0;   ///< mean motion correction [rad/s]
  double omega_dot = 0.0; ///< rate of right ascension [rad/s]
  double idot = 0.0;      ///< inclination rate [rad/s]
  double cuc = 0.0, cus = 0.0;  ///< argument-of-latitude harmonics [rad]
  double crc = 0.0, crs = 0.0;  ///< radius harmonics [m]
  double cic = 0.0, cis = 0.0;  ///< inclination harmonics [rad]

  // Bookkeeping fields carried through parse/serialize
  double iode = 0.0;
  double iodc = 0.0;
  double codes_l2 = 0.0;
  double l2p_flag = 0.0;
  double accuracy = 0.0;
  double health = 0.0;
  double tgd = 0.0;  ///< group delay [s]
  double transmission_sow = 0.0;
  double fit_interval = 0.0;
};

/// All usable records, keyed by PRN; multiple uploads per satellite allowed.
struct EphemerisSet {
  std::map<int, std::vector<Ephemeris>> records;

  bool empty() const { return records.empty(); }
  std::size_t total_records() const {
    std::size_t n = 0;
    for (const auto& [prn, v] : records) n += v.size();
    return n;
  }
  std::vector<int> prns() const {
    std::vector<int> out;
    for (const auto& [prn, v] : records)
      if (!v.empty()) out.push_back(prn);
    return out;
  }
};

/// Satellite position/velocity plus clock terms at one instant.
struct SatelliteState {
  EcefPosition position;       ///< [m]
  EcefPosition velocity;       ///< [m/s], earth-fixed frame
  double clock_correction = 0.0;  ///< af-polynomial - tgd (+ optional relativistic) [s]
};

/// Record for prn minimizing the half-week-wrapped |t - toe|.
/// Throws StaleEphemerisError when none lies within max_age_s.
const Ephemeris& find_ephemeris(const EphemerisSet& set, int prn, const GpsTime& t,
                                double max_age_s = 4.0 * 3600.0);

/// Solves Kepler's equation E - e*sin(E) = M by Newton iteration.
double eccentric_anomaly(double mean_anomaly_rad, double eccentricity);

/// ECEF satellite position at transmit time t (ICD-200 algorithm).
EcefPosition satellite_position(const Ephemeris& eph, const GpsTime& t);

/// ECEF velocity by central differences over +-h around t.
EcefPosition satellite_velocity(const Ephemeris& eph, const GpsTime& t, double h = 0.5);

/// Broadcast clock correction af0 + af1*dt + af2*dt^2 - tgd, optional relativistic term.
double satellite_clock_correction(const Ephemeris& eph, const GpsTime& t,
                                  bool relativistic = false);

/// Position, velocity and clock correction bundled.
SatelliteState satellite_state(const Ephemeris& eph, const GpsTime& t, bool relativistic = false);

/// d/dt of the receiver-satellite distance at t [m/s]; receiver fixed in ECEF.
double range_rate(const EcefPosition& receiver, const Ephemeris& eph, const GpsTime& t);

/// d2/dt2 of the receiver-satellite distance, by second central difference [m/s^2].
double range_acceleration(const EcefPosition& receiver, const Ephemeris& eph, const GpsTime& t,
                          double h = 0.5);

}  // namespace snapfix

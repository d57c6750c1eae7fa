#include "snapfix/ephemeris.hpp"

#include <cmath>
#include <string>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;

const Ephemeris& find_ephemeris(const EphemerisSet& set, int prn, const GpsTime& t,
                                double max_age_s) {
  auto it = set.records.find(prn);
  if (it == set.records.end() || it->second.empty())
    throw StaleEphemerisError("no ephemeris for PRN " + std::to_string(prn));
  const Ephemeris* best = nullptr;
  double best_age = 0.0;
  for (const Ephemeris& e : it->second) {
    double age = std::fabs(wrap_half_week(t.minus(e.toe)));
    if (!best || age < best_age) {
      best = &e;
      best_age = age;
    }
  }
  if (best_age > max_age_s)
    throw StaleEphemerisError("ephemeris for PRN " + std::to_string(prn) + " is stale (" +
                              std::to_string(best_age) + " s from toe)");
  return *best;
}

double eccentric_anomaly(double m, double ecc) {
  double e0 = m;
  for (int it = 0; it < 20; ++it) {
    double de = (m - e0 + ecc * std::sin(e0)) / (1.0 - ecc * std::cos(e0));
    e0 += de;
    if (std::fabs(de) < 1e-14) break;
  }
  return e0;
}

EcefPosition satellite_position(const Ephemeris& eph, const GpsTime& t) {
  double a = eph.sqrt_a * eph.sqrt_a;
  double tk = wrap_half_week(t.minus(eph.toe));
  double n = std::sqrt(earth_mu / (a * a * a)) + eph.delta_n;
  double m = eph.m0 + n * tk;
  double ea = eccentric_anomaly(m, eph.e);

  double sv = std::sqrt(1.0 - eph.e * eph.e) * std::sin(ea);
  double cv = std::cos(ea) - eph.e;
  double v = std::atan2(sv, cv);

  double phi = v + eph.omega;
  double s2p = std::sin(2.0 * phi), c2p = std::cos(2.0 * phi);
  double du = eph.cus * s2p + eph.cuc * c2p;
  double dr = eph.crs * s2p + eph.crc * c2p;
  double di = eph.cis * s2p + eph.cic * c2p;

  double u = phi + du;
  double r = a * (1.0 - eph.e * std::cos(ea)) + dr;
  double inc = eph.i0 + eph.idot * tk + di;

  double xp = r * std::cos(u);
  double yp = r * std::sin(u);

  double om = eph.omega0 + (eph.omega_dot - earth_rotation_rate) * tk -
              earth_rotation_rate * eph.toe.sow;
  double so = std::sin(om), co = std::cos(om);
  double si = std::sin(inc), ci = std::cos(inc);

  return {xp * co - yp * ci * so, xp * so + yp * ci * co, yp * si};
}

EcefPosition satellite_velocity(const Ephemeris& eph, const GpsTime& t, double h) {
  EcefPosition p1 = satellite_position(eph, t.plus(-h));
  EcefPosition p2 = satellite_position(eph, t.plus(h));
  return (p2 - p1) * (1.0 / (2.0 * h));
}

double satellite_clock_correction(const Ephemeris& eph, const GpsTime& t, bool relativistic) {
  double dt = wrap_half_week(t.minus(eph.toc));
  double corr = eph.af0 + eph.af1 * dt + eph.af2 * dt * dt - eph.tgd;
  if (relativistic) {
    const double f_rel = -4.442807633e-10;  // [s/m^0.5]
    double a = eph.sqrt_a * eph.sqrt_a;
    double tk = wrap_half_week(t.minus(eph.toe));
    double n = std::sqrt(earth_mu / (a * a * a)) + eph.delta_n;
    double ea = eccentric_anomaly(eph.m0 + n * tk, eph.e);
    corr += f_rel * eph.e * eph.sqrt_a * std::sin(ea);
  }
  return corr;
}

SatelliteState satellite_state(const Ephemeris& eph, const GpsTime& t, bool relativistic) {
  SatelliteState s;
  s.position = satellite_position(eph, t);
  s.velocity = satellite_velocity(eph, t);
  s.clock_correction = satellite_clock_correction(eph, t, relativistic);
  return s;
}

double range_rate(const EcefPosition& receiver, const Ephemeris& eph, const GpsTime& t) {
  EcefPosition p = satellite_position(eph, t);
  EcefPosition v = satellite_velocity(eph, t);
  EcefPosition d = receiver - p;
  double r = d.norm();
  if (r <= 0.0) throw NumericalError("range_rate: receiver coincides with satellite");
  return d.dot(v * (-1.0)) * (1.0 / r);
}

double range_acceleration(const EcefPosition& receiver, const Ephemeris& eph, const GpsTime& t,
                          double h) {
  double r0 = distance(receiver, satellite_position(eph, t.plus(-h)));
  double r1 = distance(receiver, satellite_position(eph, t));
  double r2 = distance(receiver, satellite_position(eph, t.plus(h)));
  return (r2 - 2.0 * r1 + r0) / (h * h);
}

}  // namespace snapfix

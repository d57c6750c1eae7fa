#include "snapfix/simulator.hpp"

#include <cmath>
#include <random>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;

SimulatedSnapshot generate_snapshot(const TruthState& truth, const EphemerisSet& eph,
                                    const NoiseSpec& noise, const DelayModel& model,
                                    double mask_deg) {
  SimulatedSnapshot out;
  out.truth = truth;
  // snap the capture instant to the receiver-clock code-period grid
  long n_label = std::lround(truth.epoch.sow / code_period);
  out.truth.epoch = GpsTime::make(truth.epoch.week, n_label * code_period);
  const GpsTime& epoch = out.truth.epoch;

  out.snapshot.epoch = epoch;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double f_bias = -truth.drift * l1_frequency;

  for (int prn : eph.prns()) {
    GpsTime t_nominal = epoch.plus(-truth.bias_s - 0.0765);
    const Ephemeris& e = find_ephemeris(eph, prn, t_nominal);
    TopocentricView view = topocentric(truth.position, satellite_position(e, t_nominal));
    if (view.elevation_rad < mask_deg * deg2rad) continue;

    double eps = noise.sigma_t > 0.0 ? noise.sigma_t * gauss(rng) : 0.0;

    // Departure instants live on the true-time code grid; expressed relative to the
    // epoch label (itself a whole number of code periods) they are j * code_period.
    long j = std::lround((-truth.bias_s - 0.0765) / code_period);
    double delay = 0.0;
    for (int it = 0; it < 8; ++it) {
      GpsTime dep = epoch.plus(j * code_period);
      delay = predicted_delay(truth.position, e, dep, model);
      double arrival_rel = j * code_period + delay + truth.bias_s + eps;
      long shift = static_cast<long>(std::floor(arrival_rel / code_period));
      if (shift == 0) break;
      j -= shift;
    }
    double arrival_rel = j * code_period + delay + truth.bias_s + eps;
    if (arrival_rel < 0.0 || arrival_rel >= code_period)
      throw NumericalError("generate_snapshot: window alignment failed");

    Observation ob;
    ob.prn = prn;
    ob.phase = arrival_rel / code_period;
    if (noise.with_doppler) {
      GpsTime dep = epoch.plus(j * code_period);
      double rdot = range_rate(truth.position, e, dep);
      double eps_d = noise.sigma_d > 0.0 ? noise.sigma_d * gauss(rng) : 0.0;
      ob.doppler_hz = -(l1_frequency / speed_of_light) * rdot + f_bias + eps_d;
    }
    out.snapshot.obs.push_back(ob);
    out.true_integers.push_back(-j);
  }
  return out;
}

AprioriState perturb_apriori(const TruthState& truth, double distance_m, double azimuth_deg,
                             double time_error_s) {
  if (distance_m < 0.0) throw InputError("perturb_apriori: distance must be non-negative");
  GeodeticPosition g = ecef_to_geodetic(truth.position);

  double delta = distance_m / mean_earth_radius;
  double theta = azimuth_deg * deg2rad;
  double lat2 = std::asin(std::sin(g.lat_rad) * std::cos(delta) +
                          std::cos(g.lat_rad) * std::sin(delta) * std::cos(theta));
  double lon2 = g.lon_rad + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(g.lat_rad),
                                       std::cos(delta) - std::sin(g.lat_rad) * std::sin(lat2));

  AprioriState a;
  a.position = geodetic_to_ecef({lat2, lon2, g.height_m});
  a.bias_s = truth.bias_s - time_error_s;
  a.box.x_max = a.box.y_max = a.box.z_max = std::max(distance_m, 1.0e3);
  a.box.b_max = std::max(std::fabs(time_error_s), 1.0e-3);
  return a;
}

namespace {

/// Elevation-count and dilution sanity of a candidate constellation at the site.
bool geometry_ok(const EphemerisSet& set, const EcefPosition& site, const GpsTime& t, int n) {
  int above = 0;
  std::vector<EcefPosition> sats;
  for (int prn : set.prns()) {
    const Ephemeris& e = find_ephemeris(set, prn, t);
    EcefPosition p = satellite_position(e, t);
    TopocentricView v = topocentric(site, p);
    if (v.elevation_rad >= 10.0 * deg2rad) {
      ++above;
      sats.push_back(p);
    }
  }
  if (above < std::max(4, n / 2)) return false;
  Eigen::MatrixXd g(sats.size(), 4);
  for (std::size_t i = 0; i < sats.size(); ++i) {
    EcefPosition d = sats[i] - site;
    double r = d.norm();
    g(i, 0) = d.x / r;
    g(i, 1) = d.y / r;
    g(i, 2) = d.z / r;
    g(i, 3) = 1.0;
  }
  Eigen::Matrix4d q = (g.transpose() * g).inverse();
  double pdop = std::sqrt(q(0, 0) + q(1, 1) + q(2, 2));
  return std::isfinite(pdop) && pdop < 6.0;
}

}  // namespace

EphemerisSet synthetic_constellation(const GeodeticPosition& site, const GpsTime& toe, int n,
                                     std::uint64_t seed) {
  if (n < 4 || n > 32) throw InputError("synthetic_constellation: n must be in [4, 32]");
  EcefPosition site_ecef = geodetic_to_ecef(site);
  const double a_orbit = 26560.0e3;
  const double inc = 55.0 * deg2rad;
  const double sqrt_a = std::sqrt(a_orbit);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  for (int attempt = 0; attempt < 40; ++attempt) {
    EphemerisSet set;
    bool placed_all = true;
    for (int k = 0; k < n && placed_all; ++k) {
      // stratified azimuth, one near-zenith satellite, the rest spread in elevation
      bool ok = false;
      for (int tries = 0; tries < 60 && !ok; ++tries) {
        double az = (k + unif(rng)) * (2.0 * pi / n);
        double el = (k == 0 && tries < 30) ? (70.0 + 18.0 * unif(rng)) * deg2rad
                                           : (15.0 + 60.0 * unif(rng)) * deg2rad;
        // site-relative direction in ECEF
        double sl = std::sin(site.lat_rad), cl = std::cos(site.lat_rad);
        double so = std::sin(site.lon_rad), co = std::cos(site.lon_rad);
        double ce = std::cos(el), se = std::sin(el);
        double de = ce * std::sin(az), dn = ce * std::cos(az), du = se;
        EcefPosition dir{-so * de - sl * co * dn + cl * co * du,
                         co * de - sl * so * dn + cl * so * du, cl * dn + sl * du};
        double sd = site_ecef.dot(dir);
        double disc = sd * sd + a_orbit * a_orbit - site_ecef.dot(site_ecef);
        if (disc <= 0.0) continue;
        double range = -sd + std::sqrt(disc);
        EcefPosition sat = site_ecef + dir * range;

        double lat_s = std::asin(sat.z / sat.norm());
        if (std::fabs(lat_s) > 54.0 * deg2rad) continue;  // unreachable at i = 55 deg

        double lon_s = std::atan2(sat.y, sat.x);
        double u = std::asin(std::sin(lat_s) / std::sin(inc));
        double node_ecef = lon_s - std::atan2(std::cos(inc) * std::sin(u), std::cos(u));

        Ephemeris eph;
        eph.prn = k + 1;
        eph.sqrt_a = sqrt_a;
        eph.e = 0.0;
        eph.i0 = inc;
        eph.omega = 0.0;
        eph.m0 = u;
        eph.omega0 = node_ecef + earth_rotation_rate * toe.sow;
        eph.toe = toe;
        eph.toc = toe;
        eph.af0 = (unif(rng) - 0.5) * 2.0e-4;
        eph.af1 = (unif(rng) - 0.5) * 2.0e-12;
        set.records[eph.prn].push_back(eph);
        ok = true;
      }
      if (!ok) placed_all = false;
    }
    if (!placed_all) continue;
    if (geometry_ok(set, site_ecef, toe, n)) return set;
  }
  throw NumericalError("synthetic_constellation: could not satisfy geometry constraints");
}

}  // namespace snapfix

#include "snapfix/snapshot.hpp"

#include <algorithm>
#include <cmath>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;

namespace {

/// Geometric travel time [s] with earth-rotation correction, solved by fixed point;
/// also returns the rotated satellite position.
double geometric_travel_time(const EcefPosition& position, const EcefPosition& sat,
                             EcefPosition& rotated) {
  double tau = 0.0765;
  for (int it = 0; it < 5; ++it) {
    rotated = earth_rotation_correction(tau, sat);
    double tau_new = distance(position, rotated) / speed_of_light;
    if (std::fabs(tau_new - tau) < 1e-13) {
      tau = tau_new;
      break;
    }
    tau = tau_new;
  }
  rotated = earth_rotation_correction(tau, sat);
  return tau;
}

/// Atmospheric delay [s] toward a (rotated) satellite position; elevations at or
/// below the horizon are clamped so mid-iteration states far from earth stay finite.
double atmospheric_delay(const EcefPosition& position, const EcefPosition& sat_rotated,
                         const GpsTime& t, const KlobucharParams& klob) {
  GeodeticPosition user = ecef_to_geodetic(position);
  TopocentricView view = topocentric(position, sat_rotated);
  double el = std::max(view.elevation_rad, 0.5 * deg2rad);
  double iono = klobuchar_delay(klob, user, view.azimuth_rad, el, t);
  double tropo = tropospheric_delay(el, std::clamp(user.height_m, -1.0e3, 1.0e4));
  return iono + tropo / speed_of_light;
}

}  // namespace

double predicted_delay(const EcefPosition& position, const Ephemeris& eph, const GpsTime& t_d,
                       const DelayModel& model) {
  EcefPosition sat = satellite_position(eph, t_d);
  EcefPosition rotated;
  double tau = geometric_travel_time(position, sat, rotated);
  double delay = tau - satellite_clock_correction(eph, t_d, model.relativistic_clock);
  if (model.atmosphere) delay += atmospheric_delay(position, rotated, t_d, model.klobuchar);
  return delay;
}

std::vector<GpsTime> estimate_departure_times(const Snapshot& snap, double bias_s,
                                              const std::vector<double>& delays_s) {
  if (delays_s.size() != snap.size())
    throw InputError("estimate_departure_times: delay count mismatch");
  std::vector<GpsTime> out;
  out.reserve(snap.size());
  for (std::size_t i = 0; i < snap.size(); ++i)
    out.push_back(snap.arrival_time(i).plus(-delays_s[i] - bias_s));
  return out;
}

LinearizedSystem linearize(const Snapshot& snap, const EphemerisSet& eph,
                           const EcefPosition& position, double bias_s,
                           const std::vector<double>& delays_s, const DelayModel& model,
                           bool with_derivatives) {
  const int m = static_cast<int>(snap.size());
  if (m == 0) throw InsufficientObservationsError("linearize: empty snapshot");
  if (delays_s.size() != snap.size()) throw InputError("linearize: delay count mismatch");

  LinearizedSystem lin;
  lin.jacobian.resize(m, 4);
  lin.delays.resize(m);
  lin.phases.resize(m);
  lin.range_rates.resize(m);
  lin.h_col4.resize(m);
  if (with_derivatives) lin.djacobian_dt.resize(m, 4);
  bool doppler = snap.all_have_doppler();
  if (doppler) lin.doppler_rhs.resize(m);
  lin.sat_states.reserve(m);
  lin.departure_times.reserve(m);
  lin.prns.reserve(m);

  for (int i = 0; i < m; ++i) {
    const Observation& ob = snap.obs[i];
    GpsTime t_d = snap.arrival_time(i).plus(-delays_s[i] - bias_s);
    const Ephemeris& e = find_ephemeris(eph, ob.prn, t_d);

    SatelliteState st = satellite_state(e, t_d, model.relativistic_clock);
    EcefPosition rotated;
    double tau = geometric_travel_time(position, st.position, rotated);
    double r = distance(position, rotated);
    if (r <= 1.0) throw NumericalError("linearize: receiver coincides with satellite");

    EcefPosition grad = (position - rotated) * (1.0 / r);
    double rdot = range_rate(position, e, t_d);

    double g = tau - st.clock_correction;
    if (model.atmosphere) g += atmospheric_delay(position, rotated, t_d, model.klobuchar);

    lin.jacobian(i, 0) = grad.x;
    lin.jacobian(i, 1) = grad.y;
    lin.jacobian(i, 2) = grad.z;
    lin.jacobian(i, 3) = -rdot;
    lin.delays(i) = g;
    lin.phases(i) = ob.phase * code_period;
    lin.range_rates(i) = rdot;
    lin.h_col4(i) = -rdot + speed_of_light;

    if (with_derivatives) {
      // d/dt of the unit gradient: (-v - grad * rdot) / r, with v the ECEF velocity
      EcefPosition v = st.velocity;
      lin.djacobian_dt(i, 0) = (-v.x - grad.x * rdot) / r;
      lin.djacobian_dt(i, 1) = (-v.y - grad.y * rdot) / r;
      lin.djacobian_dt(i, 2) = (-v.z - grad.z * rdot) / r;
      lin.djacobian_dt(i, 3) = -range_acceleration(position, e, t_d);
    }
    if (doppler)
      lin.doppler_rhs(i) = -(speed_of_light / l1_frequency) * ob.doppler_hz - rdot;

    lin.sat_states.push_back(st);
    lin.departure_times.push_back(t_d);
    lin.prns.push_back(ob.prn);
  }
  return lin;
}

Snapshot elevation_filter(const Snapshot& snap, const EphemerisSet& eph,
                          const AprioriState& apriori, double mask_deg) {
  Snapshot out;
  out.epoch = snap.epoch;
  out.receiver_id = snap.receiver_id;
  for (std::size_t i = 0; i < snap.size(); ++i) {
    GpsTime t_d = snap.arrival_time(i).plus(-0.0765 - apriori.bias_s);
    const Ephemeris& e = find_ephemeris(eph, snap.obs[i].prn, t_d);
    TopocentricView v = topocentric(apriori.position, satellite_position(e, t_d));
    if (v.elevation_rad >= mask_deg * deg2rad) out.obs.push_back(snap.obs[i]);
  }
  if (out.size() < 4)
    throw InsufficientObservationsError("elevation_filter: fewer than 4 observations remain");
  return out;
}

MilsProblem assemble_apriori_mils(const LinearizedSystem& lin, double bias_s,
                                  const std::vector<long>& nbar, double sigma_t,
                                  double reg_length_m) {
  const int m = lin.rows();
  if (static_cast<int>(nbar.size()) != m)
    throw InputError("assemble_apriori_mils: integer estimate count mismatch");
  if (sigma_t <= 0.0 || reg_length_m <= 0.0)
    throw InputError("assemble_apriori_mils: scales must be positive");

  MilsProblem p;
  p.a.setZero(2 * m, 4);
  p.b.setZero(2 * m, m);
  p.y.setZero(2 * m);
  p.w.setZero(2 * m);

  const double c = speed_of_light;
  for (int i = 0; i < m; ++i) {
    // code-phase rows (units: seconds)
    p.a(i, 0) = lin.jacobian(i, 0) / c;
    p.a(i, 1) = lin.jacobian(i, 1) / c;
    p.a(i, 2) = lin.jacobian(i, 2) / c;
    p.a(i, 3) = lin.jacobian(i, 3) / c + 1.0;
    p.b(i, i) = -code_period;
    p.y(i) = lin.phases(i) - lin.delays(i) + nbar[i] * code_period - bias_s;
    p.w(i) = 1.0 / sigma_t;
    // a-priori regularization rows (the same Jacobian, pinned to the linearization point)
    p.a(m + i, 0) = lin.jacobian(i, 0) / c;
    p.a(m + i, 1) = lin.jacobian(i, 1) / c;
    p.a(m + i, 2) = lin.jacobian(i, 2) / c;
    p.a(m + i, 3) = lin.jacobian(i, 3) / c;
    p.y(m + i) = 0.0;
    p.w(m + i) = c / reg_length_m;
  }
  return p;
}

MilsProblem assemble_doppler_mils(const LinearizedSystem& lin, double bias_s,
                                  const std::vector<long>& nbar, double u_hat, double sigma_t,
                                  double sigma_d) {
  const int m = lin.rows();
  if (static_cast<int>(nbar.size()) != m)
    throw InputError("assemble_doppler_mils: integer estimate count mismatch");
  if (lin.doppler_rhs.size() != m)
    throw InputError("assemble_doppler_mils: snapshot has no Doppler measurements");
  if (lin.djacobian_dt.size() == 0)
    throw InputError("assemble_doppler_mils: linearization lacks time derivatives");
  if (sigma_t <= 0.0 || sigma_d <= 0.0)
    throw InputError("assemble_doppler_mils: scales must be positive");

  MilsProblem p;
  p.a.setZero(2 * m, 5);
  p.b.setZero(2 * m, m);
  p.y.setZero(2 * m);
  p.w.setZero(2 * m);

  const double c = speed_of_light;
  for (int i = 0; i < m; ++i) {
    // code-phase rows (seconds)
    p.a(i, 0) = lin.jacobian(i, 0) / c;
    p.a(i, 1) = lin.jacobian(i, 1) / c;
    p.a(i, 2) = lin.jacobian(i, 2) / c;
    p.a(i, 3) = lin.jacobian(i, 3) / c + 1.0;
    p.b(i, i) = -code_period;
    p.y(i) = lin.phases(i) - lin.delays(i) + nbar[i] * code_period - bias_s;
    p.w(i) = 1.0 / sigma_t;
    // Doppler rows (meters/second): time derivative of the c-scaled code-phase model
    p.a(m + i, 0) = lin.djacobian_dt(i, 0);
    p.a(m + i, 1) = lin.djacobian_dt(i, 1);
    p.a(m + i, 2) = lin.djacobian_dt(i, 2);
    p.a(m + i, 3) = lin.djacobian_dt(i, 3);
    p.a(m + i, 4) = lin.h_col4(i);
    p.y(m + i) = lin.doppler_rhs(i) - lin.h_col4(i) * u_hat;
    p.w(m + i) = 1.0 / ((c / l1_frequency) * sigma_d);
  }
  return p;
}

}  // namespace snapfix

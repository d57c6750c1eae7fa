#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "snapfix/atmosphere.hpp"
#include "snapfix/ephemeris.hpp"
#include "snapfix/geodesy.hpp"
#include "snapfix/mils.hpp"

namespace snapfix {

/// One satellite's measurements at the snapshot instant.
struct Observation {
  int prn = 0;
  double phase = 0.0;  ///< code phase, fraction of a code period in [0, 1)
  double doppler_hz = std::numeric_limits<double>::quiet_NaN();  ///< NaN if absent
  double snr_dbhz = std::numeric_limits<double>::quiet_NaN();    ///< NaN if absent

  bool has_doppler() const { return std::isfinite(doppler_hz); }
};

/// A single-epoch capture: code phases (and optionally Dopplers) of all satellites,
/// stamped with the receiver-clock whole-code-period boundary they refer to.
struct Snapshot {
  GpsTime epoch;  ///< receiver-clock time of the capture, a whole multiple of the code period
  std::string receiver_id = "rx";
  std::vector<Observation> obs;

  std::size_t size() const { return obs.size(); }
  bool all_have_doppler() const {
    for (const auto& o : obs)
      if (!o.has_doppler()) return false;
    return !obs.empty();
  }
  /// Receiver-clock arrival time of observation i (epoch + phase * code period).
  GpsTime arrival_time(std::size_t i) const {
    return epoch.plus(obs[i].phase * constants::code_period);
  }
};

/// Initial guess handed to the solvers, with the uncertainty box it came from.
struct AprioriState {
  EcefPosition position;
  double bias_s = 0.0;
  struct Box {
    double x_max = 1.0e5, y_max = 1.0e5, z_max = 1.0e5;  ///< [m]
    double b_max = 60.0;                                 ///< [s]
  } box;
};

/// Which delay terms the forward model includes (shared by simulator and solvers).
struct DelayModel {
  bool atmosphere = false;  ///< Klobuchar ionosphere + troposphere
  KlobucharParams klobuchar;
  bool relativistic_clock = false;
};

/// Everything the solvers need about the model linearized at one state.
struct LinearizedSystem {
  Eigen::MatrixXd jacobian;      ///< m x 4; cols 0-2 unit range gradients, col 3 = -range_rate
  Eigen::VectorXd delays;        ///< m predicted full delays g_i [s]
  Eigen::VectorXd phases;        ///< m observed phase * code period [s]
  Eigen::VectorXd range_rates;   ///< m a-priori range rates [m/s]
  Eigen::VectorXd h_col4;        ///< m jacobian col 3 + c [m/s]
  Eigen::MatrixXd djacobian_dt;  ///< m x 4 time derivative of jacobian rows (may be empty)
  Eigen::VectorXd doppler_rhs;   ///< m  -(c/f0) D_i - range_rate_i [m/s] (may be empty)
  std::vector<SatelliteState> sat_states;
  std::vector<GpsTime> departure_times;
  std::vector<int> prns;

  int rows() const { return static_cast<int>(delays.size()); }
};

/// Full modeled signal delay [s] from satellite prn departing at t_d to a receiver at
/// position: geometric range (earth-rotation corrected, light-time fixed point) / c,
/// minus the broadcast clock correction, plus atmospheric terms when enabled.
double predicted_delay(const EcefPosition& position, const Ephemeris& eph, const GpsTime& t_d,
                       const DelayModel& model);

/// Departure-time estimates t_i - d_i - bias for every observation.
std::vector<GpsTime> estimate_departure_times(const Snapshot& snap, double bias_s,
                                              const std::vector<double>& delays_s);

/// Linearizes the code-phase (and optionally Doppler) model at (position, bias_s)
/// using the current per-satellite delay estimates delays_s (seconds).
/// with_derivatives adds the d/dt rows needed by the Doppler-regularized solver.
LinearizedSystem linearize(const Snapshot& snap, const EphemerisSet& eph,
                           const EcefPosition& position, double bias_s,
                           const std::vector<double>& delays_s, const DelayModel& model,
                           bool with_derivatives = false);

/// Drops observations whose satellite sits below mask_deg elevation as seen from the
/// a-priori position. Throws InsufficientObservationsError if fewer than 4 remain.
Snapshot elevation_filter(const Snapshot& snap, const EphemerisSet& eph,
                          const AprioriState& apriori, double mask_deg);

/// Code-phase MILS with a-priori regularization rows. Unknowns: [dx dy dz db | dn_1..dn_m].
MilsProblem assemble_apriori_mils(const LinearizedSystem& lin, double bias_s,
                                  const std::vector<long>& nbar, double sigma_t,
                                  double reg_length_m);

/// Code-phase MILS with Doppler regularization rows. Unknowns: [dx dy dz db du | dn_1..dn_m].
MilsProblem assemble_doppler_mils(const LinearizedSystem& lin, double bias_s,
                                  const std::vector<long>& nbar, double u_hat, double sigma_t,
                                  double sigma_d);

}  // namespace snapfix

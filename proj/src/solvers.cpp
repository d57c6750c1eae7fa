#include "snapfix/solvers.hpp"

#include <cmath>

#include "snapfix/errors.hpp"

namespace snapfix {

using namespace constants;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

EcefPosition up_vector(const EcefPosition& p) {
  GeodeticPosition g = ecef_to_geodetic(p);
  double cl = std::cos(g.lat_rad), sl = std::sin(g.lat_rad);
  return {cl * std::cos(g.lon_rad), cl * std::sin(g.lon_rad), sl};
}

void copy_delays(const LinearizedSystem& lin, std::vector<double>& delays) {
  for (int i = 0; i < lin.rows(); ++i) delays[i] = lin.delays(i);
}

}  // namespace

IntegerResolution resolve_integers_anchor(const LinearizedSystem& lin) {
  const int m = lin.rows();
  if (m < 1) throw InsufficientObservationsError("resolve_integers_anchor: empty system");

  int j = 0;
  for (int i = 1; i < m; ++i)
    if (std::fabs(lin.jacobian(i, 3)) < std::fabs(lin.jacobian(j, 3))) j = i;

  IntegerResolution res;
  res.anchor_index = j;
  double x = (lin.delays(j) - lin.phases(j)) / code_period;
  long nu_j = static_cast<long>(std::ceil(x));
  res.beta_s = (nu_j * code_period + lin.phases(j)) - lin.delays(j);

  res.nu.resize(m);
  for (int i = 0; i < m; ++i) {
    if (i == j) {
      res.nu[i] = nu_j;
    } else {
      res.nu[i] =
          std::lround((lin.delays(i) - lin.phases(i) + res.beta_s) / code_period);
    }
  }
  return res;
}

Fix gauss_newton_fix(const Snapshot& snap, const EphemerisSet& eph, const EcefPosition& position0,
                     double bias0_s, const std::vector<long>& nu, double beta0_s,
                     std::vector<double>& delays_s, const SolverConfig& cfg) {
  const int m = static_cast<int>(snap.size());
  if (m < 4) throw InsufficientObservationsError("gauss_newton_fix: need at least 4 observations");
  if (static_cast<int>(nu.size()) != m || static_cast<int>(delays_s.size()) != m)
    throw InputError("gauss_newton_fix: nu/delay count mismatch");

  EcefPosition pos = position0;
  double bias = bias0_s;
  double beta = beta0_s;
  const bool height_row = (m == 4);
  const double href = std::isfinite(cfg.height_reference_m)
                          ? cfg.height_reference_m
                          : ecef_to_geodetic(position0).height_m;

  Fix fix;
  double prev_step = std::numeric_limits<double>::infinity();
  double prev_bias_out =
      beta0_s + std::round((bias0_s - beta0_s) / code_period) * code_period;
  int grow = 0;
  int it = 0;
  try {
    for (it = 1; it <= cfg.max_gn_iterations; ++it) {
      LinearizedSystem lin = linearize(snap, eph, pos, bias, delays_s, cfg.delay);
      copy_delays(lin, delays_s);

      const int rows = m + (height_row ? 1 : 0);
      MatrixXd a = MatrixXd::Zero(rows, 5);
      VectorXd y(rows), w(rows);
      for (int i = 0; i < m; ++i) {
        a(i, 0) = lin.jacobian(i, 0) / speed_of_light;
        a(i, 1) = lin.jacobian(i, 1) / speed_of_light;
        a(i, 2) = lin.jacobian(i, 2) / speed_of_light;
        a(i, 3) = lin.jacobian(i, 3) / speed_of_light;
        a(i, 4) = 1.0;
        y(i) = lin.phases(i) - lin.delays(i) + nu[i] * code_period;
        w(i) = 1.0 / cfg.sigma_t;
      }
      if (height_row) {
        EcefPosition up = up_vector(pos);
        a(m, 0) = up.x;
        a(m, 1) = up.y;
        a(m, 2) = up.z;
        y(m) = href - ecef_to_geodetic(pos).height_m;
        w(m) = 1.0 / cfg.height_sigma_m;
      }

      VectorXd sol = solve_real_ls(a, y, w);
      pos = pos + EcefPosition{sol(0), sol(1), sol(2)};
      bias += sol(3);
      beta = sol(4);

      double pstep = sol.head(3).norm();
      double step = std::hypot(pstep, speed_of_light * std::fabs(sol(3)));
      // Divergence guard. A large shadow correction is legitimate (the prior
      // time can be off by an hour), so position and shadow are checked
      // against separately insane scales rather than a combined metric.
      if (!std::isfinite(step) || pstep > 1.0e8 || std::fabs(sol(3)) > 1.0e5) break;
      // The shadow-bias and per-snapshot-constant columns are parallel up to
      // rdot/c, so the raw shadow correction stalls in a rounding limit cycle
      // ~1e-11 s that leaves the reported bias untouched (a near-gauge
      // direction of the model). Convergence is therefore judged on the
      // correction to the reported bias, not on the shadow component.
      double bias_out = beta + std::round((bias - beta) / code_period) * code_period;
      double bstep = std::fabs(bias_out - prev_bias_out);
      prev_bias_out = bias_out;
      if (pstep <= cfg.convergence_tol_m && bstep <= cfg.convergence_tol_b) {
        fix.converged = true;
        break;
      }
      if (step > prev_step) {
        if (++grow >= 3) break;
      } else {
        grow = 0;
      }
      prev_step = step;
    }
  } catch (const Error&) {
    if (it <= 1) throw;  // could not even start: surface the input problem
    fix.converged = false;
  }

  // residual at the final state
  try {
    LinearizedSystem lin = linearize(snap, eph, pos, bias, delays_s, cfg.delay);
    copy_delays(lin, delays_s);
    double ss = 0.0;
    for (int i = 0; i < m; ++i) {
      double r = (lin.phases(i) - lin.delays(i) + nu[i] * code_period - beta) / cfg.sigma_t;
      ss += r * r;
    }
    fix.residual_norm = std::sqrt(ss);
  } catch (const Error&) {
    fix.residual_norm = std::numeric_limits<double>::quiet_NaN();
  }

  fix.position = pos;
  fix.shadow_s = bias;
  fix.beta_s = beta;
  fix.bias_s = beta + std::round((bias - beta) / code_period) * code_period;
  fix.integers = nu;
  fix.gn_iterations = std::min(it, cfg.max_gn_iterations);
  return fix;
}

Fix solve_van_diggelen(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg) {
  const int m = static_cast<int>(snap.size());
  if (m < 4) throw InsufficientObservationsError("solve_van_diggelen: need at least 4 observations");

  // Anchor-resolve, fix, and repeat at the refined state until the integers
  // stop moving. The first pass rounds range predictions made from the raw
  // prior; near the edge of the capture region those can be off by one slot,
  // and re-resolving at the fixed position removes that.
  std::vector<double> delays(m, cfg.initial_delay_s);
  EcefPosition pos = apriori.position;
  double bias = apriori.bias_s;
  Fix fix;
  std::vector<long> prev_diff;
  int runs = 0;
  for (int outer = 1; outer <= cfg.max_outer_iterations; ++outer) {
    LinearizedSystem lin = linearize(snap, eph, pos, bias, delays, cfg.delay);
    copy_delays(lin, delays);
    IntegerResolution res = resolve_integers_anchor(lin);
    // Integers shifted by a common constant give the same fix (the constant
    // lands in the bias), so compare differentials only.
    std::vector<long> diff(m);
    for (int i = 0; i < m; ++i) diff[i] = res.nu[i] - res.nu[0];
    if (runs > 0 && diff == prev_diff) break;
    prev_diff = diff;
    fix = gauss_newton_fix(snap, eph, pos, bias, res.nu, res.beta_s, delays, cfg);
    ++runs;
    pos = fix.position;
    bias = fix.bias_s;
  }
  fix.outer_iterations = runs;
  return fix;
}

namespace {

/// Arrival-time rows carry linearization error (range curvature over the
/// region the solution may move across), not just receiver noise. Weighting
/// them by the combined scale keeps early passes from chasing exact code-slot
/// alignments of a model that is only valid to first order; as the iteration
/// localizes, the weight returns to 1/sigma_t.
double effective_sigma_t(double sigma_t, double trust_pos_m, double trust_time_s) {
  double curvature_m = trust_pos_m * trust_pos_m / 4.0e7 +
                       1.7e-4 * trust_pos_m * trust_time_s +
                       0.45 * trust_time_s * trust_time_s;
  return std::max(sigma_t, curvature_m / speed_of_light);
}

/// Shared outer loop of the two mixed-integer methods.
Fix solve_mils_common(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                      const SolverConfig& cfg, bool doppler_reg) {
  const int m = static_cast<int>(snap.size());

  EcefPosition pos = apriori.position;
  double bias = apriori.bias_s;
  double u_hat = 0.0;  // clock-drift unknown (Doppler variant only)
  std::vector<long> nbar(m, 0);
  std::vector<double> delays(m, cfg.initial_delay_s);
  double trust_pos =
      std::max({apriori.box.x_max, apriori.box.y_max, apriori.box.z_max, 1.0e3});
  double trust_time = std::max(apriori.box.b_max, 1.0e-3);

  Fix fix;
  bool int_done = false;
  int outer = 0;
  int polish_its = 0;
  bool polish_done = false;

  try {
    for (outer = 1; outer <= cfg.max_outer_iterations; ++outer) {
      LinearizedSystem lin = linearize(snap, eph, pos, bias, delays, cfg.delay, doppler_reg);
      copy_delays(lin, delays);
      double st = effective_sigma_t(cfg.sigma_t, trust_pos, trust_time);
      MilsProblem prob =
          doppler_reg ? assemble_doppler_mils(lin, bias, nbar, u_hat, st, cfg.sigma_d)
                      : assemble_apriori_mils(lin, bias, nbar, st, cfg.reg_length_m);
      MilsSolution sol = solve_mils(prob);

      pos = pos + EcefPosition{sol.x(0), sol.x(1), sol.x(2)};
      bias += sol.x(3);
      if (doppler_reg) u_hat += sol.x(4);

      bool zero = true;
      for (int i = 0; i < m; ++i) {
        long dz = std::llround(sol.z(i));
        nbar[i] += dz;
        if (dz != 0) zero = false;
      }
      int_done = zero;
      double pstep = sol.x.head(3).norm();
      if (!std::isfinite(pstep) || pos.norm() > 1.0e10 || !std::isfinite(bias)) {
        int_done = false;
        break;
      }
      // shrink the trust region toward the step actually taken
      trust_pos = std::max({pstep, 0.05 * trust_pos, 1.0e3});
      trust_time = std::max({std::fabs(sol.x(3)), 0.05 * trust_time, 1.0e-3});
      if (zero && pstep < 1.0) break;
    }

    // continuous polish with the integers held fixed
    const bool height_row = (m == 4) && !doppler_reg;
    const double href = std::isfinite(cfg.height_reference_m)
                            ? cfg.height_reference_m
                            : ecef_to_geodetic(apriori.position).height_m;
    for (polish_its = 1; polish_its <= cfg.max_gn_iterations; ++polish_its) {
      LinearizedSystem lin = linearize(snap, eph, pos, bias, delays, cfg.delay, doppler_reg);
      copy_delays(lin, delays);

      MatrixXd a;
      VectorXd y, w;
      if (!cfg.refine_without_regularization) {
        MilsProblem prob =
            doppler_reg
                ? assemble_doppler_mils(lin, bias, nbar, u_hat, cfg.sigma_t, cfg.sigma_d)
                : assemble_apriori_mils(lin, bias, nbar, cfg.sigma_t, cfg.reg_length_m);
        a = prob.a;
        y = prob.y;
        w = prob.w;
      } else {
        a = MatrixXd::Zero(m, 4);
        y.resize(m);
        w.resize(m);
        for (int i = 0; i < m; ++i) {
          a(i, 0) = lin.jacobian(i, 0) / speed_of_light;
          a(i, 1) = lin.jacobian(i, 1) / speed_of_light;
          a(i, 2) = lin.jacobian(i, 2) / speed_of_light;
          a(i, 3) = lin.jacobian(i, 3) / speed_of_light + 1.0;
          y(i) = lin.phases(i) - lin.delays(i) + nbar[i] * code_period - bias;
          w(i) = 1.0 / cfg.sigma_t;
        }
      }
      if (height_row) {
        EcefPosition up = up_vector(pos);
        a.conservativeResize(a.rows() + 1, Eigen::NoChange);
        a.row(a.rows() - 1).setZero();
        a(a.rows() - 1, 0) = up.x;
        a(a.rows() - 1, 1) = up.y;
        a(a.rows() - 1, 2) = up.z;
        y.conservativeResize(y.size() + 1);
        y(y.size() - 1) = href - ecef_to_geodetic(pos).height_m;
        w.conservativeResize(w.size() + 1);
        w(w.size() - 1) = 1.0 / cfg.height_sigma_m;
      }

      VectorXd sol = solve_real_ls(a, y, w);
      pos = pos + EcefPosition{sol(0), sol(1), sol(2)};
      bias += sol(3);
      if (doppler_reg && sol.size() > 4 && !cfg.refine_without_regularization) u_hat += sol(4);

      if (sol.head(3).norm() <= cfg.convergence_tol_m &&
          std::fabs(sol(3)) <= cfg.convergence_tol_b) {
        polish_done = true;
        break;
      }
      if (!std::isfinite(pos.norm()) || pos.norm() > 1.0e10) break;
    }
  } catch (const Error&) {
    if (outer <= 1 && polish_its == 0) throw;
    fix.converged = false;
    int_done = false;
  }

  // A long contraction can land the integers on the very last pass, leaving
  // no pass that observed a zero correction. Certify them at the refined
  // state instead of reporting a spurious non-convergence: a zero integer
  // correction here is exactly the loop's own termination condition.
  if (polish_done && !int_done) {
    try {
      LinearizedSystem lin = linearize(snap, eph, pos, bias, delays, cfg.delay, doppler_reg);
      MilsProblem prob =
          doppler_reg ? assemble_doppler_mils(lin, bias, nbar, u_hat, cfg.sigma_t, cfg.sigma_d)
                      : assemble_apriori_mils(lin, bias, nbar, cfg.sigma_t, cfg.reg_length_m);
      MilsSolution sol = solve_mils(prob);
      bool zero = true;
      for (int i = 0; i < m; ++i)
        if (std::llround(sol.z(i)) != 0) zero = false;
      if (zero && sol.x.head(3).norm() < 1.0) int_done = true;
    } catch (const Error&) {
      // leave the flag as-is; the fix itself is unchanged
    }
  }

  // residual at the final state
  try {
    LinearizedSystem lin = linearize(snap, eph, pos, bias, delays, cfg.delay, doppler_reg);
    MilsProblem prob =
        doppler_reg ? assemble_doppler_mils(lin, bias, nbar, u_hat, cfg.sigma_t, cfg.sigma_d)
                    : assemble_apriori_mils(lin, bias, nbar, cfg.sigma_t, cfg.reg_length_m);
    fix.residual_norm = (prob.w.asDiagonal() * prob.y).norm();
  } catch (const Error&) {
    fix.residual_norm = std::numeric_limits<double>::quiet_NaN();
  }

  fix.position = pos;
  fix.bias_s = bias;
  fix.drift = u_hat;
  fix.integers = nbar;
  fix.outer_iterations = std::min(outer, cfg.max_outer_iterations);
  fix.gn_iterations = std::min(polish_its, cfg.max_gn_iterations);
  fix.converged = int_done && polish_done;
  return fix;
}

}  // namespace

Fix solve_mils_apriori(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg) {
  if (snap.size() < 4)
    throw InsufficientObservationsError("solve_mils_apriori: need at least 4 observations");
  return solve_mils_common(snap, eph, apriori, cfg, false);
}

Fix solve_mils_doppler(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg) {
  if (!snap.all_have_doppler())
    throw InputError("solve_mils_doppler: every observation needs a Doppler measurement");
  if (snap.size() < 5)
    throw InsufficientObservationsError(
        "solve_mils_doppler: need at least 5 observations (system is underdetermined with 4)");
  return solve_mils_common(snap, eph, apriori, cfg, true);
}

Fix solve_doppler_only(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg) {
  const int m = static_cast<int>(snap.size());
  if (!snap.all_have_doppler())
    throw InputError("solve_doppler_only: every observation needs a Doppler measurement");
  if (m < 5)
    throw InsufficientObservationsError("solve_doppler_only: need at least 5 observations");

  EcefPosition pos = apriori.position;
  double tau = 0.0;  // correction to the assumed true time
  double f = 0.0;    // receiver frequency bias [Hz]

  auto compute_residual = [&](const EcefPosition& p, double tau_, double f_, VectorXd& r) {
    for (int i = 0; i < m; ++i) {
      GpsTime t_d =
          snap.arrival_time(i).plus(-apriori.bias_s - cfg.initial_delay_s + tau_);
      const Ephemeris& e = find_ephemeris(eph, snap.obs[i].prn, t_d);
      double rdot = range_rate(p, e, t_d);
      r(i) = snap.obs[i].doppler_hz - (-(l1_frequency / speed_of_light) * rdot + f_);
    }
  };

  Fix fix;
  VectorXd r(m), rc(m);
  int it = 0;
  try {
    compute_residual(pos, tau, f, r);
    double rn = r.norm();

    for (it = 1; it <= 20; ++it) {
      MatrixXd jac(m, 5);
      for (int i = 0; i < m; ++i) {
        GpsTime t_d = snap.arrival_time(i).plus(-apriori.bias_s - cfg.initial_delay_s + tau);
        const Ephemeris& e = find_ephemeris(eph, snap.obs[i].prn, t_d);
        SatelliteState st = satellite_state(e, t_d);
        EcefPosition d = pos - st.position;
        double rr = d.norm();
        EcefPosition los = d * (1.0 / rr);
        double rdot = los.dot(st.velocity * (-1.0));
        double k = -(l1_frequency / speed_of_light);
        // d(predicted D)/d(pos): k * d(rdot)/d(pos)
        jac(i, 0) = k * (-st.velocity.x - los.x * rdot) / rr;
        jac(i, 1) = k * (-st.velocity.y - los.y * rdot) / rr;
        jac(i, 2) = k * (-st.velocity.z - los.z * rdot) / rr;
        jac(i, 3) = k * range_acceleration(pos, e, t_d);
        jac(i, 4) = 1.0;
      }
      VectorXd delta = solve_real_ls(jac, r, VectorXd::Ones(m));
      // a sub-threshold proposed step means we are already at the optimum,
      // whether or not the line search below could still improve on it
      if (delta.head(3).norm() < 1.0e-2 && std::fabs(delta(3)) < 1.0e-5) {
        fix.converged = true;
        break;
      }

      double alpha = 1.0;
      bool improved = false;
      for (int h = 0; h < 8; ++h) {
        EcefPosition cand = pos + EcefPosition{alpha * delta(0), alpha * delta(1),
                                               alpha * delta(2)};
        double tauc = tau + alpha * delta(3);
        double fc = f + alpha * delta(4);
        compute_residual(cand, tauc, fc, rc);
        double rcn = rc.norm();
        if (rcn < rn) {
          pos = cand;
          tau = tauc;
          f = fc;
          rn = rcn;
          r = rc;
          improved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!improved) break;
      if (alpha * delta.head(3).norm() < 1.0e-2 && alpha * std::fabs(delta(3)) < 1.0e-5) {
        fix.converged = true;
        break;
      }
    }
    fix.residual_norm = rn;
  } catch (const Error&) {
    if (it <= 1) throw;
    fix.converged = false;
  }

  fix.position = pos;
  fix.bias_s = apriori.bias_s - tau;
  fix.frequency_bias_hz = f;
  fix.gn_iterations = std::min(it, 20);
  return fix;
}

}  // namespace snapfix

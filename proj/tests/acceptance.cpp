// Release gates for the toolkit. Each check prints [PASS]/[FAIL] with the
// measured value; the process exits nonzero if any gate fails. Runs offline on
// synthetic constellations plus the golden files under data/.
#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "snapfix/ephemeris.hpp"
#include "snapfix/errors.hpp"
#include "snapfix/geodesy.hpp"
#include "snapfix/mils.hpp"
#include "snapfix/rinex.hpp"
#include "snapfix/simulator.hpp"
#include "snapfix/solvers.hpp"

using namespace snapfix;
namespace k = snapfix::constants;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

double median(std::vector<double> v) {
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ------------------------------------------------------------ 1. exact MILS

// Exhaustive search over [lo, hi]^q with the real block projected out.
// Enumerates depth-first keeping partial residual vectors so the per-leaf cost
// is one small norm; ties resolve to the first (lexicographically smallest) z.
struct Brute {
  const MatrixXd& bw;
  int lo, hi;
  double best = std::numeric_limits<double>::infinity();
  VectorXd best_z, z;

  Brute(const MatrixXd& b, int l, int h) : bw(b), lo(l), hi(h) {
    z = VectorXd::Zero(b.cols());
  }
  void run(VectorXd r, int level) {
    if (level == bw.cols()) {
      double n2 = r.squaredNorm();
      if (n2 < best) {
        best = n2;
        best_z = z;
      }
      return;
    }
    r -= double(lo) * bw.col(level);
    for (int v = lo; v <= hi; ++v) {
      z(level) = v;
      run(r, level + 1);
      r -= bw.col(level);
    }
  }
};

void check_ils_optimality() {
  std::mt19937_64 rng(20240815);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> zint(-6, 6);
  std::uniform_real_distribution<double> wdist(0.5, 2.0);

  double t0 = now_s();
  int mismatches = 0;
  double worst_gap = 0.0;
  for (int inst = 0; inst < 200; ++inst) {
    int q = 1 + int(rng() % 5);
    int p = int(rng() % 3);
    int m = std::min(8, p + q + 1 + int(rng() % 3));

    MilsProblem prob;
    prob.a = MatrixXd::NullaryExpr(m, p, [&] { return gauss(rng); });
    prob.b = MatrixXd::NullaryExpr(m, q, [&] { return gauss(rng); });
    prob.w = VectorXd::NullaryExpr(m, [&] { return wdist(rng); });
    VectorXd xt = VectorXd::NullaryExpr(p, [&] { return gauss(rng); });
    VectorXd zt = VectorXd::NullaryExpr(q, [&] { return double(zint(rng)); });
    VectorXd eps = VectorXd::NullaryExpr(m, [&] { return 0.1 * gauss(rng); });
    prob.y = prob.a * xt + prob.b * zt + eps;

    MilsSolution s = solve_mils(prob);

    // project out the real block, then enumerate
    MatrixXd bw = prob.w.asDiagonal() * prob.b;
    VectorXd yw = prob.w.asDiagonal() * prob.y;
    if (p > 0) {
      MatrixXd aw = prob.w.asDiagonal() * prob.a;
      Eigen::HouseholderQR<MatrixXd> qr(aw);
      MatrixXd qfull = qr.householderQ() * MatrixXd::Identity(m, m);
      MatrixXd q1 = qfull.leftCols(p);
      bw -= q1 * (q1.transpose() * bw);
      yw -= q1 * (q1.transpose() * yw);
    }
    Brute brute(bw, -10, 10);
    brute.run(yw, 0);

    if ((s.z - brute.best_z).norm() != 0.0) ++mismatches;
    worst_gap = std::max(worst_gap,
                         std::fabs(s.residual_norm - std::sqrt(brute.best)) /
                             std::max(1e-12, std::sqrt(brute.best)));
  }
  double dt = now_s() - t0;
  report(mismatches == 0 && worst_gap < 1e-9 && dt < 10.0,
         "exact mixed-integer solver vs exhaustive search",
         fmt("200 instances, %d argmin mismatches, worst residual gap %.2e, %.2f s",
             mismatches, worst_gap, dt));
}

// ------------------------------------------------------------ 2. orbit math

Ephemeris circular_eph(double a_m) {
  Ephemeris e;
  e.prn = 7;
  e.toe = GpsTime{2432, 302400.0};
  e.toc = e.toe;
  e.sqrt_a = std::sqrt(a_m);
  e.e = 0.0;
  e.i0 = 55.0 * k::deg2rad;
  e.omega0 = 0.3;
  e.m0 = 0.8;
  e.omega_dot = k::earth_rotation_rate;  // freeze the plane in the rotating frame
  return e;
}

void check_orbit_math() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> um(-k::pi, k::pi);
  std::uniform_real_distribution<double> ue(0.0, 0.1);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    double m = um(rng), ecc = ue(rng);
    double ea = eccentric_anomaly(m, ecc);
    worst = std::max(worst, std::fabs(ea - ecc * std::sin(ea) - m));
  }

  double a = 26560e3;
  Ephemeris eph = circular_eph(a);
  double v_exact = std::sqrt(k::earth_mu / a);
  GpsTime t = eph.toe.plus(1234.0);
  double rel = std::fabs(satellite_velocity(eph, t).norm() - v_exact) / v_exact;
  double e2 = std::fabs(satellite_velocity(eph, t, 2.0).norm() - v_exact);
  double e1 = std::fabs(satellite_velocity(eph, t, 1.0).norm() - v_exact);
  double order = std::log2(e2 / e1);  // 2.0 for a second-order scheme

  report(worst < 1e-13 && rel < 1e-4 && std::fabs(order - 2.0) < 0.2,
         "Kepler residual and finite-difference velocity",
         fmt("worst Kepler residual %.2e rad, velocity rel err %.2e, order %.3f",
             worst, rel, order));
}

// --------------------------------------------------- shared trial machinery

const GeodeticPosition kSite{40.0 * k::deg2rad, -105.0 * k::deg2rad, 1600.0};
const GpsTime kEpoch{2432, 302400.0};

struct Trial {
  EphemerisSet eph;
  TruthState truth;
  SimulatedSnapshot sim;
  AprioriState apriori;
};

Trial make_trial(std::mt19937_64& rng, int sats, double sigma_t, double sigma_d,
                 double distance_m, double time_mag_s, bool positive_time) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Trial t;
  t.eph = synthetic_constellation(kSite, kEpoch, sats, rng());
  t.truth.position = geodetic_to_ecef(kSite);
  t.truth.bias_s = (u01(rng) - 0.5) * 0.02;
  t.truth.drift = (u01(rng) - 0.5) * 4.0e-9;
  t.truth.epoch = kEpoch;
  NoiseSpec noise;
  noise.sigma_t = sigma_t;
  noise.sigma_d = sigma_d;
  noise.seed = rng();
  t.sim = generate_snapshot(t.truth, t.eph, noise);
  double az = 360.0 * u01(rng);
  double terr = (time_mag_s + u01(rng)) * (positive_time ? 1.0 : -1.0);
  t.apriori = perturb_apriori(t.truth, distance_m, az, terr);
  return t;
}

using Solver = Fix (*)(const Snapshot&, const EphemerisSet&, const AprioriState&,
                       const SolverConfig&);

double solve_error(Solver s, const Trial& t, const SolverConfig& cfg = {}) {
  try {
    Fix f = s(t.sim.snapshot, t.eph, t.apriori, cfg);
    return (f.position - t.truth.position).norm();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

bool constant_offset(const std::vector<long>& got, const std::vector<long>& want) {
  if (got.size() != want.size() || got.empty()) return false;
  long d = got[0] - want[0];
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i] - want[i] != d) return false;
  return true;
}

// --------------------------------------------------- 3. noiseless round trip

void check_round_trip() {
  std::mt19937_64 rng(31);
  const Solver solvers[] = {solve_van_diggelen, solve_mils_apriori, solve_mils_doppler};
  const char* names[] = {"vandiggelen", "mils-apriori", "mils-doppler"};
  double worst[3] = {0, 0, 0};
  int bad_int = 0;
  for (int i = 0; i < 100; ++i) {
    Trial t = make_trial(rng, 9, 0.0, 0.0, 0.0, 0.0, true);
    for (int si = 0; si < 3; ++si) {
      Fix f;
      try {
        f = solvers[si](t.sim.snapshot, t.eph, t.apriori, SolverConfig{});
      } catch (const Error&) {
        worst[si] = std::numeric_limits<double>::infinity();
        continue;
      }
      worst[si] = std::max(worst[si], (f.position - t.truth.position).norm());
      if (!constant_offset(f.integers, t.sim.true_integers)) ++bad_int;
    }
  }
  bool ok = bad_int == 0;
  for (double w : worst) ok = ok && w < 1e-2;
  report(ok, "noiseless round trip with exact prior",
         fmt("worst error %s %.2e m, %s %.2e m, %s %.2e m; %d integer sets off by a "
             "non-constant shift",
             names[0], worst[0], names[1], worst[1], names[2], worst[2], bad_int));
}

// --------------------------------------------------------- 4. noise floor

void check_noise_floor() {
  std::mt19937_64 rng(47);
  const Solver solvers[] = {solve_van_diggelen, solve_mils_apriori, solve_mils_doppler};
  std::vector<double> errs[3];
  for (int i = 0; i < 100; ++i) {
    Trial t = make_trial(rng, 8 + i % 6, 10e-9, 1.0, 0.0, 0.0, true);
    for (int si = 0; si < 3; ++si) errs[si].push_back(solve_error(solvers[si], t));
  }
  double med[3];
  bool ok = true;
  for (int si = 0; si < 3; ++si) {
    med[si] = median(errs[si]);
    ok = ok && med[si] < 30.0;
  }
  report(ok, "position noise floor at 10 ns timing noise",
         fmt("median error vandiggelen %.2f m, mils-apriori %.2f m, mils-doppler %.2f m",
             med[0], med[1], med[2]));
}

// --------------------------------------------- 5. initial-error tolerance

struct Cell {
  Solver solver;
  const char* name;
  double distance_m, time_s;
  bool expect_success;  // false: the cell must mostly fail
  double threshold;
};

void check_convergence_regions() {
  const Cell cells[] = {
      {solve_van_diggelen, "vandiggelen 50km/50s", 50e3, 50.0, true, 0.95},
      {solve_van_diggelen, "vandiggelen 300km/1s", 300e3, 1.0, false, 0.5},
      {solve_mils_apriori, "mils-apriori 200km/100s", 200e3, 100.0, true, 0.9},
      {solve_mils_doppler, "mils-doppler 10000km/100s", 10000e3, 100.0, true, 0.9},
      {solve_mils_doppler, "mils-doppler 10km/4000s", 10e3, 4000.0, true, 0.9},
  };
  const int trials = 20;
  double t0 = now_s();
  bool all_ok = true;
  std::string detail;
  for (const Cell& c : cells) {
    std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(c.distance_m + c.time_s));
    int ok = 0;
    for (int i = 0; i < trials; ++i) {
      Trial t = make_trial(rng, 9, 0.0, 0.0, c.distance_m, c.time_s, i < trials / 2);
      if (solve_error(c.solver, t) < 1000.0) ++ok;
    }
    double rate = double(ok) / trials;
    bool pass = c.expect_success ? rate >= c.threshold : (1.0 - rate) >= c.threshold;
    all_ok = all_ok && pass;
    detail += fmt("%s %.2f%s ", c.name, c.expect_success ? rate : 1.0 - rate,
                  pass ? "" : "(!)");
  }
  double dt = now_s() - t0;
  all_ok = all_ok && dt < 600.0;
  report(all_ok, "initial-error tolerance per method",
         detail + fmt("(success or failure rate, 20 trials/cell, %.0f s)", dt));
}

// --------------------------------------------------- 6. doppler-only fix

void check_doppler_only() {
  std::mt19937_64 rng(61);
  std::vector<double> errs;
  for (int i = 0; i < 200; ++i) {
    // same satellite census as the noise-floor gate; the starting offset is
    // irrelevant here (the damped iteration converges from far away)
    Trial t = make_trial(rng, 8 + i % 6, 10e-9, 1.0, 100e3, 30.0, i % 2 == 0);
    errs.push_back(solve_error(solve_doppler_only, t));
  }
  double med = median(errs);
  report(med >= 100.0 && med <= 5000.0, "doppler-only accuracy at 1 Hz noise",
         fmt("median error %.0f m (expected km scale)", med));
}

// ------------------------------------------- 7. integer re-resolution value

void check_outer_iterations() {
  std::mt19937_64 rng(71);
  double sum1 = 0.0, sum5 = 0.0;
  int n = 0;
  for (int i = 0; i < 100; ++i) {
    Trial t = make_trial(rng, 9, 0.0, 0.0, 150e3, 60.0, i % 2 == 0);
    SolverConfig one;
    one.max_outer_iterations = 1;
    SolverConfig five;
    five.max_outer_iterations = 5;
    double e1 = solve_error(solve_mils_apriori, t, one);
    double e5 = solve_error(solve_mils_apriori, t, five);
    if (std::isfinite(e1) && std::isfinite(e5)) {
      sum1 += e1;
      sum5 += e5;
      ++n;
    }
  }
  report(n >= 90 && sum1 / n > sum5 / n,
         "repeated integer re-resolution beats a single pass",
         fmt("mean error %.3e m with one pass vs %.3e m with five (%d trials)",
             sum1 / std::max(1, n), sum5 / std::max(1, n), n));
}

// ----------------------------------------------------------- 8. nav parser

void check_parser() {
  bool ok = true;
  std::string detail;
  try {
    RinexNavData nav = parse_rinex_nav_file("data/golden_nav_211.n");
    const Ephemeris& e = find_ephemeris(nav.ephemerides, 5, GpsTime{2432, 518500.0});
    ok = ok && nav.ephemerides.total_records() == 2;
    ok = ok && e.af0 == -1.234567890000e-04 && e.sqrt_a == 5153.75 && e.m0 == 1.25 &&
         e.crs == -12.5 && e.tgd == -1.2e-8 && e.iodc == 45.0;
    ok = ok && nav.has_klobuchar && nav.klobuchar.alpha[0] == 3.82e-9 &&
         nav.klobuchar.beta[3] == 1.13e5;
    detail += ok ? "golden fields exact; " : "golden field mismatch; ";

    // serialize -> parse identity, field for field
    std::string text = serialize_rinex_nav(nav.ephemerides, &nav.klobuchar);
    std::istringstream in(text);
    RinexNavData back = parse_rinex_nav(in);
    bool same = back.ephemerides.total_records() == nav.ephemerides.total_records();
    for (int prn : nav.ephemerides.prns()) {
      for (std::size_t i = 0; i < nav.ephemerides.records.at(prn).size(); ++i) {
        const Ephemeris& a = nav.ephemerides.records.at(prn)[i];
        const Ephemeris& b = back.ephemerides.records.at(prn)[i];
        same = same && a.sqrt_a == b.sqrt_a && a.e == b.e && a.m0 == b.m0 &&
               a.delta_n == b.delta_n && a.omega0 == b.omega0 && a.omega == b.omega &&
               a.i0 == b.i0 && a.omega_dot == b.omega_dot && a.idot == b.idot &&
               a.cuc == b.cuc && a.cus == b.cus && a.crc == b.crc && a.crs == b.crs &&
               a.cic == b.cic && a.cis == b.cis && a.af0 == b.af0 && a.af1 == b.af1 &&
               a.af2 == b.af2 && a.tgd == b.tgd && a.toe.week == b.toe.week &&
               a.toe.sow == b.toe.sow && a.toc.week == b.toc.week && a.toc.sow == b.toc.sow;
      }
    }
    ok = ok && same;
    detail += same ? "round trip identical; " : "round trip differs; ";
  } catch (const Error& e) {
    ok = false;
    detail += fmt("unexpected: %s; ", e.what());
  }

  int lined = 0;
  for (const char* f : {"data/malformed_badfloat.n", "data/malformed_badecc.n"}) {
    try {
      parse_rinex_nav_file(f);
    } catch (const ParseError& e) {
      if (e.line() > 0) ++lined;
    } catch (const Error&) {
    }
  }
  ok = ok && lined == 2;
  detail += fmt("%d/2 malformed files rejected with line numbers", lined);
  report(ok, "broadcast nav parser fidelity", detail);
}

// ---------------------------------------------------------- 9. step timing

void check_timing() {
  std::mt19937_64 rng(91);
  std::vector<double> step_ms;
  for (int i = 0; i < 50; ++i) {
    Trial t = make_trial(rng, 13, 10e-9, 1.0, 20e3, 20.0, i % 2 == 0);
    double t0 = now_s();
    int steps = 1;
    try {
      Fix f = solve_mils_apriori(t.sim.snapshot, t.eph, t.apriori, SolverConfig{});
      steps = std::max(1, f.outer_iterations + f.gn_iterations);
    } catch (const Error&) {
    }
    step_ms.push_back((now_s() - t0) * 1e3 / steps);
  }
  double med = median(step_ms);
  report(med < 50.0, "correction step cost at 13 satellites",
         fmt("median %.3f ms per step over 50 solves", med));
}

}  // namespace

int main() {
  check_ils_optimality();
  check_orbit_math();
  check_round_trip();
  check_noise_floor();
  check_convergence_regions();
  check_doppler_only();
  check_outer_iterations();
  check_parser();
  check_timing();
  if (g_failures) {
    std::printf("%d gate(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all gates passed\n");
  return 0;
}

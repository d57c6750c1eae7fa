// snapfix: snapshot GNSS positioning from code phases with unknown integer
// milliseconds. Subcommands cover one-shot fixes, simulation, and the three
// CSV experiment drivers (error CDF, success heatmap, satellite-count study).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "snapfix/errors.hpp"
#include "snapfix/rinex.hpp"
#include "snapfix/simulator.hpp"
#include "snapfix/snapshot_io.hpp"
#include "snapfix/solvers.hpp"

using namespace snapfix;
namespace k = snapfix::constants;

namespace {

// ---------------------------------------------------------------- shared bits

struct Shared {
  std::string nav;
  std::string out;
  std::uint64_t seed = 1;
  double mask_deg = 10.0;
};

const std::vector<std::string> kMethods = {"vandiggelen", "mils-apriori", "mils-doppler",
                                           "doppler-only"};

std::vector<double> split_doubles(const std::string& csv) {
  std::vector<double> v;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    double x = std::stod(tok, &pos);
    if (pos != tok.size()) throw InputError("bad number '" + tok + "' in list");
    v.push_back(x);
  }
  if (v.empty()) throw InputError("empty value list");
  return v;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> v;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    if (std::find(kMethods.begin(), kMethods.end(), tok) == kMethods.end())
      throw InputError("unknown method '" + tok + "'");
    v.push_back(tok);
  }
  if (v.empty()) throw InputError("no methods given");
  return v;
}

Fix run_method(const std::string& method, const Snapshot& snap, const EphemerisSet& eph,
               const AprioriState& ap, const SolverConfig& cfg) {
  if (method == "vandiggelen") return solve_van_diggelen(snap, eph, ap, cfg);
  if (method == "mils-apriori") return solve_mils_apriori(snap, eph, ap, cfg);
  if (method == "mils-doppler") return solve_mils_doppler(snap, eph, ap, cfg);
  if (method == "doppler-only") return solve_doppler_only(snap, eph, ap, cfg);
  throw InputError("unknown method '" + method + "'");
}

// Writes to --out when given, stdout otherwise.
void emit(const Shared& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out);
  if (!f) throw InputError("cannot open " + g.out + " for writing");
  f << text;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.end());
  return 0.5 * (v[mid - 1] + hi);
}

// Experiment scenarios run on synthetic constellations by default so the whole
// suite works offline; --nav swaps in a real broadcast file.
const GeodeticPosition kSite{40.0 * k::deg2rad, -105.0 * k::deg2rad, 1600.0};
const GpsTime kEpoch{2432, 302400.0};

struct Trial {
  EphemerisSet eph;
  TruthState truth;
  SimulatedSnapshot sim;
  AprioriState apriori;
};

// One randomized trial: fresh constellation (stand-in for a random epoch),
// random receiver clock state, random perturbation direction. Half of the
// time offsets are positive, half negative.
Trial make_trial(std::mt19937_64& rng, const Shared& g, int sats, double sigma_t, double sigma_d,
                 double distance_m, double time_mag_s, bool positive_time,
                 const EphemerisSet* real_eph) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  Trial t;
  std::uint64_t cseed = rng();
  t.eph = real_eph ? *real_eph : synthetic_constellation(kSite, kEpoch, sats, cseed);
  t.truth.position = geodetic_to_ecef(kSite);
  t.truth.bias_s = (u01(rng) - 0.5) * 0.02;     // +-10 ms
  t.truth.drift = (u01(rng) - 0.5) * 4.0e-9;    // +-2e-9 s/s
  t.truth.epoch = kEpoch;
  NoiseSpec noise;
  noise.sigma_t = sigma_t;
  noise.sigma_d = sigma_d;
  noise.seed = rng();
  t.sim = generate_snapshot(t.truth, t.eph, noise, DelayModel{}, g.mask_deg);
  double az = 360.0 * u01(rng);
  double terr = (time_mag_s + u01(rng)) * (positive_time ? 1.0 : -1.0);
  t.apriori = perturb_apriori(t.truth, distance_m, az, terr);
  return t;
}

double trial_error(const std::string& method, const Trial& t, const SolverConfig& cfg) {
  try {
    Fix f = run_method(method, t.sim.snapshot, t.eph, t.apriori, cfg);
    return (f.position - t.truth.position).norm();
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// ------------------------------------------------------------------- fix

int cmd_fix(const Shared& g, const std::string& snapshot_path, const std::string& method,
            double lat_deg, double lon_deg, double height_m, double bias_s, double box_pos_m,
            double box_time_s, bool atmosphere, bool bare_refine, int max_outer) {
  if (g.nav.empty()) throw InputError("fix needs --nav (simulate --out-nav can produce one)");
  RinexNavData nav = parse_rinex_nav_file(g.nav);
  Snapshot snap = read_snapshot_file(snapshot_path);

  AprioriState ap;
  ap.position = geodetic_to_ecef(GeodeticPosition{lat_deg * k::deg2rad, lon_deg * k::deg2rad,
                                                  height_m});
  ap.bias_s = bias_s;
  ap.box.x_max = ap.box.y_max = ap.box.z_max = box_pos_m;
  ap.box.b_max = box_time_s;

  SolverConfig cfg;
  cfg.max_outer_iterations = max_outer;
  cfg.refine_without_regularization = bare_refine;
  if (atmosphere) {
    cfg.delay.atmosphere = true;
    cfg.delay.relativistic_clock = true;
    if (nav.has_klobuchar) cfg.delay.klobuchar = nav.klobuchar;
  }

  if (g.mask_deg > 0.0) snap = elevation_filter(snap, nav.ephemerides, ap, g.mask_deg);
  Fix f = run_method(method, snap, nav.ephemerides, ap, cfg);

  GeodeticPosition geo = ecef_to_geodetic(f.position);
  std::ostringstream out;
  char buf[256];
  out << "method " << method << "\n";
  out << "converged " << (f.converged ? "yes" : "no") << "\n";
  std::snprintf(buf, sizeof(buf), "position_ecef_m %.6f %.6f %.6f\n", f.position.x, f.position.y,
                f.position.z);
  out << buf;
  std::snprintf(buf, sizeof(buf), "position_geodetic_deg_m %.9f %.9f %.3f\n",
                geo.lat_rad * k::rad2deg, geo.lon_rad * k::rad2deg, geo.height_m);
  out << buf;
  std::snprintf(buf, sizeof(buf), "bias_s %.12e\n", f.bias_s);
  out << buf;
  if (method == "mils-doppler") {
    std::snprintf(buf, sizeof(buf), "drift %.6e\n", f.drift);
    out << buf;
  }
  if (method == "doppler-only") {
    std::snprintf(buf, sizeof(buf), "frequency_bias_hz %.6f\n", f.frequency_bias_hz);
    out << buf;
  }
  if (!f.integers.empty()) {
    out << "integers";
    for (long n : f.integers) out << ' ' << n;
    out << "\n";
  }
  out << "outer_iterations " << f.outer_iterations << "\n";
  out << "gn_iterations " << f.gn_iterations << "\n";
  std::snprintf(buf, sizeof(buf), "residual_norm %.6e\n", f.residual_norm);
  out << buf;
  emit(g, out.str());
  return f.converged ? 0 : 1;
}

// ------------------------------------------------------------------- simulate

int cmd_simulate(const Shared& g, double lat_deg, double lon_deg, double height_m, double bias_s,
                 double drift, int week, double sow, int sats, double sigma_t, double sigma_d,
                 bool no_doppler, bool synthetic, const std::string& out_nav) {
  if (synthetic && !g.nav.empty())
    throw InputError("--synthetic and --nav are mutually exclusive");
  GeodeticPosition site{lat_deg * k::deg2rad, lon_deg * k::deg2rad, height_m};
  GpsTime epoch = GpsTime::make(week, sow);

  EphemerisSet eph;
  const KlobucharParams* klob = nullptr;
  RinexNavData nav;
  if (!g.nav.empty()) {
    nav = parse_rinex_nav_file(g.nav);
    eph = nav.ephemerides;
    if (nav.has_klobuchar) klob = &nav.klobuchar;
  } else {
    eph = synthetic_constellation(site, epoch, sats, g.seed);
  }

  TruthState truth;
  truth.position = geodetic_to_ecef(site);
  truth.bias_s = bias_s;
  truth.drift = drift;
  truth.epoch = epoch;

  NoiseSpec noise;
  noise.sigma_t = sigma_t;
  noise.sigma_d = sigma_d;
  noise.with_doppler = !no_doppler;
  noise.seed = g.seed;

  SimulatedSnapshot sim = generate_snapshot(truth, eph, noise, DelayModel{}, g.mask_deg);

  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "# truth_ecef_m %.6f %.6f %.6f bias_s %.12e drift %.6e\n", truth.position.x,
                truth.position.y, truth.position.z, truth.bias_s, truth.drift);
  out << buf;
  write_snapshot(out, sim.snapshot);
  emit(g, out.str());

  if (!out_nav.empty()) {
    std::ofstream f(out_nav);
    if (!f) throw InputError("cannot open " + out_nav + " for writing");
    f << serialize_rinex_nav(eph, klob);
  }
  return 0;
}

// ------------------------------------------------------------------- heatmap

int cmd_heatmap(const Shared& g, const std::string& method, const std::string& distances,
                const std::string& times, int trials, double radius_m, int sats, double sigma_t,
                double sigma_d) {
  std::vector<double> daxis = split_doubles(distances);
  std::vector<double> taxis = split_doubles(times);
  if (trials < 1) throw InputError("trials must be >= 1");

  EphemerisSet real;
  const EphemerisSet* real_p = nullptr;
  if (!g.nav.empty()) {
    real = parse_rinex_nav_file(g.nav).ephemerides;
    real_p = &real;
  }

  std::ostringstream out;
  out << "distance_m,time_error_s,success_rate,median_error_m\n";
  SolverConfig cfg;
  for (double d : daxis) {
    for (double t : taxis) {
      std::seed_seq sq{g.seed, static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(t)};
      std::mt19937_64 rng(sq);
      int ok = 0;
      std::vector<double> errs;
      errs.reserve(trials);
      for (int i = 0; i < trials; ++i) {
        Trial tr =
            make_trial(rng, g, sats, sigma_t, sigma_d, d, t, i < (trials + 1) / 2, real_p);
        double e = trial_error(method, tr, cfg);
        errs.push_back(e);
        if (e < radius_m) ++ok;
      }
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%.0f,%.0f,%.6f,%.3f\n", d, t,
                    double(ok) / double(trials), median(errs));
      out << buf;
      std::cerr << "heatmap " << method << " d=" << d << " t=" << t << " ok=" << ok << "/"
                << trials << "\n";
    }
  }
  emit(g, out.str());
  return 0;
}

// ------------------------------------------------------------------- cdf

int cmd_cdf(const Shared& g, const std::string& methods_csv, double distance_m, double time_s,
            int trials, int sats, double sigma_t, double sigma_d) {
  std::vector<std::string> methods = split_names(methods_csv);
  if (trials < 1) throw InputError("trials must be >= 1");

  EphemerisSet real;
  const EphemerisSet* real_p = nullptr;
  if (!g.nav.empty()) {
    real = parse_rinex_nav_file(g.nav).ephemerides;
    real_p = &real;
  }

  std::mt19937_64 rng(g.seed);
  SolverConfig cfg;
  std::vector<std::vector<double>> cols(methods.size());
  for (int i = 0; i < trials; ++i) {
    // one snapshot per trial, every method sees the same realization
    Trial tr = make_trial(rng, g, sats, sigma_t, sigma_d, distance_m, time_s,
                          i < (trials + 1) / 2, real_p);
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
      cols[mi].push_back(trial_error(methods[mi], tr, cfg));
  }
  for (auto& c : cols) std::sort(c.begin(), c.end());

  std::ostringstream out;
  for (std::size_t mi = 0; mi < methods.size(); ++mi)
    out << methods[mi] << (mi + 1 < methods.size() ? ',' : '\n');
  out.setf(std::ios::scientific);
  out.precision(6);
  for (int i = 0; i < trials; ++i) {
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
      out << cols[mi][i] << (mi + 1 < methods.size() ? ',' : '\n');
  }
  emit(g, out.str());
  return 0;
}

// ------------------------------------------------------------------- nsats

int cmd_nsats(const Shared& g, const std::string& methods_csv, int n_min, int n_max, int trials,
              int pool, double distance_max_m, double time_max_s, double sigma_t, double sigma_d,
              double radius_m) {
  std::vector<std::string> methods = split_names(methods_csv);
  if (n_min < 4 || n_max < n_min) throw InputError("need 4 <= min <= max");
  if (pool < n_max) throw InputError("satellite pool smaller than max subset");

  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::ostringstream out;
  out << "method,n_sats,success_fraction\n";
  SolverConfig cfg;
  for (const std::string& method : methods) {
    bool needs_doppler = (method == "mils-doppler" || method == "doppler-only");
    for (int n = n_min; n <= n_max; ++n) {
      if (needs_doppler && n < 5) {
        std::cerr << "nsats: skipping " << method << " at n=" << n
                  << " (underdetermined with 4 observations)\n";
        continue;
      }
      std::seed_seq sq{g.seed, static_cast<std::uint64_t>(n), std::uint64_t(7919)};
      std::mt19937_64 rng(sq);
      int ok = 0;
      for (int i = 0; i < trials; ++i) {
        Trial tr = make_trial(rng, g, pool, sigma_t, sigma_d, distance_max_m * u01(rng),
                              time_max_s * u01(rng), i < (trials + 1) / 2, nullptr);
        // random satellite subset of size n (identical across methods per seed)
        Snapshot sub = tr.sim.snapshot;
        std::shuffle(sub.obs.begin(), sub.obs.end(), rng);
        if (static_cast<int>(sub.obs.size()) < n) continue;
        sub.obs.resize(n);
        Trial cut = tr;
        cut.sim.snapshot = sub;
        if (trial_error(method, cut, cfg) < radius_m) ++ok;
      }
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%s,%d,%.6f\n", method.c_str(), n,
                    double(ok) / double(trials));
      out << buf;
      std::cerr << "nsats " << method << " n=" << n << " ok=" << ok << "/" << trials << "\n";
    }
  }
  emit(g, out.str());
  return 0;
}

// ------------------------------------------------------------------- bench

int cmd_bench(const Shared& g, const std::string& method, int sats, int trials) {
  if (trials < 1) throw InputError("trials must be >= 1");
  std::mt19937_64 rng(g.seed);
  SolverConfig cfg;
  std::vector<double> step_ms, total_ms;
  for (int i = 0; i < trials; ++i) {
    Trial tr = make_trial(rng, g, sats, 10e-9, 1.0, 20e3, 20.0, i % 2 == 0, nullptr);
    auto t0 = std::chrono::steady_clock::now();
    int steps = 1;
    try {
      Fix f = run_method(method, tr.sim.snapshot, tr.eph, tr.apriori, cfg);
      steps = std::max(1, f.outer_iterations + f.gn_iterations);
    } catch (const Error&) {
    }
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    total_ms.push_back(ms);
    step_ms.push_back(ms / steps);
  }
  std::vector<double> s = step_ms;
  std::sort(s.begin(), s.end());
  double p95 = s[static_cast<std::size_t>(0.95 * (s.size() - 1))];
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "method %s m %d trials %d step_median_ms %.3f step_p95_ms %.3f "
                "total_median_ms %.3f\n",
                method.c_str(), sats, trials, median(step_ms), p95, median(total_ms));
  out << buf;
  emit(g, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snapshot GNSS positioning toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may appear after the subcommand name

  Shared g;
  app.add_option("--nav", g.nav, "RINEX navigation file")->envname("SNAPFIX_NAV");
  app.add_option("--seed", g.seed, "deterministic RNG seed");
  app.add_option("--mask", g.mask_deg, "elevation mask in degrees (0 disables)");
  app.add_option("--out", g.out, "output path (default stdout)");

  // fix
  auto* fix = app.add_subcommand("fix", "solve one snapshot");
  std::string snapshot_path, method = "mils-apriori";
  double lat = 40.0, lon = -105.0, height = 1600.0, bias = 0.0;
  double box_pos = 1.0e5, box_time = 60.0;
  bool atmosphere = false, bare_refine = false;
  int max_outer = 5;
  fix->add_option("snapshot", snapshot_path, "snapshot file")->required();
  fix->add_option("--method", method, "solver")->check(CLI::IsMember(kMethods));
  fix->add_option("--lat", lat, "a-priori latitude, degrees");
  fix->add_option("--lon", lon, "a-priori longitude, degrees");
  fix->add_option("--height", height, "a-priori height, meters");
  fix->add_option("--bias", bias, "a-priori clock bias, seconds");
  fix->add_option("--box-pos", box_pos, "a-priori position uncertainty, meters");
  fix->add_option("--box-time", box_time, "a-priori time uncertainty, seconds");
  fix->add_flag("--atmosphere", atmosphere, "model ionosphere and relativistic clock");
  fix->add_flag("--bare-refine", bare_refine, "final refinement without regularization rows");
  fix->add_option("--max-outer", max_outer, "integer re-resolution passes");

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a snapshot file");
  double s_lat = 40.0, s_lon = -105.0, s_height = 1600.0, s_bias = 2.3e-3, s_drift = 1.0e-9;
  int s_week = 2432, s_sats = 9;
  double s_sow = 302400.0, s_sigma_t = 0.0, s_sigma_d = 0.0;
  bool s_nodop = false, s_synth = false;
  std::string out_nav;
  sim->add_option("--lat", s_lat, "true latitude, degrees");
  sim->add_option("--lon", s_lon, "true longitude, degrees");
  sim->add_option("--height", s_height, "true height, meters");
  sim->add_option("--bias", s_bias, "true clock bias, seconds");
  sim->add_option("--drift", s_drift, "true clock drift, s/s");
  sim->add_option("--week", s_week, "GPS week");
  sim->add_option("--sow", s_sow, "GPS seconds of week");
  sim->add_option("--sats", s_sats, "synthetic constellation size");
  sim->add_option("--sigma-t", s_sigma_t, "arrival-time noise, seconds");
  sim->add_option("--sigma-d", s_sigma_d, "doppler noise, Hz");
  sim->add_flag("--no-doppler", s_nodop, "omit doppler measurements");
  sim->add_flag("--synthetic", s_synth, "use a synthetic constellation (the default without --nav)");
  sim->add_option("--out-nav", out_nav, "also write the constellation as RINEX");

  // heatmap
  auto* hm = app.add_subcommand("heatmap", "success-rate grid over initial errors");
  std::string hm_method = "mils-apriori";
  std::string hm_dist = "0,50e3,200e3,1000e3,10000e3";
  std::string hm_time = "0,10,100,1000,4000";
  int hm_trials = 16, hm_sats = 9;
  double hm_radius = 1000.0, hm_sigma_t = 0.0, hm_sigma_d = 0.0;
  hm->add_option("--method", hm_method, "solver")->check(CLI::IsMember(kMethods));
  hm->add_option("--distances", hm_dist, "comma list of initial distance errors, meters");
  hm->add_option("--times", hm_time, "comma list of initial time errors, seconds");
  hm->add_option("--trials", hm_trials, "trials per cell");
  hm->add_option("--radius", hm_radius, "success radius, meters");
  hm->add_option("--sats", hm_sats, "satellites per trial");
  hm->add_option("--sigma-t", hm_sigma_t, "arrival-time noise, seconds");
  hm->add_option("--sigma-d", hm_sigma_d, "doppler noise, Hz");

  // cdf
  auto* cdf = app.add_subcommand("cdf", "paired error distribution per method");
  std::string cdf_methods = "vandiggelen,mils-apriori,mils-doppler,doppler-only";
  double cdf_dist = 20e3, cdf_time = 20.0, cdf_sigma_t = 10e-9, cdf_sigma_d = 1.0;
  int cdf_trials = 100, cdf_sats = 9;
  cdf->add_option("--methods", cdf_methods, "comma list of solvers");
  cdf->add_option("--distance", cdf_dist, "initial distance error, meters");
  cdf->add_option("--time-error", cdf_time, "initial time error magnitude, seconds");
  cdf->add_option("--trials", cdf_trials, "number of trials");
  cdf->add_option("--sats", cdf_sats, "satellites per trial");
  cdf->add_option("--sigma-t", cdf_sigma_t, "arrival-time noise, seconds");
  cdf->add_option("--sigma-d", cdf_sigma_d, "doppler noise, Hz");

  // nsats
  auto* ns = app.add_subcommand("nsats", "success fraction vs satellite count");
  std::string ns_methods = "vandiggelen,mils-apriori,mils-doppler,doppler-only";
  int ns_min = 4, ns_max = 13, ns_trials = 32, ns_pool = 15;
  double ns_dmax = 100e3, ns_tmax = 60.0, ns_sigma_t = 10e-9, ns_sigma_d = 1.0,
         ns_radius = 1000.0;
  ns->add_option("--methods", ns_methods, "comma list of solvers");
  ns->add_option("--min", ns_min, "smallest subset size");
  ns->add_option("--max", ns_max, "largest subset size");
  ns->add_option("--trials", ns_trials, "trials per subset size");
  ns->add_option("--pool", ns_pool, "constellation size to draw subsets from");
  ns->add_option("--distance-max", ns_dmax, "initial distance error bound, meters");
  ns->add_option("--time-max", ns_tmax, "initial time error bound, seconds");
  ns->add_option("--sigma-t", ns_sigma_t, "arrival-time noise, seconds");
  ns->add_option("--sigma-d", ns_sigma_d, "doppler noise, Hz");
  ns->add_option("--radius", ns_radius, "success radius, meters");

  // bench
  auto* bn = app.add_subcommand("bench", "per-step solver timing");
  std::string bn_method = "mils-apriori";
  int bn_sats = 13, bn_trials = 50;
  bn->add_option("--method", bn_method, "solver")->check(CLI::IsMember(kMethods));
  bn->add_option("--sats", bn_sats, "satellites per trial");
  bn->add_option("--trials", bn_trials, "number of timed solves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are input errors
  }

  try {
    if (fix->parsed())
      return cmd_fix(g, snapshot_path, method, lat, lon, height, bias, box_pos, box_time,
                     atmosphere, bare_refine, max_outer);
    if (sim->parsed())
      return cmd_simulate(g, s_lat, s_lon, s_height, s_bias, s_drift, s_week, s_sow, s_sats,
                          s_sigma_t, s_sigma_d, s_nodop, s_synth, out_nav);
    if (hm->parsed())
      return cmd_heatmap(g, hm_method, hm_dist, hm_time, hm_trials, hm_radius, hm_sats,
                         hm_sigma_t, hm_sigma_d);
    if (cdf->parsed())
      return cmd_cdf(g, cdf_methods, cdf_dist, cdf_time, cdf_trials, cdf_sats, cdf_sigma_t,
                     cdf_sigma_d);
    if (ns->parsed())
      return cmd_nsats(g, ns_methods, ns_min, ns_max, ns_trials, ns_pool, ns_dmax, ns_tmax,
                       ns_sigma_t, ns_sigma_d, ns_radius);
    if (bn->parsed()) return cmd_bench(g, bn_method, bn_sats, bn_trials);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientObservationsError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const StaleEphemerisError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

#pragma once

#include <limits>
#include <vector>

#include "snapfix/snapshot.hpp"

namespace snapfix {

struct SolverConfig {
  int max_outer_iterations = 5;   ///< integer re-resolution passes
  int max_gn_iterations = 10;     ///< continuous refinement steps per pass
  double convergence_tol_m = 1e-4;
  double convergence_tol_b = 1e-12;  ///< [s]
  double sigma_t = 10e-9;            ///< code-phase noise scale [s]
  double sigma_d = 1.0;              ///< Doppler noise scale [Hz]
  double reg_length_m = 1.0e5;       ///< a-priori regularization length scale
  double height_sigma_m = 10.0;      ///< pseudo-measurement weight when only 4 satellites
  double height_reference_m = std::numeric_limits<double>::quiet_NaN();  ///< NaN: a-priori height
  bool refine_without_regularization = false;  ///< final polish on code-phase rows only
  double initial_delay_s = 0.0765;   ///< signal-flight seed before any geometry is known
  DelayModel delay;
};

/// Output of every positioning method.
struct Fix {
  EcefPosition position;
  double bias_s = 0.0;     ///< receiver clock bias [s]
  double shadow_s = 0.0;   ///< coarse-time component (resolve/refine path)
  double beta_s = 0.0;     ///< sub-code-period bias component (resolve/refine path)
  double drift = 0.0;      ///< clock drift estimate [s/s] (Doppler-regularized path)
  double frequency_bias_hz = 0.0;  ///< receiver frequency bias (Doppler-only path)
  std::vector<long> integers;      ///< per-satellite whole code periods
  int outer_iterations = 0;
  int gn_iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;  ///< weighted residual at the final state
};

/// Millisecond-integer resolution from one anchor satellite (the one with the
/// smallest |range rate|, i.e. closest to zenith).
struct IntegerResolution {
  std::vector<long> nu;
  double beta_s = 0.0;
  int anchor_index = 0;
};

IntegerResolution resolve_integers_anchor(const LinearizedSystem& lin);

/// Iterative 5-unknown refinement (position, coarse-time shift, sub-period bias)
/// with the integers held fixed. delays_s is updated in place across iterations.
Fix gauss_newton_fix(const Snapshot& snap, const EphemerisSet& eph, const EcefPosition& position0,
                     double bias0_s, const std::vector<long>& nu, double beta0_s,
                     std::vector<double>& delays_s, const SolverConfig& cfg);

/// Anchor-satellite integer resolution followed by Gauss-Newton refinement.
Fix solve_van_diggelen(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg = {});

/// Joint mixed-integer solve regularized by the a-priori state; integers re-resolved
/// across outer passes, then a continuous polish.
Fix solve_mils_apriori(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg = {});

/// Joint mixed-integer solve regularized by Doppler measurements (requires Doppler on
/// every observation and at least 5 satellites).
Fix solve_mils_doppler(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg = {});

/// Position/time/frequency-bias estimation from Dopplers alone (no code phases).
Fix solve_doppler_only(const Snapshot& snap, const EphemerisSet& eph, const AprioriState& apriori,
                       const SolverConfig& cfg = {});

}  // namespace snapfix

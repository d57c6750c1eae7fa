#include "snapfix/mils.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "snapfix/errors.hpp"

namespace snapfix {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void check_finite(const MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string("solve_mils: non-finite ") + what);
}

/// In-place partial LLL on upper-triangular r, accumulating the unimodular z
/// and carrying the orthogonal row transforms onto y.
void plll_reduce(MatrixXd& r, VectorXd& y, MatrixXd& z) {
  const int q = static_cast<int>(r.cols());
  const double slack = 1.0 + 1e-12;
  int k = 1;
  while (k < q) {
    int k1 = k - 1;
    double zeta = std::round(r(k1, k) / r(k1, k1));
    double alpha = r(k1, k) - zeta * r(k1, k1);
    if (r(k1, k1) * r(k1, k1) > slack * (alpha * alpha + r(k, k) * r(k, k))) {
      if (zeta != 0.0) {
        r.col(k).head(k) -= zeta * r.col(k1).head(k);
        z.col(k) -= zeta * z.col(k1);
      }
      r.col(k).head(k + 1).swap(r.col(k1).head(k + 1));
      z.col(k).swap(z.col(k1));
      // re-triangularize rows k1,k with a Givens rotation
      double a = r(k1, k1), b = r(k, k1);
      double rr = std::hypot(a, b);
      double c = a / rr, s = b / rr;
      for (int j = k1; j < q; ++j) {
        double t1 = r(k1, j), t2 = r(k, j);
        r(k1, j) = c * t1 + s * t2;
        r(k, j) = -s * t1 + c * t2;
      }
      r(k, k1) = 0.0;
      double t1 = y(k1), t2 = y(k);
      y(k1) = c * t1 + s * t2;
      y(k) = -s * t1 + c * t2;
      k = std::max(k - 1, 1);
    } else {
      ++k;
    }
  }
  // final size-reduction sweep (leaves the diagonal untouched)
  for (int j = 1; j < q; ++j) {
    for (int i = j - 1; i >= 0; --i) {
      double zeta = std::round(r(i, j) / r(i, i));
      if (zeta != 0.0) {
        r.col(j).head(i + 1) -= zeta * r.col(i).head(i + 1);
        z.col(j) -= zeta * z.col(i);
      }
    }
  }
}

bool lex_less(const VectorXd& a, const VectorXd& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

struct SearchHit {
  double dist2;
  VectorXd z;
};

/// Depth-first enumeration of || y - r z || over integer z (r upper triangular,
/// nonzero diagonal). Keeps the n_best smallest; first leaf visited is the Babai point.
std::vector<SearchHit> se_search(const MatrixXd& r, const VectorXd& y, int n_best,
                                 long& nodes_visited) {
  const int q = static_cast<int>(r.cols());
  const double inf = std::numeric_limits<double>::infinity();

  VectorXd z(q), c(q), d(q), prsd(q);
  prsd.setZero();
  std::vector<SearchHit> best;
  auto radius = [&]() { return best.size() < static_cast<std::size_t>(n_best)
                              ? inf
                              : best.back().dist2 * (1.0 + 1e-9); };

  int k = q - 1;
  {
    double s = y(k);
    c(k) = s / r(k, k);
    if (!std::isfinite(c(k)))
      throw NumericalError("solve_mils: enumeration radius could not be initialized");
    z(k) = std::round(c(k));
    d(k) = c(k) >= z(k) ? 1.0 : -1.0;
  }

  while (true) {
    ++nodes_visited;
    double dk = c(k) - z(k);
    double dist = prsd(k) + dk * dk * r(k, k) * r(k, k);
    if (dist < radius()) {
      if (k > 0) {
        prsd(k - 1) = dist;
        --k;
        double s = y(k);
        for (int j = k + 1; j < q; ++j) s -= r(k, j) * z(j);
        c(k) = s / r(k, k);
        if (!std::isfinite(c(k)))
          throw NumericalError("solve_mils: enumeration radius could not be initialized");
        z(k) = std::round(c(k));
        d(k) = c(k) >= z(k) ? 1.0 : -1.0;
        continue;
      }
      // leaf
      SearchHit hit{dist, z};
      auto pos = std::lower_bound(best.begin(), best.end(), hit, [](const SearchHit& a,
                                                                    const SearchHit& b) {
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        return lex_less(a.z, b.z);
      });
      best.insert(pos, hit);
      if (best.size() > static_cast<std::size_t>(n_best)) best.pop_back();
      // sideways step at the bottom level
      z(0) += d(0);
      d(0) = d(0) > 0 ? -d(0) - 1.0 : -d(0) + 1.0;
    } else {
      if (k == q - 1) break;
      ++k;
      z(k) += d(k);
      d(k) = d(k) > 0 ? -d(k) - 1.0 : -d(k) + 1.0;
    }
  }
  if (best.empty()) throw NumericalError("solve_mils: search terminated with no candidate");
  return best;
}

}  // namespace

VectorXd solve_real_ls(const MatrixXd& a, const VectorXd& y, const VectorXd& w) {
  if (a.rows() != y.size() || a.rows() != w.size())
    throw InputError("solve_real_ls: dimension mismatch");
  if ((w.array() <= 0.0).any()) throw InputError("solve_real_ls: weights must be positive");
  check_finite(a, "matrix");
  MatrixXd aw = w.asDiagonal() * a;
  VectorXd yw = w.asDiagonal() * y;
  // Equilibrate columns so the rank test is insensitive to unit mismatches
  // (meters vs seconds vs s/s columns differ by ~9 orders of magnitude).
  VectorXd scale(a.cols());
  for (int j = 0; j < a.cols(); ++j) {
    double n = aw.col(j).norm();
    scale(j) = n > 0.0 ? 1.0 / n : 1.0;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(aw * scale.asDiagonal());
  qr.setThreshold(1e-10);
  if (qr.rank() < a.cols())
    throw DegenerateProblemError("solve_real_ls: rank-deficient system");
  return scale.asDiagonal() * qr.solve(yw);
}

LatticeReduction reduce_lattice(const MatrixXd& r) {
  if (r.rows() != r.cols()) throw InputError("reduce_lattice: factor must be square");
  const int q = static_cast<int>(r.cols());
  LatticeReduction out;
  out.r = r;
  out.z = MatrixXd::Identity(q, q);
  VectorXd dummy = VectorXd::Zero(q);
  if (q > 1) plll_reduce(out.r, dummy, out.z);
  return out;
}

MilsSolution solve_mils(const MilsProblem& p, int n_candidates, bool use_reduction) {
  const int m = static_cast<int>(p.y.size());
  const int np = static_cast<int>(p.a.cols());
  const int q = static_cast<int>(p.b.cols());
  if (n_candidates < 1) throw InputError("solve_mils: n_candidates must be >= 1");
  if ((p.a.size() > 0 && p.a.rows() != m) || p.b.rows() != m || p.w.size() != m)
    throw InputError("solve_mils: dimension mismatch");
  if ((p.w.array() <= 0.0).any()) throw InputError("solve_mils: weights must be positive");
  check_finite(p.b, "integer block");
  check_finite(p.y, "right-hand side");
  if (np > 0) check_finite(p.a, "real block");
  if (m < np + 1) throw DegenerateProblemError("solve_mils: too few rows for the real block");

  MatrixXd aw = p.w.asDiagonal() * p.a;
  MatrixXd bw = p.w.asDiagonal() * p.b;
  VectorXd yw = p.w.asDiagonal() * p.y;

  MilsSolution sol;

  // Equilibrate the real-block columns (mixed units span many orders of
  // magnitude); the integer block must stay untouched to preserve the lattice.
  VectorXd ascale = VectorXd::Ones(np);
  for (int j = 0; j < np; ++j) {
    double n = aw.col(j).norm();
    if (n > 0.0) ascale(j) = 1.0 / n;
  }

  // Pure real least squares when there is nothing to enumerate.
  Eigen::ColPivHouseholderQR<MatrixXd> qra;
  if (np > 0) {
    qra.compute(aw * ascale.asDiagonal());
    qra.setThreshold(1e-10);
    if (qra.rank() < np)
      throw DegenerateProblemError("solve_mils: real block is rank deficient");
  }
  if (q == 0) {
    sol.x = np > 0 ? VectorXd(ascale.asDiagonal() * qra.solve(yw)) : VectorXd(0);
    sol.z = VectorXd(0);
    VectorXd res = yw;
    if (np > 0) res -= aw * sol.x;
    sol.residual_norm = res.norm();
    sol.candidates.push_back({sol.z, sol.residual_norm});
    return sol;
  }

  // Marginalize the real block: project onto the orthogonal complement of col(Aw).
  MatrixXd b2;
  VectorXd y2;
  if (np > 0) {
    MatrixXd qfull = qra.householderQ() * MatrixXd::Identity(m, m);
    MatrixXd q2 = qfull.rightCols(m - np);
    b2 = q2.transpose() * bw;
    y2 = q2.transpose() * yw;
  } else {
    b2 = bw;
    y2 = yw;
  }
  const int m2 = static_cast<int>(b2.rows());
  if (m2 < q)
    throw DegenerateProblemError("solve_mils: integer block underdetermined after elimination");

  // Triangularize the reduced integer system.
  Eigen::HouseholderQR<MatrixXd> qrb(b2);
  MatrixXd rb = qrb.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  VectorXd yb = (qrb.householderQ().transpose() * y2).head(q);
  double bscale = bw.colwise().norm().maxCoeff();
  if (bscale <= 0.0 || (rb.diagonal().cwiseAbs().array() < 1e-12 * bscale).any())
    throw DegenerateProblemError("solve_mils: integer block is rank deficient");

  MatrixXd zmat = MatrixXd::Identity(q, q);
  if (use_reduction && q > 1) plll_reduce(rb, yb, zmat);

  std::vector<SearchHit> hits = se_search(rb, yb, n_candidates, sol.enum_nodes);

  // Map back to original integer coordinates and re-rank by the definitional residual.
  for (const SearchHit& h : hits) {
    MilsCandidate c;
    c.z = (zmat * h.z).array().round();
    VectorXd rhs = yw - bw * c.z;
    VectorXd x = np > 0 ? VectorXd(ascale.asDiagonal() * qra.solve(rhs)) : VectorXd(0);
    VectorXd res = rhs;
    if (np > 0) res -= aw * x;
    c.residual_norm = res.norm();
    sol.candidates.push_back(c);
  }
  std::sort(sol.candidates.begin(), sol.candidates.end(),
            [](const MilsCandidate& a, const MilsCandidate& b) {
              if (a.residual_norm != b.residual_norm) return a.residual_norm < b.residual_norm;
              return lex_less(a.z, b.z);
            });

  sol.z = sol.candidates.front().z;
  VectorXd rhs = yw - bw * sol.z;
  sol.x = np > 0 ? VectorXd(ascale.asDiagonal() * qra.solve(rhs)) : VectorXd(0);
  sol.residual_norm = sol.candidates.front().residual_norm;
  return sol;
}

}  // namespace snapfix

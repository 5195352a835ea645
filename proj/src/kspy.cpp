#include "hyphinf/kspy.hpp"

#include <algorithm>
#include <string>

#include "hyphinf/error.hpp"

namespace hyphinf::kspy {
namespace {

using num::identity;

Matrix gain_matrix(const PopovTriplet& t, const Matrix& x) {
  return t.R + t.B.transpose() * x * t.B;
}

Matrix cross_term(const PopovTriplet& t, const Matrix& x) {
  return t.L + t.A.transpose() * x * t.B;
}

bool well_conditioned(const Matrix& g) {
  return num::min_singular_value(g) > 1e-12 * (1.0 + g.norm());
}

double riccati_tolerance(const Matrix& x) { return 1e-8 * (1.0 + x.norm()); }

// Solves the subspace problem and returns X before any refinement.
Matrix subspace_solution(const PopovTriplet& t) {
  const Index n = t.n();
  const Index m = t.m();
  const Index s = 2 * n + m;
  num::Pencil pencil{Matrix::Zero(s, s), Matrix::Zero(s, s)};
  pencil.M.topLeftCorner(n, n) = identity(n);
  pencil.M.block(n, n, n, n) = t.A.transpose();
  pencil.M.block(2 * n, n, m, n) = -t.B.transpose();
  pencil.N.topLeftCorner(n, n) = t.A;
  pencil.N.block(0, 2 * n, n, m) = t.B;
  pencil.N.block(n, 0, n, n) = -t.Q;
  pencil.N.block(n, n, n, n) = identity(n);
  pencil.N.block(n, 2 * n, n, m) = -t.L;
  pencil.N.block(2 * n, 0, m, n) = t.L.transpose();
  pencil.N.block(2 * n, 2 * n, m, m) = t.R;

  Matrix u;
  try {
    u = num::stable_deflating_subspace(pencil, n);
  } catch (const Error& e) {
    fail(ErrorCode::kNoStabilizingSolution, e.what());
  }
  const Matrix u1 = u.topRows(n);
  const Matrix u2 = u.middleRows(n, n);
  if (num::min_singular_value(u1) <= 1e-12) {
    fail(ErrorCode::kNoStabilizingSolution,
         "stable subspace is not a graph over the state coordinates");
  }
  const Matrix x =
      u1.transpose().fullPivLu().solve(u2.transpose()).transpose();
  return num::symmetrize(x);
}

}  // namespace

Matrix Signature::J() const {
  Matrix j = identity(size());
  j.topLeftCorner(m1, m1) *= -1.0;
  return j;
}

double KspyResiduals::max() const {
  return std::max({r_factor, l_factor, q_factor});
}

void PopovTriplet::validate() const {
  num::require_square(A, "Popov A");
  const Index nn = n();
  num::require_shape(B, nn, B.cols(), "Popov B");
  num::require_shape(Q, nn, nn, "Popov Q");
  num::require_shape(L, nn, m(), "Popov L");
  num::require_shape(R, m(), m(), "Popov R");
  if (sig.size() != m()) {
    fail(ErrorCode::kDimension, "signature size must equal input count");
  }
  for (const Matrix* x : {&A, &B, &Q, &L, &R}) {
    num::require_finite(*x, "Popov triplet");
  }
  if (num::symmetry_defect(Q) > 1e-12 * (1.0 + Q.norm()) ||
      num::symmetry_defect(R) > 1e-12 * (1.0 + R.norm())) {
    fail(ErrorCode::kContract, "Popov Q and R must be symmetric");
  }
}

double riccati_residual(const PopovTriplet& t, const Matrix& x) {
  const Matrix g = gain_matrix(t, x);
  const Matrix c = cross_term(t, x);
  const Matrix r = t.Q + t.A.transpose() * x * t.A - x -
                   c * g.fullPivLu().solve(c.transpose());
  return r.norm();
}

Matrix stabilizing_feedback(const PopovTriplet& t, const Matrix& x) {
  const Matrix g = gain_matrix(t, x);
  if (!well_conditioned(g)) {
    fail(ErrorCode::kNonsingularityViolated, "R + B'XB is singular");
  }
  return -g.partialPivLu().solve(cross_term(t, x).transpose());
}

Matrix solve_stabilizing_dare(const PopovTriplet& t,
                              const DareOptions& options) {
  t.validate();
  Matrix x = subspace_solution(t);
  double res = riccati_residual(t, x);
  for (int step = 0; step < options.newton_steps; ++step) {
    if (!(res > 1e-15 * (1.0 + x.norm()))) break;
    try {
      const Matrix f = stabilizing_feedback(t, x);
      const Matrix ak = t.A + t.B * f;
      const Matrix lf = t.L * f;
      const Matrix qk =
          t.Q + lf + lf.transpose() + f.transpose() * t.R * f;
      const Matrix next = num::symmetrize(num::solve_stein(ak, qk));
      const double next_res = riccati_residual(t, next);
      if (!(next_res < res)) break;
      x = next;
      res = next_res;
    } catch (const Error&) {
      break;
    }
  }
  if (!(res <= riccati_tolerance(x))) {
    fail(ErrorCode::kNoStabilizingSolution,
         "Riccati residual " + std::to_string(res) + " exceeds certificate");
  }
  const Matrix f = stabilizing_feedback(t, x);
  const double radius = num::spectral_radius(t.A + t.B * f);
  if (!(radius < 1.0 - num::kStabilityMargin)) {
    fail(ErrorCode::kNoStabilizingSolution,
         "closed-loop spectral radius " + std::to_string(radius));
  }
  return x;
}

Matrix j_lower_factorize(const Matrix& p, Signature sig) {
  num::require_square(p, "J-factorization argument");
  if (p.rows() != sig.size()) {
    fail(ErrorCode::kDimension, "signature does not match matrix size");
  }
  const num::InertiaTriple inertia = num::hermitian_inertia(p, 1e-10);
  if (inertia != num::InertiaTriple{sig.m1, sig.m2, 0}) {
    fail(ErrorCode::kSignConditionViolated,
         "inertia (" + std::to_string(inertia.n_minus) + ", " +
             std::to_string(inertia.n_plus) + ", " +
             std::to_string(inertia.n_zero) + "), expected (" +
             std::to_string(sig.m1) + ", " + std::to_string(sig.m2) + ", 0)");
  }
  const Matrix ps = num::symmetrize(p);
  const Index m1 = sig.m1;
  const Index m2 = sig.m2;
  Matrix v = Matrix::Zero(m1 + m2, m1 + m2);
  try {
    const Matrix v22 = num::reverse_cholesky_spd(ps.bottomRightCorner(m2, m2));
    const Matrix v21 = v22.transpose().triangularView<Eigen::Upper>().solve(
        ps.topRightCorner(m1, m2).transpose());
    const Matrix schur = ps.topLeftCorner(m1, m1) - v21.transpose() * v21;
    v.topLeftCorner(m1, m1) = num::reverse_cholesky_spd(-schur);
    v.bottomLeftCorner(m2, m1) = v21;
    v.bottomRightCorner(m2, m2) = v22;
  } catch (const Error& e) {
    fail(ErrorCode::kSignConditionViolated, e.what());
  }
  return v;
}

KspyFactors kspy_factorize(const PopovTriplet& t, const Matrix& x) {
  KspyFactors f;
  f.V = j_lower_factorize(num::symmetrize(gain_matrix(t, x)), t.sig);
  const Matrix y = f.V.transpose().triangularView<Eigen::Upper>().solve(
      cross_term(t, x).transpose());
  f.W = t.sig.J() * y;
  return f;
}

KspyResiduals kspy_residuals(const PopovTriplet& t, const Matrix& x,
                             const KspyFactors& f) {
  const Matrix j = t.sig.J();
  KspyResiduals r;
  r.r_factor = (gain_matrix(t, x) - f.V.transpose() * j * f.V).norm();
  r.l_factor = (cross_term(t, x) - f.W.transpose() * j * f.V).norm();
  r.q_factor = (t.Q + t.A.transpose() * x * t.A - x -
                f.W.transpose() * j * f.W)
                   .norm();
  return r;
}

KspySolution solve_kspy(const PopovTriplet& t, const DareOptions& options) {
  KspySolution s;
  s.X = solve_stabilizing_dare(t, options);
  s.F = stabilizing_feedback(t, s.X);
  const KspyFactors f = kspy_factorize(t, s.X);
  s.V = f.V;
  s.W = f.W;
  s.residuals = kspy_residuals(t, s.X, f);
  if (!(s.residuals.max() <= riccati_tolerance(s.X))) {
    fail(ErrorCode::kNumerical, "KSPY residual certificate failed");
  }
  s.riccati_residual = riccati_residual(t, s.X);
  s.closed_loop_radius = num::spectral_radius(t.A + t.B * s.F);
  if (t.n() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(s.X, Eigen::EigenvaluesOnly);
    s.x_min_eigenvalue = eig.eigenvalues().minCoeff();
  }
  s.x_psd = s.x_min_eigenvalue >= -1e-10 * (1.0 + s.X.norm());
  return s;
}

}  // namespace hyphinf::kspy

#include "hyphinf/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <lapacke.h>

#include "hyphinf/error.hpp"

namespace hyphinf::num {
namespace {

lapack_logical inside_unit_disk(const double* ar, const double* ai,
                                const double* b) {
  return std::hypot(*ar, *ai) < std::abs(*b);
}

std::string shape(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

void require_pencil(const Pencil& pencil) {
  require_square(pencil.M, "pencil M");
  require_square(pencil.N, "pencil N");
  if (pencil.M.rows() != pencil.N.rows()) {
    fail(ErrorCode::kDimension, "pencil blocks differ in size");
  }
  require_finite(pencil.M, "pencil M");
  require_finite(pencil.N, "pencil N");
}

struct QzResult {
  GeneralizedSpectrum spectrum;
  Matrix z;
  lapack_int sdim = 0;
};

QzResult run_qz(const Pencil& pencil, bool sorted) {
  const lapack_int n = static_cast<lapack_int>(pencil.N.rows());
  Matrix a = pencil.N;
  Matrix b = pencil.M;
  Vector ar(n), ai(n), beta(n);
  Matrix vsr(std::max<lapack_int>(n, 1), std::max<lapack_int>(n, 1));
  double vsl_dummy = 0.0;
  QzResult out;
  const lapack_int info = LAPACKE_dgges(
      LAPACK_COL_MAJOR, 'N', sorted ? 'V' : 'N', sorted ? 'S' : 'N',
      sorted ? inside_unit_disk : nullptr, n, a.data(), std::max(n, 1),
      b.data(), std::max(n, 1), &out.sdim, ar.data(), ai.data(), beta.data(),
      &vsl_dummy, 1, vsr.data(), std::max(n, 1));
  if (info < 0) {
    fail(ErrorCode::kNumerical,
         "dgges rejected argument " + std::to_string(-info));
  }
  if (info > 0 && info <= n) {
    fail(ErrorCode::kNumerical, "QZ iteration did not converge");
  }
  if (info == n + 2) {
    fail(ErrorCode::kDichotomyFailure,
         "eigenvalue classification changed during reordering");
  }
  if (info > n) {
    fail(ErrorCode::kNumerical,
         "QZ reordering failed (code " + std::to_string(info) + ")");
  }
  out.spectrum.alpha.resize(n);
  out.spectrum.beta = beta.cwiseAbs();
  for (lapack_int j = 0; j < n; ++j) {
    // dgges may return a negative beta; the ratio is what matters.
    const double sign = beta(j) < 0.0 ? -1.0 : 1.0;
    out.spectrum.alpha(j) = Complex(sign * ar(j), sign * ai(j));
  }
  if (sorted) out.z = vsr.topLeftCorner(n, n);
  return out;
}

void require_regular(const Pencil& pencil, const GeneralizedSpectrum& s) {
  const double ta = 1e-14 * (1.0 + pencil.N.norm());
  const double tb = 1e-14 * (1.0 + pencil.M.norm());
  for (Index j = 0; j < s.alpha.size(); ++j) {
    if (std::abs(s.alpha(j)) <= ta && s.beta(j) <= tb) {
      fail(ErrorCode::kNumerical, "pencil is singular");
    }
  }
}

}  // namespace

void require_finite(const Matrix& a, std::string_view name) {
  if (!a.allFinite()) {
    fail(ErrorCode::kContract,
         std::string(name) + " has non-finite entries");
  }
}

void require_square(const Matrix& a, std::string_view name) {
  if (a.rows() != a.cols()) {
    fail(ErrorCode::kDimension,
         std::string(name) + " must be square, got " + shape(a));
  }
}

void require_shape(const Matrix& a, Index rows, Index cols,
                   std::string_view name) {
  if (a.rows() != rows || a.cols() != cols) {
    fail(ErrorCode::kDimension,
         std::string(name) + " must be " + std::to_string(rows) + "x" +
             std::to_string(cols) + ", got " + shape(a));
  }
}

double symmetry_defect(const Matrix& p) {
  return (p - p.transpose()).norm();
}

Matrix symmetrize(const Matrix& p) { return 0.5 * (p + p.transpose()); }

CVector eigenvalues(const Matrix& a) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  if (a.rows() == 0) return CVector(0);
  Eigen::EigenSolver<Matrix> solver(a, false);
  if (solver.info() != Eigen::Success) {
    fail(ErrorCode::kNumerical, "eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

double spectral_radius(const Matrix& a) {
  const CVector ev = eigenvalues(a);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

InertiaTriple hermitian_inertia(const Matrix& p, double tol) {
  require_square(p, "inertia argument");
  require_finite(p, "inertia argument");
  const double scaled = tol * (1.0 + p.norm());
  if (symmetry_defect(p) > scaled) {
    fail(ErrorCode::kContract, "inertia argument is not symmetric");
  }
  InertiaTriple out;
  if (p.rows() == 0) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(p),
                                               Eigen::EigenvaluesOnly);
  for (Index i = 0; i < p.rows(); ++i) {
    const double ev = solver.eigenvalues()(i);
    if (ev < -scaled) {
      ++out.n_minus;
    } else if (ev > scaled) {
      ++out.n_plus;
    } else {
      ++out.n_zero;
    }
  }
  return out;
}

Matrix stable_deflating_subspace(const Pencil& pencil, Index dim) {
  require_pencil(pencil);
  const Index n = pencil.N.rows();
  if (dim < 0 || dim > n) {
    fail(ErrorCode::kRange, "requested subspace dimension out of range");
  }
  const QzResult qz = run_qz(pencil, true);
  require_regular(pencil, qz.spectrum);
  for (Index j = 0; j < n; ++j) {
    const double a = std::abs(qz.spectrum.alpha(j));
    const double b = qz.spectrum.beta(j);
    if (b > 0.0 && std::abs(a - b) <= kDichotomyTolerance * b) {
      fail(ErrorCode::kDichotomyFailure,
           "generalized eigenvalue of modulus " + std::to_string(a / b) +
               " on the unit circle");
    }
  }
  if (qz.sdim != dim) {
    fail(ErrorCode::kSubspaceDimensionMismatch,
         "stable count " + std::to_string(qz.sdim) + ", expected " +
             std::to_string(dim));
  }
  return qz.z.leftCols(dim);
}

GeneralizedSpectrum generalized_eigenvalues(const Pencil& pencil) {
  require_pencil(pencil);
  return run_qz(pencil, false).spectrum;
}

double min_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().minCoeff();
}

double min_singular_value(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues().minCoeff();
}

double max_singular_value(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double max_singular_value(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

Matrix cholesky_spd(const Matrix& p) {
  require_square(p, "Cholesky argument");
  require_finite(p, "Cholesky argument");
  if (symmetry_defect(p) > 1e-10 * (1.0 + p.norm())) {
    fail(ErrorCode::kContract, "Cholesky argument is not symmetric");
  }
  if (p.rows() == 0) return Matrix(0, 0);
  Eigen::LLT<Matrix> llt(symmetrize(p));
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kNotPositiveDefinite, "non-positive Cholesky pivot");
  }
  Matrix l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any()) {
    fail(ErrorCode::kNotPositiveDefinite, "non-positive Cholesky pivot");
  }
  return l;
}

Matrix reverse_cholesky_spd(const Matrix& p) {
  const Matrix flipped = p.reverse();
  const Matrix l = cholesky_spd(flipped);
  Matrix g = l.transpose().reverse();
  return g;
}

Matrix sym_sqrt(const Matrix& p) {
  require_square(p, "square-root argument");
  if (p.rows() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(p));
  Vector ev = solver.eigenvalues();
  const double floor = -1e-12 * (1.0 + p.norm());
  if (ev.minCoeff() < floor) {
    fail(ErrorCode::kNotPositiveDefinite,
         "square-root argument has a negative eigenvalue");
  }
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  const Matrix& u = solver.eigenvectors();
  return symmetrize(u * ev.asDiagonal() * u.transpose());
}

Matrix sym_inv_sqrt(const Matrix& p) {
  require_square(p, "square-root argument");
  if (p.rows() == 0) return Matrix(0, 0);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(p));
  const Vector& ev = solver.eigenvalues();
  if (ev.minCoeff() <= 1e-14 * (1.0 + p.norm())) {
    fail(ErrorCode::kNotPositiveDefinite,
         "inverse square-root argument is not positive definite");
  }
  const Vector s = ev.cwiseSqrt().cwiseInverse();
  const Matrix& u = solver.eigenvectors();
  return symmetrize(u * s.asDiagonal() * u.transpose());
}

Matrix solve_stein(const Matrix& a, const Matrix& c) {
  require_square(a, "Stein A");
  require_shape(c, a.rows(), a.rows(), "Stein C");
  const Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  Eigen::ComplexSchur<CMatrix> schur(a.cast<Complex>());
  if (schur.info() != Eigen::Success) {
    fail(ErrorCode::kNumerical, "Schur iteration did not converge");
  }
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();
  const CMatrix ct = u.adjoint() * c.cast<Complex>() * u;
  // Column sweep over Tᴴ·Y·T − Y + C̃ = 0 with T upper triangular.
  CMatrix y = CMatrix::Zero(n, n);
  CVector z(n);
  for (Index j = 0; j < n; ++j) {
    z = y.leftCols(j) * t.col(j).head(j);
    for (Index i = 0; i < n; ++i) {
      Complex rhs = -ct(i, j);
      for (Index p = 0; p <= i; ++p) rhs -= std::conj(t(p, i)) * z(p);
      for (Index p = 0; p < i; ++p) {
        rhs -= std::conj(t(p, i)) * y(p, j) * t(j, j);
      }
      const Complex den = std::conj(t(i, i)) * t(j, j) - 1.0;
      if (std::abs(den) < 1e-14) {
        fail(ErrorCode::kNumerical, "Stein equation is singular");
      }
      y(i, j) = rhs / den;
    }
  }
  return (u * y * u.adjoint()).real();
}

std::vector<Index> min_cost_assignment(const Matrix& cost) {
  require_square(cost, "assignment cost");
  require_finite(cost, "assignment cost");
  const Index n = cost.rows();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = p[j0];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> out(n, 0);
  for (Index j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
  return out;
}

double matched_distance(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::kDimension, "multisets differ in size");
  }
  const Index n = a.size();
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) cost(i, j) = std::abs(a(i) - b(j));
  }
  const std::vector<Index> match = min_cost_assignment(cost);
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) worst = std::max(worst, cost(i, match[i]));
  return worst;
}

Matrix identity(Index n) { return Matrix::Identity(n, n); }

Matrix block_diag(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCode::kDimension, "hstack row mismatch");
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  out.leftCols(a.cols()) = a;
  out.rightCols(b.cols()) = b;
  return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorCode::kDimension, "vstack column mismatch");
  }
  Matrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace hyphinf::num

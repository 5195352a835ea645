#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hyphinf::num {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

/// Eigenvalues within this relative distance of the unit circle break the
/// stable/unstable splitting.
inline constexpr double kDichotomyTolerance = 1e-8;

/// Margin used by every strict "< 1" stability test.
inline constexpr double kStabilityMargin = 1e-9;

/// The pencil λM − N. Both matrices are square and of equal size.
struct Pencil {
  Matrix M;
  Matrix N;
};

/// Counts of negative, positive and zero eigenvalues of a symmetric matrix.
struct InertiaTriple {
  Index n_minus = 0;
  Index n_plus = 0;
  Index n_zero = 0;
  friend bool operator==(const InertiaTriple&, const InertiaTriple&) = default;
};

/// Generalized eigenvalues α_j/β_j of the pencil, β_j ≥ 0.
struct GeneralizedSpectrum {
  CVector alpha;
  Vector beta;
};

void require_finite(const Matrix& a, std::string_view name);
void require_square(const Matrix& a, std::string_view name);
void require_shape(const Matrix& a, Index rows, Index cols,
                   std::string_view name);

/// Frobenius norm of P − Pᵀ.
double symmetry_defect(const Matrix& p);

Matrix symmetrize(const Matrix& p);

CVector eigenvalues(const Matrix& a);

/// Largest eigenvalue modulus. Zero for the empty matrix.
double spectral_radius(const Matrix& a);

/// Eigenvalues are classified against tol·(1 + ‖P‖). The same relative
/// tolerance bounds the admissible asymmetry of P.
InertiaTriple hermitian_inertia(const Matrix& p, double tol);

/// Orthonormal basis of the deflating subspace of λM − N belonging to the
/// eigenvalues strictly inside the unit disk. Infinite eigenvalues count as
/// outside. Throws kDichotomyFailure when an eigenvalue lies within
/// kDichotomyTolerance of the circle and kSubspaceDimensionMismatch when the
/// stable count differs from dim.
Matrix stable_deflating_subspace(const Pencil& pencil, Index dim);

GeneralizedSpectrum generalized_eigenvalues(const Pencil& pencil);

/// Smallest of the min(rows, cols) singular values. Zero for empty input.
double min_singular_value(const Matrix& a);
double min_singular_value(const CMatrix& a);
double max_singular_value(const Matrix& a);
double max_singular_value(const CMatrix& a);

/// Lower-triangular L with L·Lᵀ = P.
Matrix cholesky_spd(const Matrix& p);

/// Lower-triangular G with Gᵀ·G = P, positive diagonal.
Matrix reverse_cholesky_spd(const Matrix& p);

/// Symmetric positive semidefinite square root.
Matrix sym_sqrt(const Matrix& p);

/// Inverse of sym_sqrt. Requires P positive definite.
Matrix sym_inv_sqrt(const Matrix& p);

/// Solves AᵀXA − X + C = 0 for stable A (|λ_i λ_j| ≠ 1).
Matrix solve_stein(const Matrix& a, const Matrix& c);

/// Row-to-column assignment minimizing the total cost of a square matrix.
/// Entry i of the result is the column assigned to row i.
std::vector<Index> min_cost_assignment(const Matrix& cost);

/// Largest pairwise distance after optimally matching two equal-size
/// multisets of complex numbers.
double matched_distance(const CVector& a, const CVector& b);

Matrix identity(Index n);

/// Block-diagonal [[a, 0], [0, b]].
Matrix block_diag(const Matrix& a, const Matrix& b);

Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

}  // namespace hyphinf::num

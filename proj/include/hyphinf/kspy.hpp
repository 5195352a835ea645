#pragma once

#include "hyphinf/numkernel.hpp"

namespace hyphinf::kspy {

using num::Index;
using num::Matrix;

/// J = diag(−I_{m1}, I_{m2}).
struct Signature {
  Index m1 = 0;
  Index m2 = 0;

  Index size() const { return m1 + m2; }
  Matrix J() const;
};

/// Discrete Popov triplet (A, B, Q, L, R) with its signature.
struct PopovTriplet {
  Matrix A, B, Q, L, R;
  Signature sig;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  /// Shapes, finiteness and symmetry of Q and R.
  void validate() const;
};

struct KspyResiduals {
  /// ‖R + BᵀXB − VᵀJV‖
  double r_factor = 0.0;
  /// ‖L + AᵀXB − WᵀJV‖
  double l_factor = 0.0;
  /// ‖Q + AᵀXA − X − WᵀJW‖
  double q_factor = 0.0;

  double max() const;
};

struct KspyFactors {
  Matrix V;
  Matrix W;
};

struct KspySolution {
  Matrix X, V, W, F;
  KspyResiduals residuals;
  double riccati_residual = 0.0;
  double closed_loop_radius = 0.0;
  double x_min_eigenvalue = 0.0;
  bool x_psd = false;
};

struct DareOptions {
  /// Newton refinement steps tried after the subspace solve.
  int newton_steps = 2;
};

/// Frobenius norm of Q + AᵀXA − X − (L + AᵀXB)(R + BᵀXB)⁻¹(Lᵀ + BᵀXA).
double riccati_residual(const PopovTriplet& t, const Matrix& x);

/// Symmetric X making A + BF Schur stable, from the stable deflating
/// subspace of the extended symplectic pencil.
Matrix solve_stabilizing_dare(const PopovTriplet& t,
                              const DareOptions& options = {});

/// F = −(R + BᵀXB)⁻¹(Lᵀ + BᵀXA).
Matrix stabilizing_feedback(const PopovTriplet& t, const Matrix& x);

/// Lower-triangular V with VᵀJV = P. Diagonal blocks carry positive
/// diagonals, which fixes V uniquely.
Matrix j_lower_factorize(const Matrix& p, Signature sig);

KspyFactors kspy_factorize(const PopovTriplet& t, const Matrix& x);

KspyResiduals kspy_residuals(const PopovTriplet& t, const Matrix& x,
                             const KspyFactors& f);

/// Full KSPY triple with certificates. X ⪰ 0 is reported, not enforced.
KspySolution solve_kspy(const PopovTriplet& t,
                        const DareOptions& options = {});

}  // namespace hyphinf::kspy

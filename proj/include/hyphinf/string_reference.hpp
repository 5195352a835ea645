#pragma once

#include <cmath>

#include "hyphinf/state_space.hpp"

namespace hyphinf::reference {

using num::Complex;

/// Parameters of the published string design.
struct StringExampleParameters {
  double sigma = 6.0;
  double gamma = 0.2;
  double a_q = -0.5;
  double b_q = 0.5 * std::sqrt(5.0);
  double c_q = 0.9 * std::sqrt(5.0);
  double a_tilde = 0.25;
  double b_tilde = 2.0;
};

/// Published closed forms for the string fixture. Misprints are kept as
/// published so that reports can flag them against computed values.
struct PrintedStringExample {
  TwoPortStateSpace discrete;
  TwoPortStateSpace scaled;
  Matrix Qc, Lc, Rc;
  Matrix Qo, Lo, Ro;
  Matrix X, Y;
  /// Printed A + BF, whose entry omits γ.
  Matrix a_plus_bf;
  Matrix Vc, Wc, Vo, Wo;
  Matrix Qx, Lx, Rx;
  Matrix Z, Vx, Wx;
  Matrix C2F1;
  double Sc = 0.0;
  double Sx = 0.0;
  TwoPortStateSpace sigma_g_scaled;
  TwoPortStateSpace sigma_g;
  StateSpace sigma_q;
  /// LFT(Σ_g, Σ_Q) before the feedthrough correction.
  StateSpace controller;
  /// Four-state corrected realization.
  StateSpace controller_opt;
  /// Printed six-state closed loop. B keeps the first six of the seven
  /// printed entries.
  StateSpace closed_loop;
  Index printed_b_cl_length = 7;
  num::CVector printed_eigenvalues;
  /// |B_Q C_Q / (1 + A_Q)|, the admissibility test as published.
  double sigma_q_ratio = 0.0;
};

PrintedStringExample printed_string_example(
    const StringExampleParameters& params = {});

/// Published closed-loop transfer function.
Complex printed_closed_loop_transfer(const StringExampleParameters& params,
                                     Complex z);

}  // namespace hyphinf::reference

#pragma once

#include <string_view>

#include "hyphinf/error.hpp"
#include "hyphinf/numkernel.hpp"

namespace hyphinf {

using num::Index;
using num::Matrix;

/// Discrete-time quadruple x⁺ = A x + B u, y = C x + D u.
struct StateSpace {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  Index states() const { return A.rows(); }
  Index inputs() const { return B.cols(); }
  Index outputs() const { return C.rows(); }

  /// Throws on inconsistent block shapes or non-finite entries.
  void validate(std::string_view name) const;

  /// Static gain with no states.
  static StateSpace static_gain(const Matrix& d);
};

/// Two-port quadruple with inputs (w, u) and outputs (z, y).
struct TwoPortStateSpace {
  Matrix A;
  Matrix B1, B2;
  Matrix C1, C2;
  Matrix D11, D12;
  Matrix D21, D22;

  Index n() const { return A.rows(); }
  Index k() const { return B1.cols(); }
  Index p() const { return B2.cols(); }
  Index l() const { return C1.rows(); }
  Index m() const { return C2.rows(); }

  void validate(std::string_view name) const;
};

/// Feedback interconnection of a two-port with a controller closing the
/// (y → u) channel.
struct LftResult {
  StateSpace system;
  /// det(I − D22·D_k).
  double det_s = 1.0;
};

/// Closes u = K y around G. Throws `ill_posed` when I − D22·D_k is singular.
LftResult lft(const TwoPortStateSpace& g, const StateSpace& k,
              ErrorCode ill_posed);

}  // namespace hyphinf

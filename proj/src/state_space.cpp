#include "hyphinf/state_space.hpp"

#include <string>

namespace hyphinf {
namespace {

using num::require_finite;
using num::require_shape;

bool invertible(const Matrix& s) {
  return num::min_singular_value(s) > 1e-12 * (1.0 + s.norm());
}

}  // namespace

void StateSpace::validate(std::string_view name) const {
  const std::string base(name);
  num::require_square(A, base + ".A");
  const Index n = A.rows();
  if (B.rows() != n) fail(ErrorCode::kDimension, base + ".B row count");
  if (C.cols() != n) fail(ErrorCode::kDimension, base + ".C column count");
  require_shape(D, C.rows(), B.cols(), base + ".D");
  require_finite(A, base + ".A");
  require_finite(B, base + ".B");
  require_finite(C, base + ".C");
  require_finite(D, base + ".D");
}

StateSpace StateSpace::static_gain(const Matrix& d) {
  return {Matrix(0, 0), Matrix(0, d.cols()), Matrix(d.rows(), 0), d};
}

void TwoPortStateSpace::validate(std::string_view name) const {
  const std::string base(name);
  num::require_square(A, base + ".A");
  const Index nn = n();
  require_shape(B1, nn, B1.cols(), base + ".B1");
  require_shape(B2, nn, B2.cols(), base + ".B2");
  require_shape(C1, C1.rows(), nn, base + ".C1");
  require_shape(C2, C2.rows(), nn, base + ".C2");
  require_shape(D11, l(), k(), base + ".D11");
  require_shape(D12, l(), p(), base + ".D12");
  require_shape(D21, m(), k(), base + ".D21");
  require_shape(D22, m(), p(), base + ".D22");
  for (const Matrix* x : {&A, &B1, &B2, &C1, &C2, &D11, &D12, &D21, &D22}) {
    require_finite(*x, base);
  }
}

LftResult lft(const TwoPortStateSpace& g, const StateSpace& k,
              ErrorCode ill_posed) {
  g.validate("plant");
  k.validate("controller");
  if (k.inputs() != g.m() || k.outputs() != g.p()) {
    fail(ErrorCode::kDimension,
         "controller must map " + std::to_string(g.m()) + " measurements to " +
             std::to_string(g.p()) + " inputs");
  }
  const Index n = g.n();
  const Index nk = k.states();
  const Matrix s = num::identity(g.m()) - g.D22 * k.D;
  const Matrix st = num::identity(g.p()) - k.D * g.D22;
  if (!invertible(s) || !invertible(st)) {
    fail(ill_posed, "I - D22*Dc is singular");
  }
  Eigen::PartialPivLU<Matrix> s_lu(s);
  Eigen::PartialPivLU<Matrix> st_lu(st);
  const Matrix st_inv_d = st_lu.solve(k.D);
  const Matrix d_s_inv =
      s.transpose().partialPivLu().solve(k.D.transpose()).transpose();
  if ((st_inv_d - d_s_inv).norm() > 1e-12 * (1.0 + st_inv_d.norm())) {
    fail(ErrorCode::kNumerical, "push-through identity check failed");
  }
  const Matrix s_inv_c2 = s_lu.solve(g.C2);
  const Matrix s_inv_d21 = s_lu.solve(g.D21);
  const Matrix s_inv_d22 = s_lu.solve(g.D22);
  const Matrix st_inv_ck = st_lu.solve(k.C);

  LftResult out;
  out.det_s = s_lu.determinant();
  StateSpace& cl = out.system;
  cl.A.resize(n + nk, n + nk);
  cl.A.topLeftCorner(n, n) = g.A + g.B2 * st_inv_d * g.C2;
  cl.A.topRightCorner(n, nk) = g.B2 * st_inv_ck;
  cl.A.bottomLeftCorner(nk, n) = k.B * s_inv_c2;
  cl.A.bottomRightCorner(nk, nk) = k.A + k.B * s_inv_d22 * k.C;
  cl.B.resize(n + nk, g.k());
  cl.B.topRows(n) = g.B1 + g.B2 * st_inv_d * g.D21;
  cl.B.bottomRows(nk) = k.B * s_inv_d21;
  cl.C.resize(g.l(), n + nk);
  cl.C.leftCols(n) = g.C1 + g.D12 * d_s_inv * g.C2;
  cl.C.rightCols(nk) = g.D12 * st_inv_ck;
  cl.D = g.D11 + g.D12 * d_s_inv * g.D21;
  return out;
}

}  // namespace hyphinf

#include <gtest/gtest.h>

#include "hyphinf/kspy.hpp"
#include "hyphinf/synth.hpp"
#include "support/oracles.hpp"

namespace hyphinf {
namespace {

using namespace kspy;
using testing::random_matrix;
using testing::Rng;
using num::Vector;

synth::DiscretePlant scaled_string(double gamma) {
  synth::DiscretePlant s = synth::scale_plant(
      pde::to_discrete(pde::string_fixture(1.0 / 6.0, 1.0 / 6.0)), gamma);
  s.D22.setZero();
  return s;
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

TEST(StringRiccati, ControlClosedForms) {
  const testing::StringClosedForms cf{6.0, 0.2};
  const KspySolution s = solve_kspy(synth::build_popov_star(scaled_string(0.2)));
  EXPECT_LT(max_abs(s.X - cf.X()), 1e-8);
  EXPECT_NEAR(s.X(1, 1), 65.454545454545, 1e-9);
  EXPECT_LT(max_abs(s.V - cf.Vc()), 1e-8);
  EXPECT_LT(max_abs(s.W - cf.Wc()), 1e-8);
  EXPECT_LE(s.residuals.max(), 1e-10);
  EXPECT_TRUE(s.x_psd);
}

TEST(StringRiccati, FilterClosedForms) {
  const testing::StringClosedForms cf{6.0, 0.2};
  const KspySolution s = solve_kspy(synth::build_popov_obs(scaled_string(0.2)));
  EXPECT_LT(max_abs(s.X - cf.Y()), 1e-8);
  EXPECT_NEAR(s.X(0, 0), 0.454545454545, 1e-9);
  EXPECT_LT(max_abs(s.V - cf.Vo()), 1e-8);
  EXPECT_LT(max_abs(s.W - cf.Wo()), 1e-8);
  EXPECT_LE(s.residuals.max(), 1e-10);
}

TEST(StringRiccati, ClosedLoopMatrix) {
  const synth::DiscretePlant sp = scaled_string(0.2);
  const KspySolution s = solve_kspy(synth::build_popov_star(sp));
  const Matrix abf = sp.A + num::hstack(sp.B1, sp.B2) * s.F;
  const double s2 = 36.0 * 0.04;
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 1) = (s2 + 1.0) / (s2 - 1.0);
  EXPECT_LT(max_abs(abf - expected), 1e-10);
  EXPECT_NEAR(expected(0, 1), 5.545454545454, 1e-9);
}

TEST(StringRiccati, GammaBelowThresholdFails) {
  EXPECT_THROW(solve_kspy(synth::build_popov_star(scaled_string(0.1))), Error);
}

TEST(Dare, MatchesValueIterationOnLqr) {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 1 + trial % 4;
    const Index m = 1 + trial % 2;
    PopovTriplet t;
    t.A = testing::random_with_radius(rng, n, 0.5 + 0.1 * (trial % 10));
    t.B = random_matrix(rng, n, m);
    const Matrix c = random_matrix(rng, n, n);
    t.Q = c.transpose() * c + 0.1 * num::identity(n);
    t.L = Matrix::Zero(n, m);
    t.R = num::identity(m);
    t.sig = {0, m};
    const Matrix x = solve_stabilizing_dare(t);
    const Matrix oracle =
        testing::riccati_value_iteration(t.A, t.B, t.Q, t.L, t.R, 4000);
    EXPECT_LT((x - oracle).norm(), 1e-8 * (1.0 + oracle.norm())) << trial;
    EXPECT_LT(riccati_residual(t, x), 1e-9 * (1.0 + x.norm()));
    const Matrix f = stabilizing_feedback(t, x);
    EXPECT_LT(num::spectral_radius(t.A + t.B * f), 1.0);
  }
}

TEST(Dare, NoStabilizingSolution) {
  PopovTriplet t;
  t.A = Matrix::Constant(1, 1, 2.0);
  t.B = Matrix::Zero(1, 1);
  t.Q = Matrix::Constant(1, 1, 1.0);
  t.L = Matrix::Zero(1, 1);
  t.R = Matrix::Constant(1, 1, 1.0);
  t.sig = {0, 1};
  EXPECT_THROW(solve_stabilizing_dare(t), Error);
}

TEST(JLower, FactorsIndefiniteMatrices) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Signature sig{1 + trial % 2, 1 + trial % 3};
    const Index s = sig.size();
    const Matrix v0 = random_matrix(rng, s, s).triangularView<Eigen::Lower>();
    Matrix v = v0;
    for (Index i = 0; i < s; ++i) v(i, i) = 0.5 + std::abs(v0(i, i));
    const Matrix p = v.transpose() * sig.J() * v;
    const Matrix got = j_lower_factorize(p, sig);
    EXPECT_LT((got.transpose() * sig.J() * got - p).norm(), 1e-10 * p.norm());
    EXPECT_LT(got.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm(),
              1e-14);
    EXPECT_GT(got.diagonal().minCoeff(), 0.0);
    EXPECT_LT((got - v).norm(), 1e-8 * v.norm());
  }
}

TEST(JLower, SignConditionViolated) {
  Matrix p = num::identity(2);
  try {
    j_lower_factorize(p, {1, 1});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSignConditionViolated);
  }
}

TEST(Signature, J) {
  const Matrix j = Signature{1, 2}.J();
  EXPECT_EQ(j.diagonal(), (Vector(3) << -1, 1, 1).finished());
}

TEST(Kspy, ResidualsOnRandomGames) {
  Rng rng(37);
  int solved = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 2 + trial % 3;
    PopovTriplet t;
    t.A = testing::random_with_radius(rng, n, 0.8);
    const Matrix b1 = 0.2 * random_matrix(rng, n, 1);
    const Matrix b2 = random_matrix(rng, n, 1);
    t.B = num::hstack(b1, b2);
    const Matrix c = random_matrix(rng, 1, n);
    t.Q = c.transpose() * c;
    const Matrix d = (Matrix(1, 2) << 0.0, 1.0).finished();
    t.L = c.transpose() * d;
    t.R = d.transpose() * d - num::block_diag(num::identity(1), Matrix::Zero(1, 1));
    t.sig = {1, 1};
    try {
      const KspySolution s = solve_kspy(t);
      ++solved;
      EXPECT_LE(s.residuals.max(), 1e-8 * (1.0 + s.X.norm()));
      EXPECT_LT(s.closed_loop_radius, 1.0);
      const Matrix p = t.R + t.B.transpose() * s.X * t.B;
      EXPECT_LT((s.V.transpose() * t.sig.J() * s.V - p).norm(),
                1e-8 * (1.0 + p.norm()));
    } catch (const Error&) {
    }
  }
  EXPECT_GT(solved, 20);
}

TEST(Popov, ValidateRejectsAsymmetricQ) {
  PopovTriplet t;
  t.A = num::identity(2);
  t.B = Matrix::Zero(2, 1);
  t.Q = (Matrix(2, 2) << 1, 2, 0, 1).finished();
  t.L = Matrix::Zero(2, 1);
  t.R = num::identity(1);
  t.sig = {0, 1};
  EXPECT_THROW(t.validate(), Error);
}

}  // namespace
}  // namespace hyphinf

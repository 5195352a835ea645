#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "hyphinf/clp.hpp"
#include "hyphinf/string_reference.hpp"
#include "hyphinf/synth.hpp"
#include "support/oracles.hpp"

namespace hyphinf {
namespace {

using namespace clp;
using testing::random_matrix;
using testing::Rng;

constexpr double kPi = std::numbers::pi;

StateSpace scalar_system(double a, double b, double c, double d) {
  return {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
          Matrix::Constant(1, 1, c), Matrix::Constant(1, 1, d)};
}

pde::DiscretePlant string_plant() {
  return pde::to_discrete(pde::string_fixture(1.0 / 6.0, 1.0 / 6.0));
}

pde::DiscretePlant random_plant(Rng& rng, Index n, Index k, Index p, Index l,
                                Index m, double d22_scale) {
  pde::DiscretePlant g;
  g.A = testing::random_with_radius(rng, n, 0.9);
  g.B1 = random_matrix(rng, n, k);
  g.B2 = random_matrix(rng, n, p);
  g.C1 = random_matrix(rng, l, n);
  g.C2 = random_matrix(rng, m, n);
  g.D11 = random_matrix(rng, l, k);
  g.D12 = random_matrix(rng, l, p);
  g.D21 = random_matrix(rng, m, k);
  g.D22 = d22_scale * random_matrix(rng, m, p);
  g.travel_time = 0.5;
  return g;
}

double max_abs(const Matrix& a) {
  return a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
}

TEST(TransferEval, ScalarAtTwo) {
  const CMatrix g = transfer_eval(scalar_system(0.5, 1, 1, 0), Complex(2.0, 0.0));
  EXPECT_NEAR(g(0, 0).real(), 1.0 / 1.5, 1e-15);
  EXPECT_EQ(g(0, 0).imag(), 0.0);
}

TEST(TransferEval, StaticSystem) {
  const Matrix d = (Matrix(2, 1) << 3.0, -1.0).finished();
  const StateSpace s = StateSpace::static_gain(d);
  for (double t : {0.0, 1.0, 4.0}) {
    EXPECT_EQ(transfer_eval(s, std::polar(1.0, t)), d.cast<Complex>());
  }
}

TEST(TransferEval, PoleProximity) {
  try {
    transfer_eval(scalar_system(0.5, 1, 1, 0), Complex(0.5 + 1e-13, 0.0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPoleProximity);
  }
}

TEST(TransferEval, ConjugateSymmetryAndOracle) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace s = testing::random_stable_system(rng, 4, 2, 3, 0.8);
    const Complex z = std::polar(1.0 + 0.1 * trial, 0.3 * trial + 0.1);
    const CMatrix g = transfer_eval(s, z);
    EXPECT_LT((g - transfer_eval(s, std::conj(z)).conjugate()).norm(),
              1e-12 * (1.0 + g.norm()));
    EXPECT_LT((g - testing::transfer(s, z)).norm(), 1e-11 * (1.0 + g.norm()));
  }
}

TEST(HinfNorm, FirstOrderScalar) {
  const NormResult r = hinf_norm_disc(scalar_system(0.5, 1, 1, 0));
  EXPECT_NEAR(r.norm, 2.0, 1e-12);
  EXPECT_NEAR(r.theta, 0.0, 1e-6);
}

TEST(HinfNorm, PeakAtPi) {
  const NormResult r = hinf_norm_disc(scalar_system(-0.5, 1, 0.9, 0));
  EXPECT_NEAR(r.norm, 1.8, 1e-12);
  EXPECT_NEAR(r.theta, kPi, 1e-6);
}

TEST(HinfNorm, StaticFeedthrough) {
  const Matrix d = (Matrix(2, 2) << 1.0, 2.0, 0.0, 1.0).finished();
  const StateSpace s = StateSpace::static_gain(d);
  EXPECT_NEAR(hinf_norm_disc(s).norm, 1.0 + std::sqrt(2.0), 1e-14);
  ClosedLoop cl{s, 0.7, 1.0};
  EXPECT_NEAR(hinf_norm_cont(cl).norm, 1.0 + std::sqrt(2.0), 1e-14);
}

TEST(HinfNorm, UnstableRejected) {
  try {
    hinf_norm_disc(scalar_system(1.2, 1, 1, 0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnstableSystem);
  }
}

TEST(HinfNorm, DenseGridOracleAndScaling) {
  Rng rng(53);
  for (int trial = 0; trial < 15; ++trial) {
    const StateSpace s = testing::random_stable_system(rng, 1 + trial % 4,
                                                       1 + trial % 2, 2, 0.85);
    const NormResult r = hinf_norm_disc(s);
    const double oracle = testing::dense_grid_norm(s, 20000);
    EXPECT_GE(r.norm, oracle - 1e-12);
    EXPECT_LT(r.norm - oracle, 1e-3 * oracle);
    const double alpha = -2.5;
    StateSpace scaled = s;
    scaled.C *= alpha;
    scaled.D *= alpha;
    EXPECT_NEAR(hinf_norm_disc(scaled).norm, std::abs(alpha) * r.norm,
                1e-10 * (1.0 + r.norm));
  }
}

TEST(HinfNorm, ContinuousEqualsDiscrete) {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    ClosedLoop cl{testing::random_stable_system(rng, 3, 1, 1, 0.9), 0.25, 1.0};
    const NormResult d = hinf_norm_disc(cl.sys);
    const ContinuousNormResult c = hinf_norm_cont(cl);
    EXPECT_EQ(c.norm, d.norm);
    EXPECT_EQ(c.omega, d.theta / cl.travel_time);
    const CMatrix gs = transfer_eval_cont(cl, Complex(0.0, c.omega));
    EXPECT_LT((gs - transfer_eval(cl.sys, std::polar(1.0, d.theta))).norm(),
              1e-10);
  }
}

TEST(CloseLoop, ZeroFeedthroughBlockForm) {
  Rng rng(57);
  const pde::DiscretePlant p = random_plant(rng, 3, 2, 1, 2, 2, 1.0);
  StateSpace c = testing::random_stable_system(rng, 2, 2, 1, 0.5);
  c.D.setZero();
  const ClosedLoop cl = close_loop(p, c);
  EXPECT_EQ(cl.det_s, 1.0);
  EXPECT_LT(max_abs(cl.sys.A.topLeftCorner(3, 3) - p.A), 1e-15);
  EXPECT_LT(max_abs(cl.sys.A.topRightCorner(3, 2) - p.B2 * c.C), 1e-14);
  EXPECT_LT(max_abs(cl.sys.A.bottomLeftCorner(2, 3) - c.B * p.C2), 1e-14);
  EXPECT_LT(max_abs(cl.sys.A.bottomRightCorner(2, 2) -
                    (c.A + c.B * p.D22 * c.C)),
            1e-14);
  EXPECT_EQ(cl.travel_time, p.travel_time);
}

// G11 + G12 K (I − G22 K)⁻¹ G21 evaluated pointwise.
num::CMatrix feedback_oracle(const pde::DiscretePlant& p, const StateSpace& c,
                             Complex z) {
  const auto part = [&](const Matrix& b, const Matrix& cc, const Matrix& d) {
    return testing::transfer({p.A, b, cc, d}, z);
  };
  const num::CMatrix g11 = part(p.B1, p.C1, p.D11);
  const num::CMatrix g12 = part(p.B2, p.C1, p.D12);
  const num::CMatrix g21 = part(p.B1, p.C2, p.D21);
  const num::CMatrix g22 = part(p.B2, p.C2, p.D22);
  const num::CMatrix k = testing::transfer(c, z);
  const num::CMatrix s = num::CMatrix::Identity(p.m(), p.m()) - g22 * k;
  return g11 + g12 * k * s.fullPivLu().solve(g21);
}

TEST(CloseLoop, RandomInstancesMatchFormulas) {
  Rng rng(59);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 1 + trial % 4, k = 1 + trial % 2, p = 1 + trial % 3;
    const Index l = 1 + (trial + 1) % 2, m = 1 + (trial + 2) % 3;
    const pde::DiscretePlant g = random_plant(rng, n, k, p, l, m, 1.0);
    StateSpace c = testing::random_stable_system(rng, 2, m, p, 0.6);
    const double dn = num::max_singular_value(g.D22);
    c.D *= 0.5 / (dn * std::max(1e-12, num::max_singular_value(c.D)));
    const ClosedLoop cl = close_loop(g, c);
    EXPECT_GT(std::abs(cl.det_s), 0.0);
    ASSERT_EQ(cl.sys.A.rows(), n + 2);

    const Matrix st = num::identity(p) - c.D * g.D22;
    const Matrix s = num::identity(m) - g.D22 * c.D;
    const Matrix stinv_dc = st.partialPivLu().solve(c.D);
    EXPECT_LT(max_abs(stinv_dc - c.D * s.inverse()), 1e-12 * (1.0 + max_abs(stinv_dc)));
    EXPECT_LT(max_abs(cl.sys.A.topLeftCorner(n, n) - g.A - g.B2 * stinv_dc * g.C2),
              1e-12 * (1.0 + max_abs(cl.sys.A)));
    EXPECT_LT(max_abs(cl.sys.D - g.D11 - g.D12 * c.D * s.inverse() * g.D21),
              1e-12 * (1.0 + max_abs(cl.sys.D)));
    for (double t : {0.2, 2.4}) {
      const Complex z = std::polar(2.5, t);
      const num::CMatrix want = feedback_oracle(g, c, z);
      EXPECT_LT((transfer_eval(cl.sys, z) - want).norm(), 1e-9 * (1.0 + want.norm()));
    }
  }
}

TEST(CloseLoop, IllPosedInterconnection) {
  pde::DiscretePlant p = string_plant();
  const StateSpace c = StateSpace::static_gain(Matrix::Constant(1, 1, -1.0 / 6.0));
  try {
    close_loop(p, c);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClosedLoopIllPosed);
  }
}

TEST(Assumptions, StringScaledPlantPasses) {
  const AssumptionReport r =
      check_assumptions(synth::scale_plant(string_plant(), 0.2));
  EXPECT_TRUE(r.stabilizable);
  EXPECT_TRUE(r.detectable);
  EXPECT_TRUE(r.rank12);
  EXPECT_TRUE(r.rank21);
  for (const Witness& w : r.witnesses) EXPECT_GE(w.margin, 0.0);
}

TEST(Assumptions, UnstabilizableScalar) {
  pde::DiscretePlant p;
  p.A = Matrix::Constant(1, 1, 2.0);
  p.B1 = Matrix::Constant(1, 1, 1.0);
  p.B2 = Matrix::Zero(1, 1);
  p.C1 = Matrix::Constant(1, 1, 1.0);
  p.C2 = Matrix::Constant(1, 1, 1.0);
  p.D11 = Matrix::Zero(1, 1);
  p.D12 = Matrix::Constant(1, 1, 1.0);
  p.D21 = Matrix::Constant(1, 1, 1.0);
  p.D22 = Matrix::Zero(1, 1);
  const AssumptionReport r = check_assumptions(p);
  EXPECT_FALSE(r.stabilizable);
  EXPECT_TRUE(r.detectable);
  EXPECT_FALSE(r.all_passed());
}

TEST(Assumptions, ZeroRegulatedOutputFailsRank12) {
  pde::DiscretePlant p = string_plant();
  p.C1.setZero();
  p.D12.setZero();
  const AssumptionReport r = check_assumptions(p);
  EXPECT_FALSE(r.rank12);
  EXPECT_TRUE(r.stabilizable);
}

// Invariant zero of (A, B2, C1, D12) placed at z = −1.
TEST(Assumptions, ZeroOnCircleDetected) {
  pde::DiscretePlant p;
  p.A = Matrix::Constant(1, 1, 0.5);
  p.B1 = Matrix::Constant(1, 1, 1.0);
  p.B2 = Matrix::Constant(1, 1, 1.0);
  p.C1 = Matrix::Constant(1, 1, 1.0);
  p.C2 = Matrix::Constant(1, 1, 1.0);
  p.D11 = Matrix::Zero(1, 1);
  p.D12 = Matrix::Constant(1, 1, 1.0 / 1.5);
  p.D21 = Matrix::Constant(1, 1, 1.0);
  p.D22 = Matrix::Zero(1, 1);
  const AssumptionReport r = check_assumptions(p);
  EXPECT_FALSE(r.rank12);
  EXPECT_TRUE(r.rank21);
}

TEST(Sweep, GridAndInsertedPeak) {
  const StateSpace s = scalar_system(-0.5, 1, 1, 0);
  const std::vector<FrequencySample> plain = frequency_sweep(s, 8, 2.0);
  ASSERT_EQ(plain.size(), 8u);
  EXPECT_EQ(plain[0].theta, 0.0);
  EXPECT_NEAR(plain[4].theta, kPi, 1e-15);
  EXPECT_NEAR(plain[4].gain, 2.0, 1e-14);
  EXPECT_EQ(plain[3].omega, plain[3].theta / 2.0);

  const NormResult peak{2.5, 1.0};
  const std::vector<FrequencySample> with = frequency_sweep(s, 8, 2.0, peak);
  ASSERT_EQ(with.size(), 9u);
  EXPECT_EQ(with[2].theta, 1.0);
  EXPECT_EQ(with[2].gain, 2.5);
}

TEST(Sweep, StaticSingleRow) {
  const StateSpace s = StateSpace::static_gain(Matrix::Constant(1, 1, 0.3));
  const std::vector<FrequencySample> rows =
      frequency_sweep(s, 1, 1.0, hinf_norm_disc(s));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].theta, 0.0);
  EXPECT_EQ(rows[0].gain, 0.3);
}

TEST(Sweep, CsvFormat) {
  std::ostringstream out;
  write_freqresp_csv(out, {{0.0, 0.0, 1.0 / 3.0}, {0.5, 0.25, 2.0}});
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "theta,omega,norm_G");
  EXPECT_EQ(row, "0,0,0.33333333333333331");
}

TEST(StringClosedLoop, AdmissibleDesign) {
  const pde::DiscretePlant p = string_plant();
  const StateSpace q{Matrix::Constant(1, 1, -0.5),
                     Matrix::Constant(1, 1, 0.2 * std::sqrt(5.0) / 2.0),
                     Matrix::Constant(1, 1, 0.2 * 0.9 * std::sqrt(5.0)),
                     Matrix::Zero(1, 1)};
  const synth::SynthesisResult r = synth::synthesize(p, 0.2, q);
  const ClosedLoop cl = close_loop(p, r.controller);
  const NormResult n = hinf_norm_disc(cl.sys);
  EXPECT_LT(n.norm, 0.2);
  EXPECT_GE(n.norm, testing::dense_grid_norm(cl.sys, 8192) - 1e-12);
  const reference::StringExampleParameters prm{6.0, 0.2, -0.5, 0.1 * std::sqrt(5.0),
                                               0.18 * std::sqrt(5.0)};
  const Complex z = std::polar(1.0, kPi / 4.0);
  EXPECT_LT(std::abs(transfer_eval(cl.sys, z)(0, 0) -
                     reference::printed_closed_loop_transfer(prm, z)),
            1e-8);
}

TEST(Threads, AtLeastOne) { EXPECT_GE(worker_threads(), 1); }

}  // namespace
}  // namespace hyphinf

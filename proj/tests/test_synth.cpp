#include <gtest/gtest.h>

#include "hyphinf/clp.hpp"
#include "hyphinf/string_reference.hpp"
#include "hyphinf/synth.hpp"
#include "support/oracles.hpp"

namespace hyphinf {
namespace {

using namespace synth;
using testing::random_matrix;
using testing::Rng;

DiscretePlant string_plant() {
  return pde::to_discrete(pde::string_fixture(1.0 / 6.0, 1.0 / 6.0));
}

StateSpace scalar_system(double a, double b, double c, double d) {
  return {Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b),
          Matrix::Constant(1, 1, c), Matrix::Constant(1, 1, d)};
}

/// Σ_Q with gains B_Q·γ and C_Q·γ, which satisfies the norm bound.
StateSpace admissible_q(double gamma) {
  return scalar_system(-0.5, gamma * std::sqrt(5.0) / 2.0,
                       gamma * 0.9 * std::sqrt(5.0), 0.0);
}

double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

void expect_two_port_near(const TwoPortStateSpace& a, const TwoPortStateSpace& b,
                          double tol) {
  EXPECT_LT(max_abs(a.A - b.A), tol);
  EXPECT_LT(max_abs(a.B1 - b.B1), tol);
  EXPECT_LT(max_abs(a.B2 - b.B2), tol);
  EXPECT_LT(max_abs(a.C1 - b.C1), tol);
  EXPECT_LT(max_abs(a.C2 - b.C2), tol);
  EXPECT_LT(max_abs(a.D11 - b.D11), tol);
  EXPECT_LT(max_abs(a.D12 - b.D12), tol);
  EXPECT_LT(max_abs(a.D21 - b.D21), tol);
  EXPECT_LT(max_abs(a.D22 - b.D22), tol);
}

TEST(Scaling, StringScaledPlant) {
  const DiscretePlant s = scale_plant(string_plant(), 0.2);
  const double rg = std::sqrt(0.2);
  EXPECT_NEAR(s.B1(0, 0), 1.0 / (6.0 * rg), 1e-14);
  EXPECT_NEAR(s.B2(1, 0), rg, 1e-14);
  EXPECT_NEAR(s.C1(0, 1), 2.0 / rg, 1e-14);
  EXPECT_NEAR(s.C2(0, 0), 12.0 * rg, 1e-14);
  EXPECT_NEAR(s.D11(0, 0), 1.0 / 1.2, 1e-14);
  EXPECT_NEAR(s.D22(0, 0), -1.2, 1e-14);
}

TEST(Solvability, StringConditions) {
  DiscretePlant s = scale_plant(string_plant(), 0.2);
  s.D22.setZero();
  const SynthesisReport r = check_solvability(s);
  EXPECT_TRUE(r.solvable());
  EXPECT_LE(r.rho_xy, 1e-14);
  EXPECT_FALSE(r.first_failure.has_value());
}

TEST(Solvability, GammaBelowOneOverSigmaFailsConditionA) {
  for (double gamma : {0.1, 0.15}) {
    DiscretePlant s = scale_plant(string_plant(), gamma);
    s.D22.setZero();
    const SynthesisReport r = check_solvability(s);
    EXPECT_FALSE(r.solvable());
    ASSERT_TRUE(r.first_failure.has_value());
    EXPECT_EQ(*r.first_failure, "condition_a");
  }
}

TEST(Generator, StringClosedForms) {
  DiscretePlant s = scale_plant(string_plant(), 0.2);
  s.D22.setZero();
  SynthesisReport r = check_solvability(s);
  const TwoPortStateSpace g = unscale_sigma_g(build_sigma_g(s, r), 0.2);
  const testing::StringClosedForms cf{6.0, 0.2};
  expect_two_port_near(g, cf.sigma_g(), 1e-8);
  EXPECT_NEAR(g.D11(0, 0), 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(g.B2(1, 0), -0.276385, 1e-6);
  EXPECT_LT(r.z_consistency, 1e-10);
}

TEST(Generator, RequiresConditions) {
  DiscretePlant s = scale_plant(string_plant(), 0.1);
  s.D22.setZero();
  SynthesisReport r = check_solvability(s);
  EXPECT_THROW(build_sigma_g(s, r), Error);
}

TEST(SigmaQ, PrintedParametersViolateBound) {
  const reference::PrintedStringExample e = reference::printed_string_example();
  const SigmaQValidation v = validate_sigma_q(e.sigma_q, 0.2);
  EXPECT_FALSE(v.valid);
  EXPECT_NEAR(v.norm, 4.5, 1e-9);
  EXPECT_NEAR(e.sigma_q_ratio, 4.5, 1e-12);
}

TEST(SigmaQ, AdmissibleAndUnstable) {
  EXPECT_TRUE(validate_sigma_q(admissible_q(0.2), 0.2).valid);
  EXPECT_FALSE(validate_sigma_q(scalar_system(1.5, 0.01, 0.01, 0.0), 10.0).valid);
  EXPECT_TRUE(validate_sigma_q(central_parameter(1, 1), 0.2).valid);
}

TEST(Synthesize, RejectsInadmissibleSigmaQ) {
  const reference::PrintedStringExample e = reference::printed_string_example();
  try {
    synthesize(string_plant(), 0.2, e.sigma_q);
    ADD_FAILURE();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kSigmaQBound);
  }
}

TEST(Synthesize, ConditionFailureNamesCondition) {
  try {
    synthesize(string_plant(), 0.1, central_parameter(1, 1));
    ADD_FAILURE();
  } catch (const SynthesisFailure& f) {
    EXPECT_EQ(*f.report().first_failure, "condition_a");
    EXPECT_NE(std::string(f.what()).find("condition_a"), std::string::npos);
  }
}

TEST(Synthesize, StringClosedLoopMeetsDefinition) {
  const DiscretePlant p = string_plant();
  const SynthesisResult r = synthesize(p, 0.2, admissible_q(0.2));
  EXPECT_NEAR(r.controller.D(0, 0), 1.0 / 6.0, 1e-12);
  const clp::ClosedLoop cl = clp::close_loop(p, r.controller);
  EXPECT_GT(std::abs(cl.det_s), 0.0);
  EXPECT_LT(num::spectral_radius(cl.sys.A), 1.0);
  EXPECT_LT(testing::dense_grid_norm(cl.sys, 20000), 0.2);
}

TEST(Synthesize, ZeroParameterGivesGeneratorBlock) {
  const DiscretePlant p = string_plant();
  const SynthesisResult r = synthesize(p, 0.2, central_parameter(1, 1));
  const TwoPortStateSpace& g = r.sigma_g;
  const StateSpace block{g.A, g.B1, g.C1, g.D11};
  const StateSpace expected = d22_correct(block, p.D22);
  for (double t : {0.3, 1.1, 2.9}) {
    const num::Complex z = std::polar(1.3, t);
    EXPECT_LT((testing::transfer(r.controller, z) - testing::transfer(expected, z))
                  .norm(),
              1e-10);
    EXPECT_LT((testing::transfer(r.uncorrected, z) - testing::transfer(block, z))
                  .norm(),
              1e-10);
  }
}

TEST(D22Correction, MatchesFeedbackFormula) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const StateSpace c = testing::random_stable_system(rng, 3, 2, 2, 0.7);
    const Matrix d22 = 0.3 * random_matrix(rng, 2, 2);
    const StateSpace k = d22_correct(c, d22);
    for (double t : {0.1, 1.7, 4.0}) {
      const num::Complex z = std::polar(1.2, t);
      const num::CMatrix g = testing::transfer(c, z);
      const num::CMatrix expected =
          g * (num::CMatrix::Identity(2, 2) + d22.cast<num::Complex>() * g)
                  .inverse();
      EXPECT_LT((testing::transfer(k, z) - expected).norm(), 1e-10);
    }
  }
}

TEST(D22Correction, PrintedFourStateRealization) {
  const reference::StringExampleParameters prm;
  const reference::PrintedStringExample e = reference::printed_string_example(prm);
  SynthesisOptions opts;
  opts.require_admissible_sigma_q = false;
  const SynthesisResult r = synthesize(string_plant(), 0.2, e.sigma_q, opts);
  for (int i = 0; i < 64; ++i) {
    const num::Complex z = std::polar(3.0, 2.0 * M_PI * (i + 0.5) / 64.0);
    EXPECT_LT(std::abs(testing::transfer(r.controller, z)(0, 0) -
                       testing::transfer(e.controller_opt, z)(0, 0)),
              1e-8);
  }
}

TEST(ScalingCommutation, StringDirectVersusScaled) {
  const DiscretePlant p = string_plant();
  const double gamma = 0.2;
  const StateSpace q = admissible_q(gamma);
  const SynthesisResult direct = synthesize(p, gamma, q);
  const SynthesisResult unit = synthesize(scale_plant(p, gamma), 1.0,
                                          scale_sigma_q(q, gamma));
  const StateSpace back = unscale_controller(unit.controller, gamma);
  EXPECT_LT(max_abs(direct.controller.A - back.A), 1e-10);
  EXPECT_LT(max_abs(direct.controller.B - back.B), 1e-10);
  EXPECT_LT(max_abs(direct.controller.C - back.C), 1e-10);
  EXPECT_LT(max_abs(direct.controller.D - back.D), 1e-10);
}

TEST(ClosedLoopProperty, RandomPlants) {
  Rng rng(43);
  int accepted = 0;
  for (int trial = 0; trial < 200 && accepted < 15; ++trial) {
    const pde::HyperbolicPlant hp = testing::random_hyperbolic_plant(rng);
    const DiscretePlant p = pde::to_discrete(hp);
    if (!clp::check_assumptions(p).all_passed()) continue;
    for (double gamma = 0.05; gamma < 1e4; gamma *= 1.6) {
      DiscretePlant s = scale_plant(p, gamma);
      s.D22.setZero();
      if (!check_solvability(s).solvable()) continue;
      SynthesisResult r;
      try {
        r = synthesize(p, gamma, central_parameter(p.p(), p.m()));
      } catch (const Error&) {
        continue;
      }
      const clp::ClosedLoop cl = clp::close_loop(p, r.controller);
      EXPECT_GT(std::abs(cl.det_s), 0.0);
      EXPECT_LT(num::spectral_radius(cl.sys.A), 1.0);
      EXPECT_LT(testing::dense_grid_norm(cl.sys, 4096), gamma);
      ++accepted;
      break;
    }
  }
  EXPECT_EQ(accepted, 15);
}

}  // namespace
}  // namespace hyphinf

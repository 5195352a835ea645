#include <cmath>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "hyphinf/pde.hpp"
#include "support/oracles.hpp"

namespace hyphinf {
namespace {

using namespace pde;
using testing::random_matrix;
using testing::Rng;
using num::Vector;

TEST(SpeedProfile, PiecewiseIsRightContinuous) {
  const SpeedProfile s = SpeedProfile::piecewise({0.0, 0.4, 1.0}, {1.0, 2.0});
  EXPECT_EQ(s(0.0), 1.0);
  EXPECT_EQ(s(0.3999), 1.0);
  EXPECT_EQ(s(0.4), 2.0);
  EXPECT_EQ(s(1.0), 2.0);
  EXPECT_EQ(s.lower_bound(), 1.0);
}

TEST(SpeedProfile, RejectsBadData) {
  EXPECT_THROW(SpeedProfile::constant(0.0), Error);
  EXPECT_THROW(SpeedProfile::constant(-1.0), Error);
  EXPECT_THROW(SpeedProfile::piecewise({0.0, 0.5}, {1.0}), Error);
  EXPECT_THROW(SpeedProfile::piecewise({0.0, 0.6, 0.5, 1.0}, {1, 1, 1}), Error);
  EXPECT_THROW(SpeedProfile::sampled({0.0, 1.0}, {1.0}), Error);
  EXPECT_THROW(SpeedProfile::constant(1.0)(1.5), Error);
}

TEST(TravelTime, ConstantSpeed) {
  const TravelTimeTable t = travel_time_profile(SpeedProfile::constant(4.0));
  EXPECT_NEAR(t.p1, 0.25, 1e-15);
  EXPECT_NEAR(t.travel(0.5), 0.125, 1e-15);
  EXPECT_EQ(t.normalized(0.0), 1.0);
  EXPECT_EQ(t.normalized(1.0), 0.0);
  EXPECT_NEAR(t.normalized(0.3), 0.7, 1e-14);
}

TEST(TravelTime, PiecewiseExact) {
  const SpeedProfile s = SpeedProfile::piecewise({0.0, 0.4, 1.0}, {1.0, 2.0});
  const TravelTimeTable t = travel_time_profile(s, 7);
  const auto exact = [](double z) {
    return z < 0.4 ? z : 0.4 + (z - 0.4) / 2.0;
  };
  EXPECT_NEAR(t.p1, 0.7, 1e-15);
  for (double z : {0.0, 0.1, 0.39, 0.4, 0.55, 0.9, 1.0}) {
    EXPECT_NEAR(t.travel(z), exact(z), 1e-14) << z;
  }
}

TEST(TravelTime, SampledLinearSpeed) {
  const double a = 1.0, b = 2.0;
  const SpeedProfile s = SpeedProfile::sampled({0.0, 1.0}, {a, a + b});
  const TravelTimeTable t = travel_time_profile(s, 2048);
  for (double z : {0.2, 0.5, 1.0}) {
    EXPECT_NEAR(t.travel(z), std::log((a + b * z) / a) / b, 1e-7);
  }
}

TEST(TravelTime, InversionRoundTrip) {
  const SpeedProfile s =
      SpeedProfile::sampled({0.0, 0.3, 1.0}, {1.0, 3.0, 0.5});
  const TravelTimeTable t = travel_time_profile(s);
  for (double eta = 0.0; eta <= 1.0; eta += 0.05) {
    EXPECT_NEAR(t.normalized(t.invert_normalized(eta)), eta, 1e-11);
  }
}

TEST(WellPosedness, SingularK) {
  HyperbolicPlant p = string_fixture(1.0 / 6.0, 1.0 / 6.0);
  p.K(1, 1) = 0.0;
  const WellPosedness w = wellposedness_check(p);
  EXPECT_FALSE(w.wellposed);
  EXPECT_EQ(w.sigma_min, 0.0);
  EXPECT_THROW(to_discrete(p), Error);
}

TEST(ToDiscrete, StringFixture) {
  const DiscretePlant d = to_discrete(string_fixture(1.0 / 6.0, 1.0 / 6.0));
  Matrix a(2, 2);
  a << 0, 1, -1, 0;
  EXPECT_EQ(d.A, a);
  EXPECT_NEAR(d.B1(0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(d.B1(1, 0), 0.0);
  EXPECT_EQ(d.B2, (Matrix(2, 1) << 0, 1).finished());
  EXPECT_EQ(d.C1, (Matrix(1, 2) << 0, 2).finished());
  EXPECT_NEAR(d.C2(0, 0), 12.0, 1e-14);
  EXPECT_NEAR(d.D11(0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(d.D12(0, 0), 0.0);
  EXPECT_EQ(d.D21(0, 0), 0.0);
  EXPECT_NEAR(d.D22(0, 0), -6.0, 1e-14);
  EXPECT_NEAR(d.travel_time, 1.0, 1e-15);
}

TEST(ToDiscrete, StringTravelTime) {
  const DiscretePlant d = to_discrete(string_fixture(2.0, 0.5));
  EXPECT_NEAR(d.travel_time, 2.0, 1e-14);
}

// One boundary step solved as a dense linear system: the incoming trace w
// satisfies K w = −(L v + E d + S u), and the outputs follow directly.
TEST(ToDiscrete, AgreesWithBoundaryRelation) {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const HyperbolicPlant p = testing::random_hyperbolic_plant(rng);
    const DiscretePlant d = to_discrete(p);
    const Vector v = random_matrix(rng, p.n, 1);
    const Vector dist = random_matrix(rng, p.k, 1);
    const Vector u = random_matrix(rng, p.p, 1);
    Matrix s = Matrix::Zero(p.n, p.p);
    s.bottomRows(p.p).setIdentity();
    const Vector w = p.K.colPivHouseholderQr().solve(
        -(p.L * v + p.E * dist + s * u));
    const Vector z = -p.Kz * w - p.Lz * v;
    const Vector y = -p.Ky * w - p.Ly * v;
    const double scale = 1.0 + w.norm() + z.norm() + y.norm();
    EXPECT_LT((d.A * v + d.B1 * dist + d.B2 * u - w).norm(), 1e-12 * scale);
    EXPECT_LT((d.C1 * v + d.D11 * dist + d.D12 * u - z).norm(), 1e-12 * scale);
    EXPECT_LT((d.C2 * v + d.D21 * dist + d.D22 * u - y).norm(), 1e-12 * scale);
  }
}

TEST(ToDiscrete, RejectsUnabsorbedReaction) {
  HyperbolicPlant p = string_fixture(1.0, 1.0);
  p.reaction = [](double) { return Matrix::Identity(2, 2); };
  EXPECT_THROW(to_discrete(p), Error);
}

TEST(AbsorbReaction, ConstantReactionMatchesExponential) {
  HyperbolicPlant p = string_fixture(1.0, 4.0);
  const double lambda = 2.0;
  Matrix m(2, 2);
  m << 0.3, -0.8, 0.5, -0.2;
  p.reaction = [m](double) { return m; };
  const AbsorbedPlant a = absorb_reaction(p, 512);
  EXPECT_FALSE(a.plant.reaction);
  for (double z : {0.0, 0.25, 0.5, 1.0}) {
    const Matrix q = (-m * z / lambda).exp();
    EXPECT_LT((a.gauge_at(z) - q).norm(), 1e-10) << z;
  }
  const Matrix q1inv = (m / lambda).exp();
  EXPECT_LT((a.plant.L - p.L * q1inv).norm(), 1e-10);
  EXPECT_LT((a.plant.Ly - p.Ly * q1inv).norm(), 1e-10);
  EXPECT_LT((a.plant.Lz - p.Lz * q1inv).norm(), 1e-10);
  EXPECT_EQ(a.plant.K, p.K);
}

TEST(AbsorbReaction, NoReactionIsIdentity) {
  const HyperbolicPlant p = string_fixture(1.0, 1.0);
  const AbsorbedPlant a = absorb_reaction(p);
  EXPECT_EQ(a.plant.L, p.L);
  EXPECT_EQ(a.gauge_at(0.7), Matrix::Identity(2, 2));
}

TEST(StringFixture, RejectsNonPositive) {
  EXPECT_THROW(string_fixture(0.0, 1.0), Error);
  EXPECT_THROW(string_fixture(1.0, -1.0), Error);
}

TEST(InputSelector, Shape) {
  const Matrix s = input_selector(3, 2);
  EXPECT_EQ(s, (Matrix(3, 2) << 0, 0, 1, 0, 0, 1).finished());
}

}  // namespace
}  // namespace hyphinf

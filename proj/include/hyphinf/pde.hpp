#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hyphinf/state_space.hpp"

namespace hyphinf::pde {

/// Positive transport speed λ₀ on [0, 1].
class SpeedProfile {
 public:
  enum class Kind { kConstant, kPiecewise, kSampled };

  SpeedProfile() : SpeedProfile(constant(1.0)) {}

  static SpeedProfile constant(double value);
  /// Value i holds on [b_i, b_{i+1}); b_0 = 0 and the last breakpoint is 1.
  static SpeedProfile piecewise(std::vector<double> breakpoints,
                                std::vector<double> values);
  /// Linear interpolation between samples on a grid from 0 to 1.
  static SpeedProfile sampled(std::vector<double> grid,
                              std::vector<double> values);

  Kind kind() const { return kind_; }
  double operator()(double zeta) const;
  double lower_bound() const { return lower_bound_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

 private:
  SpeedProfile(Kind kind, std::vector<double> nodes,
               std::vector<double> values);

  Kind kind_;
  std::vector<double> nodes_;
  std::vector<double> values_;
  double lower_bound_;
};

/// Tabulated p(ζ) = ∫₀^ζ dξ/λ₀(ξ) and its normalization k = 1 − p/p(1).
struct TravelTimeTable {
  std::vector<double> zeta;
  std::vector<double> p;
  double p1 = 1.0;

  double travel(double z) const;
  /// k(ζ); k(0) = 1 and k(1) = 0 exactly.
  double normalized(double z) const;
  /// ζ with k(ζ) = η, by bisection.
  double invert_normalized(double eta) const;
};

TravelTimeTable travel_time_profile(const SpeedProfile& lambda0,
                                    Index quad_points = 1024);

using ReactionProfile = std::function<Matrix(double)>;

/// ∂ₜx = −∂ζ(λ₀x) + M x with boundary relation
/// E d + [0; I_p] u = −K λ₀x(0) − L λ₀x(1) and boundary outputs
/// z = −K_z λ₀x(0) − L_z λ₀x(1), y = −K_y λ₀x(0) − L_y λ₀x(1).
struct HyperbolicPlant {
  Index n = 0, k = 0, p = 0, l = 0, m = 0;
  SpeedProfile lambda0;
  Matrix E, K, L, Ky, Ly, Kz, Lz;
  /// Empty when the plant carries no reaction term.
  ReactionProfile reaction;

  void validate() const;
};

/// Exact time-p(1) sampled two-port, with the travel time kept alongside.
struct DiscretePlant : TwoPortStateSpace {
  double travel_time = 1.0;
};

struct WellPosedness {
  bool wellposed = false;
  double sigma_min = 0.0;
  double norm_k = 0.0;
  std::string diagnostic;
};

/// [0; I_p] of size n×p.
Matrix input_selector(Index n, Index p);

WellPosedness wellposedness_check(const HyperbolicPlant& plant);

DiscretePlant to_discrete(const HyperbolicPlant& plant,
                          Index quad_points = 1024);

/// Plant in the gauge x̃ = Q x, Q' = −λ₀⁻¹ Q M, Q(0) = I.
struct AbsorbedPlant {
  HyperbolicPlant plant;
  std::vector<double> zeta;
  std::vector<Matrix> gauge;

  Matrix gauge_at(double z) const;
};

AbsorbedPlant absorb_reaction(const HyperbolicPlant& plant,
                              Index rk4_steps = 1024);

/// Vibrating string with density ρ and tension T.
HyperbolicPlant string_fixture(double rho, double tension);

}  // namespace hyphinf::pde

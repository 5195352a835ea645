#pragma once

#include <optional>
#include <string>

#include "hyphinf/kspy.hpp"
#include "hyphinf/pde.hpp"
#include "hyphinf/state_space.hpp"

namespace hyphinf::synth {

using pde::DiscretePlant;

/// Normalizes the attenuation level to one: B1, C1 by γ^{-1/2}, B2, C2 by
/// γ^{1/2}, D11 by 1/γ, D22 by γ.
DiscretePlant scale_plant(const DiscretePlant& plant, double gamma);

/// Realization of G_Q/γ matching scale_plant.
StateSpace scale_sigma_q(const StateSpace& q, double gamma);

/// Realization of γ·G_c for a controller designed on the scaled plant.
StateSpace unscale_controller(const StateSpace& c, double gamma);

/// Control triplet with signature (k, p).
kspy::PopovTriplet build_popov_star(const DiscretePlant& scaled);

/// Filtering triplet with signature (l, m).
kspy::PopovTriplet build_popov_obs(const DiscretePlant& scaled);

/// Coupling triplet with signature (p, m), built from the control solution.
kspy::PopovTriplet build_popov_cross(const DiscretePlant& scaled,
                                     const kspy::KspySolution& star);

struct ConditionStatus {
  bool evaluated = false;
  bool passed = false;
  std::string detail;
};

/// Quantities shared by the generator formulas.
struct GeneratorIntermediates {
  Matrix Sc;
  Matrix Sx;
  Matrix C2F1;
  Matrix Mid;
  Matrix T;
};

struct SynthesisReport {
  double gamma = 1.0;
  ConditionStatus condition_a;
  ConditionStatus condition_b;
  ConditionStatus condition_c;
  std::optional<kspy::KspySolution> star;
  std::optional<kspy::KspySolution> obs;
  std::optional<kspy::KspySolution> cross;
  double rho_xy = 0.0;
  std::optional<std::string> first_failure;
  std::optional<GeneratorIntermediates> generator;
  /// ‖Z − Y(I − XY)⁻¹‖ once the coupling triplet is solved.
  double z_consistency = 0.0;

  bool solvable() const {
    return condition_a.passed && condition_b.passed && condition_c.passed;
  }
};

class SynthesisFailure : public Error {
 public:
  SynthesisFailure(const std::string& message, SynthesisReport report);
  const SynthesisReport& report() const { return report_; }

 private:
  SynthesisReport report_;
};

/// Conditions (a) X ⪰ 0, (b) Y ⪰ 0, (c) ρ(XY) < 1 on a scaled plant.
SynthesisReport check_solvability(const DiscretePlant& scaled);

/// Scaled controller generator. Solves the coupling triplet and records it
/// in the report.
TwoPortStateSpace build_sigma_g(const DiscretePlant& scaled,
                                SynthesisReport& report);

TwoPortStateSpace unscale_sigma_g(const TwoPortStateSpace& scaled,
                                  double gamma);

struct SigmaQValidation {
  bool valid = false;
  double norm = 0.0;
  double spectral_radius = 0.0;
  std::string reason;
};

/// Σ_Q is admissible when it is stable and ‖G_Q‖∞ < γ.
SigmaQValidation validate_sigma_q(const StateSpace& q, double gamma);

/// Zero parameter of size p×m.
StateSpace central_parameter(Index p, Index m);

StateSpace assemble_controller(const TwoPortStateSpace& sigma_g,
                               const StateSpace& q);

/// Controller for a plant with feedthrough D22 from one designed with zero
/// feedthrough: G_c(I + D22 G_c)⁻¹.
StateSpace d22_correct(const StateSpace& c, const Matrix& d22);

struct SynthesisOptions {
  /// When false an inadmissible Σ_Q is recorded and used anyway.
  bool require_admissible_sigma_q = true;
};

struct SynthesisResult {
  StateSpace controller;
  StateSpace uncorrected;
  TwoPortStateSpace sigma_g_scaled;
  TwoPortStateSpace sigma_g;
  SynthesisReport report;
  SigmaQValidation sigma_q;
};

SynthesisResult synthesize(const DiscretePlant& plant, double gamma,
                           const StateSpace& sigma_q,
                           const SynthesisOptions& options = {});

}  // namespace hyphinf::synth

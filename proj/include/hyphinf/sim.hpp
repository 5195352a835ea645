#pragma once

#include <functional>
#include <vector>

#include "hyphinf/clp.hpp"
#include "hyphinf/pde.hpp"

namespace hyphinf::sim {

using num::Vector;

/// Samples of the transported field at the cell midpoints (i + ½)/N of one
/// normalized travel-time window.
struct GridState {
  Matrix samples;
  Index step = 0;

  Index dim() const { return samples.rows(); }
  Index cells() const { return samples.cols(); }
};

using Signal = std::function<Vector(double)>;

std::vector<double> midpoints(Index cells);

/// Grid state f(k(ζ)) = λ₀(ζ)·x₀(ζ), inverting k by bisection.
GridState init_from_continuous(const Signal& x0,
                               const pde::SpeedProfile& lambda0, Index cells,
                               Index quad_points = 1024);

GridState zero_state(Index dim, Index cells);

/// Stacks two grid states of equal resolution.
GridState stack(const GridState& top, const GridState& bottom);

/// Samples s at the times (j + ζᵢ)·p(1).
Matrix sample_signal(const Signal& s, Index dim, Index step, Index cells,
                     double travel_time);

/// One exact step of the sampled plant, applied cell by cell.
GridState step(const GridState& state, const TwoPortStateSpace& plant,
               const Matrix& d, const Matrix& u);

struct GridOutputs {
  Matrix z;
  Matrix y;
};

GridOutputs outputs(const GridState& state, const TwoPortStateSpace& plant,
                    const Matrix& d, const Matrix& u);

/// Discrete L² norm over one window.
double l2_norm(const GridState& state);

/// x(ζ, t) by linear interpolation of f between consecutive midpoint
/// samples of the step history.
Vector reconstruct_continuous(const std::vector<GridState>& history,
                              const pde::SpeedProfile& lambda0,
                              const pde::TravelTimeTable& table, double zeta,
                              double t);

struct ClosedLoopTrace {
  std::vector<double> t_start;
  std::vector<double> state_l2_norm;
  /// l×N output samples of each step.
  std::vector<Matrix> z;
  /// States 0..steps when recorded.
  std::vector<GridState> history;
};

/// Two-port view of a closed loop, with no u and no y channel.
TwoPortStateSpace as_two_port(const StateSpace& sys);

ClosedLoopTrace simulate_closed_loop(const clp::ClosedLoop& cl,
                                     const GridState& initial,
                                     const Signal& d, Index steps,
                                     bool keep_history = false);

/// Exact solution along characteristics. The incoming trace is recovered
/// from the boundary relation and transported, with no grid involved.
/// Requires a constant or piecewise constant speed.
class CharacteristicsOracle {
 public:
  CharacteristicsOracle(pde::HyperbolicPlant plant, Signal x0, Signal d,
                        Signal u);

  /// f(s) for s ≥ 0.
  Vector trace(double s) const;
  Vector state(double zeta, double t) const;
  Vector z(double t) const;
  Vector y(double t) const;
  double travel_time() const { return p1_; }

 private:
  double normalized(double zeta) const;
  double inverse_normalized(double eta) const;

  pde::HyperbolicPlant plant_;
  Signal x0_, d_, u_;
  std::vector<double> cumulative_;
  double p1_ = 1.0;
  Eigen::PartialPivLU<Matrix> k_lu_;
};

Vector characteristics_oracle(const pde::HyperbolicPlant& plant,
                              const Signal& x0, const Signal& d,
                              const Signal& u, double zeta, double t);

}  // namespace hyphinf::sim

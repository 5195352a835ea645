#include "hyphinf/sim.hpp"

#include <algorithm>
#include <cmath>

namespace hyphinf::sim {
namespace {

void require_cells(Index cells) {
  if (cells < 1) fail(ErrorCode::kRange, "need at least one grid cell");
}

Vector checked(const Signal& s, double arg, Index dim, const char* name) {
  if (dim == 0) return Vector(0);
  if (!s) fail(ErrorCode::kContract, std::string(name) + " is not set");
  Vector v = s(arg);
  if (v.size() != dim) {
    fail(ErrorCode::kDimension, std::string(name) + " has wrong length");
  }
  return v;
}

}  // namespace

std::vector<double> midpoints(Index cells) {
  require_cells(cells);
  std::vector<double> out(static_cast<std::size_t>(cells));
  for (Index i = 0; i < cells; ++i) {
    out[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(cells);
  }
  return out;
}

GridState init_from_continuous(const Signal& x0,
                               const pde::SpeedProfile& lambda0, Index cells,
                               Index quad_points) {
  const std::vector<double> eta = midpoints(cells);
  const pde::TravelTimeTable table =
      pde::travel_time_profile(lambda0, quad_points);
  GridState g;
  for (Index i = 0; i < cells; ++i) {
    const double zeta = table.invert_normalized(eta[i]);
    const Vector v = x0(zeta);
    if (i == 0) g.samples.resize(v.size(), cells);
    if (v.size() != g.samples.rows()) {
      fail(ErrorCode::kDimension, "initial condition changes length");
    }
    g.samples.col(i) = lambda0(zeta) * v;
  }
  return g;
}

GridState zero_state(Index dim, Index cells) {
  require_cells(cells);
  return {Matrix::Zero(dim, cells), 0};
}

GridState stack(const GridState& top, const GridState& bottom) {
  if (top.cells() != bottom.cells()) {
    fail(ErrorCode::kDimension, "grid states differ in resolution");
  }
  return {num::vstack(top.samples, bottom.samples), top.step};
}

Matrix sample_signal(const Signal& s, Index dim, Index step, Index cells,
                     double travel_time) {
  const std::vector<double> zeta = midpoints(cells);
  Matrix out(dim, cells);
  for (Index i = 0; i < cells; ++i) {
    const double t = (static_cast<double>(step) + zeta[i]) * travel_time;
    out.col(i) = checked(s, t, dim, "signal");
  }
  return out;
}

GridState step(const GridState& state, const TwoPortStateSpace& plant,
               const Matrix& d, const Matrix& u) {
  const Index n = state.cells();
  num::require_shape(state.samples, plant.n(), n, "grid state");
  num::require_shape(d, plant.k(), n, "grid disturbance");
  num::require_shape(u, plant.p(), n, "grid input");
  GridState next;
  next.samples = plant.A * state.samples + plant.B1 * d + plant.B2 * u;
  next.step = state.step + 1;
  return next;
}

GridOutputs outputs(const GridState& state, const TwoPortStateSpace& plant,
                    const Matrix& d, const Matrix& u) {
  const Index n = state.cells();
  num::require_shape(state.samples, plant.n(), n, "grid state");
  num::require_shape(d, plant.k(), n, "grid disturbance");
  num::require_shape(u, plant.p(), n, "grid input");
  return {plant.C1 * state.samples + plant.D11 * d + plant.D12 * u,
          plant.C2 * state.samples + plant.D21 * d + plant.D22 * u};
}

double l2_norm(const GridState& state) {
  if (state.cells() == 0) return 0.0;
  return state.samples.norm() / std::sqrt(static_cast<double>(state.cells()));
}

Vector reconstruct_continuous(const std::vector<GridState>& history,
                              const pde::SpeedProfile& lambda0,
                              const pde::TravelTimeTable& table, double zeta,
                              double t) {
  if (history.empty()) fail(ErrorCode::kContract, "empty step history");
  if (!(t >= 0.0)) fail(ErrorCode::kRange, "time must be nonnegative");
  const Index cells = history.front().cells();
  const Index steps = static_cast<Index>(history.size());
  const double s = table.normalized(zeta) + t / table.p1;
  if (s > static_cast<double>(steps)) {
    fail(ErrorCode::kRange, "query lies beyond the simulated horizon");
  }
  // Sample g sits at s = (g + ½)/N.
  const Index last = steps * cells - 1;
  const double g = s * static_cast<double>(cells) - 0.5;
  const auto sample = [&](Index idx) -> Vector {
    const GridState& st = history[idx / cells];
    if (st.cells() != cells) {
      fail(ErrorCode::kDimension, "history changes resolution");
    }
    return st.samples.col(idx % cells);
  };
  Vector f;
  if (g <= 0.0) {
    f = sample(0);
  } else if (g >= static_cast<double>(last)) {
    f = sample(last);
  } else {
    const Index g0 = static_cast<Index>(std::floor(g));
    const double w = g - static_cast<double>(g0);
    f = (1.0 - w) * sample(g0) + w * sample(g0 + 1);
  }
  return f / lambda0(zeta);
}

TwoPortStateSpace as_two_port(const StateSpace& sys) {
  sys.validate("closed loop");
  const Index n = sys.states();
  TwoPortStateSpace g;
  g.A = sys.A;
  g.B1 = sys.B;
  g.B2 = Matrix(n, 0);
  g.C1 = sys.C;
  g.C2 = Matrix(0, n);
  g.D11 = sys.D;
  g.D12 = Matrix(sys.outputs(), 0);
  g.D21 = Matrix(0, sys.inputs());
  g.D22 = Matrix(0, 0);
  return g;
}

ClosedLoopTrace simulate_closed_loop(const clp::ClosedLoop& cl,
                                     const GridState& initial,
                                     const Signal& d, Index steps,
                                     bool keep_history) {
  if (steps < 1) fail(ErrorCode::kRange, "need at least one step");
  const TwoPortStateSpace g = as_two_port(cl.sys);
  const Index cells = initial.cells();
  num::require_shape(initial.samples, g.n(), cells, "initial grid state");
  const Matrix no_input(0, cells);
  ClosedLoopTrace trace;
  GridState state = initial;
  if (keep_history) trace.history.push_back(state);
  for (Index j = 0; j < steps; ++j) {
    const Matrix dj = sample_signal(d, g.k(), j, cells, cl.travel_time);
    trace.t_start.push_back(static_cast<double>(j) * cl.travel_time);
    trace.state_l2_norm.push_back(l2_norm(state));
    trace.z.push_back(outputs(state, g, dj, no_input).z);
    state = step(state, g, dj, no_input);
    if (keep_history) trace.history.push_back(state);
  }
  return trace;
}

CharacteristicsOracle::CharacteristicsOracle(pde::HyperbolicPlant plant,
                                             Signal x0, Signal d, Signal u)
    : plant_(std::move(plant)),
      x0_(std::move(x0)),
      d_(std::move(d)),
      u_(std::move(u)) {
  plant_.validate();
  if (plant_.lambda0.kind() == pde::SpeedProfile::Kind::kSampled) {
    fail(ErrorCode::kContract, "oracle needs a piecewise constant speed");
  }
  if (plant_.reaction) {
    fail(ErrorCode::kContract, "oracle does not model reaction terms");
  }
  if (!pde::wellposedness_check(plant_).wellposed) {
    fail(ErrorCode::kNotWellPosed, "K is singular");
  }
  const std::vector<double>& b = plant_.lambda0.nodes();
  const std::vector<double>& v = plant_.lambda0.values();
  cumulative_.assign(b.size(), 0.0);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    cumulative_[i + 1] = cumulative_[i] + (b[i + 1] - b[i]) / v[i];
  }
  p1_ = cumulative_.back();
  k_lu_.compute(plant_.K);
}

double CharacteristicsOracle::normalized(double zeta) const {
  const std::vector<double>& b = plant_.lambda0.nodes();
  const std::vector<double>& v = plant_.lambda0.values();
  std::size_t i = 0;
  while (i + 2 < b.size() && zeta >= b[i + 1]) ++i;
  const double p = cumulative_[i] + (zeta - b[i]) / v[i];
  return 1.0 - p / p1_;
}

double CharacteristicsOracle::inverse_normalized(double eta) const {
  const std::vector<double>& b = plant_.lambda0.nodes();
  const std::vector<double>& v = plant_.lambda0.values();
  const double target = (1.0 - eta) * p1_;
  std::size_t i = 0;
  while (i + 2 < b.size() && target >= cumulative_[i + 1]) ++i;
  return std::clamp(b[i] + (target - cumulative_[i]) * v[i], 0.0, 1.0);
}

Vector CharacteristicsOracle::trace(double s) const {
  if (!(s >= 0.0)) fail(ErrorCode::kRange, "trace argument must be >= 0");
  const double whole = std::floor(s);
  const double frac = s - whole;
  const double zeta = inverse_normalized(frac);
  Vector f = plant_.lambda0(zeta) * checked(x0_, zeta, plant_.n, "x0");
  const Matrix sel = pde::input_selector(plant_.n, plant_.p);
  for (int i = 0; i < static_cast<int>(whole); ++i) {
    const double tau = (frac + i) * p1_;
    const Vector rhs = plant_.L * f + plant_.E * checked(d_, tau, plant_.k, "d") +
                       sel * checked(u_, tau, plant_.p, "u");
    f = -k_lu_.solve(rhs);
  }
  return f;
}

Vector CharacteristicsOracle::state(double zeta, double t) const {
  if (!(zeta >= 0.0 && zeta <= 1.0)) {
    fail(ErrorCode::kRange, "position must lie in [0, 1]");
  }
  return trace(normalized(zeta) + t / p1_) / plant_.lambda0(zeta);
}

Vector CharacteristicsOracle::z(double t) const {
  return -plant_.Kz * trace(1.0 + t / p1_) - plant_.Lz * trace(t / p1_);
}

Vector CharacteristicsOracle::y(double t) const {
  return -plant_.Ky * trace(1.0 + t / p1_) - plant_.Ly * trace(t / p1_);
}

Vector characteristics_oracle(const pde::HyperbolicPlant& plant,
                              const Signal& x0, const Signal& d,
                              const Signal& u, double zeta, double t) {
  return CharacteristicsOracle(plant, x0, d, u).state(zeta, t);
}

}  // namespace hyphinf::sim

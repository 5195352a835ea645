#include "hyphinf/pde.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace hyphinf::pde {
namespace {

void require_partition(const std::vector<double>& nodes) {
  if (nodes.size() < 2 || nodes.front() != 0.0 || nodes.back() != 1.0) {
    fail(ErrorCode::kContract, "speed profile nodes must run from 0 to 1");
  }
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      fail(ErrorCode::kContract, "speed profile nodes must increase");
    }
  }
}

// Index of the segment [nodes[i], nodes[i+1]] containing z.
std::size_t segment(const std::vector<double>& nodes, double z) {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
  const auto i = static_cast<std::size_t>(std::distance(nodes.begin(), it));
  return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, nodes.size() - 2);
}

void require_unit_interval(double z, const char* what) {
  if (!(z >= 0.0 && z <= 1.0)) {
    fail(ErrorCode::kRange, std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

SpeedProfile::SpeedProfile(Kind kind, std::vector<double> nodes,
                           std::vector<double> values)
    : kind_(kind), nodes_(std::move(nodes)), values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::kContract, "speed profile is empty");
  for (double v : values_) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      fail(ErrorCode::kContract, "speed profile must be positive");
    }
  }
  lower_bound_ = *std::min_element(values_.begin(), values_.end());
}

SpeedProfile SpeedProfile::constant(double value) {
  return SpeedProfile(Kind::kConstant, {0.0, 1.0}, {value});
}

SpeedProfile SpeedProfile::piecewise(std::vector<double> breakpoints,
                                     std::vector<double> values) {
  require_partition(breakpoints);
  if (values.size() + 1 != breakpoints.size()) {
    fail(ErrorCode::kDimension,
         "piecewise profile needs one value per segment");
  }
  return SpeedProfile(Kind::kPiecewise, std::move(breakpoints),
                      std::move(values));
}

SpeedProfile SpeedProfile::sampled(std::vector<double> grid,
                                   std::vector<double> values) {
  require_partition(grid);
  if (values.size() != grid.size()) {
    fail(ErrorCode::kDimension, "sampled profile needs one value per node");
  }
  return SpeedProfile(Kind::kSampled, std::move(grid), std::move(values));
}

double SpeedProfile::operator()(double zeta) const {
  require_unit_interval(zeta, "position");
  switch (kind_) {
    case Kind::kConstant:
      return values_.front();
    case Kind::kPiecewise:
      return values_[segment(nodes_, zeta)];
    case Kind::kSampled: {
      const std::size_t i = segment(nodes_, zeta);
      const double w = (zeta - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
      return (1.0 - w) * values_[i] + w * values_[i + 1];
    }
  }
  return values_.front();
}

double TravelTimeTable::travel(double z) const {
  require_unit_interval(z, "position");
  const std::size_t i = segment(zeta, z);
  const double w = (z - zeta[i]) / (zeta[i + 1] - zeta[i]);
  return (1.0 - w) * p[i] + w * p[i + 1];
}

double TravelTimeTable::normalized(double z) const {
  if (z == 0.0) return 1.0;
  if (z == 1.0) return 0.0;
  return 1.0 - travel(z) / p1;
}

double TravelTimeTable::invert_normalized(double eta) const {
  require_unit_interval(eta, "normalized travel time");
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) return mid;
    if (normalized(mid) > eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hi - lo > 1e-12) {
    fail(ErrorCode::kNumerical, "travel-time inversion did not converge");
  }
  return 0.5 * (lo + hi);
}

TravelTimeTable travel_time_profile(const SpeedProfile& lambda0,
                                    Index quad_points) {
  if (quad_points < 1) {
    fail(ErrorCode::kRange, "quadrature needs at least one interval");
  }
  std::vector<double> nodes;
  nodes.reserve(static_cast<std::size_t>(quad_points) + 1 +
                lambda0.nodes().size());
  for (Index i = 0; i <= quad_points; ++i) {
    nodes.push_back(static_cast<double>(i) / static_cast<double>(quad_points));
  }
  nodes.insert(nodes.end(), lambda0.nodes().begin(), lambda0.nodes().end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  TravelTimeTable table;
  table.zeta = nodes;
  table.p.assign(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double a = nodes[i - 1];
    const double b = nodes[i];
    double step = 0.0;
    if (lambda0.kind() == SpeedProfile::Kind::kSampled) {
      step = 0.5 * (b - a) * (1.0 / lambda0(a) + 1.0 / lambda0(b));
    } else {
      // 1/λ₀ is constant between consecutive nodes.
      step = (b - a) / lambda0(0.5 * (a + b));
    }
    table.p[i] = table.p[i - 1] + step;
  }
  table.p1 = table.p.back();
  return table;
}

Matrix input_selector(Index n, Index p) {
  Matrix s = Matrix::Zero(n, p);
  s.bottomRows(p) = num::identity(p);
  return s;
}

void HyperbolicPlant::validate() const {
  if (n < 1 || k < 0 || p < 0 || l < 0 || m < 0) {
    fail(ErrorCode::kDimension, "plant dimensions must be nonnegative, n >= 1");
  }
  if (p > n) fail(ErrorCode::kDimension, "p must not exceed n");
  num::require_shape(E, n, k, "E");
  num::require_shape(K, n, n, "K");
  num::require_shape(L, n, n, "L");
  num::require_shape(Ky, m, n, "Ky");
  num::require_shape(Ly, m, n, "Ly");
  num::require_shape(Kz, l, n, "Kz");
  num::require_shape(Lz, l, n, "Lz");
  for (const auto& [x, name] :
       {std::pair{&E, "E"}, {&K, "K"}, {&L, "L"}, {&Ky, "Ky"}, {&Ly, "Ly"},
        {&Kz, "Kz"}, {&Lz, "Lz"}}) {
    num::require_finite(*x, name);
  }
}

WellPosedness wellposedness_check(const HyperbolicPlant& plant) {
  plant.validate();
  WellPosedness out;
  Eigen::JacobiSVD<Matrix> svd(plant.K);
  out.sigma_min = svd.singularValues().minCoeff();
  out.norm_k = svd.singularValues().maxCoeff();
  out.wellposed = out.sigma_min > 1e-12 * out.norm_k;
  out.diagnostic = out.wellposed
                       ? "K is invertible"
                       : "K is singular: boundary relation not solvable for "
                         "the incoming trace";
  return out;
}

DiscretePlant to_discrete(const HyperbolicPlant& plant, Index quad_points) {
  const WellPosedness wp = wellposedness_check(plant);
  if (!wp.wellposed) fail(ErrorCode::kNotWellPosed, wp.diagnostic);
  if (plant.reaction) {
    fail(ErrorCode::kContract, "reaction term must be absorbed first");
  }
  const Eigen::PartialPivLU<Matrix> lu(plant.K);
  const Matrix ki_l = lu.solve(plant.L);
  const Matrix ki_e = lu.solve(plant.E);
  const Matrix ki_u = lu.solve(input_selector(plant.n, plant.p));

  DiscretePlant d;
  d.A = -ki_l;
  d.B1 = -ki_e;
  d.B2 = -ki_u;
  d.C1 = plant.Kz * ki_l - plant.Lz;
  d.C2 = plant.Ky * ki_l - plant.Ly;
  d.D11 = plant.Kz * ki_e;
  d.D12 = plant.Kz * ki_u;
  d.D21 = plant.Ky * ki_e;
  d.D22 = plant.Ky * ki_u;
  d.travel_time = travel_time_profile(plant.lambda0, quad_points).p1;
  return d;
}

Matrix AbsorbedPlant::gauge_at(double z) const {
  require_unit_interval(z, "position");
  const std::size_t i = segment(zeta, z);
  const double w = (z - zeta[i]) / (zeta[i + 1] - zeta[i]);
  return (1.0 - w) * gauge[i] + w * gauge[i + 1];
}

AbsorbedPlant absorb_reaction(const HyperbolicPlant& plant, Index rk4_steps) {
  plant.validate();
  if (rk4_steps < 1) fail(ErrorCode::kRange, "need at least one RK4 step");
  AbsorbedPlant out;
  out.plant = plant;
  out.plant.reaction = nullptr;
  out.zeta = {0.0, 1.0};
  out.gauge = {num::identity(plant.n), num::identity(plant.n)};
  if (!plant.reaction) return out;

  const auto rhs = [&](double z, const Matrix& q) -> Matrix {
    const Matrix m = plant.reaction(z);
    num::require_shape(m, plant.n, plant.n, "reaction");
    return -q * m / plant.lambda0(z);
  };
  const double h = 1.0 / static_cast<double>(rk4_steps);
  out.zeta.assign(1, 0.0);
  out.gauge.assign(1, num::identity(plant.n));
  Matrix q = num::identity(plant.n);
  for (Index s = 0; s < rk4_steps; ++s) {
    const double z = static_cast<double>(s) * h;
    const double z_next = s + 1 == rk4_steps ? 1.0 : z + h;
    const double z_mid = std::min(z + 0.5 * h, 1.0);
    const Matrix k1 = rhs(z, q);
    const Matrix k2 = rhs(z_mid, q + 0.5 * h * k1);
    const Matrix k3 = rhs(z_mid, q + 0.5 * h * k2);
    const Matrix k4 = rhs(z_next, q + h * k3);
    q += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.zeta.push_back(z_next);
    out.gauge.push_back(q);
  }
  const Eigen::PartialPivLU<Matrix> lu(q);
  if (num::min_singular_value(q) <= 1e-12 * (1.0 + q.norm())) {
    fail(ErrorCode::kNumerical, "gauge transform is singular at the outlet");
  }
  const Matrix q1_inv = lu.inverse();
  out.plant.L = plant.L * q1_inv;
  out.plant.Ly = plant.Ly * q1_inv;
  out.plant.Lz = plant.Lz * q1_inv;
  return out;
}

HyperbolicPlant string_fixture(double rho, double tension) {
  if (!(rho > 0.0) || !(tension > 0.0) || !std::isfinite(rho) ||
      !std::isfinite(tension)) {
    fail(ErrorCode::kRange, "density and tension must be positive");
  }
  const double sigma = 1.0 / std::sqrt(rho * tension);
  HyperbolicPlant s;
  s.n = 2;
  s.k = 1;
  s.p = 1;
  s.l = 1;
  s.m = 1;
  s.lambda0 = SpeedProfile::constant(std::sqrt(tension / rho));
  s.E = (Matrix(2, 1) << 1.0, 0.0).finished();
  s.K = (Matrix(2, 2) << -sigma, 0.0, 0.0, -1.0).finished();
  s.L = (Matrix(2, 2) << 0.0, sigma, -1.0, 0.0).finished();
  s.Ky = (Matrix(1, 2) << 0.0, sigma).finished();
  s.Ly = (Matrix(1, 2) << -sigma, 0.0).finished();
  s.Kz = (Matrix(1, 2) << -1.0, 0.0).finished();
  s.Lz = (Matrix(1, 2) << 0.0, -1.0).finished();
  return s;
}

}  // namespace hyphinf::pde

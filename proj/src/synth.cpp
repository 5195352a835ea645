#include "hyphinf/synth.hpp"

#include <cmath>

#include "hyphinf/clp.hpp"

namespace hyphinf::synth {
namespace {

using num::block_diag;
using num::hstack;
using num::identity;
using num::vstack;

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    fail(ErrorCode::kRange, "gamma must be positive and finite");
  }
}

Matrix invert_spd(const Matrix& p, const char* what) {
  if (num::min_singular_value(p) <= 1e-12 * (1.0 + p.norm())) {
    fail(ErrorCode::kNonsingularityViolated, std::string(what) + " is singular");
  }
  return num::symmetrize(p.ldlt().solve(identity(p.rows())));
}

ConditionStatus psd_condition(const kspy::KspySolution& s, const char* name) {
  ConditionStatus c;
  c.evaluated = true;
  c.passed = s.x_psd;
  c.detail = s.x_psd ? std::string(name) + " is positive semidefinite"
                     : std::string(name) + " has eigenvalue " +
                           std::to_string(s.x_min_eigenvalue);
  return c;
}

}  // namespace

SynthesisFailure::SynthesisFailure(const std::string& message,
                                   SynthesisReport report)
    : Error(ErrorCode::kConditionFailed, message),
      report_(std::move(report)) {}

DiscretePlant scale_plant(const DiscretePlant& plant, double gamma) {
  require_gamma(gamma);
  plant.validate("plant");
  const double r = std::sqrt(gamma);
  DiscretePlant s = plant;
  s.B1 = plant.B1 / r;
  s.B2 = plant.B2 * r;
  s.C1 = plant.C1 / r;
  s.C2 = plant.C2 * r;
  s.D11 = plant.D11 / gamma;
  s.D22 = plant.D22 * gamma;
  return s;
}

StateSpace scale_sigma_q(const StateSpace& q, double gamma) {
  require_gamma(gamma);
  const double r = std::sqrt(gamma);
  return {q.A, q.B / r, q.C / r, q.D / gamma};
}

StateSpace unscale_controller(const StateSpace& c, double gamma) {
  require_gamma(gamma);
  const double r = std::sqrt(gamma);
  return {c.A, c.B * r, c.C * r, c.D * gamma};
}

kspy::PopovTriplet build_popov_star(const DiscretePlant& s) {
  s.validate("plant");
  const Matrix d1 = hstack(s.D11, s.D12);
  kspy::PopovTriplet t;
  t.A = s.A;
  t.B = hstack(s.B1, s.B2);
  t.Q = s.C1.transpose() * s.C1;
  t.L = s.C1.transpose() * d1;
  t.R = d1.transpose() * d1 -
        block_diag(identity(s.k()), Matrix::Zero(s.p(), s.p()));
  t.sig = {s.k(), s.p()};
  return t;
}

kspy::PopovTriplet build_popov_obs(const DiscretePlant& s) {
  s.validate("plant");
  const Matrix d1 = vstack(s.D11, s.D21);
  kspy::PopovTriplet t;
  t.A = s.A.transpose();
  t.B = hstack(s.C1.transpose(), s.C2.transpose());
  t.Q = s.B1 * s.B1.transpose();
  t.L = s.B1 * d1.transpose();
  t.R = d1 * d1.transpose() -
        block_diag(identity(s.l()), Matrix::Zero(s.m(), s.m()));
  t.sig = {s.l(), s.m()};
  return t;
}

kspy::PopovTriplet build_popov_cross(const DiscretePlant& s,
                                     const kspy::KspySolution& star) {
  const Index k = s.k();
  const Index p = s.p();
  const Matrix f1 = star.F.topRows(k);
  const Matrix f2 = star.F.bottomRows(p);
  const Matrix v11 = star.V.topLeftCorner(k, k);
  const Matrix v21 = star.V.bottomLeftCorner(p, k);
  const Matrix v22 = star.V.bottomRightCorner(p, p);
  const Matrix sc = invert_spd(v11.transpose() * v11, "V_c11'V_c11");
  const Matrix stacked = vstack(v21, s.D21);

  kspy::PopovTriplet t;
  t.A = s.A.transpose() + f1.transpose() * s.B1.transpose();
  t.B = hstack(-f2.transpose() * v22.transpose(),
               s.C2.transpose() + f1.transpose() * s.D21.transpose());
  t.Q = num::symmetrize(s.B1 * sc * s.B1.transpose());
  t.L = s.B1 * sc * stacked.transpose();
  t.R = num::symmetrize(stacked * sc * stacked.transpose() -
                        block_diag(identity(p), Matrix::Zero(s.m(), s.m())));
  t.sig = {p, s.m()};
  return t;
}

SynthesisReport check_solvability(const DiscretePlant& scaled) {
  SynthesisReport report;
  const auto attempt = [](const kspy::PopovTriplet& t,
                          std::optional<kspy::KspySolution>& slot,
                          ConditionStatus& status, const char* name) {
    try {
      slot = kspy::solve_kspy(t);
      status = psd_condition(*slot, name);
    } catch (const Error& e) {
      status.evaluated = true;
      status.passed = false;
      status.detail = e.what();
    }
  };
  attempt(build_popov_star(scaled), report.star, report.condition_a, "X");
  attempt(build_popov_obs(scaled), report.obs, report.condition_b, "Y");
  if (report.condition_a.passed && report.condition_b.passed) {
    report.rho_xy = num::spectral_radius(report.star->X * report.obs->X);
    report.condition_c.evaluated = true;
    report.condition_c.passed =
        report.rho_xy < 1.0 - num::kStabilityMargin;
    report.condition_c.detail =
        "spectral radius of XY is " + std::to_string(report.rho_xy);
  } else {
    report.condition_c.detail = "not evaluated";
  }
  if (!report.condition_a.passed) {
    report.first_failure = "condition_a";
  } else if (!report.condition_b.passed) {
    report.first_failure = "condition_b";
  } else if (!report.condition_c.passed) {
    report.first_failure = "condition_c";
  }
  return report;
}

TwoPortStateSpace build_sigma_g(const DiscretePlant& s,
                                SynthesisReport& report) {
  if (!report.solvable()) {
    fail(ErrorCode::kContract, "generator requires conditions (a)-(c)");
  }
  const kspy::KspySolution& star = *report.star;
  report.cross = kspy::solve_kspy(build_popov_cross(s, star));
  const kspy::KspySolution& cross = *report.cross;

  const Index n = s.n();
  const Index k = s.k();
  const Index p = s.p();
  const Matrix& x = star.X;
  const Matrix& y = report.obs->X;
  const Matrix& z = cross.X;
  report.z_consistency =
      (z - y * (identity(n) - x * y).partialPivLu().inverse()).norm();

  const Matrix f1 = star.F.topRows(k);
  const Matrix f2 = star.F.bottomRows(p);
  const Matrix v11 = star.V.topLeftCorner(k, k);
  const Matrix v21 = star.V.bottomLeftCorner(p, k);
  const Matrix v22 = star.V.bottomRightCorner(p, p);
  const Matrix vx11 = cross.V.topLeftCorner(p, p);

  GeneratorIntermediates g;
  g.Sc = invert_spd(v11.transpose() * v11, "V_c11'V_c11");
  g.Sx = invert_spd(vx11.transpose() * vx11, "V_x11'V_x11");
  g.C2F1 = s.C2 + s.D21 * f1;
  g.Mid = num::symmetrize(s.D21 * g.Sc * s.D21.transpose() +
                          g.C2F1 * z * g.C2F1.transpose());
  const Eigen::PartialPivLU<Matrix> v22_lu(v22);
  if (num::min_singular_value(v22) <= 1e-12 * (1.0 + v22.norm())) {
    fail(ErrorCode::kNonsingularityViolated, "V_c22 is singular");
  }
  g.T = v22_lu.solve(v21);

  Matrix mid_inv_sqrt;
  try {
    mid_inv_sqrt = num::sym_inv_sqrt(g.Mid);
  } catch (const Error&) {
    fail(ErrorCode::kNotPositiveDefinite,
         "D21*Sc*D21' + C2F1*Z*C2F1' is not positive definite");
  }
  const Matrix mid_inv = mid_inv_sqrt * mid_inv_sqrt;
  const Matrix sx_sqrt = num::sym_sqrt(g.Sx);
  const Matrix sx_inv_sqrt = num::sym_inv_sqrt(g.Sx);
  const Matrix a_f1 = s.A + s.B1 * f1;

  TwoPortStateSpace out;
  out.D11 = -(g.T * g.Sc * s.D21.transpose() -
              f2 * z * g.C2F1.transpose()) *
            mid_inv;
  out.D12 = v22_lu.solve(sx_inv_sqrt);
  out.D21 = mid_inv_sqrt;
  out.C1 = -f2 + out.D11 * g.C2F1;
  out.C2 = mid_inv_sqrt * g.C2F1;
  out.B1 = -s.B1 * g.Sc * s.D21.transpose() * mid_inv - s.B2 * out.D11 -
           a_f1 * z * out.C2.transpose() * out.D21;
  const Matrix tail = v22.transpose() * sx_sqrt;
  out.B2 = -s.B2 * out.D12 -
           s.B1 * g.Sc * (g.T + out.D11 * s.D21).transpose() * tail -
           a_f1 * z * out.C1.transpose() * tail;
  out.A = a_f1 + s.B2 * f2 + out.B1 * g.C2F1;
  out.D22 = Matrix::Zero(s.m(), p);
  report.generator = g;
  return out;
}

TwoPortStateSpace unscale_sigma_g(const TwoPortStateSpace& sg, double gamma) {
  require_gamma(gamma);
  const double r = std::sqrt(gamma);
  TwoPortStateSpace out = sg;
  out.B1 = sg.B1 * r;
  out.B2 = sg.B2 / r;
  out.C1 = sg.C1 * r;
  out.C2 = sg.C2 / r;
  out.D11 = sg.D11 * gamma;
  out.D22 = sg.D22 / gamma;
  return out;
}

SigmaQValidation validate_sigma_q(const StateSpace& q, double gamma) {
  require_gamma(gamma);
  q.validate("sigma_q");
  SigmaQValidation v;
  v.spectral_radius = num::spectral_radius(q.A);
  if (!(v.spectral_radius < 1.0 - num::kStabilityMargin)) {
    v.reason = "sigma_q is not stable (spectral radius " +
               std::to_string(v.spectral_radius) + ")";
    return v;
  }
  v.norm = clp::hinf_norm_disc(q).norm;
  v.valid = v.norm / gamma < 1.0 - num::kStabilityMargin;
  v.reason = v.valid ? "admissible"
                     : "norm " + std::to_string(v.norm) + " is not below gamma " +
                           std::to_string(gamma);
  return v;
}

StateSpace central_parameter(Index p, Index m) {
  return StateSpace::static_gain(Matrix::Zero(p, m));
}

StateSpace assemble_controller(const TwoPortStateSpace& sigma_g,
                               const StateSpace& q) {
  return lft(sigma_g, q, ErrorCode::kClosedLoopIllPosed).system;
}

StateSpace d22_correct(const StateSpace& c, const Matrix& d22) {
  c.validate("controller");
  num::require_shape(d22, c.inputs(), c.outputs(), "D22");
  const Matrix left = identity(c.outputs()) + c.D * d22;
  const Matrix right = identity(c.inputs()) + d22 * c.D;
  // Both factors share their spectrum away from 1; either may be the
  // worse conditioned one when p != m. A structural zero survives
  // synthesis only up to rounding in Dc, hence the product scale.
  const double scale = 1.0 + c.D.norm() * d22.norm();
  for (const Matrix* f : {&left, &right}) {
    if (num::min_singular_value(*f) <= 1e-9 * scale) {
      fail(ErrorCode::kCorrectionIllPosed, "I + Dc*D22 is singular");
    }
  }
  const Eigen::PartialPivLU<Matrix> left_lu(left);
  StateSpace out;
  out.C = left_lu.solve(c.C);
  out.D = left_lu.solve(c.D);
  out.A = c.A - c.B * d22 * out.C;
  out.B = right.transpose().partialPivLu().solve(c.B.transpose()).transpose();
  return out;
}

SynthesisResult synthesize(const DiscretePlant& plant, double gamma,
                           const StateSpace& sigma_q,
                           const SynthesisOptions& options) {
  require_gamma(gamma);
  plant.validate("plant");
  SynthesisResult r;
  r.sigma_q = validate_sigma_q(sigma_q, gamma);
  if (!r.sigma_q.valid && options.require_admissible_sigma_q) {
    fail(ErrorCode::kSigmaQBound, r.sigma_q.reason);
  }
  DiscretePlant scaled = scale_plant(plant, gamma);
  scaled.D22.setZero();
  r.report = check_solvability(scaled);
  r.report.gamma = gamma;
  if (!r.report.solvable()) {
    const std::string which = *r.report.first_failure;
    const ConditionStatus& c = which == "condition_a"   ? r.report.condition_a
                               : which == "condition_b" ? r.report.condition_b
                                                        : r.report.condition_c;
    throw SynthesisFailure(which + ": " + c.detail, r.report);
  }
  r.sigma_g_scaled = build_sigma_g(scaled, r.report);
  r.sigma_g = unscale_sigma_g(r.sigma_g_scaled, gamma);
  r.uncorrected = assemble_controller(r.sigma_g, sigma_q);
  r.controller = d22_correct(r.uncorrected, plant.D22);
  return r;
}

}  // namespace hyphinf::synth

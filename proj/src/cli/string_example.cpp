#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pipeline.hpp"

namespace hyphinf::cli {
namespace {

using detail::json;
using num::Complex;

enum class Status { kMatch, kMismatch, kFlag, kError };

const char* label(Status s) {
  switch (s) {
    case Status::kMatch: return "match";
    case Status::kMismatch: return "MISMATCH";
    case Status::kFlag: return "FLAG";
    case Status::kError: return "ERROR";
  }
  return "";
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-13 ? 0.0 : v);
  return buf;
}

std::string show(const Matrix& a) {
  if (a.size() == 1) return short_num(a(0, 0));
  std::string s = "[";
  for (Index i = 0; i < a.rows(); ++i) {
    if (i) s += "; ";
    for (Index j = 0; j < a.cols(); ++j) {
      if (j) s += ", ";
      s += short_num(a(i, j));
    }
  }
  return s + "]";
}

std::string show(const num::CVector& v) {
  std::string s = "{";
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    const double re = std::abs(v(i).real()) < 1e-6 ? 0.0 : v(i).real();
    const double im = std::abs(v(i).imag()) < 1e-6 ? 0.0 : v(i).imag();
    char buf[64];
    if (im == 0.0) {
      std::snprintf(buf, sizeof buf, "%.4f", re);
    } else {
      std::snprintf(buf, sizeof buf, "%.4f%+.4fi", re, im);
    }
    s += buf;
  }
  return s + "}";
}

/// Table cells may not contain a bare pipe.
std::string cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

struct Row {
  std::string quantity;
  std::string computed;
  std::string printed;
  double deviation = 0.0;
  double tolerance = 0.0;
  Status status = Status::kMatch;
  std::string note;
};

struct Section {
  std::string title;
  std::vector<Row> rows;
};

class Report {
 public:
  Section& section(std::string title) {
    sections_.push_back({std::move(title), {}});
    return sections_.back();
  }

  void compare(const std::string& q, const Matrix& computed,
               const Matrix& printed, double tol, std::string note = {}) {
    Row r{q, show(computed), show(printed), 0.0, tol, Status::kMatch,
          std::move(note)};
    if (computed.rows() != printed.rows() || computed.cols() != printed.cols()) {
      r.deviation = INFINITY;
      r.status = Status::kMismatch;
      r.note = "shape differs";
    } else {
      r.deviation = computed.size() ? (computed - printed).cwiseAbs().maxCoeff()
                                    : 0.0;
      r.status = r.deviation <= tol ? Status::kMatch : Status::kMismatch;
    }
    sections_.back().rows.push_back(std::move(r));
  }

  void scalar(const std::string& q, double computed, double printed, double tol,
              std::string note = {}) {
    compare(q, Matrix::Constant(1, 1, computed), Matrix::Constant(1, 1, printed),
            tol, std::move(note));
  }

  void add(Row r) { sections_.back().rows.push_back(std::move(r)); }

  /// Runs body and records a thrown error as a report entry.
  void guarded(const std::string& what, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      Row r;
      r.quantity = what;
      r.status = Status::kError;
      r.note = e.what();
      add(std::move(r));
    }
  }

  std::size_t count(Status s) const {
    std::size_t n = 0;
    for (const Section& sec : sections_) {
      for (const Row& r : sec.rows) n += r.status == s;
    }
    return n;
  }

  void write(std::ostream& out, const reference::StringExampleParameters& p,
             double rho, double tension) const {
    out << "# Vibrating string example\n\n";
    out << "| parameter | value |\n|---|---|\n";
    out << "| rho | " << short_num(rho) << " |\n";
    out << "| T | " << short_num(tension) << " |\n";
    out << "| sigma | " << short_num(p.sigma) << " |\n";
    out << "| gamma | " << short_num(p.gamma) << " |\n";
    out << "| A_Q, B_Q, C_Q | " << short_num(p.a_q) << ", " << short_num(p.b_q)
        << ", " << short_num(p.c_q) << " |\n\n";
    out << "Entries: " << count(Status::kMatch) << " match, "
        << count(Status::kMismatch) << " mismatch, " << count(Status::kFlag)
        << " flagged, " << count(Status::kError) << " errors.\n\n";
    for (const Section& sec : sections_) {
      out << "## " << sec.title << "\n\n";
      out << "| quantity | computed | printed | deviation | tolerance | status | "
             "note |\n|---|---|---|---|---|---|---|\n";
      for (const Row& r : sec.rows) {
        out << "| " << cell(r.quantity) << " | " << cell(r.computed) << " | "
            << cell(r.printed) << " | "
            << (std::isfinite(r.deviation) ? short_num(r.deviation) : "n/a")
            << " | " << (r.tolerance > 0 ? short_num(r.tolerance) : "")
            << " | " << label(r.status) << " | " << cell(r.note) << " |\n";
      }
      out << '\n';
    }
    out << "## Flags\n\n";
    bool any = false;
    for (const Section& sec : sections_) {
      for (const Row& r : sec.rows) {
        if (r.status == Status::kMatch) continue;
        any = true;
        out << "- " << label(r.status) << " " << sec.title << " / " << r.quantity
            << ": " << r.note << '\n';
      }
    }
    if (!any) out << "- none\n";
  }

 private:
  std::vector<Section> sections_;
};

void compare_two_port(Report& rep, const std::string& prefix,
                      const TwoPortStateSpace& c, const TwoPortStateSpace& p,
                      double tol) {
  rep.compare(prefix + "A", c.A, p.A, tol);
  rep.compare(prefix + "B1", c.B1, p.B1, tol);
  rep.compare(prefix + "B2", c.B2, p.B2, tol);
  rep.compare(prefix + "C1", c.C1, p.C1, tol);
  rep.compare(prefix + "C2", c.C2, p.C2, tol);
  rep.compare(prefix + "D11", c.D11, p.D11, tol);
  rep.compare(prefix + "D12", c.D12, p.D12, tol);
  rep.compare(prefix + "D21", c.D21, p.D21, tol);
  rep.compare(prefix + "D22", c.D22, p.D22, tol);
}

/// Largest transfer deviation on 64 points of a circle enclosing both
/// spectra.
double transfer_gap(const StateSpace& a, const StateSpace& b, double& radius) {
  const double poles =
      std::max(num::spectral_radius(a.A), num::spectral_radius(b.A));
  radius = std::max(3.0, 1.5 * poles + 0.5);
  const clp::TransferEvaluator ea(a);
  const clp::TransferEvaluator eb(b);
  double gap = 0.0;
  for (int i = 0; i < 64; ++i) {
    const Complex z = std::polar(radius, 2.0 * std::numbers::pi * (i + 0.5) / 64.0);
    gap = std::max(gap, num::max_singular_value(num::CMatrix(ea(z) - eb(z))));
  }
  return gap;
}

/// A parameter choice run through synthesis, closed loop and artifacts.
struct Design {
  std::string name;
  StateSpace sigma_q;
  reference::StringExampleParameters params;
};

void write_design_artifacts(const RunConfig& config,
                            const detail::PlantEvaluation& e,
                            const synth::SynthesisResult& r,
                            const detail::ClosedLoopSummary& cl, double gamma,
                            const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  io::write_json_file(dir / "controller.json",
                      io::state_space_to_json(r.controller));
  io::write_json_file(dir / "synthesis_report.json",
                      {{"gamma", gamma},
                       {"sigma_q", detail::sigma_q_json(r.sigma_q)},
                       {"synthesis", detail::report_json(r.report)},
                       {"closed_loop", detail::closed_loop_json(cl, gamma)}});
  detail::write_freqresp(cl.loop, config.grid, gamma, dir);
  RunConfig sim = config;
  sim.x0 = "sine";
  sim.disturbance = "zero";
  sim.reconstruct = false;
  detail::write_simulation(sim, e, cl.loop, dir);
}

void design_section(Report& rep, const RunConfig& config,
                    const detail::PlantEvaluation& e, const Design& d,
                    const std::filesystem::path& dir) {
  const reference::PrintedStringExample printed =
      reference::printed_string_example(d.params);
  const double gamma = d.params.gamma;
  const double sigma = d.params.sigma;
  const pde::DiscretePlant& plant = *e.discrete;

  rep.section("Parameter system (" + d.name + ")");
  const synth::SigmaQValidation v = synth::validate_sigma_q(d.sigma_q, gamma);
  {
    Row r;
    r.quantity = "|B_Q C_Q / (1 + A_Q)| < gamma";
    r.computed = short_num(printed.sigma_q_ratio);
    r.printed = "< " + short_num(gamma);
    r.deviation = printed.sigma_q_ratio - gamma;
    const bool ok = printed.sigma_q_ratio < gamma;
    r.status = ok ? Status::kMatch : Status::kFlag;
    r.note = ok ? "printed admissibility test holds"
                : "sigma_q violates the printed admissibility test";
    rep.add(r);
  }
  {
    Row r;
    r.quantity = "norm of G_Q on the circle";
    r.computed = short_num(v.norm);
    r.printed = "< " + short_num(gamma);
    r.deviation = v.norm - gamma;
    r.status = v.valid ? Status::kMatch : Status::kFlag;
    r.note = v.reason;
    rep.add(r);
  }

  rep.section("Controller and closed loop (" + d.name + ")");
  rep.guarded("synthesis", [&] {
    synth::SynthesisOptions opts;
    opts.require_admissible_sigma_q = false;
    const synth::SynthesisResult r = synth::synthesize(plant, gamma, d.sigma_q, opts);
    rep.compare("uncorrected controller A", r.uncorrected.A, printed.controller.A, 1e-8);
    rep.compare("uncorrected controller B", r.uncorrected.B, printed.controller.B, 1e-8);
    rep.compare("uncorrected controller C", r.uncorrected.C, printed.controller.C, 1e-8);
    rep.compare("uncorrected controller D", r.uncorrected.D, printed.controller.D, 1e-8);
    rep.scalar("D_c^opt", r.controller.D(0, 0), 1.0 / sigma, 1e-12, "equals 1/sigma");
    double radius = 0.0;
    const double gap = transfer_gap(r.controller, printed.controller_opt, radius);
    rep.add({"corrected controller vs printed 4-state realization",
             "max gap " + short_num(gap), "0", gap, 1e-8,
             gap <= 1e-8 ? Status::kMatch : Status::kMismatch,
             "64 points on |z| = " + short_num(radius)});

    const detail::ClosedLoopSummary cl = detail::summarize_closed_loop(plant, r.controller);
    const num::CVector eig = num::eigenvalues(cl.loop.sys.A);
    num::CVector with_extra(eig.size() + 1);
    with_extra << eig, Complex(d.params.a_tilde, 0.0);
    const double eig_gap = num::matched_distance(with_extra, printed.printed_eigenvalues);
    rep.add({"closed-loop eigenvalues (plus the unobservable A~ mode)",
             show(with_extra), show(printed.printed_eigenvalues), eig_gap, 1e-3,
             eig_gap <= 1e-3 ? Status::kMatch : Status::kMismatch,
             "Hungarian matching"});
    rep.add({"closed-loop spectral radius", short_num(cl.spectral_radius), "< 1",
             cl.spectral_radius - 1.0, 0.0,
             cl.stable ? Status::kMatch : Status::kFlag,
             cl.stable ? "internally stable" : "closed loop is unstable"});

    const Complex z0 = std::polar(1.0, std::numbers::pi / 4.0);
    const Complex computed = clp::transfer_eval(cl.loop.sys, z0)(0, 0);
    const Complex formula = reference::printed_closed_loop_transfer(d.params, z0);
    const double tf_gap = std::abs(computed - formula);
    rep.add({"closed-loop transfer at exp(i pi/4)",
             short_num(computed.real()) + (computed.imag() >= 0 ? "+" : "") +
                 short_num(computed.imag()) + "i",
             short_num(formula.real()) + (formula.imag() >= 0 ? "+" : "") +
                 short_num(formula.imag()) + "i",
             tf_gap, 1e-8, tf_gap <= 1e-8 ? Status::kMatch : Status::kMismatch,
             "printed rational formula"});

    const std::vector<clp::FrequencySample> sweep =
        clp::frequency_sweep(cl.loop.sys, config.grid, cl.loop.travel_time);
    double sup = 0.0;
    for (const clp::FrequencySample& s : sweep) sup = std::max(sup, s.gain);
    const double norm = cl.norm ? cl.norm->norm : sup;
    Row fig;
    fig.quantity = "supremum of |G_cl| on the unit circle vs gamma";
    fig.computed = cl.norm ? short_num(norm) : short_num(sup) + " (grid)";
    fig.printed = "below " + short_num(gamma);
    fig.deviation = norm - gamma;
    if (cl.stable && norm < gamma) {
      fig.status = Status::kMatch;
      fig.note = "claim holds; H-infinity norm " + short_num(norm);
    } else if (!cl.stable) {
      fig.status = Status::kFlag;
      fig.note = "closed loop unstable, so the H-infinity norm is unbounded; "
                 "circle supremum " + short_num(sup);
    } else {
      fig.status = Status::kFlag;
      fig.note = "H-infinity norm " + short_num(norm) + " is not below gamma";
    }
    rep.add(fig);
    write_design_artifacts(config, e, r, cl, gamma, dir);
  });
}

}  // namespace

int cmd_string_example(const RunConfig& config, std::ostream& log) {
  validate(config);
  detail::prepare_output(config);
  reference::StringExampleParameters prm = config.string;
  prm.sigma = 1.0 / std::sqrt(config.rho * config.tension);
  if (config.gamma) prm.gamma = *config.gamma;
  const double gamma = prm.gamma;
  const double sigma = prm.sigma;

  io::PlantFile file{pde::string_fixture(config.rho, config.tension), std::nullopt};
  io::write_json_file(config.out / "plant.json", io::plant_to_json(file));
  const detail::PlantEvaluation e = detail::evaluate_plant(file);
  io::write_json_file(config.out / "check.json", detail::check_json(e));
  const reference::PrintedStringExample printed =
      reference::printed_string_example(prm);

  Report rep;
  rep.section("Plant");
  rep.add({"well-posedness and assumptions", e.passed() ? "all pass" : "failed",
           "all pass", 0.0, 0.0, e.passed() ? Status::kMatch : Status::kMismatch,
           ""});
  if (!e.discrete) {
    std::ofstream md(config.out / "string_example.md");
    rep.write(md, prm, config.rho, config.tension);
    log << "plant is not well posed; report written\n";
    return kExitOk;
  }
  const pde::DiscretePlant& plant = *e.discrete;
  compare_two_port(rep, "discrete ", plant, printed.discrete, 1e-12);
  rep.compare("travel time", Matrix::Constant(1, 1, plant.travel_time),
              Matrix::Constant(1, 1, std::sqrt(config.rho / config.tension)),
              1e-12);
  pde::DiscretePlant scaled = synth::scale_plant(plant, gamma);
  compare_two_port(rep, "scaled ", scaled, printed.scaled, 1e-12);
  scaled.D22.setZero();

  synth::SynthesisReport sr;
  rep.section("Control and filtering Riccati equations");
  rep.guarded("KSPY solves", [&] {
    const kspy::PopovTriplet star = synth::build_popov_star(scaled);
    const kspy::PopovTriplet obs = synth::build_popov_obs(scaled);
    rep.compare("Q_c", star.Q, printed.Qc, 1e-10);
    rep.compare("L_c", star.L, printed.Lc, 1e-10);
    rep.compare("R_c", star.R, printed.Rc, 1e-10);
    rep.compare("Q_o", obs.Q, printed.Qo, 1e-10);
    rep.compare("L_o", obs.L, printed.Lo, 1e-10);
    rep.compare("R_o", obs.R, printed.Ro, 1e-10);
    sr = synth::check_solvability(scaled);
    rep.add({"conditions (a), (b), (c)", sr.solvable() ? "pass" : "fail", "pass",
             0.0, 0.0, sr.solvable() ? Status::kMatch : Status::kMismatch,
             sr.first_failure.value_or("")});
    if (sr.star) {
      rep.compare("X", sr.star->X, printed.X, 1e-8);
      rep.compare("V_c", sr.star->V, printed.Vc, 1e-8);
      rep.compare("W_c", sr.star->W, printed.Wc, 1e-8);
      rep.scalar("KSPY residual (control)", sr.star->residuals.max(), 0.0, 1e-10);
      const Matrix abf = scaled.A + num::hstack(scaled.B1, scaled.B2) * sr.star->F;
      rep.compare("A + B F as printed", abf, printed.a_plus_bf, 1e-8,
                  "printed entry uses (s^2+1)/(s^2-1) in place of "
                  "(s^2 g^2+1)/(s^2 g^2-1)");
      const double s2 = sigma * sigma * gamma * gamma;
      Matrix corrected = Matrix::Zero(2, 2);
      corrected(0, 1) = (s2 + 1.0) / (s2 - 1.0);
      rep.compare("A + B F with gamma restored", abf, corrected, 1e-8);
    }
    if (sr.obs) {
      rep.compare("Y", sr.obs->X, printed.Y, 1e-8);
      rep.compare("V_o", sr.obs->V, printed.Vo, 1e-8);
      rep.compare("W_o", sr.obs->W, printed.Wo, 1e-8);
      rep.scalar("KSPY residual (filtering)", sr.obs->residuals.max(), 0.0, 1e-10);
    }
    if (sr.solvable()) rep.scalar("rho(XY)", sr.rho_xy, 0.0, 1e-14);
  });

  if (sr.solvable()) {
    rep.section("Coupling equation and generator");
    rep.guarded("generator", [&] {
      TwoPortStateSpace g = synth::build_sigma_g(scaled, sr);
      const kspy::PopovTriplet cross = synth::build_popov_cross(scaled, *sr.star);
      rep.compare("Q_x", cross.Q, printed.Qx, 1e-8);
      rep.compare("L_x", cross.L, printed.Lx, 1e-8);
      rep.compare("R_x", cross.R, printed.Rx, 1e-8);
      rep.compare("Z", sr.cross->X, printed.Z, 1e-8);
      rep.compare("V_x", sr.cross->V, printed.Vx, 1e-8);
      rep.compare("W_x", sr.cross->W, printed.Wx, 1e-8);
      rep.scalar("Z - Y(I - XY)^-1", sr.z_consistency, 0.0, 1e-8);
      const synth::GeneratorIntermediates& gi = *sr.generator;
      rep.compare("C_2F1", gi.C2F1, printed.C2F1, 1e-8);
      rep.scalar("S_c", gi.Sc(0, 0), printed.Sc, 1e-8);
      rep.scalar("S_x", gi.Sx(0, 0), printed.Sx, 1e-8);
      compare_two_port(rep, "scaled Sigma_g ", g, printed.sigma_g_scaled, 1e-8);
      compare_two_port(rep, "Sigma_g ", synth::unscale_sigma_g(g, gamma),
                       printed.sigma_g, 1e-8);
    });
  }

  num::CVector printed_eig;
  rep.section("Printed closed-loop matrix");
  rep.guarded("printed A_cl", [&] {
    printed_eig = num::eigenvalues(printed.closed_loop.A);
    const double gap =
        num::matched_distance(printed_eig, printed.printed_eigenvalues);
    rep.add({"eigenvalues of the printed A_cl", show(printed_eig),
             show(printed.printed_eigenvalues), gap, 1e-3,
             gap <= 1e-3 ? Status::kMatch : Status::kMismatch,
             gap <= 1e-3 ? "" : "printed matrix does not carry the listed spectrum"});
    rep.add({"length of the printed B_cl",
             std::to_string(printed.closed_loop.A.rows()),
             std::to_string(printed.printed_b_cl_length), 1.0, 0.0,
             printed.printed_b_cl_length == printed.closed_loop.A.rows()
                 ? Status::kMatch
                 : Status::kFlag,
             "seven entries printed for a six-state system"});
  });

  const StateSpace printed_q = printed.sigma_q;
  design_section(rep, config, e, {"printed", printed_q, prm}, config.out / "printed");

  reference::StringExampleParameters adm = prm;
  adm.b_q = prm.b_q * gamma;
  adm.c_q = prm.c_q * gamma;
  const StateSpace adm_q{Matrix::Constant(1, 1, adm.a_q),
                         Matrix::Constant(1, 1, adm.b_q),
                         Matrix::Constant(1, 1, adm.c_q), Matrix::Zero(1, 1)};
  design_section(rep, config, e, {"gains scaled by gamma", adm_q, adm},
                 config.out / "admissible");

  std::ofstream md(config.out / "string_example.md");
  if (!md) fail(ErrorCode::kInput, "cannot write string_example.md");
  rep.write(md, prm, config.rho, config.tension);
  log << "string example: " << rep.count(Status::kMatch) << " match, "
      << rep.count(Status::kMismatch) << " mismatch, " << rep.count(Status::kFlag)
      << " flagged, " << rep.count(Status::kError) << " errors\n";
  return kExitOk;
}

}  // namespace hyphinf::cli

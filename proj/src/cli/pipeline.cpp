#include "pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace hyphinf::cli::detail {
namespace {

json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json condition_json(const synth::ConditionStatus& c) {
  return {{"evaluated", c.evaluated}, {"passed", c.passed}, {"detail", c.detail}};
}

json kspy_json(const std::optional<kspy::KspySolution>& s) {
  if (!s) return nullptr;
  return {{"X", io::matrix_to_json(s->X)},
          {"V", io::matrix_to_json(s->V)},
          {"W", io::matrix_to_json(s->W)},
          {"F", io::matrix_to_json(s->F)},
          {"residuals",
           {{"r_factor", s->residuals.r_factor},
            {"l_factor", s->residuals.l_factor},
            {"q_factor", s->residuals.q_factor}}},
          {"riccati_residual", s->riccati_residual},
          {"closed_loop_radius", s->closed_loop_radius},
          {"x_min_eigenvalue", s->x_min_eigenvalue},
          {"x_psd", s->x_psd}};
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

PlantEvaluation evaluate_plant(io::PlantFile file) {
  PlantEvaluation e;
  e.file = std::move(file);
  e.wellposedness = pde::wellposedness_check(e.file.plant);
  if (!e.wellposedness.wellposed) return e;
  e.absorbed = pde::absorb_reaction(e.file.plant);
  e.discrete = pde::to_discrete(e.absorbed->plant);
  e.assumptions = clp::check_assumptions(*e.discrete);
  return e;
}

PlantEvaluation load_plant(const RunConfig& config) {
  if (config.plant.empty()) fail(ErrorCode::kInput, "--plant is required");
  return evaluate_plant(io::plant_from_json(io::read_json_file(config.plant)));
}

json check_json(const PlantEvaluation& e) {
  json j;
  j["wellposed"] = e.wellposedness.wellposed;
  j["sigma_min_K"] = e.wellposedness.sigma_min;
  j["norm_K"] = e.wellposedness.norm_k;
  j["diagnostic"] = e.wellposedness.diagnostic;
  j["reaction_absorbed"] = e.file.reaction.has_value();
  if (e.discrete) {
    j["travel_time"] = e.discrete->travel_time;
    j["discrete"] = io::two_port_to_json(*e.discrete);
  }
  if (e.assumptions) {
    const clp::AssumptionReport& a = *e.assumptions;
    json w = json::array();
    for (const clp::Witness& x : a.witnesses) {
      w.push_back({{"condition", x.condition},
                   {"point", {x.point.real(), x.point.imag()}},
                   {"margin", x.margin}});
    }
    j["assumptions"] = {{"stabilizable", a.stabilizable},
                        {"detectable", a.detectable},
                        {"rank12", a.rank12},
                        {"rank21", a.rank21},
                        {"witnesses", w}};
  }
  j["all_passed"] = e.passed();
  return j;
}

void require_checks(const PlantEvaluation& e) {
  if (!e.wellposedness.wellposed) {
    fail(ErrorCode::kNotWellPosed, e.wellposedness.diagnostic);
  }
  const clp::AssumptionReport& a = *e.assumptions;
  const std::pair<bool, const char*> checks[] = {
      {a.stabilizable, "stabilizable"},
      {a.detectable, "detectable"},
      {a.rank12, "rank12"},
      {a.rank21, "rank21"}};
  for (const auto& [ok, name] : checks) {
    if (!ok) fail(ErrorCode::kConditionFailed, std::string("assumption ") + name);
  }
}

StateSpace load_sigma_q(const std::string& source, Index p, Index m) {
  if (source.empty() || source == "zero") return synth::central_parameter(p, m);
  StateSpace q = io::state_space_from_json(io::read_json_file(source), "sigma_q");
  if (q.inputs() != m || q.outputs() != p) {
    fail(ErrorCode::kInput, "sigma_q must have " + std::to_string(m) +
                                " inputs and " + std::to_string(p) + " outputs");
  }
  return q;
}

ClosedLoopSummary summarize_closed_loop(const pde::DiscretePlant& plant,
                                        const StateSpace& controller) {
  ClosedLoopSummary s;
  s.loop = clp::close_loop(plant, controller);
  s.spectral_radius = num::spectral_radius(s.loop.sys.A);
  s.stable = s.spectral_radius < 1.0 - num::kStabilityMargin;
  if (s.stable) s.norm = clp::hinf_norm_disc(s.loop.sys);
  return s;
}

json closed_loop_json(const ClosedLoopSummary& s, std::optional<double> gamma) {
  json j = {{"det_s", s.loop.det_s},
            {"states", s.loop.sys.states()},
            {"spectral_radius", s.spectral_radius},
            {"stable", s.stable},
            {"stability_margin", 1.0 - s.spectral_radius}};
  if (s.norm) {
    j["hinf_norm"] = s.norm->norm;
    j["theta"] = s.norm->theta;
    j["omega"] = s.norm->theta / s.loop.travel_time;
  } else {
    j["hinf_norm"] = nullptr;
  }
  if (gamma) {
    j["gamma"] = *gamma;
    j["gamma_margin"] = s.norm ? number_or_null(*gamma - s.norm->norm) : json();
    j["meets_bound"] = s.norm && s.norm->norm < *gamma;
  }
  return j;
}

json report_json(const synth::SynthesisReport& r) {
  json j;
  j["gamma"] = r.gamma;
  j["conditions"] = {{"condition_a", condition_json(r.condition_a)},
                     {"condition_b", condition_json(r.condition_b)},
                     {"condition_c", condition_json(r.condition_c)}};
  j["first_failure"] = r.first_failure ? json(*r.first_failure) : json();
  j["rho_xy"] = r.rho_xy;
  j["z_consistency"] = r.z_consistency;
  j["star"] = kspy_json(r.star);
  j["obs"] = kspy_json(r.obs);
  j["cross"] = kspy_json(r.cross);
  return j;
}

json sigma_q_json(const synth::SigmaQValidation& v) {
  return {{"valid", v.valid},
          {"hinf_norm", v.norm},
          {"spectral_radius", v.spectral_radius},
          {"reason", v.reason}};
}

StateSpace obtain_controller(const RunConfig& config,
                             const pde::DiscretePlant& plant) {
  if (!config.controller.empty()) {
    StateSpace c = io::state_space_from_json(
        io::read_json_file(config.controller), "controller");
    if (c.inputs() != plant.m() || c.outputs() != plant.p()) {
      fail(ErrorCode::kInput, "controller must map " +
                                  std::to_string(plant.m()) + " measurements to " +
                                  std::to_string(plant.p()) + " inputs");
    }
    return c;
  }
  if (!config.gamma) {
    fail(ErrorCode::kInput, "either --controller or --gamma is required");
  }
  const StateSpace q = load_sigma_q(config.sigma_q, plant.p(), plant.m());
  return synth::synthesize(plant, *config.gamma, q).controller;
}

void prepare_output(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out, ec);
  if (ec || !std::filesystem::is_directory(config.out)) {
    fail(ErrorCode::kInput, "cannot create output directory " +
                                config.out.string());
  }
}

sim::Signal profile(const std::string& name, Index dim, double frequency,
                    const char* what) {
  if (name == "zero") {
    return [dim](double) -> Vector { return Vector::Zero(dim); };
  }
  if (name == "ones" || name == "step") {
    return [dim](double) -> Vector { return Vector::Ones(dim); };
  }
  if (name == "sine") {
    if (std::string(what) == "x0") {
      return [dim](double z) -> Vector {
        return Vector::Constant(dim, std::sin(std::numbers::pi * z));
      };
    }
    return [dim, frequency](double t) -> Vector {
      return Vector::Constant(dim, std::sin(frequency * t));
    };
  }
  fail(ErrorCode::kInput, std::string("unknown ") + what + " profile '" + name +
                              "'");
}

SimulationRun write_simulation(const RunConfig& config,
                               const PlantEvaluation& e,
                               const clp::ClosedLoop& loop,
                               const std::filesystem::path& dir) {
  const pde::HyperbolicPlant& plant = e.absorbed->plant;
  const pde::AbsorbedPlant& gauge = *e.absorbed;
  const sim::Signal x0 = profile(config.x0, plant.n, config.frequency, "x0");
  const sim::Signal d =
      profile(config.disturbance, plant.k, config.frequency, "disturbance");
  const bool gauged = e.file.reaction.has_value();
  const sim::Signal x0_gauged = [&](double z) -> Vector {
    return gauged ? Vector(gauge.gauge_at(z) * x0(z)) : x0(z);
  };
  const Index nc = loop.sys.states() - plant.n;
  const sim::GridState initial = sim::stack(
      sim::init_from_continuous(x0_gauged, plant.lambda0, config.cells),
      sim::zero_state(nc, config.cells));

  SimulationRun run;
  run.table = pde::travel_time_profile(plant.lambda0);
  run.trace = sim::simulate_closed_loop(loop, initial, d, config.steps,
                                        config.reconstruct);

  std::ofstream csv(dir / "sim_trace.csv");
  if (!csv) fail(ErrorCode::kInput, "cannot write sim_trace.csv");
  csv << "j,t_start,state_l2_norm";
  for (Index i = 0; i < loop.sys.outputs(); ++i) csv << ",z_" << (i + 1);
  csv << '\n';
  for (std::size_t j = 0; j < run.trace.t_start.size(); ++j) {
    csv << j << ',' << fmt(run.trace.t_start[j]) << ','
        << fmt(run.trace.state_l2_norm[j]);
    const Matrix& z = run.trace.z[j];
    for (Index i = 0; i < z.rows(); ++i) {
      csv << ',' << fmt(std::sqrt(z.row(i).squaredNorm() /
                                  static_cast<double>(z.cols())));
    }
    csv << '\n';
  }

  if (config.reconstruct) {
    std::ofstream rec(dir / "reconstruction.csv");
    if (!rec) fail(ErrorCode::kInput, "cannot write reconstruction.csv");
    rec << "zeta,t";
    for (Index i = 0; i < plant.n; ++i) rec << ",x_" << (i + 1);
    rec << '\n';
    const double p1 = run.table.p1;
    for (Index jt = 0; jt <= 2 * (config.steps - 1); ++jt) {
      const double t = 0.5 * static_cast<double>(jt) * p1;
      for (int iz = 0; iz <= 8; ++iz) {
        const double zeta = iz / 8.0;
        const Vector full = sim::reconstruct_continuous(
            run.trace.history, plant.lambda0, run.table, zeta, t);
        Vector x = full.head(plant.n);
        if (gauged) x = gauge.gauge_at(zeta).partialPivLu().solve(x);
        rec << fmt(zeta) << ',' << fmt(t);
        for (Index i = 0; i < x.size(); ++i) rec << ',' << fmt(x(i));
        rec << '\n';
      }
    }
  }
  return run;
}

json write_freqresp(const clp::ClosedLoop& loop, Index grid,
                    std::optional<double> gamma,
                    const std::filesystem::path& dir) {
  const double rho = num::spectral_radius(loop.sys.A);
  const bool stable = rho < 1.0 - num::kStabilityMargin;
  std::optional<clp::NormResult> peak;
  if (stable) peak = clp::hinf_norm_disc(loop.sys);
  const std::vector<clp::FrequencySample> samples =
      clp::frequency_sweep(loop.sys, grid, loop.travel_time, peak);
  std::ofstream csv(dir / "freqresp.csv");
  if (!csv) fail(ErrorCode::kInput, "cannot write freqresp.csv");
  clp::write_freqresp_csv(csv, samples);

  double grid_max = 0.0;
  double grid_theta = 0.0;
  for (const clp::FrequencySample& s : samples) {
    if (s.gain > grid_max) {
      grid_max = s.gain;
      grid_theta = s.theta;
    }
  }
  json j = {{"grid_size", grid},
            {"rows", samples.size()},
            {"travel_time", loop.travel_time},
            {"spectral_radius", rho},
            {"stable", stable},
            {"csv_max", grid_max},
            {"csv_argmax_theta", grid_theta}};
  if (peak) {
    j["hinf_norm"] = peak->norm;
    j["theta"] = peak->theta;
    j["omega"] = peak->theta / loop.travel_time;
  } else {
    j["hinf_norm"] = nullptr;
  }
  if (gamma) {
    j["gamma"] = *gamma;
    j["below_gamma"] = peak && peak->norm < *gamma;
    j["circle_sup_below_gamma"] = grid_max < *gamma;
  }
  io::write_json_file(dir / "freqresp_summary.json", j);
  return j;
}

}  // namespace hyphinf::cli::detail

#include <CLI11.hpp>
#include <ostream>

#include "pipeline.hpp"

namespace hyphinf::cli {

using detail::json;

void validate(const RunConfig& c) {
  if (c.gamma && !(*c.gamma > 0.0 && std::isfinite(*c.gamma))) {
    fail(ErrorCode::kRange, "gamma must be positive");
  }
  if (c.grid < 1 || c.cells < 1 || c.steps < 1) {
    fail(ErrorCode::kRange, "grid, cells and steps must be at least 1");
  }
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput:
    case ErrorCode::kDimension:
    case ErrorCode::kRange:
      return kExitInput;
    default:
      return kExitCondition;
  }
}

int cmd_check(const RunConfig& config, std::ostream& log) {
  validate(config);
  detail::prepare_output(config);
  const detail::PlantEvaluation e = detail::load_plant(config);
  io::write_json_file(config.out / "check.json", detail::check_json(e));
  log << "wellposed: " << (e.wellposedness.wellposed ? "yes" : "no") << '\n';
  if (e.assumptions) {
    const clp::AssumptionReport& a = *e.assumptions;
    log << "stabilizable: " << a.stabilizable << "  detectable: " << a.detectable
        << "  rank12: " << a.rank12 << "  rank21: " << a.rank21 << '\n';
  }
  return e.passed() ? kExitOk : kExitCondition;
}

int cmd_synthesize(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (!config.gamma) fail(ErrorCode::kInput, "--gamma is required");
  const double gamma = *config.gamma;
  detail::prepare_output(config);
  const detail::PlantEvaluation e = detail::load_plant(config);
  detail::require_checks(e);
  const pde::DiscretePlant& plant = *e.discrete;
  const StateSpace q = detail::load_sigma_q(config.sigma_q, plant.p(), plant.m());
  const auto report_path = config.out / "synthesis_report.json";

  const synth::SigmaQValidation v = synth::validate_sigma_q(q, gamma);
  if (!v.valid) {
    io::write_json_file(report_path, {{"status", "failed"},
                                      {"failure", "sigma_q norm bound"},
                                      {"gamma", gamma},
                                      {"sigma_q", detail::sigma_q_json(v)}});
    fail(ErrorCode::kSigmaQBound, v.reason);
  }
  synth::SynthesisResult r;
  try {
    r = synth::synthesize(plant, gamma, q);
  } catch (const synth::SynthesisFailure& f) {
    io::write_json_file(report_path,
                        {{"status", "failed"},
                         {"failure", *f.report().first_failure},
                         {"gamma", gamma},
                         {"sigma_q", detail::sigma_q_json(v)},
                         {"synthesis", detail::report_json(f.report())}});
    throw;
  }
  const detail::ClosedLoopSummary cl =
      detail::summarize_closed_loop(plant, r.controller);
  const bool ok = cl.stable && cl.norm && cl.norm->norm < gamma;
  io::write_json_file(config.out / "controller.json",
                      io::state_space_to_json(r.controller));
  io::write_json_file(report_path,
                      {{"status", ok ? "ok" : "failed"},
                       {"gamma", gamma},
                       {"sigma_q", detail::sigma_q_json(r.sigma_q)},
                       {"synthesis", detail::report_json(r.report)},
                       {"closed_loop", detail::closed_loop_json(cl, gamma)}});
  log << "rho(XY) = " << detail::fmt(r.report.rho_xy) << '\n'
      << "closed-loop spectral radius = " << detail::fmt(cl.spectral_radius)
      << '\n';
  if (cl.norm) log << "closed-loop norm = " << detail::fmt(cl.norm->norm) << '\n';
  if (!ok) {
    fail(ErrorCode::kConditionFailed, "closed loop misses the attenuation bound");
  }
  return kExitOk;
}

int cmd_freqresp(const RunConfig& config, std::ostream& log) {
  validate(config);
  detail::prepare_output(config);
  const detail::PlantEvaluation e = detail::load_plant(config);
  if (!e.discrete) fail(ErrorCode::kNotWellPosed, e.wellposedness.diagnostic);
  const StateSpace c = detail::obtain_controller(config, *e.discrete);
  const clp::ClosedLoop loop = clp::close_loop(*e.discrete, c);
  const json s = detail::write_freqresp(loop, config.grid, config.gamma, config.out);
  if (!s.at("stable").get<bool>()) {
    fail(ErrorCode::kUnstableSystem,
         "closed loop is unstable (spectral radius " +
             detail::fmt(s.at("spectral_radius").get<double>()) + ")");
  }
  log << "norm = " << detail::fmt(s.at("hinf_norm").get<double>())
      << " at theta = " << detail::fmt(s.at("theta").get<double>()) << '\n';
  return kExitOk;
}

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  validate(config);
  detail::prepare_output(config);
  const detail::PlantEvaluation e = detail::load_plant(config);
  if (!e.discrete) fail(ErrorCode::kNotWellPosed, e.wellposedness.diagnostic);
  const StateSpace c = detail::obtain_controller(config, *e.discrete);
  const clp::ClosedLoop loop = clp::close_loop(*e.discrete, c);
  const detail::SimulationRun run =
      detail::write_simulation(config, e, loop, config.out);
  log << "simulated " << config.steps << " steps on " << config.cells
      << " cells, final state norm "
      << detail::fmt(run.trace.state_l2_norm.back()) << '\n';
  return kExitOk;
}

namespace {

void add_output(CLI::App* sub, RunConfig& c) {
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
}

void add_plant(CLI::App* sub, RunConfig& c, bool required) {
  auto* o = sub->add_option("--plant", c.plant, "Plant JSON file");
  if (required) o->required();
}

void add_gamma(CLI::App* sub, double& gamma) {
  sub->add_option("--gamma", gamma, "Attenuation level")
      ->check(CLI::PositiveNumber);
}

void add_design(CLI::App* sub, RunConfig& c, double& gamma) {
  add_gamma(sub, gamma);
  sub->add_option("--sigma-q", c.sigma_q, "Parameter system file or 'zero'")
      ->capture_default_str();
  sub->add_option("--controller", c.controller, "Controller JSON file");
}

void add_sim(CLI::App* sub, RunConfig& c) {
  sub->add_option("--cells", c.cells, "Spatial grid size")
      ->check(CLI::Range(Index{1}, Index{1} << 24))
      ->capture_default_str();
  sub->add_option("--steps", c.steps, "Number of steps")
      ->check(CLI::Range(Index{1}, Index{1} << 24))
      ->capture_default_str();
  sub->add_option("--x0", c.x0, "Initial profile: zero, sine or ones")
      ->check(CLI::IsMember({"zero", "sine", "ones"}))
      ->capture_default_str();
  sub->add_option("--disturbance", c.disturbance,
                  "Disturbance: zero, sine or step")
      ->check(CLI::IsMember({"zero", "sine", "step"}))
      ->capture_default_str();
  sub->add_option("--frequency", c.frequency, "Angular frequency of sine data")
      ->capture_default_str();
  sub->add_flag("--reconstruct", c.reconstruct, "Write reconstruction.csv");
}

void add_grid(CLI::App* sub, RunConfig& c) {
  sub->add_option("--grid", c.grid, "Frequency grid size")
      ->check(CLI::Range(Index{1}, Index{1} << 24))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"H-infinity synthesis for boundary-controlled hyperbolic systems",
               "hyphinf"};
  app.require_subcommand(1);
  RunConfig c;
  double gamma = 0.0;

  CLI::App* check = app.add_subcommand("check", "Well-posedness and assumptions");
  add_plant(check, c, true);
  add_output(check, c);

  CLI::App* synth_cmd = app.add_subcommand("synthesize", "Controller synthesis");
  add_plant(synth_cmd, c, true);
  add_gamma(synth_cmd, gamma);
  synth_cmd->get_option("--gamma")->required();
  synth_cmd->add_option("--sigma-q", c.sigma_q, "Parameter system file or 'zero'")
      ->capture_default_str();
  add_output(synth_cmd, c);

  CLI::App* freq = app.add_subcommand("freqresp", "Closed-loop frequency response");
  add_plant(freq, c, true);
  add_design(freq, c, gamma);
  add_grid(freq, c);
  add_output(freq, c);

  CLI::App* simulate = app.add_subcommand("simulate", "Closed-loop simulation");
  add_plant(simulate, c, true);
  add_design(simulate, c, gamma);
  add_sim(simulate, c);
  add_output(simulate, c);

  CLI::App* example =
      app.add_subcommand("string-example", "Vibrating string end to end");
  example->add_option("--rho", c.rho, "Density")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  example->add_option("--tension", c.tension, "Tension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gamma = c.string.gamma;
  add_gamma(example, gamma);
  example->add_option("--a-q", c.string.a_q, "Parameter pole")->capture_default_str();
  example->add_option("--b-q", c.string.b_q, "Parameter input gain")
      ->capture_default_str();
  example->add_option("--c-q", c.string.c_q, "Parameter output gain")
      ->capture_default_str();
  add_grid(example, c);
  example->add_option("--cells", c.cells, "Spatial grid size")
      ->check(CLI::Range(Index{1}, Index{1} << 24))
      ->capture_default_str();
  example->add_option("--steps", c.steps, "Number of steps")
      ->check(CLI::Range(Index{1}, Index{1} << 24))
      ->capture_default_str();
  add_output(example, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "hyphinf: " << e.what() << '\n';
    return kExitInput;
  }

  const auto given = [&](CLI::App* sub) {
    return sub->parsed() && sub->count("--gamma") > 0;
  };
  if (given(synth_cmd) || given(freq) || given(simulate) || example->parsed()) {
    c.gamma = gamma;
  }
  c.string.gamma = gamma;

  try {
    if (check->parsed()) return cmd_check(c, out);
    if (synth_cmd->parsed()) return cmd_synthesize(c, out);
    if (freq->parsed()) return cmd_freqresp(c, out);
    if (simulate->parsed()) return cmd_simulate(c, out);
    return cmd_string_example(c, out);
  } catch (const Error& e) {
    err << "hyphinf: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "hyphinf: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "hyphinf: " << e.what() << '\n';
    return kExitCondition;
  }
}

}  // namespace hyphinf::cli

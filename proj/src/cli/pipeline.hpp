#pragma once

#include <optional>
#include <string>

#include "hyphinf/cli.hpp"
#include "hyphinf/clp.hpp"
#include "hyphinf/json_io.hpp"
#include "hyphinf/sim.hpp"
#include "hyphinf/synth.hpp"

namespace hyphinf::cli::detail {

using io::json;
using num::Vector;

/// Plant as loaded, plus everything cmd_check derives from it.
struct PlantEvaluation {
  io::PlantFile file;
  pde::WellPosedness wellposedness;
  /// Set once the plant is well posed.
  std::optional<pde::AbsorbedPlant> absorbed;
  std::optional<pde::DiscretePlant> discrete;
  std::optional<clp::AssumptionReport> assumptions;

  bool passed() const {
    return wellposedness.wellposed && assumptions && assumptions->all_passed();
  }
};

PlantEvaluation evaluate_plant(io::PlantFile file);
PlantEvaluation load_plant(const RunConfig& config);
json check_json(const PlantEvaluation& e);

/// Zero parameter of size p×m, or the contents of a state-space file.
StateSpace load_sigma_q(const std::string& source, Index p, Index m);

/// Closed-loop quantities named in the synthesis report.
struct ClosedLoopSummary {
  clp::ClosedLoop loop;
  double spectral_radius = 0.0;
  bool stable = false;
  std::optional<clp::NormResult> norm;
};

ClosedLoopSummary summarize_closed_loop(const pde::DiscretePlant& plant,
                                        const StateSpace& controller);

json closed_loop_json(const ClosedLoopSummary& s, std::optional<double> gamma);
json report_json(const synth::SynthesisReport& r);
json sigma_q_json(const synth::SigmaQValidation& v);

/// Controller from --controller, or a fresh synthesis that needs --gamma.
StateSpace obtain_controller(const RunConfig& config,
                             const pde::DiscretePlant& plant);

std::string fmt(double v);

/// Throws kNotWellPosed or kConditionFailed with the failing check named.
void require_checks(const PlantEvaluation& e);

void prepare_output(const RunConfig& config);

/// Named initial profiles and disturbances.
sim::Signal profile(const std::string& name, Index dim, double frequency,
                    const char* what);

struct SimulationRun {
  sim::ClosedLoopTrace trace;
  pde::TravelTimeTable table;
};

/// Runs the closed loop and writes sim_trace.csv, plus reconstruction.csv
/// when requested.
SimulationRun write_simulation(const RunConfig& config,
                               const PlantEvaluation& e,
                               const clp::ClosedLoop& loop,
                               const std::filesystem::path& dir);

/// Writes freqresp.csv and freqresp_summary.json for a stable loop.
json write_freqresp(const clp::ClosedLoop& loop, Index grid,
                    std::optional<double> gamma,
                    const std::filesystem::path& dir);

}  // namespace hyphinf::cli::detail

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "hyphinf/string_reference.hpp"

namespace hyphinf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCondition = 1;
inline constexpr int kExitInput = 2;

struct RunConfig {
  std::filesystem::path plant;
  std::optional<double> gamma;
  /// "zero" or a path to a state-space JSON file.
  std::string sigma_q = "zero";
  /// Controller JSON; synthesized afresh when empty.
  std::filesystem::path controller;
  std::filesystem::path out = ".";
  Index grid = 4096;
  Index cells = 256;
  Index steps = 200;
  /// Plant initial profile: zero, sine or ones.
  std::string x0 = "zero";
  /// Disturbance: zero, sine or step.
  std::string disturbance = "zero";
  double frequency = 2.0;
  bool reconstruct = false;
  double rho = 1.0 / 6.0;
  double tension = 1.0 / 6.0;
  reference::StringExampleParameters string;
};

/// Throws kRange unless γ > 0 and every grid size is at least one.
void validate(const RunConfig& config);

int cmd_check(const RunConfig& config, std::ostream& log);
int cmd_synthesize(const RunConfig& config, std::ostream& log);
int cmd_freqresp(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_string_example(const RunConfig& config, std::ostream& log);

/// Exit code for a library error: 2 for input and configuration
/// problems, 1 for mathematical failures.
int exit_code_for(ErrorCode code);

/// Parses argv, dispatches the subcommand and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace hyphinf::cli

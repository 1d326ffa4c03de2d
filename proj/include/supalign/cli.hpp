#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "supalign/synth.hpp"

namespace supalign::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitData = 3,
  kExitNumeric = 4,
};

struct SweepSpec {
  std::string kind;                 // gamma | det | tr | noise
  std::vector<std::string> grid;    // numbers, or "a/T" for gamma and det
  std::size_t timepoints = 0;       // det only; 0 takes T from the input data
};

/// Everything a command needs. Written to run_config.json in every output
/// directory; `rerun` executes one of those files again.
struct RunConfig {
  std::string command;
  std::string dataset;
  std::vector<std::string> methods{"sha"};
  double epsilon = 1e-4;
  std::string gamma = "auto";
  std::string k = "auto";
  std::size_t iterations = 10;
  std::string init = "kernel_svd";
  double ridge = 1.0;
  bool include_rest = false;
  bool strict = true;
  std::uint64_t seed = 0;
  std::string out;
  SynthConfig synth;
  SweepSpec sweep;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& doc);

/// Validates then runs the command. Throws supalign::Error.
void execute(const RunConfig& cfg);

/// Parses argv, runs, and maps failures to exit codes with a JSON error
/// object on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Resolves a grid token: a plain number, or "a/T" meaning a divided by `t`.
double parse_grid_value(const std::string& token, std::size_t t);

}  // namespace supalign::cli

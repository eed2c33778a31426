#pragma once

// Subcommands behind the `ptc` executable. Each returns a process exit code
// and writes its artifacts under the given output directory.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptc/cli/scenario.hpp"
#include "ptc/sim.hpp"

namespace ptc::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  ///< verify suite found a failing check
  kExitInvalid = 2,      ///< bad scenario, gains or arguments
  kExitDiverged = 3,
  kExitNoCandidate = 4,
};

/// Command-line values that take precedence over the scenario file.
struct Overrides {
  std::optional<Variant> variant;
  bool disturbed = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<std::string> out;
};

void apply_overrides(Scenario& s, const Overrides& o);

/// --out if given; otherwise $PTC_OUT_ROOT/<scenario name> when the variable
/// is set; otherwise the scenario's `output`.
std::string output_dir(const Scenario& s, const Overrides& o);

/// Seeds used by a disturbed run: seed, seed + 1, ..., seed + seeds - 1.
std::vector<std::uint64_t> seed_list(const Scenario& s);

struct RunSummary {
  std::string label;
  std::string variant;
  bool disturbed = false;
  std::uint64_t seed = 0;
  double final_time = 0.0;
  double final_error = 0.0;  ///< ||q - q_d|| at the last sample
  std::optional<double> switch_time;
  std::optional<double> settling_time;  ///< ||q - q_d|| <= 2% of its initial value from here on
  std::vector<double> max_abs_q_deg;
  bool diverged = false;
  bool limits_respected = true;  ///< every configured joint limit held at every sample
};

RunSummary summarize(const sim::Trajectory& traj, const Scenario& s, const std::string& variant,
                     bool disturbed);
nlohmann::json to_json(const RunSummary& r);

/// One simulation of `variant`, nominal when `seed` is empty.
sim::Trajectory simulate(const Scenario& s, Variant variant, std::optional<std::uint64_t> seed);

/// Runs `variant` for every seed on a worker pool; results come back in seed
/// order. `threads == 0` uses the hardware concurrency.
std::vector<sim::Trajectory> simulate_seeds(const Scenario& s, Variant variant,
                                            const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

int cmd_run(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_design(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_verify(const Scenario& s, const std::string& out_dir, std::ostream& log);
int cmd_sweep(const Scenario& s, const std::string& out_dir, std::ostream& log);

/// Entry point shared by the executable and the tests: parses argv, runs the
/// subcommand and maps errors to exit codes.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ptc::cli

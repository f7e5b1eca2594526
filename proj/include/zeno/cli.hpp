#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "zeno/scenario.hpp"

namespace zeno::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitInvariantFailure = 1,
    kExitValidationFailure = 2,
    kExitRuntimeFailure = 3,
};

enum class Engine { Effective, Frame, Stroboscopic };

std::optional<Engine> parse_engine(const std::string& name);
const char* engine_name(Engine engine);

/// Replaces the scenario seeds with the value of ZENO_SEED when it is set.
/// Throws ScenarioError (field "ZENO_SEED") on a malformed value.
void apply_seed_override(Scenario& scenario);

/// Shortest round-trip decimal form, independent of locale.
std::string format_double(double x);

/// Runs one engine and writes <id>_<engine>.csv and <id>_<engine>_report.json
/// into out_dir. Nothing is written unless the run completes.
int cmd_simulate(const std::filesystem::path& scenario_path, Engine engine, const std::filesystem::path& out_dir,
                 std::ostream& out, std::ostream& err);

/// Stroboscopic convergence sweep over the scenario's n_list; writes
/// <id>_sweep.csv and <id>_sweep_report.json.
int cmd_sweep(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err);

/// Runs the invariant suite on the scenario and prints one line per check.
int cmd_verify(const std::filesystem::path& scenario_path, std::ostream& out, std::ostream& err);

}  // namespace zeno::cli

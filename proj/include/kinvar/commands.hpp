#pragma once

#include "kinvar/invariants.hpp"
#include "kinvar/laplace.hpp"
#include "kinvar/scenario.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kinvar {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitInvariantFailure = 1,
    kExitInputError = 2,
    kExitNumericalFailure = 3,
};

/// Flags shared by the subcommands; unset members keep scenario values.
struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    std::optional<double> tol;
    std::optional<std::string> grid;
    std::optional<std::string> engine;
    bool balance = false;
    bool oracle = false;
    std::optional<std::filesystem::path> dump_config;
    std::optional<std::filesystem::path> network;  ///< prove, balance
    std::optional<std::string> pair;               ///< prove: "A,B"
};

/// Scenario from --config with --grid, --engine and --balance applied.
Scenario scenario_with_overrides(const CommandOptions& opt);

/// Relative agreement required between engines under --oracle.
inline constexpr double kOracleTolerance = 1e-6;

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::ordered_json report;
};

/// Writes from_<a>.csv, from_<b>.csv and summary.json into `out`.
CommandResult cmd_simulate(const Scenario& s, const std::filesystem::path& out, bool oracle = false);

/// Evaluates every invariant of the scenario and writes invariants.json.
/// A network failing the cycle conditions needs an explicit `tol`.
CommandResult cmd_invariants(const Scenario& s, std::optional<double> tol, const std::filesystem::path& out);

/// Symbolic proof for one pair; writes proof.json.
CommandResult cmd_prove(const ReactionNetwork& net, const std::string& a, const std::string& b, bool balance,
                        const std::filesystem::path& out);

/// The isomerisation of butenes (cis-2-butene, 1-butene, trans-2-butene).
ReactionNetwork butene_network();

struct Fig1Data {
    std::vector<double> t;
    std::vector<double> ba_over_aa;
    std::vector<double> bb_over_ab;
    std::vector<double> ba_over_ab;
    OvershootReport overshoot;
    double K = 0.0;  ///< k+ / k- of the first step
    double max_rel_deviation = 0.0;  ///< of the third column from K
};

/// Default grid: 400 geometric points on [1e-3, 2].
std::vector<double> fig1_grid();
Fig1Data fig1_data(bool balanced, const std::vector<double>& times = fig1_grid());

/// Writes fig1.csv and fig1_summary.json.
CommandResult cmd_fig1(bool balanced, const std::filesystem::path& out,
                       const std::vector<double>& times = fig1_grid());

/// Writes balanced.json with the cycle reports before and after.
CommandResult cmd_balance(const ReactionNetwork& net, const std::filesystem::path& out);

/// Runs a subcommand, prints its report to `out` and diagnostics to `err`,
/// and maps failures to exit codes.
int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err);

} // namespace kinvar

#pragma once

#include "kinvar/engines.hpp"
#include "kinvar/invariants.hpp"
#include "kinvar/network.hpp"
#include "kinvar/nonlinear.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace kinvar {

enum class BalanceMode { Off, Check, Enforce };

std::string to_string(BalanceMode m);
BalanceMode balance_mode_from_string(const std::string& s);

struct GridSpec {
    double t_max = 1.0;
    std::size_t points = 400;
    bool geometric = true;
    double t_min = 1e-3;  ///< first nonzero point of a geometric grid

    bool operator==(const GridSpec&) const = default;
};

/// "tmax,points,spacing" as given on the command line.
GridSpec parse_grid_flag(const std::string& text);
std::vector<double> make_grid(const GridSpec& g);

struct ExperimentSpec {
    std::string a;
    std::string b;
    std::optional<double> a0;
    std::optional<double> b0;

    bool operator==(const ExperimentSpec&) const = default;
};

struct InvariantEntry {
    InvariantKind kind = InvariantKind::LinearRatio;
    std::string a;
    std::string b;
    std::optional<double> expected_K;  ///< derived from the rates when absent

    bool operator==(const InvariantEntry&) const = default;
};

struct IntegratorSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;

    bool operator==(const IntegratorSettings&) const = default;
};

struct Scenario {
    ReactionNetwork network;
    ExperimentSpec experiment;
    std::optional<GridSpec> grid;  ///< default grid of the network when absent
    std::vector<InvariantEntry> invariants;
    Engine engine = Engine::Auto;
    BalanceMode balance = BalanceMode::Off;
    std::optional<IntegratorSettings> integrator;

    bool operator==(const Scenario&) const = default;
};

/// Parses a scenario object. A string "network" field is a path resolved
/// against `base_dir`. Unknown fields are rejected with their location.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Self-contained form: the network is always written inline.
nlohmann::ordered_json scenario_to_json(const Scenario& s);

IntegratorConfig integrator_config(const Scenario& s);

/// Time grid of the scenario (explicit or default).
std::vector<double> scenario_grid(const Scenario& s);

/// Network after applying the balance mode: Enforce returns the balanced copy,
/// Check and Off return the network unchanged.
ReactionNetwork effective_network(const Scenario& s);

/// Resolved invariant specs against `net`.
std::vector<InvariantSpec> resolve_invariants(const Scenario& s, const ReactionNetwork& net);

} // namespace kinvar

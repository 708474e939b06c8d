#pragma once

#include "kinvar/network.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace kinvar {

/// Network definition file:
///
///   {
///     "species":   ["A", "B", "C"],
///     "reactions": [
///       {"reactants": [["A", 1]], "products": [["B", 1]],
///        "k_forward": 2.0, "k_backward": "1/3"}
///     ]
///   }
///
/// Rates are JSON numbers or strings holding an exact rational ("1/3",
/// "4.623", "2e-3"). `k_backward` may be omitted (irreversible). Unknown keys
/// are rejected.
ReactionNetwork network_from_json(const nlohmann::json& j);
nlohmann::ordered_json network_to_json(const ReactionNetwork& net);

ReactionNetwork load_network(const std::filesystem::path& path);
void save_network(const ReactionNetwork& net, const std::filesystem::path& path);

/// Reads and parses a JSON document, reporting the file and position on error.
nlohmann::json read_json_file(const std::filesystem::path& path);

} // namespace kinvar

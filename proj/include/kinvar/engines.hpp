#pragma once

#include "kinvar/linear.hpp"
#include "kinvar/network.hpp"
#include "kinvar/nonlinear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kinvar {

enum class Engine { Auto, Linear, Nonlinear, ClosedForm };

std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);

/// Linear for all-first-order networks, nonlinear otherwise.
Engine resolve_engine(const ReactionNetwork& net, Engine requested);

/// Topologies with printed closed forms.
enum class ClosedFormTopology { None, SingleReversible, TwoStep, TwoAToB, TwoAToTwoB };
ClosedFormTopology detect_closed_form_topology(const ReactionNetwork& net);

/// Dual experiment evaluated from the closed forms. Throws InputError
/// ("engine mismatch") if the network or the experiment pair is not one the
/// closed forms cover.
DualExperiment closed_form_dual(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b,
                                const std::vector<double>& times, std::optional<double> a0 = std::nullopt,
                                std::optional<double> b0 = std::nullopt);

/// Dual experiment through the chosen engine. Initial amounts default to unit
/// amounts for linear networks and to matched conservation totals otherwise.
DualExperiment run_dual(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b, const std::vector<double>& times,
                        Engine engine, std::optional<double> a0 = std::nullopt,
                        std::optional<double> b0 = std::nullopt, const IntegratorConfig& cfg = {});

/// Geometric 400-point default grid: from the rate matrix spectrum for linear
/// networks, [0.01 / k_max, 10 / k_min] otherwise.
std::vector<double> default_grid(const ReactionNetwork& net);

} // namespace kinvar

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace kinvar {

using SpeciesIndex = std::size_t;

struct Species {
    SpeciesIndex index = 0;
    std::string name;

    bool operator==(const Species&) const = default;
};

/// A stoichiometric term: species index and coefficient (>= 1).
struct Term {
    SpeciesIndex species = 0;
    int coefficient = 1;

    bool operator==(const Term&) const = default;
};

/// Elementary mass-action reaction. Irreversible steps carry k_backward == 0.
///
/// The optional `exact_forward` / `exact_backward` strings hold the rate
/// constant as written in the source file ("4623/1000", "4.623") so that the
/// symbolic engine can work with the intended rational instead of the nearest
/// binary double. Empty means "use the exact binary value of the double".
struct Reaction {
    std::vector<Term> reactants;
    std::vector<Term> products;
    double k_forward = 0.0;
    double k_backward = 0.0;
    std::string exact_forward;
    std::string exact_backward;

    bool reversible() const { return k_backward > 0.0; }
    bool first_order() const;

    bool operator==(const Reaction&) const = default;
};

enum class OrderKind { AllFirstOrder, GeneralMassAction };

struct ReactionNetwork {
    std::vector<Species> species;
    std::vector<Reaction> reactions;
    OrderKind order_kind = OrderKind::GeneralMassAction;

    std::size_t size() const { return species.size(); }
    bool all_first_order() const { return order_kind == OrderKind::AllFirstOrder; }
    /// Index of the species called `name`; throws InputError if absent.
    SpeciesIndex index_of(const std::string& name) const;

    bool operator==(const ReactionNetwork&) const = default;
};

/// Builds a network from species names and reactions, then validates it.
ReactionNetwork make_network(const std::vector<std::string>& names, std::vector<Reaction> reactions);

/// Checks the structural contract and derives order_kind.
/// Throws InputError with a diagnostic on the first violation.
ReactionNetwork validate_network(ReactionNetwork net);

/// dC/dt under mass action. Throws InputError on dimension mismatch.
std::vector<double> mass_action_rhs(const ReactionNetwork& net, const std::vector<double>& c);

/// One directed step of a cycle: reaction index and whether the cycle walks
/// it in the reaction's forward direction.
struct CycleEdge {
    std::size_t reaction = 0;
    bool along_forward = true;
};

struct CycleCondition {
    std::vector<CycleEdge> edges;
    std::vector<SpeciesIndex> vertices;  ///< vertices[i] -> vertices[i+1] is edges[i]
    double forward_product = 1.0;        ///< rate constants in cycle direction
    double backward_product = 1.0;       ///< rate constants against cycle direction
    double relative_mismatch = 0.0;
};

struct CycleConditionReport {
    std::vector<CycleCondition> cycles;
    double max_mismatch = 0.0;
    bool satisfied = true;
};

inline constexpr double kDefaultCycleTolerance = 1e-9;

/// Fundamental cycles of the reversible subgraph (DFS spanning forest; each
/// non-tree reversible reaction closes one cycle). Requires an all-first-order
/// network.
std::vector<CycleCondition> reversible_cycle_basis(const ReactionNetwork& net);

/// Wegscheider conditions on the fundamental cycles of the reversible subgraph.
CycleConditionReport check_cycle_conditions(const ReactionNetwork& net,
                                            double tol = kDefaultCycleTolerance);

/// Adjusts rate constants so every cycle condition holds.
///
/// For each fundamental cycle, every constant walked against the cycle
/// direction is multiplied by (forward product / backward product)^(1/L).
/// In log space that is an orthogonal projection onto the cycle's constraint
/// hyperplane; sweeps repeat until all cycles agree to 1e-15, which is one
/// sweep whenever the cycles share no reactions.
/// Throws InputError if an irreversible reaction lies on a cycle.
ReactionNetwork balance_network(const ReactionNetwork& net);

/// Strictly positive w with w . dC/dt == 0, normalised so min(w) == 1.
/// Throws InputError if none exists.
std::vector<double> conservation_vector(const ReactionNetwork& net);

/// Unit concentration vector for species `i`.
std::vector<double> unit_vector(std::size_t n, SpeciesIndex i);

} // namespace kinvar

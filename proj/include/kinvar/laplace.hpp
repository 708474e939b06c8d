#pragma once

#include "kinvar/exact.hpp"
#include "kinvar/network.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kinvar {

/// Exact first-order generator: entry (i, j) is the total rate of j -> i for
/// i != j, the diagonal makes columns sum to zero.
class ExactRateMatrix {
public:
    ExactRateMatrix() = default;
    explicit ExactRateMatrix(std::size_t n);
    /// Builds the generator from off-diagonal rates; the diagonal is derived.
    static ExactRateMatrix from_rates(const std::vector<std::vector<Rational>>& off_diagonal);

    std::size_t size() const { return n_; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    /// Rate of the step from -> to.
    const Rational& rate(std::size_t from, std::size_t to) const { return (*this)(to, from); }
    /// Adds `k` to the rate of from -> to and updates the diagonal.
    void add_rate(std::size_t from, std::size_t to, const Rational& k);
    /// Replaces the rate of from -> to and updates the diagonal.
    void set_rate(std::size_t from, std::size_t to, const Rational& k);

    /// True when at least one rate was converted from a binary double rather
    /// than given as exact text.
    bool from_floating = false;

private:
    Rational& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    std::size_t n_ = 0;
    std::vector<Rational> a_;
};

/// Exact rates of an all-first-order network. Rates written as text in the
/// source use that rational; others use the exact binary value of the double.
ExactRateMatrix exact_rate_matrix(const ReactionNetwork& net);

/// det(sI - M) by fraction-free (Bareiss) elimination over Q[s].
Polynomial characteristic_polynomial(const ExactRateMatrix& m);

/// Laplace transform of the concentration of `target` in the experiment primed
/// with unit `source`: cofactor_{target,source}(sI - M) / det(sI - M).
RationalFunction transfer_function_cofactor(const ExactRateMatrix& m, SpeciesIndex source, SpeciesIndex target);

/// Rooted spanning forest: each non-root vertex has exactly one outgoing edge
/// (vertex -> parent), following edges from any vertex reaches a root.
struct Forest {
    std::vector<std::pair<SpeciesIndex, SpeciesIndex>> edges;  ///< (from, to), sorted
    std::vector<SpeciesIndex> roots;                           ///< sorted
    Rational weight{1};                                        ///< product of edge rates
};

/// `vertex` must lie in the tree of `root`.
struct Containment {
    SpeciesIndex vertex = 0;
    SpeciesIndex root = 0;
};

inline constexpr std::size_t kMaxForestSize = 12;

/// All spanning forests with exactly the given root set (edges follow
/// reaction directions toward the roots), in canonical order of sorted edge
/// lists. Throws InputError when n exceeds kMaxForestSize.
std::vector<Forest> enumerate_forests(const ExactRateMatrix& m, const std::vector<SpeciesIndex>& roots,
                                      std::optional<Containment> constrained = std::nullopt);

/// Same transform as the cofactor route, assembled from forest weights:
/// coefficient of s^k in the denominator sums forests with k roots; in the
/// numerator it sums forests with k+1 roots where `target` is a root and
/// `source` lies in its tree.
RationalFunction transfer_function_forest(const ExactRateMatrix& m, SpeciesIndex source, SpeciesIndex target);

struct CycleViolation {
    std::vector<SpeciesIndex> cycle;  ///< closed vertex walk, first == last
    Rational forward_product;
    Rational backward_product;
    Rational ratio;  ///< max(product) / min(product)
};

/// Fundamental cycles of the reversible subgraph whose forward and backward
/// rate products differ.
std::vector<CycleViolation> exact_cycle_violations(const ExactRateMatrix& m);

struct FailingCoefficient {
    std::size_t power = 0;
    Rational b_from_a;       ///< coefficient of the numerator of L[b from a]
    Rational a_from_b_times_K;
};

struct ProofReport {
    SpeciesIndex a = 0;
    SpeciesIndex b = 0;
    std::string name_a;
    std::string name_b;
    Rational K;  ///< b_from_a(t) / a_from_b(t)
    bool verified = false;
    std::optional<FailingCoefficient> failing_coefficient;
    std::vector<CycleViolation> cycle_violations;
    Polynomial numerator_b_from_a;
    Polynomial numerator_a_from_b;
    Polynomial denominator;
    std::vector<std::string> warnings;
};

/// Checks coefficient by coefficient that numerator(L[b from a]) equals
/// K_ab * numerator(L[a from b]) over the shared denominator, with K_ab the
/// product of k(x->y)/k(y->x) along a reversible path from a to b.
/// Throws InputError when no reversible path joins a and b.
ProofReport prove_fixed_proportion(const ExactRateMatrix& m, SpeciesIndex a, SpeciesIndex b);

/// Product of k+/k- along a reversible path a -> b, checked for path
/// independence over the reversible component. Throws InputError when no
/// reversible path exists or when two paths disagree.
Rational path_equilibrium_constant(const ExactRateMatrix& m, SpeciesIndex a, SpeciesIndex b);
Rational path_equilibrium_constant(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b);

/// Exactly balanced copy: for each fundamental cycle in turn, the rate that
/// closes it (against the cycle direction) absorbs the full product ratio.
ExactRateMatrix balance_exact(const ExactRateMatrix& m);

/// Vertices joined to `a` by reversible steps (both directions positive).
std::vector<bool> reversible_component(const ExactRateMatrix& m, SpeciesIndex a);

nlohmann::ordered_json proof_to_json(const ProofReport& report);

} // namespace kinvar

#include "kinvar/network.hpp"
#include "kinvar/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace kinvar {

namespace {

double power(double x, int n)
{
    double r = 1.0;
    for (int i = 0; i < n; ++i)
        r *= x;
    return r;
}

double mass_action_term(const std::vector<Term>& side, const std::vector<double>& c)
{
    double r = 1.0;
    for (const auto& t : side)
        r *= power(c[t.species], t.coefficient);
    return r;
}

double relative_mismatch(double a, double b)
{
    const double m = std::max(a, b);
    return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

// Undirected adjacency over first-order reactions, optionally reversible only.
struct Adjacency {
    // (neighbour, reaction index), sorted by reaction index per vertex
    std::vector<std::vector<std::pair<SpeciesIndex, std::size_t>>> out;
};

Adjacency first_order_adjacency(const ReactionNetwork& net, bool reversible_only,
                                std::size_t skip = std::numeric_limits<std::size_t>::max())
{
    Adjacency adj;
    adj.out.resize(net.size());
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
        const auto& rx = net.reactions[r];
        if (r == skip || (reversible_only && !rx.reversible()))
            continue;
        const auto u = rx.reactants.front().species;
        const auto v = rx.products.front().species;
        adj.out[u].emplace_back(v, r);
        adj.out[v].emplace_back(u, r);
    }
    return adj;
}

void require_first_order(const ReactionNetwork& net, const char* what)
{
    if (!net.all_first_order())
        throw InputError(std::string(what) + ": network is not all-first-order");
}

double rate_along(const Reaction& rx, bool forward)
{
    return forward ? rx.k_forward : rx.k_backward;
}

} // namespace

bool Reaction::first_order() const
{
    return reactants.size() == 1 && products.size() == 1 && reactants[0].coefficient == 1 &&
           products[0].coefficient == 1;
}

SpeciesIndex ReactionNetwork::index_of(const std::string& name) const
{
    for (const auto& s : species)
        if (s.name == name)
            return s.index;
    throw InputError("unknown species '" + name + "'");
}

ReactionNetwork make_network(const std::vector<std::string>& names, std::vector<Reaction> reactions)
{
    ReactionNetwork net;
    for (std::size_t i = 0; i < names.size(); ++i)
        net.species.push_back({i, names[i]});
    net.reactions = std::move(reactions);
    return validate_network(std::move(net));
}

ReactionNetwork validate_network(ReactionNetwork net)
{
    const auto n = net.species.size();
    if (n == 0)
        throw InputError("network has no species");
    std::set<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = net.species[i];
        if (s.index != i)
            throw InputError("invalid index: species '" + s.name + "' has index " +
                             std::to_string(s.index) + ", expected " + std::to_string(i));
        if (s.name.empty())
            throw InputError("species " + std::to_string(i) + " has an empty name");
        if (!names.insert(s.name).second)
            throw InputError("duplicate species name '" + s.name + "'");
    }

    bool first_order = true;
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
        const auto& rx = net.reactions[r];
        const auto where = "reaction " + std::to_string(r) + ": ";
        if (rx.reactants.empty() || rx.products.empty())
            throw InputError(where + "empty reactant or product list");
        std::set<SpeciesIndex> lhs;
        for (const auto* side : {&rx.reactants, &rx.products}) {
            for (const auto& t : *side) {
                if (t.species >= n)
                    throw InputError(where + "invalid index " + std::to_string(t.species));
                if (t.coefficient < 1)
                    throw InputError(where + "stoichiometric coefficient must be >= 1");
            }
        }
        for (const auto& t : rx.reactants)
            lhs.insert(t.species);
        for (const auto& t : rx.products)
            if (lhs.count(t.species))
                throw InputError(where + "species '" + net.species[t.species].name +
                                 "' on both sides");
        if (!(rx.k_forward > 0.0) || !std::isfinite(rx.k_forward))
            throw InputError(where + "nonpositive forward rate");
        if (!(rx.k_backward >= 0.0) || !std::isfinite(rx.k_backward))
            throw InputError(where + "negative backward rate");
        first_order = first_order && rx.first_order();
    }
    net.order_kind = first_order ? OrderKind::AllFirstOrder : OrderKind::GeneralMassAction;
    return net;
}

std::vector<double> mass_action_rhs(const ReactionNetwork& net, const std::vector<double>& c)
{
    if (c.size() != net.size())
        throw InputError("dimension mismatch: concentration vector has " + std::to_string(c.size()) +
                         " entries, network has " + std::to_string(net.size()) + " species");
    std::vector<double> dc(c.size(), 0.0);
    for (const auto& rx : net.reactions) {
        double rate = rx.k_forward * mass_action_term(rx.reactants, c);
        if (rx.k_backward > 0.0)
            rate -= rx.k_backward * mass_action_term(rx.products, c);
        for (const auto& t : rx.reactants)
            dc[t.species] -= t.coefficient * rate;
        for (const auto& t : rx.products)
            dc[t.species] += t.coefficient * rate;
    }
    return dc;
}

std::vector<CycleCondition> reversible_cycle_basis(const ReactionNetwork& net)
{
    require_first_order(net, "cycle basis");
    const auto n = net.size();
    const auto adj = first_order_adjacency(net, true);
    constexpr auto none = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> parent(n, none), parent_reaction(n, none), depth(n, 0);
    std::vector<bool> seen(n, false), tree_reaction(net.reactions.size(), false);

    // Iterative DFS; visits neighbours in reaction order so the basis is deterministic.
    for (SpeciesIndex root = 0; root < n; ++root) {
        if (seen[root])
            continue;
        std::vector<std::pair<SpeciesIndex, std::size_t>> stack{{root, 0}};
        seen[root] = true;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == adj.out[v].size()) {
                stack.pop_back();
                continue;
            }
            const auto [w, r] = adj.out[v][next++];
            if (seen[w])
                continue;
            seen[w] = true;
            parent[w] = v;
            parent_reaction[w] = r;
            depth[w] = depth[v] + 1;
            tree_reaction[r] = true;
            stack.emplace_back(w, 0);
        }
    }

    std::vector<CycleCondition> cycles;
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
        const auto& rx = net.reactions[r];
        if (!rx.first_order() || !rx.reversible() || tree_reaction[r])
            continue;
        const auto u = rx.reactants.front().species;
        const auto v = rx.products.front().species;

        // Cycle: u -> v along r, then v back to u through the tree.
        std::vector<SpeciesIndex> up_from_v{v}, up_from_u{u};
        auto a = v, b = u;
        while (depth[a] > depth[b]) {
            a = parent[a];
            up_from_v.push_back(a);
        }
        while (depth[b] > depth[a]) {
            b = parent[b];
            up_from_u.push_back(b);
        }
        while (a != b) {
            a = parent[a];
            b = parent[b];
            up_from_v.push_back(a);
            up_from_u.push_back(b);
        }
        // up_from_v ends at the LCA, as does up_from_u.
        std::vector<SpeciesIndex> path = up_from_v;
        for (auto it = up_from_u.rbegin() + 1; it != up_from_u.rend(); ++it)
            path.push_back(*it);

        CycleCondition cyc;
        cyc.vertices.push_back(u);
        cyc.edges.push_back({r, true});
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto x = path[i], y = path[i + 1];
            // the tree reaction joining x and y is the parent edge of the deeper one
            const auto child = (parent[x] == y) ? x : y;
            const auto tr = parent_reaction[child];
            cyc.vertices.push_back(x);
            cyc.edges.push_back({tr, net.reactions[tr].reactants.front().species == x});
        }
        cyc.vertices.push_back(u);
        cycles.push_back(std::move(cyc));
    }

    for (auto& cyc : cycles) {
        cyc.forward_product = 1.0;
        cyc.backward_product = 1.0;
        for (const auto& e : cyc.edges) {
            cyc.forward_product *= rate_along(net.reactions[e.reaction], e.along_forward);
            cyc.backward_product *= rate_along(net.reactions[e.reaction], !e.along_forward);
        }
        cyc.relative_mismatch = relative_mismatch(cyc.forward_product, cyc.backward_product);
    }
    return cycles;
}

CycleConditionReport check_cycle_conditions(const ReactionNetwork& net, double tol)
{
    CycleConditionReport report;
    report.cycles = reversible_cycle_basis(net);
    for (const auto& c : report.cycles)
        report.max_mismatch = std::max(report.max_mismatch, c.relative_mismatch);
    report.satisfied = report.max_mismatch <= tol;
    return report;
}

ReactionNetwork balance_network(const ReactionNetwork& net)
{
    require_first_order(net, "balance_network");

    // An irreversible step whose endpoints stay connected without it sits on a cycle.
    for (std::size_t r = 0; r < net.reactions.size(); ++r) {
        const auto& rx = net.reactions[r];
        if (rx.reversible())
            continue;
        const auto adj = first_order_adjacency(net, false, r);
        const auto u = rx.reactants.front().species, v = rx.products.front().species;
        std::vector<bool> seen(net.size(), false);
        std::vector<SpeciesIndex> stack{u};
        seen[u] = true;
        while (!stack.empty()) {
            const auto x = stack.back();
            stack.pop_back();
            for (const auto& [y, unused] : adj.out[x])
                if (!seen[y]) {
                    seen[y] = true;
                    stack.push_back(y);
                }
        }
        if (seen[v])
            throw InputError("cannot balance: irreversible reaction " + std::to_string(r) +
                             " lies on a cycle");
    }

    ReactionNetwork out = net;
    const auto basis = reversible_cycle_basis(net);
    if (basis.empty())
        return out;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int max_sweeps = 10000;
    std::vector<bool> touched(net.reactions.size() * 2, false);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool adjusted = false;
        for (const auto& cyc : basis) {
            double fwd = 1.0, bwd = 1.0;
            for (const auto& e : cyc.edges) {
                fwd *= rate_along(out.reactions[e.reaction], e.along_forward);
                bwd *= rate_along(out.reactions[e.reaction], !e.along_forward);
            }
            const double len = static_cast<double>(cyc.edges.size());
            if (relative_mismatch(fwd, bwd) <= std::max(1e-14, 4.0 * len * eps))
                continue;
            const double factor = std::pow(fwd / bwd, 1.0 / len);
            for (const auto& e : cyc.edges) {
                auto& rx = out.reactions[e.reaction];
                if (e.along_forward) {
                    rx.k_backward *= factor;
                    touched[2 * e.reaction + 1] = true;
                } else {
                    rx.k_forward *= factor;
                    touched[2 * e.reaction] = true;
                }
            }
            adjusted = true;
        }
        if (!adjusted)
            break;
    }

    for (std::size_t r = 0; r < out.reactions.size(); ++r) {
        if (touched[2 * r])
            out.reactions[r].exact_forward.clear();
        if (touched[2 * r + 1])
            out.reactions[r].exact_backward.clear();
    }
    const auto check = check_cycle_conditions(out, 1e-12);
    if (!check.satisfied)
        throw NumericalError("balance_network did not converge (mismatch " +
                             std::to_string(check.max_mismatch) + ")");
    return out;
}

std::vector<double> conservation_vector(const ReactionNetwork& net)
{
    const auto n = static_cast<Eigen::Index>(net.size());
    const auto m = static_cast<Eigen::Index>(net.reactions.size());
    if (m == 0)
        return std::vector<double>(net.size(), 1.0);

    Eigen::MatrixXd st = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index r = 0; r < m; ++r) {
        const auto& rx = net.reactions[static_cast<std::size_t>(r)];
        for (const auto& t : rx.reactants)
            st(r, static_cast<Eigen::Index>(t.species)) -= t.coefficient;
        for (const auto& t : rx.products)
            st(r, static_cast<Eigen::Index>(t.species)) += t.coefficient;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(st);
    const Eigen::MatrixXd kernel = lu.kernel();
    if (lu.rank() == n)
        throw InputError("no positive conservation vector found (trivial left null space)");

    Eigen::VectorXd w;
    if (kernel.cols() == 1) {
        w = kernel.col(0);
        if (w.sum() < 0.0)
            w = -w;
    } else {
        // Orthogonal projection of the all-ones vector onto the null space.
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        const Eigen::VectorXd coeff = (kernel.transpose() * kernel).ldlt().solve(kernel.transpose() * ones);
        w = kernel * coeff;
    }
    const double scale = w.cwiseAbs().maxCoeff();
    if (!(w.minCoeff() > 1e-10 * scale))
        throw InputError("no positive conservation vector found");
    w /= w.minCoeff();

    std::vector<double> out(net.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double rounded = std::round(w(i));
        out[static_cast<std::size_t>(i)] = std::abs(w(i) - rounded) < 1e-10 ? rounded : w(i);
    }
    return out;
}

std::vector<double> unit_vector(std::size_t n, SpeciesIndex i)
{
    std::vector<double> v(n, 0.0);
    v.at(i) = 1.0;
    return v;
}

} // namespace kinvar

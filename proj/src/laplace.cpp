#include "kinvar/laplace.hpp"
#include "kinvar/errors.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

namespace kinvar {

namespace {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Bareiss fraction-free determinant; every division is exact in Q[s].
Polynomial bareiss_determinant(PolyMatrix a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return Polynomial(Rational(1));
    bool negate = false;
    Polynomial prev(Rational(1));
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k].is_zero()) {
            std::size_t p = k + 1;
            while (p < n && a[p][k].is_zero())
                ++p;
            if (p == n)
                return Polynomial();
            std::swap(a[k], a[p]);
            negate = !negate;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]).exact_divide(prev);
            a[i][k] = Polynomial();
        }
        prev = a[k][k];
    }
    return negate ? -a[n - 1][n - 1] : a[n - 1][n - 1];
}

PolyMatrix resolvent_matrix(const ExactRateMatrix& m)
{
    const auto n = m.size();
    PolyMatrix a(n, std::vector<Polynomial>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a[i][j] = Polynomial({Rational(-m(i, j)), Rational(i == j ? 1 : 0)});
    return a;
}

bool reversible_pair(const ExactRateMatrix& m, std::size_t i, std::size_t j)
{
    return i != j && m.rate(i, j) > 0 && m.rate(j, i) > 0;
}

// Visits every rooted spanning forest. `is_root[v]` fixes which vertices are
// roots; when `free_roots` is set each vertex may additionally be a root.
class ForestWalker {
public:
    ForestWalker(const ExactRateMatrix& m) : m_(m), n_(m.size()), parent_(n_, none) {}

    using Visit = std::function<void(const std::vector<std::size_t>& parent, const Rational& weight)>;

    void run(const std::vector<int>& role, const Visit& visit)
    {
        role_ = role;
        visit_ = &visit;
        std::fill(parent_.begin(), parent_.end(), none);
        recurse(0, Rational(1));
    }

    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    static constexpr int kRoot = 1, kNonRoot = 0, kEither = 2;

    std::size_t root_of(std::size_t v) const
    {
        while (parent_[v] != none)
            v = parent_[v];
        return v;
    }

private:
    bool closes_cycle(std::size_t v, std::size_t w) const
    {
        // w's chain over already-decided vertices; reaching v means a cycle
        for (std::size_t x = w; x != none; x = parent_[x])
            if (x == v)
                return true;
        return false;
    }

    void recurse(std::size_t v, const Rational& weight)
    {
        if (v == n_) {
            (*visit_)(parent_, weight);
            return;
        }
        if (role_[v] != kNonRoot) {
            parent_[v] = none;
            recurse(v + 1, weight);
        }
        if (role_[v] == kRoot)
            return;
        for (std::size_t w = 0; w < n_; ++w) {
            if (w == v || m_.rate(v, w) == 0)
                continue;
            // undecided vertices have parent none, so the chain stops there
            if (closes_cycle(v, w))
                continue;
            parent_[v] = w;
            recurse(v + 1, weight * m_.rate(v, w));
            parent_[v] = none;
        }
    }

    const ExactRateMatrix& m_;
    std::size_t n_;
    std::vector<std::size_t> parent_;
    std::vector<int> role_;
    const Visit* visit_ = nullptr;
};

std::size_t chain_root(const std::vector<std::size_t>& parent, std::size_t v)
{
    while (parent[v] != ForestWalker::none)
        v = parent[v];
    return v;
}

void require_forest_size(const ExactRateMatrix& m)
{
    if (m.size() > kMaxForestSize)
        throw InputError("forest enumeration limited to " + std::to_string(kMaxForestSize) + " species, got " +
                         std::to_string(m.size()));
}

struct ExactCycle {
    std::vector<SpeciesIndex> vertices;  // closed walk
    SpeciesIndex closing_from = 0;       // non-tree step closing_from -> closing_to
    SpeciesIndex closing_to = 0;
};

std::vector<ExactCycle> exact_cycle_basis(const ExactRateMatrix& m)
{
    const auto n = m.size();
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> parent(n, none), depth(n, 0);
    std::vector<bool> seen(n, false);
    std::vector<std::vector<bool>> tree(n, std::vector<bool>(n, false));

    for (std::size_t root = 0; root < n; ++root) {
        if (seen[root])
            continue;
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        seen[root] = true;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next == n) {
                stack.pop_back();
                continue;
            }
            const auto w = next++;
            if (seen[w] || !reversible_pair(m, v, w))
                continue;
            seen[w] = true;
            parent[w] = v;
            depth[w] = depth[v] + 1;
            tree[v][w] = tree[w][v] = true;
            stack.emplace_back(w, 0);
        }
    }

    std::vector<ExactCycle> cycles;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u + 1; v < n; ++v) {
            if (!reversible_pair(m, u, v) || tree[u][v])
                continue;
            std::vector<std::size_t> from_v{v}, from_u{u};
            auto x = v, y = u;
            while (depth[x] > depth[y])
                from_v.push_back(x = parent[x]);
            while (depth[y] > depth[x])
                from_u.push_back(y = parent[y]);
            while (x != y) {
                from_v.push_back(x = parent[x]);
                from_u.push_back(y = parent[y]);
            }
            ExactCycle c;
            c.vertices.push_back(u);
            c.vertices.insert(c.vertices.end(), from_v.begin(), from_v.end());
            for (auto it = from_u.rbegin() + 1; it != from_u.rend(); ++it)
                c.vertices.push_back(*it);
            c.closing_from = u;
            c.closing_to = v;
            cycles.push_back(std::move(c));
        }
    }
    return cycles;
}

std::pair<Rational, Rational> cycle_products(const ExactRateMatrix& m, const std::vector<SpeciesIndex>& walk)
{
    Rational fwd = 1, bwd = 1;
    for (std::size_t i = 0; i + 1 < walk.size(); ++i) {
        fwd *= m.rate(walk[i], walk[i + 1]);
        bwd *= m.rate(walk[i + 1], walk[i]);
    }
    return {fwd, bwd};
}

// Potentials K(a -> v) over a BFS tree of the reversible component of a.
std::vector<std::optional<Rational>> potentials(const ExactRateMatrix& m, SpeciesIndex a)
{
    std::vector<std::optional<Rational>> k(m.size());
    k[a] = Rational(1);
    std::deque<SpeciesIndex> queue{a};
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (std::size_t v = 0; v < m.size(); ++v) {
            if (k[v] || !reversible_pair(m, u, v))
                continue;
            k[v] = *k[u] * m.rate(u, v) / m.rate(v, u);
            queue.push_back(v);
        }
    }
    return k;
}

} // namespace

ExactRateMatrix::ExactRateMatrix(std::size_t n) : n_(n), a_(n * n, Rational(0)) {}

ExactRateMatrix ExactRateMatrix::from_rates(const std::vector<std::vector<Rational>>& off_diagonal)
{
    ExactRateMatrix m(off_diagonal.size());
    for (std::size_t from = 0; from < m.n_; ++from)
        for (std::size_t to = 0; to < m.n_; ++to)
            if (from != to && off_diagonal[from][to] != 0)
                m.add_rate(from, to, off_diagonal[from][to]);
    return m;
}

void ExactRateMatrix::add_rate(std::size_t from, std::size_t to, const Rational& k)
{
    if (from == to)
        throw InputError("self-loop in exact rate matrix");
    if (k < 0)
        throw InputError("negative rate in exact rate matrix");
    at(to, from) += k;
    at(from, from) -= k;
}

void ExactRateMatrix::set_rate(std::size_t from, std::size_t to, const Rational& k)
{
    if (from == to)
        throw InputError("self-loop in exact rate matrix");
    if (k < 0)
        throw InputError("negative rate in exact rate matrix");
    at(from, from) += at(to, from) - k;
    at(to, from) = k;
}

ExactRateMatrix exact_rate_matrix(const ReactionNetwork& net)
{
    if (!net.all_first_order())
        throw InputError("exact rate matrix: network is not all-first-order");
    ExactRateMatrix m(net.size());
    for (const auto& rx : net.reactions) {
        const auto u = rx.reactants.front().species, v = rx.products.front().species;
        auto rate = [&](double value, const std::string& exact) {
            if (!exact.empty())
                return parse_rational(exact);
            if (value != 0.0)
                m.from_floating = true;
            return exact_from_double(value);
        };
        m.add_rate(u, v, rate(rx.k_forward, rx.exact_forward));
        const Rational kb = rate(rx.k_backward, rx.exact_backward);
        if (kb != 0)
            m.add_rate(v, u, kb);
    }
    return m;
}

Polynomial characteristic_polynomial(const ExactRateMatrix& m)
{
    return bareiss_determinant(resolvent_matrix(m));
}

RationalFunction transfer_function_cofactor(const ExactRateMatrix& m, SpeciesIndex source, SpeciesIndex target)
{
    const auto n = m.size();
    if (source >= n || target >= n)
        throw InputError("transfer function: species index out of range");
    const PolyMatrix a = resolvent_matrix(m);
    // inverse(A)(target, source) = (-1)^{source+target} det(A without row source, column target) / det(A)
    PolyMatrix minor;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == source)
            continue;
        std::vector<Polynomial> row;
        for (std::size_t j = 0; j < n; ++j)
            if (j != target)
                row.push_back(a[i][j]);
        minor.push_back(std::move(row));
    }
    Polynomial num = bareiss_determinant(std::move(minor));
    if ((source + target) % 2 == 1)
        num = -num;
    return {std::move(num), bareiss_determinant(a)};
}

std::vector<Forest> enumerate_forests(const ExactRateMatrix& m, const std::vector<SpeciesIndex>& roots,
                                      std::optional<Containment> constrained)
{
    require_forest_size(m);
    const auto n = m.size();
    std::vector<int> role(n, ForestWalker::kNonRoot);
    for (auto r : roots) {
        if (r >= n)
            throw InputError("forest root out of range");
        role[r] = ForestWalker::kRoot;
    }
    if (constrained && (constrained->vertex >= n || constrained->root >= n))
        throw InputError("containment constraint out of range");

    std::vector<Forest> out;
    ForestWalker walker(m);
    walker.run(role, [&](const std::vector<std::size_t>& parent, const Rational& weight) {
        if (constrained && chain_root(parent, constrained->vertex) != constrained->root)
            return;
        Forest f;
        for (std::size_t v = 0; v < n; ++v) {
            if (parent[v] == ForestWalker::none)
                f.roots.push_back(v);
            else
                f.edges.emplace_back(v, parent[v]);
        }
        f.weight = weight;
        out.push_back(std::move(f));
    });
    std::sort(out.begin(), out.end(), [](const Forest& x, const Forest& y) { return x.edges < y.edges; });
    return out;
}

RationalFunction transfer_function_forest(const ExactRateMatrix& m, SpeciesIndex source, SpeciesIndex target)
{
    require_forest_size(m);
    const auto n = m.size();
    if (source >= n || target >= n)
        throw InputError("transfer function: species index out of range");

    std::vector<Rational> den(n + 1, Rational(0)), num(n, Rational(0));
    ForestWalker walker(m);
    walker.run(std::vector<int>(n, ForestWalker::kEither),
               [&](const std::vector<std::size_t>& parent, const Rational& weight) {
                   std::size_t roots = 0;
                   for (auto p : parent)
                       roots += p == ForestWalker::none;
                   den[roots] += weight;
                   if (parent[target] == ForestWalker::none && chain_root(parent, source) == target)
                       num[roots - 1] += weight;
               });
    return {Polynomial(std::move(num)), Polynomial(std::move(den))};
}

std::vector<bool> reversible_component(const ExactRateMatrix& m, SpeciesIndex a)
{
    const auto k = potentials(m, a);
    std::vector<bool> in(m.size());
    for (std::size_t v = 0; v < m.size(); ++v)
        in[v] = k[v].has_value();
    return in;
}

std::vector<CycleViolation> exact_cycle_violations(const ExactRateMatrix& m)
{
    std::vector<CycleViolation> out;
    for (const auto& c : exact_cycle_basis(m)) {
        auto [fwd, bwd] = cycle_products(m, c.vertices);
        if (fwd == bwd)
            continue;
        CycleViolation v;
        v.cycle = c.vertices;
        v.ratio = fwd > bwd ? Rational(fwd / bwd) : Rational(bwd / fwd);
        v.forward_product = std::move(fwd);
        v.backward_product = std::move(bwd);
        out.push_back(std::move(v));
    }
    return out;
}

Rational path_equilibrium_constant(const ExactRateMatrix& m, SpeciesIndex a, SpeciesIndex b)
{
    if (a >= m.size() || b >= m.size())
        throw InputError("path equilibrium constant: species index out of range");
    const auto k = potentials(m, a);
    if (!k[b])
        throw InputError("no reversible path between species " + std::to_string(a) + " and " + std::to_string(b));
    for (std::size_t u = 0; u < m.size(); ++u) {
        if (!k[u])
            continue;
        for (std::size_t v = 0; v < m.size(); ++v)
            if (reversible_pair(m, u, v) && *k[v] != *k[u] * m.rate(u, v) / m.rate(v, u))
                throw InputError("path dependence detected between species " + std::to_string(u) + " and " +
                                 std::to_string(v) + ": detailed balance is violated");
    }
    return *k[b];
}

Rational path_equilibrium_constant(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b)
{
    return path_equilibrium_constant(exact_rate_matrix(net), a, b);
}

ProofReport prove_fixed_proportion(const ExactRateMatrix& m, SpeciesIndex a, SpeciesIndex b)
{
    if (a >= m.size() || b >= m.size())
        throw InputError("prove: species index out of range");
    const auto k = potentials(m, a);
    if (!k[b])
        throw InputError("no reversible path between species " + std::to_string(a) + " and " + std::to_string(b));

    ProofReport report;
    report.a = a;
    report.b = b;
    report.name_a = std::to_string(a);
    report.name_b = std::to_string(b);
    report.K = *k[b];
    report.cycle_violations = exact_cycle_violations(m);
    if (m.from_floating)
        report.warnings.push_back(
            "rates were converted from binary doubles; detailed balance almost surely fails exactly. "
            "Write rates as rational strings or balance a rationalized network.");

    const auto ba = transfer_function_cofactor(m, a, b);
    const auto ab = transfer_function_cofactor(m, b, a);
    report.numerator_b_from_a = ba.numerator;
    report.numerator_a_from_b = ab.numerator;
    report.denominator = ba.denominator;

    const auto degree = static_cast<std::size_t>(std::max(ba.numerator.degree(), ab.numerator.degree()) + 1);
    for (std::size_t p = 0; p < degree; ++p) {
        const Rational lhs = ba.numerator.coefficient(p);
        const Rational rhs = report.K * ab.numerator.coefficient(p);
        if (lhs != rhs) {
            report.failing_coefficient = FailingCoefficient{p, lhs, rhs};
            break;
        }
    }
    report.verified = !report.failing_coefficient && report.cycle_violations.empty();
    return report;
}

ExactRateMatrix balance_exact(const ExactRateMatrix& m)
{
    ExactRateMatrix out = m;
    for (const auto& c : exact_cycle_basis(m)) {
        const auto [fwd, bwd] = cycle_products(out, c.vertices);
        if (fwd == bwd)
            continue;
        // closing step u -> v is walked forward; its reverse v -> u absorbs the ratio
        const Rational old = out.rate(c.closing_to, c.closing_from);
        out.set_rate(c.closing_to, c.closing_from, old * (fwd / bwd));
    }
    return out;
}

nlohmann::ordered_json proof_to_json(const ProofReport& report)
{
    nlohmann::ordered_json j;
    j["pair"] = {report.name_a, report.name_b};
    j["K"] = to_string(report.K);
    j["K_num"] = report.K.get_num().get_str();
    j["K_den"] = report.K.get_den().get_str();
    j["verified"] = report.verified;
    if (report.failing_coefficient) {
        const auto& f = *report.failing_coefficient;
        j["failing_coefficient"] = {{"power", f.power},
                                    {"b_from_a", to_string(f.b_from_a)},
                                    {"K_times_a_from_b", to_string(f.a_from_b_times_K)}};
    } else {
        j["failing_coefficient"] = nullptr;
    }
    j["cycle_violations"] = nlohmann::ordered_json::array();
    for (const auto& v : report.cycle_violations) {
        nlohmann::ordered_json c;
        c["cycle"] = v.cycle;
        c["forward_product"] = to_string(v.forward_product);
        c["backward_product"] = to_string(v.backward_product);
        c["ratio"] = to_string(v.ratio);
        j["cycle_violations"].push_back(std::move(c));
    }
    j["numerator_b_from_a"] = report.numerator_b_from_a.to_string();
    j["numerator_a_from_b"] = report.numerator_a_from_b.to_string();
    j["denominator"] = report.denominator.to_string();
    j["warnings"] = report.warnings;
    return j;
}

} // namespace kinvar

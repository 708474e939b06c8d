#pragma once

#include "kinvar/exact.hpp"
#include "kinvar/network.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kinvar::testing {

inline Rational random_rational(std::mt19937_64& rng, int max_num = 20, int max_den = 10)
{
    std::uniform_int_distribution<int> num(1, max_num), den(1, max_den);
    Rational q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

inline Reaction first_order(SpeciesIndex from, SpeciesIndex to, const Rational& kf, const Rational& kb)
{
    Reaction r;
    r.reactants = {{from, 1}};
    r.products = {{to, 1}};
    r.k_forward = to_double(kf);
    r.k_backward = kb == 0 ? 0.0 : to_double(kb);
    r.exact_forward = to_string(kf);
    r.exact_backward = kb == 0 ? std::string() : to_string(kb);
    return r;
}

inline Reaction first_order(SpeciesIndex from, SpeciesIndex to, double kf, double kb)
{
    Reaction r;
    r.reactants = {{from, 1}};
    r.products = {{to, 1}};
    r.k_forward = kf;
    r.k_backward = kb;
    return r;
}

inline std::vector<std::string> letters(std::size_t n)
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i)
        names.push_back(std::string(1, static_cast<char>('A' + i)));
    return names;
}

/// Random connected set of undirected pairs: a random spanning tree plus extra
/// chords with probability `extra`.
inline std::vector<std::pair<SpeciesIndex, SpeciesIndex>> random_graph(std::mt19937_64& rng, std::size_t n,
                                                                       double extra = 0.4)
{
    std::vector<std::pair<SpeciesIndex, SpeciesIndex>> edges;
    std::set<std::pair<SpeciesIndex, SpeciesIndex>> seen;
    for (SpeciesIndex v = 1; v < n; ++v) {
        std::uniform_int_distribution<SpeciesIndex> pick(0, v - 1);
        const auto u = pick(rng);
        edges.emplace_back(u, v);
        seen.insert({u, v});
    }
    std::bernoulli_distribution coin(extra);
    for (SpeciesIndex u = 0; u < n; ++u)
        for (SpeciesIndex v = u + 1; v < n; ++v)
            if (!seen.count({u, v}) && coin(rng))
                edges.emplace_back(u, v);
    std::shuffle(edges.begin(), edges.end(), rng);
    // random orientation of each reaction
    std::bernoulli_distribution flip(0.5);
    for (auto& e : edges)
        if (flip(rng))
            std::swap(e.first, e.second);
    return edges;
}

/// Exactly detailed-balanced, fully reversible and connected first-order
/// network: k(i -> j) = g_ij * p_j with symmetric g and positive p, so that
/// p_i k(i -> j) == p_j k(j -> i).
inline ReactionNetwork random_balanced_network(std::mt19937_64& rng, std::size_t n)
{
    std::vector<Rational> p;
    for (std::size_t i = 0; i < n; ++i)
        p.push_back(random_rational(rng, 9, 9));
    std::vector<Reaction> reactions;
    for (const auto& [u, v] : random_graph(rng, n)) {
        const Rational g = random_rational(rng, 12, 6);
        reactions.push_back(first_order(u, v, Rational(g * p[v]), Rational(g * p[u])));
    }
    return make_network(letters(n), std::move(reactions));
}

/// Generic first-order network with random rational rates; some steps are
/// irreversible and cycle conditions generally fail.
inline ReactionNetwork random_first_order_network(std::mt19937_64& rng, std::size_t n, double irreversible = 0.25)
{
    std::bernoulli_distribution irr(irreversible);
    std::vector<Reaction> reactions;
    for (const auto& [u, v] : random_graph(rng, n))
        reactions.push_back(first_order(u, v, random_rational(rng), irr(rng) ? Rational(0) : random_rational(rng)));
    return make_network(letters(n), std::move(reactions));
}

/// Uniform double in [lo, hi].
inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace kinvar::testing

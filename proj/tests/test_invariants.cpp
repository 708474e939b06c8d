#include "kinvar/errors.hpp"
#include "kinvar/invariants.hpp"
#include "kinvar/linear.hpp"
#include "kinvar/nonlinear.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace kinvar;
using namespace kinvar::testing;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ReactionNetwork butene()
{
    return make_network({"cis", "1-b", "trans"}, {first_order(0, 1, 4.623, 10.344), first_order(1, 2, 3.724, 1.000),
                                                  first_order(2, 0, 3.371, 5.616)});
}

InvariantSpec linear_spec(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b)
{
    return default_invariant_spec(net, InvariantKind::LinearRatio, a, b);
}

} // namespace

TEST_CASE("linear ratio of the single step", "[invariants]")
{
    const auto net = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto dual = dual_experiment(net, 0, 1, default_time_grid(build_rate_matrix(net)));
    const auto spec = linear_spec(net, 0, 1);
    CHECK(spec.expected_K == 2.0);
    CHECK(spec.provenance == KProvenance::FromPathProduct);
    const auto r = evaluate_invariant(dual, spec, 1e-10);
    CHECK(r.verdict);
    CHECK(r.max_rel_deviation < 1e-10);
    CHECK(r.t_min > 0.0);
    CHECK(r.ratio_series.size() == dual.from_a.points() - 1 - r.excluded_points);
    for (const auto& [t, ratio] : r.ratio_series)
        CHECK(t > 0.0);
}

TEST_CASE("raw butene constants hold the ratio approximately", "[invariants]")
{
    const auto net = butene();
    const auto dual = dual_experiment(net, 0, 1, make_time_grid(2.0, 400, true, 1e-3));
    const auto spec = linear_spec(net, 0, 1);
    CHECK_THAT(spec.expected_K, WithinRel(4.623 / 10.344, 1e-15));
    const auto loose = evaluate_invariant(dual, spec, 5e-3);
    CHECK(loose.verdict);
    CHECK(loose.max_rel_deviation > 1e-6);
    CHECK_FALSE(evaluate_invariant(dual, spec, 1e-6).verdict);

    const auto bal = balance_network(net);
    const auto bdual = dual_experiment(bal, 0, 1, make_time_grid(2.0, 400, true, 1e-3));
    const auto b = evaluate_invariant(bdual, linear_spec(bal, 0, 1), 1e-8);
    CHECK(b.verdict);
}

TEST_CASE("Fig. 1 shape of the butene ratios", "[invariants]")
{
    const auto net = balance_network(butene());
    const auto times = make_time_grid(20.0, 600, true, 1e-4);
    const auto dual = dual_experiment(net, 0, 1, times);
    const auto eq = equilibrium_composition(build_rate_matrix(net));
    const double eq_ratio = eq[1] / eq[0];
    const auto last = times.size() - 1;
    // B_A / A_A rises from 0, B_B / A_B falls from large values
    CHECK(dual.from_a.at(1, 1) / dual.from_a.at(1, 0) < 1e-3);
    CHECK(dual.from_b.at(1, 1) / dual.from_b.at(1, 0) > 500.0);
    CHECK_THAT(dual.from_a.at(last, 1) / dual.from_a.at(last, 0), WithinRel(eq_ratio, 1e-6));
    CHECK_THAT(dual.from_b.at(last, 1) / dual.from_b.at(last, 0), WithinRel(eq_ratio, 1e-6));
    for (std::size_t k = 2; k < times.size(); ++k) {
        const double prev = dual.from_b.at(k - 1, 1) / dual.from_b.at(k - 1, 0);
        CHECK(dual.from_b.at(k, 1) / dual.from_b.at(k, 0) <= prev * (1 + 1e-12));
    }
    CHECK(evaluate_invariant(dual, linear_spec(net, 0, 1), 1e-10).verdict);
}

TEST_CASE("nonlinear invariants", "[invariants]")
{
    Reaction r;
    r.reactants = {{0, 2}};
    r.products = {{1, 2}};
    r.k_forward = 1.0;
    r.k_backward = 1.0;
    const auto net = make_network({"A", "B"}, {r});
    const auto dual = dual_experiment_nonlinear(net, 0, 1, 1.0, 1.0, make_time_grid(10.0, 200, true, 0.01));
    const auto spec = default_invariant_spec(net, InvariantKind::Nonlinear2A2B, 0, 1);
    CHECK(spec.expected_K == 1.0);
    CHECK(spec.provenance == KProvenance::FromRates);
    const auto rep = evaluate_invariant(dual, spec);
    CHECK(rep.verdict);
    CHECK(rep.max_rel_deviation < 1e-8);
}

TEST_CASE("invariant error cases", "[invariants]")
{
    const auto net = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto dual = dual_experiment(net, 0, 1, {0.0, 1.0});
    auto spec = linear_spec(net, 0, 1);
    spec.expected_K = 0.0;
    CHECK_THROWS_AS(evaluate_invariant(dual, spec), InputError);
    spec = linear_spec(net, 0, 1);
    spec.b = 7;
    CHECK_THROWS_AS(evaluate_invariant(dual, spec), InputError);
    // only t = 0 on the grid: nothing to evaluate
    const auto t0 = dual_experiment(net, 0, 1, {0.0, 1e-300});
    CHECK_THROWS_WITH(evaluate_invariant(t0, linear_spec(net, 0, 1)), ContainsSubstring("degenerate"));
    CHECK_THROWS_AS(invariant_kind_from_string("ratio"), InputError);
}

TEST_CASE("initial-rate limit", "[invariants]")
{
    const auto ab = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto dual = dual_experiment(ab, 0, 1, {0.0, 1.0});
    CHECK(ratio_limit_at_zero(ab, dual, linear_spec(ab, 0, 1)) == 2.0);

    const auto cyc = make_network(letters(3), {first_order(0, 1, 1.0, 1.0), first_order(1, 2, 1.0, 1.0),
                                               first_order(2, 0, 1.0, 1.0)});
    const auto cdual = dual_experiment(cyc, 0, 1, {0.0, 1.0});
    CHECK(ratio_limit_at_zero(cyc, cdual, linear_spec(cyc, 0, 1)) == 1.0);

    const auto chain = make_network(letters(3), {first_order(0, 1, 1.0, 2.0), first_order(1, 2, 3.0, 4.0)});
    const auto chdual = dual_experiment(chain, 0, 2, {0.0, 1.0});
    CHECK_THROWS_AS(ratio_limit_at_zero(chain, chdual, linear_spec(chain, 0, 2)), InputError);
}

TEST_CASE("overshoot scan", "[invariants]")
{
    const auto net = butene();
    const auto m = build_rate_matrix(net);
    const auto from_a = simulate_linear(m, {1, 0, 0}, make_time_grid(2.0, 400, true, 1e-3));
    const auto rep = overshoot_scan(from_a, 0, 1, m);
    CHECK(rep.overshoots);
    REQUIRE_FALSE(rep.crossing_times.empty());
    CHECK(rep.crossing_times.front() > 0.0);
    CHECK(rep.crossing_times.front() < 2.0);
    CHECK(rep.max_overshoot > 0.0);

    const auto ab = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto mab = build_rate_matrix(ab);
    const auto mono = overshoot_scan(simulate_linear(mab, {1, 0}, default_time_grid(mab)), 0, 1, mab);
    CHECK_FALSE(mono.overshoots);

    Trajectory flat;
    flat.times = {0.0, 1.0, 2.0};
    flat.concentrations = Eigen::MatrixXd::Constant(3, 2, 0.5);
    const auto none = overshoot_scan(flat, 0, 1, 1.0);
    CHECK(none.crossing_times.empty());
    CHECK_FALSE(none.overshoots);

    flat.concentrations(1, 0) = 0.0;
    CHECK_THROWS_AS(overshoot_scan(flat, 0, 1, 1.0), InputError);
}

TEST_CASE("balanced networks keep every cross ratio fixed", "[invariants][property]")
{
    std::mt19937_64 rng(40);
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<std::size_t> size(2, 6);
        const auto net = random_balanced_network(rng, size(rng));
        const auto m = build_rate_matrix(net);
        const auto times = default_time_grid(m, 60);
        std::vector<Trajectory> runs;
        for (SpeciesIndex i = 0; i < net.size(); ++i)
            runs.push_back(simulate_linear(m, unit_vector(net.size(), i), times));
        for (SpeciesIndex a = 0; a < net.size(); ++a)
            for (SpeciesIndex b = a + 1; b < net.size(); ++b) {
                DualExperiment dual{runs[a], runs[b], a, b, 1.0};
                const auto spec = linear_spec(net, a, b);
                const auto rep = evaluate_invariant(dual, spec, 1e-8);
                CHECK(rep.verdict);
                if (!rep.verdict)
                    UNSCOPED_INFO("trial " << trial << " pair " << a << "," << b << " dev " << rep.max_rel_deviation);
                // directly joined pairs: the initial-rate quotient is the step constant
                for (const auto& r : net.reactions) {
                    const auto u = r.reactants[0].species, v = r.products[0].species;
                    if ((u == a && v == b) || (u == b && v == a))
                        CHECK_THAT(ratio_limit_at_zero(net, dual, spec), WithinRel(spec.expected_K, 1e-12));
                }
            }
    }
}

TEST_CASE("ratios are invariant under time rescaling", "[invariants][property]")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const auto net = random_balanced_network(rng, 4);
        const double alpha = uniform(rng, 0.1, 10);
        auto fast = net;
        for (auto& r : fast.reactions) {
            r.k_forward *= alpha;
            r.k_backward *= alpha;
            r.exact_forward.clear();
            r.exact_backward.clear();
        }
        const auto times = default_time_grid(build_rate_matrix(net), 50);
        std::vector<double> scaled;
        for (double t : times)
            scaled.push_back(t / alpha);
        const auto r1 = evaluate_invariant(dual_experiment(net, 0, 3, times), linear_spec(net, 0, 3));
        const auto r2 = evaluate_invariant(dual_experiment(fast, 0, 3, scaled), linear_spec(fast, 0, 3));
        REQUIRE(r1.ratio_series.size() == r2.ratio_series.size());
        for (std::size_t k = 0; k < r1.ratio_series.size(); ++k)
            CHECK_THAT(r2.ratio_series[k].second, WithinRel(r1.ratio_series[k].second, 1e-10));
    }
}

TEST_CASE("report JSON", "[invariants]")
{
    const auto net = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto dual = dual_experiment(net, 0, 1, {0.0, 0.5, 1.0});
    auto rep = evaluate_invariant(dual, linear_spec(net, 0, 1));
    const auto j = report_to_json(rep, {"A", "B"});
    CHECK(j["spec"]["kind"] == "linear_ratio");
    CHECK(j["spec"]["pair"] == nlohmann::ordered_json({"A", "B"}));
    CHECK(j["verdict"] == true);
    CHECK(j["series"].size() == 2);
    CHECK(j["limit_at_zero"].is_null());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items())
        keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"spec", "expected_K", "t_min", "max_rel_deviation", "excluded_points",
                                           "tolerance", "limit_at_zero", "verdict", "series"});
}

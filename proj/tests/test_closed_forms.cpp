#include "kinvar/closed_forms.hpp"
#include "kinvar/linear.hpp"
#include "kinvar/nonlinear.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <tuple>

using namespace kinvar;
using namespace kinvar::testing;
namespace cf = kinvar::closed_forms;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Reaction mass_action(std::vector<Term> lhs, std::vector<Term> rhs, double kf, double kb)
{
    Reaction r;
    r.reactants = std::move(lhs);
    r.products = std::move(rhs);
    r.k_forward = kf;
    r.k_backward = kb;
    return r;
}

IntegratorConfig tight()
{
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-12;
    cfg.abs_tol = 1e-14;
    return cfg;
}

} // namespace

TEST_CASE("single reversible step", "[closed_forms]")
{
    const auto z = cf::single_reversible(2.5, 0.7, 0.0);
    CHECK(z.A_A == 1.0);
    CHECK(z.B_A == 0.0);
    CHECK(z.A_B == 0.0);
    CHECK(z.B_B == 1.0);

    const auto inf = cf::single_reversible(1, 1, 100.0);
    CHECK_THAT(inf.A_A, WithinAbs(0.5, 1e-15));
    CHECK_THAT(inf.B_A, WithinAbs(0.5, 1e-15));

    const auto v = cf::single_reversible(2, 1, std::log(2.0) / 3);
    CHECK_THAT(v.A_A, WithinAbs(2.0 / 3, 1e-15));
    CHECK_THAT(v.B_A, WithinAbs(1.0 / 3, 1e-15));
    CHECK_THAT(v.A_B, WithinAbs(1.0 / 6, 1e-15));
    CHECK_THAT(v.B_B, WithinAbs(5.0 / 6, 1e-15));
}

TEST_CASE("single reversible identities", "[closed_forms][property]")
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 500; ++i) {
        const double kp = uniform(rng, 0.1, 10), km = uniform(rng, 0.1, 10), t = uniform(rng, 0, 5);
        const auto c = cf::single_reversible(kp, km, t);
        CHECK_THAT(c.A_A + c.B_A, WithinAbs(1.0, 2e-16));
        CHECK_THAT(c.A_B + c.B_B, WithinAbs(1.0, 2e-16));
        const auto swapped = cf::single_reversible(km, kp, t);
        CHECK_THAT(c.B_A, WithinRel(swapped.A_B, 1e-15));
        if (t > 0)
            CHECK_THAT(c.B_A / c.A_B, WithinRel(kp / km, 1e-14));
    }
}

TEST_CASE("two-step eigenvalues", "[closed_forms]")
{
    const auto e = cf::two_step_eigenvalues(2, 1, 3);
    CHECK_THAT(e.lambda1, WithinRel(3 + std::sqrt(3.0), 1e-15));
    CHECK_THAT(e.lambda2, WithinRel(3 - std::sqrt(3.0), 1e-15));
    const auto u = cf::two_step_eigenvalues(1, 1, 1);
    CHECK_THAT(u.lambda1, WithinRel((3 + std::sqrt(5.0)) / 2, 1e-15));
    CHECK_THAT(u.lambda2, WithinRel((3 - std::sqrt(5.0)) / 2, 1e-15));
    for (const auto& [l, kp1, kp2] : {std::tuple{e, 2.0, 3.0}, std::tuple{u, 1.0, 1.0}}) {
        CHECK(l.lambda1 > kp2);
        CHECK(kp2 > l.lambda2);
        CHECK(l.lambda1 > kp1);
        CHECK(kp1 > l.lambda2);
        CHECK(l.lambda2 > 0);
    }
    // they are the nonzero eigenvalues of the rate matrix, negated
    const auto net = make_network(letters(3), {first_order(0, 1, 2.0, 1.0), first_order(1, 2, 3.0, 0.0)});
    const auto ev = eigenvalues(build_rate_matrix(net));
    CHECK_THAT(-ev[1].real(), WithinRel(e.lambda2, 1e-12));
    CHECK_THAT(-ev[2].real(), WithinRel(e.lambda1, 1e-12));
}

TEST_CASE("two-step concentrations", "[closed_forms]")
{
    const auto z = cf::two_step_concentrations(2, 1, 3, 0.0);
    CHECK_THAT(z.A_A, WithinAbs(1, 1e-15));
    CHECK_THAT(z.B_A, WithinAbs(0, 1e-15));
    CHECK_THAT(z.C_A, WithinAbs(0, 1e-15));
    CHECK_THAT(z.A_B, WithinAbs(0, 1e-15));
    CHECK_THAT(z.B_B, WithinAbs(1, 1e-15));
    CHECK_THAT(z.C_B, WithinAbs(0, 1e-15));
    const auto inf = cf::two_step_concentrations(2, 1, 3, 60.0);
    CHECK_THAT(inf.C_A, WithinAbs(1, 1e-15));
    CHECK_THAT(inf.C_B, WithinAbs(1, 1e-15));

    const auto net = make_network(letters(3), {first_order(0, 1, 2.0, 1.0), first_order(1, 2, 3.0, 0.0)});
    const auto dual = dual_experiment(net, 0, 1, {0.0, 1.0});
    const auto c = cf::two_step_concentrations(2, 1, 3, 1.0);
    CHECK_THAT(dual.from_a.at(1, 0), WithinAbs(c.A_A, 1e-12));
    CHECK_THAT(dual.from_a.at(1, 1), WithinAbs(c.B_A, 1e-12));
    CHECK_THAT(dual.from_a.at(1, 2), WithinAbs(c.C_A, 1e-12));
    CHECK_THAT(dual.from_b.at(1, 0), WithinAbs(c.A_B, 1e-12));
    CHECK_THAT(dual.from_b.at(1, 1), WithinAbs(c.B_B, 1e-12));
    CHECK_THAT(dual.from_b.at(1, 2), WithinAbs(c.C_B, 1e-12));
}

TEST_CASE("two-step mass balance and oracle agreement", "[closed_forms][property]")
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const double kp1 = uniform(rng, 0.1, 10), km1 = uniform(rng, 0.1, 10), kp2 = uniform(rng, 0.1, 10);
        const double t = uniform(rng, 0, 3);
        const auto c = cf::two_step_concentrations(kp1, km1, kp2, t);
        CHECK_THAT(c.A_A + c.B_A + c.C_A, WithinAbs(1.0, 1e-14));
        CHECK_THAT(c.A_B + c.B_B + c.C_B, WithinAbs(1.0, 1e-14));
        const auto net = make_network(letters(3), {first_order(0, 1, kp1, km1), first_order(1, 2, kp2, 0.0)});
        const auto dual = dual_experiment(net, 0, 1, {0.0, t > 0 ? t : 1e-9});
        if (t > 0) {
            CHECK_THAT(dual.from_a.at(1, 1), WithinAbs(c.B_A, 1e-8));
            CHECK_THAT(dual.from_b.at(1, 0), WithinAbs(c.A_B, 1e-8));
            CHECK_THAT(c.B_A / c.A_B, WithinRel(kp1 / km1, 1e-8));
        }
    }
}

TEST_CASE("three-cycle Laplace data", "[closed_forms]")
{
    const std::array<Rational, 6> ones{1, 1, 1, 1, 1, 1};
    const auto u = cf::three_cycle_laplace(ones);
    CHECK(u.sigma1 == 6);
    CHECK(u.sigma2 == 9);
    const Polynomial s = Polynomial::monomial(1, 1);
    const Polynomial s3 = s + Polynomial(3);
    CHECK(u.delta == s * s3 * s3);
    CHECK(equivalent(u.B_A, RationalFunction(s3, s * s3 * s3)));
    CHECK(u.B_A.reduced().numerator == Polynomial(1));

    const std::array<Rational, 6> butene{Rational(4623, 1000), Rational(10344, 1000), Rational(3724, 1000),
                                         Rational(1),          Rational(3371, 1000),  Rational(5616, 1000)};
    CHECK(cf::three_cycle_laplace(butene).sigma1 == Rational(14339, 500));
}

TEST_CASE("2A <-> B closed form", "[closed_forms]")
{
    const auto z = cf::nonlinear_2A_B(1.3, 0.4, 0.0);
    CHECK_THAT(z.A_A, WithinAbs(1, 1e-15));
    CHECK_THAT(z.B_A, WithinAbs(0, 1e-15));
    CHECK_THAT(z.A_B, WithinAbs(0, 1e-15));

    const auto inf = cf::nonlinear_2A_B(1, 1, 50.0);
    CHECK_THAT(inf.A_A, WithinAbs(0.5, 1e-15));
    CHECK_THAT(inf.B_A, WithinAbs(0.25, 1e-15));

    // initial slopes fix the time scale: dB_A/dt = kp and dA_B/dt = km at t = 0
    for (const auto& [kp, km] : {std::pair{1.0, 2.0}, std::pair{3.0, 0.5}, std::pair{0.2, 7.0}}) {
        const double h = 1e-7;
        const auto c = cf::nonlinear_2A_B(kp, km, h);
        CHECK_THAT(c.B_A / h, WithinRel(kp, 1e-5));
        CHECK_THAT(c.A_B / h, WithinRel(km, 1e-5));
    }

    const auto net = make_network({"A", "B"}, {mass_action({{0, 2}}, {{1, 1}}, 1.0, 2.0)});
    const auto dual = dual_experiment_nonlinear(net, 0, 1, 1.0, 0.5, {0.0, 0.7}, tight());
    const auto c = cf::nonlinear_2A_B(1.0, 2.0, 0.7);
    CHECK_THAT(dual.from_a.at(1, 0), WithinAbs(c.A_A, 1e-9));
    CHECK_THAT(dual.from_a.at(1, 1), WithinAbs(c.B_A, 1e-9));
    CHECK_THAT(dual.from_b.at(1, 0), WithinAbs(c.A_B, 1e-9));
}

TEST_CASE("2A <-> B conservation along the closed form", "[closed_forms][property]")
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        const double kp = uniform(rng, 0.1, 10), km = uniform(rng, 0.1, 10), t = uniform(rng, 0, 10);
        const auto c = cf::nonlinear_2A_B(kp, km, t);
        CHECK_THAT(c.A_A + 2 * c.B_A, WithinAbs(1.0, 1e-12));
        if (t > 0.01)
            CHECK_THAT(c.B_A / (c.A_A * c.A_B), WithinRel(kp / km, 1e-9));
    }
}

TEST_CASE("2A <-> 2B closed form", "[closed_forms]")
{
    const auto z = cf::nonlinear_2A_2B(2.0, 0.5, 0.0);
    CHECK_THAT(z.A_A, WithinAbs(1, 1e-15));
    CHECK_THAT(z.B_A, WithinAbs(0, 1e-15));
    CHECK_THAT(z.A_B, WithinAbs(0, 1e-15));
    CHECK_THAT(z.B_B, WithinAbs(1, 1e-15));

    for (double t : {0.1, 0.5, 2.0}) {
        const double k = 1.7;
        CHECK_THAT(cf::nonlinear_2A_2B(k, k, t).A_A, WithinRel(1.0 / (1.0 + std::tanh(2 * k * t)), 1e-14));
    }
    CHECK_THAT(cf::nonlinear_2A_2B(1, 1, 40).A_A, WithinAbs(0.5, 1e-15));
    const auto inf = cf::nonlinear_2A_2B(4, 1, 40.0);
    CHECK_THAT(inf.A_A, WithinAbs(1.0 / 3, 1e-15));
    CHECK_THAT(inf.B_A, WithinAbs(2.0 / 3, 1e-15));

    std::mt19937_64 rng(6);
    for (int i = 0; i < 200; ++i) {
        const double kp = uniform(rng, 0.1, 10), km = uniform(rng, 0.1, 10), t = uniform(rng, 0, 10);
        const auto c = cf::nonlinear_2A_2B(kp, km, t);
        CHECK_THAT(c.A_A + c.B_A, WithinAbs(1.0, 1e-12));
        CHECK_THAT(c.A_B + c.B_B, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("nonlinear closed forms match integration", "[closed_forms][property]")
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 100; ++i) {
        const double kp = uniform(rng, 0.1, 10), km = uniform(rng, 0.1, 10), t = uniform(rng, 0.01, 5);
        const auto n1 = make_network({"A", "B"}, {mass_action({{0, 2}}, {{1, 1}}, kp, km)});
        const auto d1 = dual_experiment_nonlinear(n1, 0, 1, 1.0, 0.5, {0.0, t}, tight());
        const auto c1 = cf::nonlinear_2A_B(kp, km, t);
        CHECK_THAT(d1.from_a.at(1, 0), WithinAbs(c1.A_A, 1e-8));
        CHECK_THAT(d1.from_b.at(1, 0), WithinAbs(c1.A_B, 1e-8));

        const auto n2 = make_network({"A", "B"}, {mass_action({{0, 2}}, {{1, 2}}, kp, km)});
        const auto d2 = dual_experiment_nonlinear(n2, 0, 1, 1.0, 1.0, {0.0, t}, tight());
        const auto c2 = cf::nonlinear_2A_2B(kp, km, t);
        CHECK_THAT(d2.from_a.at(1, 0), WithinAbs(c2.A_A, 1e-8));
        CHECK_THAT(d2.from_b.at(1, 0), WithinAbs(c2.A_B, 1e-8));
    }
}

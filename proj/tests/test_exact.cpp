#include "kinvar/errors.hpp"
#include "kinvar/exact.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace kinvar;

TEST_CASE("rational parsing", "[exact]")
{
    CHECK(parse_rational("3") == Rational(3));
    CHECK(parse_rational("-7/4") == Rational(-7, 4));
    CHECK(parse_rational("4.623") == Rational(4623, 1000));
    CHECK(parse_rational("1.5e-3") == Rational(3, 2000));
    CHECK(parse_rational("2E2") == Rational(200));
    CHECK(parse_rational("6/4") == Rational(3, 2));
    CHECK_THROWS_AS(parse_rational("1/0"), InputError);
    CHECK_THROWS_AS(parse_rational("abc"), InputError);
    CHECK_THROWS_AS(parse_rational(""), InputError);
    CHECK_THROWS_AS(parse_rational("1.2.3"), InputError);
}

TEST_CASE("double conversions are exact", "[exact]")
{
    CHECK(exact_from_double(0.5) == Rational(1, 2));
    CHECK(exact_from_double(0.1) != Rational(1, 10));
    CHECK(to_double(exact_from_double(0.1)) == 0.1);
    CHECK(to_double(Rational(1, 3)) == 1.0 / 3.0);
    CHECK(to_double(Rational(4623, 1000)) == 4.623);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        CHECK(to_double(exact_from_double(x)) == x);
    }
}

TEST_CASE("polynomial arithmetic", "[exact]")
{
    const Polynomial s = Polynomial::monomial(1, 1);
    const Polynomial p = (s + Polynomial(3)) * (s + Polynomial(3));  // s^2 + 6s + 9
    CHECK(p.degree() == 2);
    CHECK(p.coefficient(0) == 9);
    CHECK(p.coefficient(1) == 6);
    CHECK(p.coefficient(5) == 0);
    CHECK(p.evaluate(Rational(-3)) == 0);
    CHECK((p - p).is_zero());
    CHECK((p - p).degree() == -1);

    Polynomial q, r;
    (p + Polynomial(1)).divide(s + Polynomial(3), q, r);
    CHECK(q == s + Polynomial(3));
    CHECK(r == Polynomial(1));
    CHECK(p.exact_divide(s + Polynomial(3)) == s + Polynomial(3));
    CHECK_THROWS(p.exact_divide(s));

    CHECK(Polynomial::gcd(p * s, Rational(2) * s * (s + Polynomial(3))) == s * (s + Polynomial(3)));
    CHECK(Polynomial::linear(2) == s - Polynomial(2));
}

TEST_CASE("rational function reduction and equivalence", "[exact]")
{
    const Polynomial s = Polynomial::monomial(1, 1);
    const RationalFunction f(s + Polynomial(3), s * (s + Polynomial(3)) * (s + Polynomial(3)));
    const auto g = f.reduced();
    CHECK(g.numerator == Polynomial(1));
    CHECK(g.denominator == s * s + Rational(3) * s);
    CHECK(equivalent(f, g));
    CHECK_FALSE(f == g);
    CHECK(f.evaluate(Rational(1)) == Rational(1, 4));
}

TEST_CASE("polynomial printing", "[exact]")
{
    const Polynomial s = Polynomial::monomial(1, 1);
    CHECK((s * s - Rational(1, 2) * s + Polynomial(3)).to_string() == "s^2 - (1/2)*s + 3");
    CHECK(Polynomial().to_string() == "0");
}

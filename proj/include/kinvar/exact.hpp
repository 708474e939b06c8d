#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace kinvar {

using Rational = mpq_class;

/// Parses "3", "-7/4", "4.623", "1.5e-3" into an exact rational.
/// Throws InputError on malformed text or a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact binary value of a finite double.
Rational exact_from_double(double x);

/// Nearest double to an exact rational (correctly rounded through the text path).
double to_double(const Rational& q);

std::string to_string(const Rational& q);

/// Dense univariate polynomial in s over the rationals, ascending coefficients.
/// The zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rational> ascending);
    Polynomial(const Rational& constant);  // NOLINT(google-explicit-constructor)

    static Polynomial monomial(const Rational& c, std::size_t degree);
    /// s - root
    static Polynomial linear(const Rational& root);

    bool is_zero() const { return coeffs_.empty(); }
    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    /// Coefficient of s^k (zero beyond the degree).
    Rational coefficient(std::size_t k) const;
    const Rational& leading() const;
    const std::vector<Rational>& coefficients() const { return coeffs_; }

    Rational evaluate(const Rational& s) const;
    double evaluate(double s) const;

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    Polynomial& operator*=(const Polynomial& o);
    Polynomial& operator*=(const Rational& c);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
    friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
    friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
    Polynomial operator-() const;

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

    /// Euclidean division: *this = q*d + r with deg r < deg d.
    void divide(const Polynomial& d, Polynomial& quotient, Polynomial& remainder) const;
    /// Quotient of a division known to be exact; throws std::logic_error otherwise.
    Polynomial exact_divide(const Polynomial& d) const;
    /// Monic greatest common divisor.
    static Polynomial gcd(Polynomial a, Polynomial b);

    std::string to_string(std::string_view var = "s") const;

private:
    void trim();
    std::vector<Rational> coeffs_;
};

/// numerator(s) / denominator(s), kept unreduced until `reduced()` is called.
struct RationalFunction {
    Polynomial numerator;
    Polynomial denominator{Rational(1)};

    RationalFunction() = default;
    RationalFunction(Polynomial num, Polynomial den);

    /// Common factors cancelled, denominator monic.
    RationalFunction reduced() const;
    Rational evaluate(const Rational& s) const;
    double evaluate(double s) const;
    std::string to_string(std::string_view var = "s") const;
};

/// Structural equality of the stored numerator and denominator.
bool operator==(const RationalFunction& a, const RationalFunction& b);
/// Equality as functions: a.num * b.den == b.num * a.den.
bool equivalent(const RationalFunction& a, const RationalFunction& b);

} // namespace kinvar

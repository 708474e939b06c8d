#include "kinvar/exact.hpp"
#include "kinvar/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kinvar {

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

mpz_class pow10(unsigned long e)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

} // namespace

Rational parse_rational(std::string_view text)
{
    const auto bad = [&] { return InputError("malformed rational '" + std::string(text) + "'"); };
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);

    bool negative = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    if (s.empty())
        throw bad();

    Rational q;
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const auto num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw bad();
        const mpz_class d{std::string(den)};
        if (d == 0)
            throw InputError("zero denominator in '" + std::string(text) + "'");
        q = Rational(mpz_class(std::string(num)), d);
    } else {
        long exponent = 0;
        if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
            auto exp_text = s.substr(e + 1);
            if (!exp_text.empty() && exp_text.front() == '+')
                exp_text.remove_prefix(1);
            const auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
            if (ec != std::errc() || ptr != exp_text.data() + exp_text.size() || std::labs(exponent) > 4000)
                throw bad();
            s = s.substr(0, e);
        }
        std::string digits;
        const auto dot = s.find('.');
        if (dot == std::string_view::npos) {
            if (!all_digits(s))
                throw bad();
            digits = s;
        } else {
            const auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
            if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
                throw bad();
            digits = std::string(ip) + std::string(fp);
            exponent -= static_cast<long>(fp.size());
        }
        mpz_class mant(digits.empty() ? std::string("0") : digits);
        if (exponent >= 0)
            q = Rational(mant * pow10(static_cast<unsigned long>(exponent)));
        else
            q = Rational(mant, pow10(static_cast<unsigned long>(-exponent)));
    }
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

Rational exact_from_double(double x)
{
    if (!std::isfinite(x))
        throw InputError("cannot convert a non-finite value to a rational");
    Rational q(x);  // mpq_set_d is exact
    q.canonicalize();
    return q;
}

double to_double(const Rational& q)
{
    // mpq_get_d truncates; go through a long decimal expansion and strtod-equivalent rounding.
    mpf_class f(q, 256);
    mp_exp_t exp = 0;
    const std::string digits = f.get_str(exp, 10, 40);
    if (digits.empty() || digits == "0")
        return 0.0;
    std::string text;
    std::string_view d = digits;
    if (d.front() == '-') {
        text += '-';
        d.remove_prefix(1);
    }
    text += "0.";
    text += d;
    text += "e" + std::to_string(exp);
    double out = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
}

std::string to_string(const Rational& q)
{
    return q.get_str();
}

// ---------------------------------------------------------------------------

Polynomial::Polynomial(std::vector<Rational> ascending) : coeffs_(std::move(ascending))
{
    trim();
}

Polynomial::Polynomial(const Rational& constant)
{
    if (constant != 0)
        coeffs_.push_back(constant);
}

Polynomial Polynomial::monomial(const Rational& c, std::size_t degree)
{
    std::vector<Rational> v(degree + 1, Rational(0));
    v[degree] = c;
    return Polynomial(std::move(v));
}

Polynomial Polynomial::linear(const Rational& root)
{
    return Polynomial(std::vector<Rational>{Rational(-root), Rational(1)});
}

void Polynomial::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == 0)
        coeffs_.pop_back();
}

Rational Polynomial::coefficient(std::size_t k) const
{
    return k < coeffs_.size() ? coeffs_[k] : Rational(0);
}

const Rational& Polynomial::leading() const
{
    if (coeffs_.empty())
        throw std::logic_error("leading coefficient of the zero polynomial");
    return coeffs_.back();
}

Rational Polynomial::evaluate(const Rational& s) const
{
    Rational acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

double Polynomial::evaluate(double s) const
{
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * s + to_double(*it);
    return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o)
{
    if (o.coeffs_.size() > coeffs_.size())
        coeffs_.resize(o.coeffs_.size(), Rational(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i)
        coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o)
{
    if (o.coeffs_.size() > coeffs_.size())
        coeffs_.resize(o.coeffs_.size(), Rational(0));
    for (std::size_t i = 0; i < o.coeffs_.size(); ++i)
        coeffs_[i] -= o.coeffs_[i];
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o)
{
    if (is_zero() || o.is_zero()) {
        coeffs_.clear();
        return *this;
    }
    std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0)
            continue;
        for (std::size_t j = 0; j < o.coeffs_.size(); ++j)
            r[i + j] += coeffs_[i] * o.coeffs_[j];
    }
    coeffs_ = std::move(r);
    trim();
    return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c)
{
    for (auto& x : coeffs_)
        x *= c;
    trim();
    return *this;
}

Polynomial Polynomial::operator-() const
{
    Polynomial r = *this;
    for (auto& x : r.coeffs_)
        x = -x;
    return r;
}

void Polynomial::divide(const Polynomial& d, Polynomial& quotient, Polynomial& remainder) const
{
    if (d.is_zero())
        throw std::domain_error("polynomial division by zero");
    remainder = *this;
    if (degree() < d.degree()) {
        quotient = Polynomial();
        return;
    }
    std::vector<Rational> q(static_cast<std::size_t>(degree() - d.degree() + 1), Rational(0));
    const Rational& lead = d.leading();
    while (!remainder.is_zero() && remainder.degree() >= d.degree()) {
        const auto shift = static_cast<std::size_t>(remainder.degree() - d.degree());
        const Rational c = remainder.leading() / lead;
        q[shift] = c;
        for (std::size_t i = 0; i < d.coeffs_.size(); ++i)
            remainder.coeffs_[i + shift] -= c * d.coeffs_[i];
        remainder.trim();
    }
    quotient = Polynomial(std::move(q));
}

Polynomial Polynomial::exact_divide(const Polynomial& d) const
{
    Polynomial q, r;
    divide(d, q, r);
    if (!r.is_zero())
        throw std::logic_error("inexact polynomial division");
    return q;
}

Polynomial Polynomial::gcd(Polynomial a, Polynomial b)
{
    while (!b.is_zero()) {
        Polynomial q, r;
        a.divide(b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.is_zero())
        a *= Rational(1) / a.leading();
    return a;
}

std::string Polynomial::to_string(std::string_view var) const
{
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = coeffs_.size(); k-- > 0;) {
        const Rational& c = coeffs_[k];
        if (c == 0)
            continue;
        const bool neg = c < 0;
        const Rational mag = neg ? Rational(-c) : c;
        if (first)
            os << (neg ? "-" : "");
        else
            os << (neg ? " - " : " + ");
        first = false;
        const bool unit = mag == 1;
        if (k == 0 || !unit)
            os << (mag.get_den() == 1 ? mag.get_str() : "(" + mag.get_str() + ")");
        if (k > 0) {
            if (!unit)
                os << "*";
            os << var;
            if (k > 1)
                os << "^" << k;
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : numerator(std::move(num)), denominator(std::move(den))
{
    if (denominator.is_zero())
        throw std::domain_error("rational function with zero denominator");
}

RationalFunction RationalFunction::reduced() const
{
    const Polynomial g = Polynomial::gcd(numerator, denominator);
    Polynomial num = numerator.exact_divide(g);
    Polynomial den = denominator.exact_divide(g);
    const Rational lead = den.leading();
    num *= Rational(1) / lead;
    den *= Rational(1) / lead;
    return {std::move(num), std::move(den)};
}

Rational RationalFunction::evaluate(const Rational& s) const
{
    return numerator.evaluate(s) / denominator.evaluate(s);
}

double RationalFunction::evaluate(double s) const
{
    return numerator.evaluate(s) / denominator.evaluate(s);
}

std::string RationalFunction::to_string(std::string_view var) const
{
    return "(" + numerator.to_string(var) + ") / (" + denominator.to_string(var) + ")";
}

bool operator==(const RationalFunction& a, const RationalFunction& b)
{
    return a.numerator == b.numerator && a.denominator == b.denominator;
}

bool equivalent(const RationalFunction& a, const RationalFunction& b)
{
    return a.numerator * b.denominator == b.numerator * a.denominator;
}

} // namespace kinvar

#include "kinvar/closed_forms.hpp"

#include <cassert>
#include <cmath>

namespace kinvar::closed_forms {

namespace {

// tanh with its t -> infinity limit substituted for large arguments.
double saturating_tanh(double x)
{
    return x > 20.0 ? 1.0 : std::tanh(x);
}

} // namespace

SingleReversible single_reversible(double kp, double km, double t)
{
    const double sum = kp + km;
    const double e = std::exp(-sum * t);
    // -expm1 keeps 1 - e accurate for small t
    const double one_minus_e = -std::expm1(-sum * t);
    return {
        (km + kp * e) / sum,
        kp * one_minus_e / sum,
        km * one_minus_e / sum,
        (kp + km * e) / sum,
    };
}

TwoStepEigenvalues two_step_eigenvalues(double kp1, double km1, double kp2)
{
    const double b = kp1 + km1 + kp2;
    const double disc = b * b - 4.0 * kp1 * kp2;
    assert(disc > 0.0);
    const double root = std::sqrt(disc);
    const double l1 = 0.5 * (b + root);
    // product of roots is kp1 kp2; avoids cancellation in b - root
    return {l1, kp1 * kp2 / l1};
}

TwoStep two_step_concentrations(double kp1, double km1, double kp2, double t)
{
    const auto [l1, l2] = two_step_eigenvalues(kp1, km1, kp2);
    const double d = l1 - l2;
    const double e1 = std::exp(-l1 * t);
    const double e2 = std::exp(-l2 * t);
    // e^{-l2 t} - e^{-l1 t} without cancellation
    const double diff = e2 * -std::expm1(-d * t);
    TwoStep c{};
    c.A_A = (l1 * (kp2 - l2) * e2 + l2 * (l1 - kp2) * e1) / (kp2 * d);
    c.B_A = kp1 / d * diff;
    c.C_A = 1.0 - (l1 * e2 - l2 * e1) / d;
    c.A_B = km1 / d * diff;
    c.B_B = (l2 * (l1 - kp2) * e2 + l1 * (kp2 - l2) * e1) / (kp2 * d);
    c.C_B = 1.0 - ((l1 - kp2) * e2 + (kp2 - l2) * e1) / d;
    return c;
}

ThreeCycleLaplace three_cycle_laplace(const std::array<Rational, 6>& k)
{
    const Rational &p1 = k[0], &m1 = k[1], &p2 = k[2], &m2 = k[3], &p3 = k[4], &m3 = k[5];
    ThreeCycleLaplace out;
    out.sigma1 = p1 + m1 + p2 + m2 + p3 + m3;
    out.sigma2 = p1 * p2 + p2 * p3 + p3 * p1 + p1 * m2 + p2 * m3 + p3 * m1 + m1 * m3 + m2 * m1 + m3 * m2;
    out.delta = Polynomial({Rational(0), out.sigma2, out.sigma1, Rational(1)});
    out.A_A = {Polynomial({m1 * p3 + m1 * m2 + p2 * p3, m1 + p3 + p2 + m2, Rational(1)}), out.delta};
    out.B_A = {Polynomial({p1 * p3 + p1 * m2 + m2 * m3, p1}), out.delta};
    out.A_B = {Polynomial({m1 * p3 + m1 * m2 + p2 * p3, m1}), out.delta};
    return out;
}

Nonlinear2AB nonlinear_2A_B(double kp, double km, double t)
{
    const double K = kp / km;
    const double S = std::sqrt(8.0 * K + 1.0);
    // The relaxation rate of the printed solution is km * S; its derivative at
    // t = 0 then matches dA/dt = -2 kp A^2 + km (1 - A).
    const double T = saturating_tanh(0.5 * t * km * S);
    const double den = S + (4.0 * K + 1.0) * T;
    return {
        (S + T) / den,
        2.0 * K * T / den,
        2.0 * T / (S + T),
    };
}

Nonlinear2A2B nonlinear_2A_2B(double kp, double km, double t)
{
    const double r = std::sqrt(kp / km);
    const double T = saturating_tanh(2.0 * t * std::sqrt(kp * km));
    return {
        1.0 / (1.0 + r * T),
        r * T / (1.0 + r * T),
        (T / r) / (1.0 + T / r),
        1.0 / (1.0 + T / r),
    };
}

} // namespace kinvar::closed_forms

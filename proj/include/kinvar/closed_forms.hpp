#pragma once

#include "kinvar/exact.hpp"

#include <array>

// Analytic solutions for the small networks whose trajectories have printed
// closed forms. They serve as oracles for the numerical engines.
//
// Naming: X_Y is the concentration of X in the experiment primed with pure Y.

namespace kinvar::closed_forms {

/// A <-> B, rates kp (A->B) and km (B->A).
struct SingleReversible {
    double A_A, B_A, A_B, B_B;
};
SingleReversible single_reversible(double kp, double km, double t);

struct TwoStepEigenvalues {
    double lambda1;
    double lambda2;
};

/// Roots of l^2 - (kp1 + km1 + kp2) l + kp1 kp2, larger first.
TwoStepEigenvalues two_step_eigenvalues(double kp1, double km1, double kp2);

/// A <-> B -> C.
struct TwoStep {
    double A_A, B_A, C_A, A_B, B_B, C_B;
};
TwoStep two_step_concentrations(double kp1, double km1, double kp2, double t);

/// Laplace-domain data of the cycle A <-> B <-> C <-> A.
/// Rates ordered (k1+, k1-, k2+, k2-, k3+, k3-): k1 is A<->B, k2 is B<->C, k3 is C<->A.
struct ThreeCycleLaplace {
    Rational sigma1;
    Rational sigma2;
    Polynomial delta;  ///< s (s^2 + sigma1 s + sigma2)
    RationalFunction A_A;
    RationalFunction B_A;
    RationalFunction A_B;
};
ThreeCycleLaplace three_cycle_laplace(const std::array<Rational, 6>& k);

/// 2A <-> B started from (A, B) = (1, 0) and (0, 1/2).
struct Nonlinear2AB {
    double A_A, B_A, A_B;
};
Nonlinear2AB nonlinear_2A_B(double kp, double km, double t);

/// 2A <-> 2B started from (1, 0) and (0, 1).
struct Nonlinear2A2B {
    double A_A, B_A, A_B, B_B;
};
Nonlinear2A2B nonlinear_2A_2B(double kp, double km, double t);

} // namespace kinvar::closed_forms

#pragma once

#include "kinvar/linear.hpp"
#include "kinvar/network.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace kinvar {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    /// Evaluate grid points from the continuous extension; otherwise steps are
    /// shortened to land on every grid point.
    bool dense_output = true;
    long max_steps = 10'000'000;
};

struct IntegratorStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evaluations = 0;
};

using OdeRhs = std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

/// Dormand-Prince 5(4) with PI step-size control. Returns one row per grid
/// time (grid starts at 0, strictly increasing).
///
/// When `check_nonnegative` is set, an accepted state with a component below
/// -10 abs_tol aborts the integration with a NumericalError.
Eigen::MatrixXd integrate_ode(const OdeRhs& rhs, const std::vector<double>& y0, const std::vector<double>& times,
                              const IntegratorConfig& cfg, bool check_nonnegative = false,
                              IntegratorStats* stats = nullptr);

/// Mass-action trajectory of `net` from c0.
Trajectory integrate(const ReactionNetwork& net, const std::vector<double>& c0, const std::vector<double>& times,
                     const IntegratorConfig& cfg = {}, IntegratorStats* stats = nullptr);

/// Dual experiment from a0 units of pure a and b0 units of pure b. Both
/// starting states must carry the same conservation total w . c (within
/// 1e-12), otherwise the trajectories head to different equilibria and the
/// pairing is rejected with an InputError.
DualExperiment dual_experiment_nonlinear(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b, double a0,
                                         double b0, const std::vector<double>& times,
                                         const IntegratorConfig& cfg = {});

/// Initial amounts (1, w_a / w_b) that give both experiments total 1 when w_a == 1.
std::pair<double, double> matched_initial_amounts(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b);

} // namespace kinvar

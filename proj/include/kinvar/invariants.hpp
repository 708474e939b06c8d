#pragma once

#include "kinvar/linear.hpp"
#include "kinvar/network.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace kinvar {

enum class InvariantKind {
    LinearRatio,    ///< b_from_a / a_from_b
    Nonlinear2AB,   ///< b_from_a / (a_from_a * a_from_b)
    Nonlinear2A2B,  ///< (b_from_a * b_from_b) / (a_from_a * a_from_b)
    PathProduct,    ///< b_from_a / a_from_b against a product of step constants
};

enum class KProvenance { FromRates, FromPathProduct, UserSupplied };

struct InvariantSpec {
    InvariantKind kind = InvariantKind::LinearRatio;
    SpeciesIndex a = 0;
    SpeciesIndex b = 0;
    double expected_K = 1.0;
    KProvenance provenance = KProvenance::FromPathProduct;
};

struct InvariantReport {
    InvariantSpec spec;
    double t_min = 0.0;
    std::vector<std::pair<double, double>> ratio_series;
    double max_rel_deviation = 0.0;
    std::size_t excluded_points = 0;
    double limit_at_zero = 0.0;  ///< NaN when undefined for the kind or pair
    double tolerance = 0.0;
    bool verdict = false;
};

inline constexpr double kDenominatorFloor = 1e-12;
inline constexpr double kDefaultInvariantTolerance = 1e-6;

std::string to_string(InvariantKind kind);
InvariantKind invariant_kind_from_string(const std::string& s);
std::string to_string(KProvenance p);

/// Samples the invariant ratio at every grid time t > 0 whose denominator is
/// at least kDenominatorFloor; max_rel_deviation = max |ratio / K - 1|.
/// Throws InputError when every point is excluded.
InvariantReport evaluate_invariant(const DualExperiment& dual, const InvariantSpec& spec,
                                   double tol = kDefaultInvariantTolerance);

/// Quotient of the initial production rates (rate of b in the a-experiment
/// over rate of a in the b-experiment) from the mass-action right-hand side.
/// Throws InputError when the denominator rate is zero.
double ratio_limit_at_zero(const ReactionNetwork& net, const DualExperiment& dual, const InvariantSpec& spec);

/// Floating-point product of k(x->y)/k(y->x) along a shortest reversible path
/// between first-order steps. Unlike the exact path constant, it does not
/// require path independence. Throws InputError when no reversible path exists.
double path_constant_float(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b);

/// k_forward / k_backward of the reaction converting a into b (inverted when
/// the reaction runs b -> a). Throws InputError when no such reversible
/// reaction exists.
double direct_equilibrium_constant(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b);

/// Spec with the default expected constant: the path product for linear kinds,
/// the direct reaction's k+/k- for the nonlinear kinds.
InvariantSpec default_invariant_spec(const ReactionNetwork& net, InvariantKind kind, SpeciesIndex a,
                                     SpeciesIndex b);

struct OvershootReport {
    double equilibrium_ratio = 0.0;
    std::vector<double> crossing_times;  ///< linearly interpolated between grid points
    double max_overshoot = 0.0;          ///< max relative excursion past equilibrium after the first crossing
    bool overshoots = false;
};

/// Scans b(t)/a(t) along one trajectory for crossings of the equilibrium ratio.
/// Points within 1e-12 relative of equilibrium count as "at equilibrium".
/// Throws InputError if a(t) vanishes at a grid point with t > 0.
OvershootReport overshoot_scan(const Trajectory& traj, SpeciesIndex a, SpeciesIndex b, double equilibrium_ratio);
/// Same, with the equilibrium ratio taken from the rate matrix.
OvershootReport overshoot_scan(const Trajectory& traj, SpeciesIndex a, SpeciesIndex b, const RateMatrix& m);

/// {spec, expected_K, t_min, max_rel_deviation, excluded_points, verdict, series}
nlohmann::ordered_json report_to_json(const InvariantReport& report, const std::vector<std::string>& names);

} // namespace kinvar

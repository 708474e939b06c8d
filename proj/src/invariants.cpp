#include "kinvar/invariants.hpp"
#include "kinvar/errors.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <optional>

namespace kinvar {

namespace {

struct RatioParts {
    double numerator;
    double denominator;
};

RatioParts ratio_parts(const DualExperiment& dual, const InvariantSpec& spec, std::size_t k)
{
    const double b_from_a = dual.from_a.at(k, spec.b);
    const double a_from_b = dual.from_b.at(k, spec.a);
    const double a_from_a = dual.from_a.at(k, spec.a);
    const double b_from_b = dual.from_b.at(k, spec.b);
    switch (spec.kind) {
    case InvariantKind::LinearRatio:
    case InvariantKind::PathProduct:
        return {b_from_a, a_from_b};
    case InvariantKind::Nonlinear2AB:
        return {b_from_a, a_from_a * a_from_b};
    case InvariantKind::Nonlinear2A2B:
        return {b_from_a * b_from_b, a_from_a * a_from_b};
    }
    return {0.0, 0.0};
}

} // namespace

std::string to_string(InvariantKind kind)
{
    switch (kind) {
    case InvariantKind::LinearRatio:
        return "linear_ratio";
    case InvariantKind::Nonlinear2AB:
        return "nonlinear_2A_B";
    case InvariantKind::Nonlinear2A2B:
        return "nonlinear_2A_2B";
    case InvariantKind::PathProduct:
        return "path_product";
    }
    return "unknown";
}

InvariantKind invariant_kind_from_string(const std::string& s)
{
    for (auto k : {InvariantKind::LinearRatio, InvariantKind::Nonlinear2AB, InvariantKind::Nonlinear2A2B,
                   InvariantKind::PathProduct})
        if (to_string(k) == s)
            return k;
    throw InputError("unknown invariant kind '" + s + "'");
}

std::string to_string(KProvenance p)
{
    switch (p) {
    case KProvenance::FromRates:
        return "from-rates";
    case KProvenance::FromPathProduct:
        return "from-path-product";
    case KProvenance::UserSupplied:
        return "user-supplied";
    }
    return "unknown";
}

InvariantReport evaluate_invariant(const DualExperiment& dual, const InvariantSpec& spec, double tol)
{
    if (!(spec.expected_K > 0.0))
        throw InputError("expected_K must be positive");
    if (dual.from_a.times != dual.from_b.times)
        throw InputError("dual trajectories do not share a time grid");
    const auto n = static_cast<std::size_t>(dual.from_a.concentrations.cols());
    if (spec.a >= n || spec.b >= n)
        throw InputError("invariant species out of range");

    InvariantReport report;
    report.spec = spec;
    report.tolerance = tol;
    report.limit_at_zero = std::numeric_limits<double>::quiet_NaN();
    report.t_min = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < dual.from_a.points(); ++k) {
        const double t = dual.from_a.times[k];
        if (!(t > 0.0))
            continue;
        const auto [num, den] = ratio_parts(dual, spec, k);
        if (!(std::abs(den) >= kDenominatorFloor)) {
            ++report.excluded_points;
            continue;
        }
        const double ratio = num / den;
        if (report.ratio_series.empty())
            report.t_min = t;
        report.ratio_series.emplace_back(t, ratio);
        report.max_rel_deviation = std::max(report.max_rel_deviation, std::abs(ratio / spec.expected_K - 1.0));
    }
    if (report.ratio_series.empty())
        throw InputError("degenerate experiment: every grid point was excluded by the denominator floor");
    report.verdict = report.max_rel_deviation <= tol;
    return report;
}

double ratio_limit_at_zero(const ReactionNetwork& net, const DualExperiment& dual, const InvariantSpec& spec)
{
    if (spec.kind != InvariantKind::LinearRatio && spec.kind != InvariantKind::PathProduct)
        throw InputError("initial-rate limit is defined for linear ratios only");
    const auto rate_a = mass_action_rhs(net, dual.from_a.row(0));
    const auto rate_b = mass_action_rhs(net, dual.from_b.row(0));
    const double num = rate_a.at(spec.b);
    const double den = rate_b.at(spec.a);
    if (den == 0.0)
        throw InputError("zero initial rate: " + net.species[spec.a].name + " is not produced directly from " +
                         net.species[spec.b].name + " at t = 0");
    return num / den;
}

double path_constant_float(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b)
{
    if (!net.all_first_order())
        throw InputError("path constant requires an all-first-order network");
    const auto n = net.size();
    if (a >= n || b >= n)
        throw InputError("path constant: species index out of range");
    const RateMatrix m = build_rate_matrix(net);
    std::vector<std::optional<double>> k(n);
    k[a] = 1.0;
    std::deque<SpeciesIndex> queue{a};
    while (!queue.empty()) {
        const auto u = queue.front();
        queue.pop_front();
        for (SpeciesIndex v = 0; v < n; ++v) {
            if (v == u || k[v])
                continue;
            const double fwd = m(v, u), bwd = m(u, v);
            if (fwd > 0.0 && bwd > 0.0) {
                k[v] = *k[u] * fwd / bwd;
                queue.push_back(v);
            }
        }
    }
    if (!k[b])
        throw InputError("no reversible path between '" + net.species[a].name + "' and '" + net.species[b].name +
                         "'");
    return *k[b];
}

double direct_equilibrium_constant(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b)
{
    for (const auto& rx : net.reactions) {
        if (!rx.reversible() || rx.reactants.size() != 1 || rx.products.size() != 1)
            continue;
        const auto r = rx.reactants.front().species, p = rx.products.front().species;
        if (r == a && p == b)
            return rx.k_forward / rx.k_backward;
        if (r == b && p == a)
            return rx.k_backward / rx.k_forward;
    }
    throw InputError("no reversible reaction between '" + net.species.at(a).name + "' and '" +
                     net.species.at(b).name + "'");
}

InvariantSpec default_invariant_spec(const ReactionNetwork& net, InvariantKind kind, SpeciesIndex a, SpeciesIndex b)
{
    InvariantSpec spec;
    spec.kind = kind;
    spec.a = a;
    spec.b = b;
    if (kind == InvariantKind::LinearRatio || kind == InvariantKind::PathProduct) {
        spec.expected_K = path_constant_float(net, a, b);
        spec.provenance = KProvenance::FromPathProduct;
    } else {
        spec.expected_K = direct_equilibrium_constant(net, a, b);
        spec.provenance = KProvenance::FromRates;
    }
    return spec;
}

OvershootReport overshoot_scan(const Trajectory& traj, SpeciesIndex a, SpeciesIndex b, double equilibrium_ratio)
{
    if (!(equilibrium_ratio > 0.0))
        throw InputError("overshoot scan needs a positive equilibrium ratio");
    OvershootReport out;
    out.equilibrium_ratio = equilibrium_ratio;

    int side = 0;  // sign of ratio - equilibrium at the last decisive point
    int first_side = 0;
    double prev_t = 0.0, prev_dev = 0.0;
    for (std::size_t k = 0; k < traj.points(); ++k) {
        const double t = traj.times[k];
        const double av = traj.at(k, a);
        if (av == 0.0) {
            if (t > 0.0)
                throw InputError("overshoot scan: a(t) vanishes at t = " + std::to_string(t));
            continue;
        }
        const double dev = traj.at(k, b) / av / equilibrium_ratio - 1.0;
        const int s = std::abs(dev) <= 1e-12 ? 0 : (dev > 0.0 ? 1 : -1);
        if (s != 0) {
            if (first_side == 0)
                first_side = s;
            if (side != 0 && s != side) {
                const double frac = prev_dev / (prev_dev - dev);
                out.crossing_times.push_back(prev_t + frac * (t - prev_t));
            }
            side = s;
            prev_t = t;
            prev_dev = dev;
        }
        if (!out.crossing_times.empty() && s == -first_side)
            out.max_overshoot = std::max(out.max_overshoot, std::abs(dev));
    }
    out.overshoots = !out.crossing_times.empty();
    return out;
}

OvershootReport overshoot_scan(const Trajectory& traj, SpeciesIndex a, SpeciesIndex b, const RateMatrix& m)
{
    const auto eq = equilibrium_composition(m);
    if (eq.at(a) == 0.0)
        throw InputError("overshoot scan: species has zero equilibrium concentration");
    return overshoot_scan(traj, a, b, eq.at(b) / eq.at(a));
}

nlohmann::ordered_json report_to_json(const InvariantReport& report, const std::vector<std::string>& names)
{
    auto name = [&](SpeciesIndex i) { return i < names.size() ? names[i] : std::to_string(i); };
    nlohmann::ordered_json spec;
    spec["kind"] = to_string(report.spec.kind);
    spec["pair"] = {name(report.spec.a), name(report.spec.b)};
    spec["provenance"] = to_string(report.spec.provenance);

    nlohmann::ordered_json j;
    j["spec"] = spec;
    j["expected_K"] = report.spec.expected_K;
    j["t_min"] = report.t_min;
    j["max_rel_deviation"] = report.max_rel_deviation;
    j["excluded_points"] = report.excluded_points;
    j["tolerance"] = report.tolerance;
    if (std::isfinite(report.limit_at_zero))
        j["limit_at_zero"] = report.limit_at_zero;
    else
        j["limit_at_zero"] = nullptr;
    j["verdict"] = report.verdict;
    j["series"] = nlohmann::ordered_json::array();
    for (const auto& [t, r] : report.ratio_series)
        j["series"].push_back({t, r});
    return j;
}

} // namespace kinvar

#include "kinvar/engines.hpp"
#include "kinvar/closed_forms.hpp"
#include "kinvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinvar {

namespace {

std::vector<std::string> names_of(const ReactionNetwork& net)
{
    std::vector<std::string> names;
    for (const auto& s : net.species)
        names.push_back(s.name);
    return names;
}

Trajectory empty_trajectory(const ReactionNetwork& net, const std::vector<double>& times, SpeciesIndex initial)
{
    Trajectory t;
    t.times = times;
    t.concentrations = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times.size()),
                                             static_cast<Eigen::Index>(net.size()));
    t.initial_species = initial;
    t.label = "from " + net.species[initial].name;
    t.species_names = names_of(net);
    return t;
}

[[noreturn]] void mismatch(const std::string& why)
{
    throw InputError("engine mismatch: closed-form engine " + why);
}

void require_amounts(std::optional<double> given, double expected, const char* which)
{
    if (given && std::abs(*given - expected) > 1e-15)
        mismatch(std::string("covers only ") + which + " = " + std::to_string(expected));
}

} // namespace

std::string to_string(Engine e)
{
    switch (e) {
    case Engine::Auto:
        return "auto";
    case Engine::Linear:
        return "linear";
    case Engine::Nonlinear:
        return "nonlinear";
    case Engine::ClosedForm:
        return "closed-form";
    }
    return "auto";
}

Engine engine_from_string(const std::string& s)
{
    for (auto e : {Engine::Auto, Engine::Linear, Engine::Nonlinear, Engine::ClosedForm})
        if (to_string(e) == s)
            return e;
    throw InputError("unknown engine '" + s + "' (expected auto|linear|nonlinear|closed-form)");
}

Engine resolve_engine(const ReactionNetwork& net, Engine requested)
{
    if (requested == Engine::Auto)
        return net.all_first_order() ? Engine::Linear : Engine::Nonlinear;
    if (requested == Engine::Linear && !net.all_first_order())
        throw InputError("engine mismatch: linear engine requires an all-first-order network");
    return requested;
}

ClosedFormTopology detect_closed_form_topology(const ReactionNetwork& net)
{
    const auto& rs = net.reactions;
    auto simple = [](const std::vector<Term>& side, int coeff) {
        return side.size() == 1 && side.front().coefficient == coeff;
    };
    if (net.size() == 2 && rs.size() == 1 && rs[0].reversible()) {
        const auto& r = rs[0];
        if (simple(r.reactants, 1) && simple(r.products, 1))
            return ClosedFormTopology::SingleReversible;
        if (simple(r.reactants, 2) && simple(r.products, 1))
            return ClosedFormTopology::TwoAToB;
        if (simple(r.reactants, 2) && simple(r.products, 2))
            return ClosedFormTopology::TwoAToTwoB;
    }
    if (net.size() == 3 && rs.size() == 2 && net.all_first_order()) {
        for (std::size_t first = 0; first < 2; ++first) {
            const auto& rev = rs[first];
            const auto& irr = rs[1 - first];
            if (rev.reversible() && !irr.reversible() &&
                irr.reactants.front().species == rev.products.front().species &&
                irr.products.front().species != rev.reactants.front().species)
                return ClosedFormTopology::TwoStep;
        }
    }
    return ClosedFormTopology::None;
}

DualExperiment closed_form_dual(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b,
                                const std::vector<double>& times, std::optional<double> a0,
                                std::optional<double> b0)
{
    require_valid_grid(times);
    if (a == b)
        throw InputError("dual experiment needs two distinct species");
    const auto topo = detect_closed_form_topology(net);
    if (topo == ClosedFormTopology::None)
        mismatch("supports A<->B, A<->B->C, 2A<->B and 2A<->2B only");

    DualExperiment dual;
    dual.species_a = a;
    dual.species_b = b;
    dual.from_a = empty_trajectory(net, times, a);
    dual.from_b = empty_trajectory(net, times, b);
    auto& fa = dual.from_a.concentrations;
    auto& fb = dual.from_b.concentrations;
    const auto A = static_cast<Eigen::Index>(a), B = static_cast<Eigen::Index>(b);

    switch (topo) {
    case ClosedFormTopology::SingleReversible: {
        require_amounts(a0, 1.0, "a0");
        require_amounts(b0, 1.0, "b0");
        const auto& r = net.reactions[0];
        // orient the rates so that "A" is species a
        const bool forward = r.reactants.front().species == a;
        const double kp = forward ? r.k_forward : r.k_backward;
        const double km = forward ? r.k_backward : r.k_forward;
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto c = closed_forms::single_reversible(kp, km, times[k]);
            const auto row = static_cast<Eigen::Index>(k);
            fa(row, A) = c.A_A;
            fa(row, B) = c.B_A;
            fb(row, A) = c.A_B;
            fb(row, B) = c.B_B;
        }
        break;
    }
    case ClosedFormTopology::TwoStep: {
        require_amounts(a0, 1.0, "a0");
        require_amounts(b0, 1.0, "b0");
        const bool first_rev = net.reactions[0].reversible();
        const auto& rev = first_rev ? net.reactions[0] : net.reactions[1];
        const auto& irr = first_rev ? net.reactions[1] : net.reactions[0];
        if (rev.reactants.front().species != a || rev.products.front().species != b)
            mismatch("covers the A<->B->C experiments primed with A and with B only");
        const auto C = static_cast<Eigen::Index>(irr.products.front().species);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto c =
                closed_forms::two_step_concentrations(rev.k_forward, rev.k_backward, irr.k_forward, times[k]);
            const auto row = static_cast<Eigen::Index>(k);
            fa(row, A) = c.A_A;
            fa(row, B) = c.B_A;
            fa(row, C) = c.C_A;
            fb(row, A) = c.A_B;
            fb(row, B) = c.B_B;
            fb(row, C) = c.C_B;
        }
        break;
    }
    case ClosedFormTopology::TwoAToB: {
        const auto& r = net.reactions[0];
        if (r.reactants.front().species != a)
            mismatch("covers 2A<->B with the experiment pair (A, B) only");
        require_amounts(a0, 1.0, "a0");
        require_amounts(b0, 0.5, "b0");
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto c = closed_forms::nonlinear_2A_B(r.k_forward, r.k_backward, times[k]);
            const auto row = static_cast<Eigen::Index>(k);
            fa(row, A) = c.A_A;
            fa(row, B) = c.B_A;
            fb(row, A) = c.A_B;
            fb(row, B) = 0.5 * (1.0 - c.A_B);  // A + 2B = 1
        }
        break;
    }
    case ClosedFormTopology::TwoAToTwoB: {
        const auto& r = net.reactions[0];
        if (r.reactants.front().species != a)
            mismatch("covers 2A<->2B with the experiment pair (A, B) only");
        require_amounts(a0, 1.0, "a0");
        require_amounts(b0, 1.0, "b0");
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto c = closed_forms::nonlinear_2A_2B(r.k_forward, r.k_backward, times[k]);
            const auto row = static_cast<Eigen::Index>(k);
            fa(row, A) = c.A_A;
            fa(row, B) = c.B_A;
            fb(row, A) = c.A_B;
            fb(row, B) = c.B_B;
        }
        break;
    }
    case ClosedFormTopology::None:
        break;
    }
    return dual;
}

DualExperiment run_dual(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b, const std::vector<double>& times,
                        Engine engine, std::optional<double> a0, std::optional<double> b0,
                        const IntegratorConfig& cfg)
{
    if (a >= net.size() || b >= net.size())
        throw InputError("experiment species out of range");
    switch (resolve_engine(net, engine)) {
    case Engine::ClosedForm:
        return closed_form_dual(net, a, b, times, a0, b0);
    case Engine::Linear: {
        const double amount_a = a0.value_or(1.0), amount_b = b0.value_or(1.0);
        if (amount_a != amount_b)
            throw InputError("invalid pairing: linear dual experiments need equal initial amounts");
        auto dual = dual_experiment(net, a, b, times);
        if (amount_a != 1.0) {
            dual.from_a.concentrations *= amount_a;
            dual.from_b.concentrations *= amount_b;
            dual.conservation_total = amount_a;
        }
        return dual;
    }
    case Engine::Nonlinear:
    case Engine::Auto:
        break;
    }
    const auto [ma, mb] = matched_initial_amounts(net, a, b);
    const double amount_a = a0.value_or(ma);
    const double amount_b = b0.value_or(amount_a * mb);
    return dual_experiment_nonlinear(net, a, b, amount_a, amount_b, times, cfg);
}

std::vector<double> default_grid(const ReactionNetwork& net)
{
    if (net.all_first_order())
        return default_time_grid(build_rate_matrix(net));
    double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
    for (const auto& r : net.reactions)
        for (double k : {r.k_forward, r.k_backward})
            if (k > 0.0) {
                kmin = std::min(kmin, k);
                kmax = std::max(kmax, k);
            }
    return make_time_grid(10.0 / kmin, 400, true, 0.01 / kmax);
}

} // namespace kinvar

#include "kinvar/commands.hpp"
#include "kinvar/closed_forms.hpp"
#include "kinvar/csv.hpp"
#include "kinvar/engines.hpp"
#include "kinvar/errors.hpp"
#include "kinvar/linear.hpp"
#include "kinvar/network_io.hpp"


#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>

namespace kinvar {

namespace {

using ojson = nlohmann::ordered_json;

std::string sanitize(const std::string& name)
{
    std::string s;
    for (char c : name)
        s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
    return s;
}

void write_json(const std::filesystem::path& path, const ojson& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

void prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::vector<std::string> names_of(const ReactionNetwork& net)
{
    std::vector<std::string> names;
    for (const auto& s : net.species)
        names.push_back(s.name);
    return names;
}

ojson cycle_report_json(const ReactionNetwork& net, const CycleConditionReport& rep)
{
    ojson j;
    j["satisfied"] = rep.satisfied;
    j["max_mismatch"] = rep.max_mismatch;
    j["cycles"] = ojson::array();
    for (const auto& c : rep.cycles) {
        ojson cj;
        auto& verts = cj["vertices"] = ojson::array();
        for (auto v : c.vertices)
            verts.push_back(net.species[v].name);
        cj["forward_product"] = c.forward_product;
        cj["backward_product"] = c.backward_product;
        cj["relative_mismatch"] = c.relative_mismatch;
        j["cycles"].push_back(std::move(cj));
    }
    return j;
}

/// Largest entry-wise difference scaled by the conservation total.
double max_difference(const DualExperiment& x, const DualExperiment& y)
{
    const double dx = (x.from_a.concentrations - y.from_a.concentrations).cwiseAbs().maxCoeff();
    const double dy = (x.from_b.concentrations - y.from_b.concentrations).cwiseAbs().maxCoeff();
    return std::max(dx, dy) / std::max(1.0, x.conservation_total);
}

double conservation_drift(const Trajectory& t, const Eigen::VectorXd& w)
{
    const Eigen::VectorXd m = t.concentrations * w;
    return (m.array() - m(0)).abs().maxCoeff();
}

std::pair<std::string, std::string> split_pair(const std::string& text)
{
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos)
        throw InputError("--pair: expected A,B");
    return {text.substr(0, comma), text.substr(comma + 1)};
}

} // namespace

Scenario scenario_with_overrides(const CommandOptions& opt)
{
    if (!opt.config)
        throw InputError("--config is required");
    auto s = load_scenario(*opt.config);
    if (opt.grid)
        s.grid = parse_grid_flag(*opt.grid);
    if (opt.engine)
        s.engine = engine_from_string(*opt.engine);
    if (opt.balance)
        s.balance = BalanceMode::Enforce;
    return s;
}

CommandResult cmd_simulate(const Scenario& s, const std::filesystem::path& out, bool oracle)
{
    const auto net = effective_network(s);
    const auto a = net.index_of(s.experiment.a), b = net.index_of(s.experiment.b);
    const auto times = scenario_grid(s);
    const auto cfg = integrator_config(s);
    const Engine engine = resolve_engine(net, s.engine);

    std::optional<CycleConditionReport> cycles;
    if (net.all_first_order()) {
        cycles = check_cycle_conditions(net);
        if (s.balance == BalanceMode::Check && !cycles->satisfied)
            throw InputError("balance check: cycle conditions violated (max mismatch " +
                             format_double(cycles->max_mismatch) + ")");
    }

    const auto dual = run_dual(net, a, b, times, engine, s.experiment.a0, s.experiment.b0, cfg);

    prepare_dir(out);
    const auto file_a = "from_" + sanitize(s.experiment.a) + ".csv";
    const auto file_b = "from_" + sanitize(s.experiment.b) + ".csv";
    write_trajectory_csv(out / file_a, dual.from_a);
    write_trajectory_csv(out / file_b, dual.from_b);

    ojson j;
    j["engine"] = to_string(engine);
    j["pair"] = {s.experiment.a, s.experiment.b};
    j["initial_amounts"] = {dual.from_a.at(0, a), dual.from_b.at(0, b)};
    j["grid"] = {{"points", times.size()}, {"t_first", times.front()}, {"t_last", times.back()}};
    j["files"] = {file_a, file_b};

    const auto w = conservation_vector(net);
    const Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    j["conservation"] = {{"vector", w},
                         {"total_from_a", (dual.from_a.concentrations.row(0) * wv)(0)},
                         {"total_from_b", (dual.from_b.concentrations.row(0) * wv)(0)},
                         {"max_drift", std::max(conservation_drift(dual.from_a, wv), conservation_drift(dual.from_b, wv))}};
    j["cycle_conditions"] = cycles ? cycle_report_json(net, *cycles) : ojson(nullptr);
    j["final"] = {{"from_a", dual.from_a.row(times.size() - 1)}, {"from_b", dual.from_b.row(times.size() - 1)}};
    if (net.all_first_order())
        j["equilibrium"] = equilibrium_composition(build_rate_matrix(net));

    int code = kExitOk;
    if (oracle) {
        ojson checks = ojson::array();
        auto add = [&](const std::string& name, const DualExperiment& other) {
            const double d = max_difference(dual, other);
            const bool agree = d <= kOracleTolerance;
            if (!agree)
                code = kExitNumericalFailure;
            checks.push_back({{"engine", name}, {"max_abs_difference", d}, {"agree", agree}});
        };
        if (engine != Engine::ClosedForm && detect_closed_form_topology(net) != ClosedFormTopology::None) {
            try {
                add("closed-form", closed_form_dual(net, a, b, times, s.experiment.a0, s.experiment.b0));
            } catch (const InputError&) {
                // pair or amounts outside the closed forms
            }
        }
        if (engine == Engine::Linear || engine == Engine::ClosedForm) {
            if (net.all_first_order()) {
                auto eig = dual_experiment(net, a, b, times, ExpMethod::Eigen);
                eig.from_a.concentrations *= dual.from_a.at(0, a);
                eig.from_b.concentrations *= dual.from_b.at(0, b);
                add("linear-eigen", eig);
            }
            add("nonlinear", dual_experiment_nonlinear(net, a, b, dual.from_a.at(0, a), dual.from_b.at(0, b),
                                                       times, cfg));
        }
        if (engine == Engine::ClosedForm && net.all_first_order())
            add("linear", dual_experiment(net, a, b, times));
        j["oracle"] = {{"tolerance", kOracleTolerance}, {"checks", checks}};
    }
    write_json(out / "summary.json", j);
    return {code, j};
}

CommandResult cmd_invariants(const Scenario& s, std::optional<double> tol, const std::filesystem::path& out)
{
    if (s.invariants.empty())
        throw InputError("scenario lists no invariants");
    if (tol && !(*tol > 0.0))
        throw InputError("--tol must be positive");
    const auto net = effective_network(s);
    const auto names = names_of(net);

    ojson j;
    if (net.all_first_order()) {
        const auto cycles = check_cycle_conditions(net);
        if (!cycles.satisfied && !tol)
            throw InputError("network violates the cycle conditions (max mismatch " +
                             format_double(cycles.max_mismatch) +
                             "); pass an explicit --tol or balance the network");
        j["cycle_conditions"] = cycle_report_json(net, cycles);
    } else {
        j["cycle_conditions"] = nullptr;
    }
    const double tolerance = tol.value_or(kDefaultInvariantTolerance);
    const auto times = scenario_grid(s);
    const auto cfg = integrator_config(s);
    const Engine engine = resolve_engine(net, s.engine);

    j["engine"] = to_string(engine);
    j["tolerance"] = tolerance;
    j["reports"] = ojson::array();
    bool all_pass = true;
    std::map<std::pair<SpeciesIndex, SpeciesIndex>, DualExperiment> runs;
    for (const auto& spec : resolve_invariants(s, net)) {
        const auto key = std::make_pair(spec.a, spec.b);
        auto it = runs.find(key);
        if (it == runs.end()) {
            const bool same = net.species[spec.a].name == s.experiment.a && net.species[spec.b].name == s.experiment.b;
            auto dual = same ? run_dual(net, spec.a, spec.b, times, engine, s.experiment.a0, s.experiment.b0, cfg)
                             : run_dual(net, spec.a, spec.b, times, engine, std::nullopt, std::nullopt, cfg);
            it = runs.emplace(key, std::move(dual)).first;
        }
        auto report = evaluate_invariant(it->second, spec, tolerance);
        if (net.all_first_order() &&
            (spec.kind == InvariantKind::LinearRatio || spec.kind == InvariantKind::PathProduct))
            report.limit_at_zero = ratio_limit_at_zero(net, it->second, spec);
        all_pass = all_pass && report.verdict;
        j["reports"].push_back(report_to_json(report, names));
    }
    j["all_pass"] = all_pass;
    prepare_dir(out);
    write_json(out / "invariants.json", j);
    return {all_pass ? kExitOk : kExitInvariantFailure, j};
}

CommandResult cmd_prove(const ReactionNetwork& net, const std::string& a, const std::string& b, bool balance,
                        const std::filesystem::path& out)
{
    if (!net.all_first_order())
        throw InputError("prove needs an all-first-order network");
    const auto ia = net.index_of(a), ib = net.index_of(b);
    auto m = exact_rate_matrix(net);
    if (balance)
        m = balance_exact(m);
    auto report = prove_fixed_proportion(m, ia, ib);
    report.name_a = a;
    report.name_b = b;
    if (balance)
        report.warnings.push_back("rates were balanced before the proof");
    auto j = proof_to_json(report);
    prepare_dir(out);
    write_json(out / "proof.json", j);
    return {report.verified ? kExitOk : kExitInvariantFailure, j};
}

ReactionNetwork butene_network()
{
    auto step = [](SpeciesIndex x, SpeciesIndex y, const char* kf, const char* kb) {
        Reaction r;
        r.reactants = {{x, 1}};
        r.products = {{y, 1}};
        r.k_forward = std::stod(kf);
        r.k_backward = std::stod(kb);
        r.exact_forward = kf;
        r.exact_backward = kb;
        return r;
    };
    return make_network({"cis-2-butene", "1-butene", "trans-2-butene"},
                        {step(0, 1, "4.623", "10.344"), step(1, 2, "3.724", "1.000"), step(2, 0, "3.371", "5.616")});
}

std::vector<double> fig1_grid()
{
    auto g = make_time_grid(2.0, 401, true, 1e-3);
    g.erase(g.begin());
    return g;
}

Fig1Data fig1_data(bool balanced, const std::vector<double>& times)
{
    auto net = butene_network();
    if (balanced)
        net = balance_network(net);
    // ratios are undefined at t = 0, which the solver needs as its start
    std::vector<double> full{0.0};
    full.insert(full.end(), times.begin(), times.end());
    const auto dual = dual_experiment(net, 0, 1, full);
    Fig1Data d;
    d.t = times;
    d.K = net.reactions[0].k_forward / net.reactions[0].k_backward;
    for (std::size_t k = 1; k < full.size(); ++k) {
        const double aa = dual.from_a.at(k, 0), ba = dual.from_a.at(k, 1);
        const double ab = dual.from_b.at(k, 0), bb = dual.from_b.at(k, 1);
        d.ba_over_aa.push_back(ba / aa);
        d.bb_over_ab.push_back(bb / ab);
        d.ba_over_ab.push_back(ba / ab);
        d.max_rel_deviation = std::max(d.max_rel_deviation, std::abs(ba / ab / d.K - 1.0));
    }
    d.overshoot = overshoot_scan(dual.from_a, 0, 1, build_rate_matrix(net));
    return d;
}

CommandResult cmd_fig1(bool balanced, const std::filesystem::path& out, const std::vector<double>& times)
{
    if (times.empty() || !(times.front() > 0.0) || !std::is_sorted(times.begin(), times.end(), std::less_equal<>()))
        throw InputError("fig1 grid must be strictly increasing and start after t = 0");
    const auto d = fig1_data(balanced, times);
    prepare_dir(out);
    {
        std::ofstream csv(out / "fig1.csv", std::ios::binary);
        if (!csv)
            throw InputError("cannot write '" + (out / "fig1.csv").string() + "'");
        write_table_csv(csv, {"t", "BA_over_AA", "BB_over_AB", "BA_over_AB"},
                        {d.t, d.ba_over_aa, d.bb_over_ab, d.ba_over_ab});
    }
    ojson j;
    j["network"] = network_to_json(balanced ? balance_network(butene_network()) : butene_network());
    j["balanced"] = balanced;
    j["grid"] = {{"points", d.t.size()}, {"t_first", d.t.front()}, {"t_last", d.t.back()}, {"spacing", "geometric"}};
    j["K"] = d.K;
    j["BA_over_AB_max_rel_deviation"] = d.max_rel_deviation;
    j["overshoot"] = {{"equilibrium_ratio", d.overshoot.equilibrium_ratio},
                      {"overshoots", d.overshoot.overshoots},
                      {"crossing_times", d.overshoot.crossing_times},
                      {"max_overshoot", d.overshoot.max_overshoot}};
    write_json(out / "fig1_summary.json", j);
    return {kExitOk, j};
}

CommandResult cmd_balance(const ReactionNetwork& net, const std::filesystem::path& out)
{
    if (!net.all_first_order())
        throw InputError("balance needs an all-first-order network");
    const auto before = check_cycle_conditions(net);
    const auto balanced = balance_network(net);
    const auto after = check_cycle_conditions(balanced);
    ojson j;
    j["network"] = network_to_json(balanced);
    j["before"] = cycle_report_json(net, before);
    j["after"] = cycle_report_json(balanced, after);
    prepare_dir(out);
    write_json(out / "balanced.json", j);
    return {kExitOk, j};
}

int run_command(const std::string& name, const CommandOptions& opt, std::ostream& out, std::ostream& err)
{
    try {
        CommandResult result;
        if (name == "simulate" || name == "invariants") {
            const auto s = scenario_with_overrides(opt);
            if (opt.dump_config) {
                std::ofstream dump(*opt.dump_config, std::ios::binary);
                if (!dump)
                    throw InputError("cannot write '" + opt.dump_config->string() + "'");
                dump << scenario_to_json(s).dump(2) << '\n';
            }
            result = name == "simulate" ? cmd_simulate(s, opt.out, opt.oracle) : cmd_invariants(s, opt.tol, opt.out);
        } else if (name == "prove") {
            if (!opt.network || !opt.pair)
                throw InputError("prove needs a network file and --pair A,B");
            const auto [a, b] = split_pair(*opt.pair);
            result = cmd_prove(load_network(*opt.network), a, b, opt.balance, opt.out);
        } else if (name == "fig1") {
            const auto times = opt.grid ? make_grid(parse_grid_flag(*opt.grid)) : fig1_grid();
            auto grid = times;
            if (!grid.empty() && grid.front() == 0.0)
                grid.erase(grid.begin());
            result = cmd_fig1(opt.balance, opt.out, grid);
        } else if (name == "balance") {
            if (!opt.network)
                throw InputError("balance needs a network file");
            result = cmd_balance(load_network(*opt.network), opt.out);
        } else {
            throw InputError("unknown command '" + name + "'");
        }
        out << result.report.dump(2) << '\n';
        return result.exit_code;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumericalFailure;
    }
}

} // namespace kinvar

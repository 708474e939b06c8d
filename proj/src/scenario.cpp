#include "kinvar/scenario.hpp"
#include "kinvar/errors.hpp"
#include "kinvar/linear.hpp"
#include "kinvar/network_io.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace kinvar {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, unused] : j.items())
        if (!allowed.count(key))
            throw InputError(where + ": unknown field '" + key + "'");
}

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key))
        throw InputError(where + ": missing '" + key + "'");
    return j.at(key);
}

double number(const json& v, const std::string& where)
{
    if (!v.is_number())
        throw InputError(where + ": expected a number");
    return v.get<double>();
}

std::string text(const json& v, const std::string& where)
{
    if (!v.is_string())
        throw InputError(where + ": expected a string");
    return v.get<std::string>();
}

void check_grid(const GridSpec& g, const std::string& where)
{
    if (!(g.t_max > 0.0) || !std::isfinite(g.t_max))
        throw InputError(where + ": t_max must be positive");
    if (g.points < 2)
        throw InputError(where + ": points must be at least 2");
    if (g.geometric && !(g.t_min > 0.0 && g.t_min < g.t_max))
        throw InputError(where + ": t_min must lie in (0, t_max)");
}

bool spacing_from_string(const std::string& s, const std::string& where)
{
    if (s == "geometric")
        return true;
    if (s == "linear")
        return false;
    throw InputError(where + ": spacing must be 'linear' or 'geometric', got '" + s + "'");
}

GridSpec grid_from_json(const json& j)
{
    const std::string where = "grid";
    if (!j.is_object())
        throw InputError(where + ": expected an object");
    reject_unknown(j, {"t_max", "points", "spacing", "t_min"}, where);
    GridSpec g;
    g.t_max = number(require(j, "t_max", where), where + ".t_max");
    const auto& p = require(j, "points", where);
    if (!p.is_number_integer() || p.get<long long>() < 2)
        throw InputError(where + ".points: expected an integer >= 2");
    g.points = p.get<std::size_t>();
    if (j.contains("spacing"))
        g.geometric = spacing_from_string(text(j["spacing"], where + ".spacing"), where + ".spacing");
    if (j.contains("t_min"))
        g.t_min = number(j["t_min"], where + ".t_min");
    check_grid(g, where);
    return g;
}

void check_species(const ReactionNetwork& net, const std::string& name, const std::string& where)
{
    for (const auto& s : net.species)
        if (s.name == name)
            return;
    throw InputError(where + ": unknown species '" + name + "'");
}

} // namespace

std::string to_string(BalanceMode m)
{
    switch (m) {
    case BalanceMode::Off:
        return "off";
    case BalanceMode::Check:
        return "check";
    case BalanceMode::Enforce:
        return "enforce";
    }
    return "off";
}

BalanceMode balance_mode_from_string(const std::string& s)
{
    for (auto m : {BalanceMode::Off, BalanceMode::Check, BalanceMode::Enforce})
        if (to_string(m) == s)
            return m;
    throw InputError("unknown balance mode '" + s + "' (expected off|check|enforce)");
}

GridSpec parse_grid_flag(const std::string& flag)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto comma = flag.find(',', start);
        parts.push_back(flag.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    if (parts.size() != 3)
        throw InputError("--grid: expected tmax,points,spacing");
    GridSpec g;
    const auto& tm = parts[0];
    auto [p1, e1] = std::from_chars(tm.data(), tm.data() + tm.size(), g.t_max);
    if (e1 != std::errc() || p1 != tm.data() + tm.size())
        throw InputError("--grid: bad t_max '" + tm + "'");
    const auto& pts = parts[1];
    auto [p2, e2] = std::from_chars(pts.data(), pts.data() + pts.size(), g.points);
    if (e2 != std::errc() || p2 != pts.data() + pts.size())
        throw InputError("--grid: bad point count '" + pts + "'");
    g.geometric = spacing_from_string(parts[2], "--grid");
    g.t_min = std::min(1e-3, g.t_max / 10.0);
    check_grid(g, "--grid");
    return g;
}

std::vector<double> make_grid(const GridSpec& g)
{
    check_grid(g, "grid");
    return make_time_grid(g.t_max, g.points, g.geometric, g.t_min);
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir)
{
    if (!j.is_object())
        throw InputError("scenario: expected a JSON object");
    reject_unknown(j, {"network", "experiment", "grid", "invariants", "engine", "balance", "integrator"},
                   "scenario");
    Scenario s;

    const auto& nj = require(j, "network", "scenario");
    if (nj.is_string())
        s.network = load_network(base_dir / nj.get<std::string>());
    else
        s.network = network_from_json(nj);

    const auto& ej = require(j, "experiment", "scenario");
    if (!ej.is_object())
        throw InputError("experiment: expected an object");
    reject_unknown(ej, {"a", "b", "a0", "b0"}, "experiment");
    s.experiment.a = text(require(ej, "a", "experiment"), "experiment.a");
    s.experiment.b = text(require(ej, "b", "experiment"), "experiment.b");
    check_species(s.network, s.experiment.a, "experiment.a");
    check_species(s.network, s.experiment.b, "experiment.b");
    if (s.experiment.a == s.experiment.b)
        throw InputError("experiment: a and b must differ");
    for (const char* key : {"a0", "b0"})
        if (ej.contains(key)) {
            const double v = number(ej[key], std::string("experiment.") + key);
            if (!(v > 0.0))
                throw InputError(std::string("experiment.") + key + ": must be positive");
            (key[0] == 'a' ? s.experiment.a0 : s.experiment.b0) = v;
        }

    if (j.contains("grid"))
        s.grid = grid_from_json(j["grid"]);

    if (j.contains("invariants")) {
        const auto& ij = j["invariants"];
        if (!ij.is_array())
            throw InputError("invariants: expected an array");
        for (std::size_t i = 0; i < ij.size(); ++i) {
            const auto where = "invariants[" + std::to_string(i) + "]";
            const auto& e = ij[i];
            if (!e.is_object())
                throw InputError(where + ": expected an object");
            reject_unknown(e, {"kind", "pair", "expected_K"}, where);
            InvariantEntry entry;
            entry.kind = invariant_kind_from_string(text(require(e, "kind", where), where + ".kind"));
            const auto& pair = require(e, "pair", where);
            if (!pair.is_array() || pair.size() != 2)
                throw InputError(where + ".pair: expected [\"A\", \"B\"]");
            entry.a = text(pair[0], where + ".pair[0]");
            entry.b = text(pair[1], where + ".pair[1]");
            check_species(s.network, entry.a, where + ".pair[0]");
            check_species(s.network, entry.b, where + ".pair[1]");
            if (e.contains("expected_K")) {
                const double k = number(e["expected_K"], where + ".expected_K");
                if (!(k > 0.0))
                    throw InputError(where + ".expected_K: must be positive");
                entry.expected_K = k;
            }
            s.invariants.push_back(entry);
        }
    }

    if (j.contains("engine"))
        s.engine = engine_from_string(text(j["engine"], "engine"));
    if (j.contains("balance"))
        s.balance = balance_mode_from_string(text(j["balance"], "balance"));
    if (j.contains("integrator")) {
        const auto& ij = j["integrator"];
        if (!ij.is_object())
            throw InputError("integrator: expected an object");
        reject_unknown(ij, {"rel_tol", "abs_tol"}, "integrator");
        IntegratorSettings st;
        if (ij.contains("rel_tol"))
            st.rel_tol = number(ij["rel_tol"], "integrator.rel_tol");
        if (ij.contains("abs_tol"))
            st.abs_tol = number(ij["abs_tol"], "integrator.abs_tol");
        if (!(st.rel_tol > 0.0) || !(st.abs_tol > 0.0))
            throw InputError("integrator: tolerances must be positive");
        s.integrator = st;
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    const auto j = read_json_file(path);
    try {
        return scenario_from_json(j, path.parent_path());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

nlohmann::ordered_json scenario_to_json(const Scenario& s)
{
    nlohmann::ordered_json j;
    j["network"] = network_to_json(s.network);
    nlohmann::ordered_json ej;
    ej["a"] = s.experiment.a;
    ej["b"] = s.experiment.b;
    if (s.experiment.a0)
        ej["a0"] = *s.experiment.a0;
    if (s.experiment.b0)
        ej["b0"] = *s.experiment.b0;
    j["experiment"] = ej;
    if (s.grid) {
        nlohmann::ordered_json gj;
        gj["t_max"] = s.grid->t_max;
        gj["points"] = s.grid->points;
        gj["spacing"] = s.grid->geometric ? "geometric" : "linear";
        gj["t_min"] = s.grid->t_min;
        j["grid"] = gj;
    }
    j["invariants"] = nlohmann::ordered_json::array();
    for (const auto& e : s.invariants) {
        nlohmann::ordered_json ij;
        ij["kind"] = to_string(e.kind);
        ij["pair"] = {e.a, e.b};
        if (e.expected_K)
            ij["expected_K"] = *e.expected_K;
        j["invariants"].push_back(ij);
    }
    j["engine"] = to_string(s.engine);
    j["balance"] = to_string(s.balance);
    if (s.integrator)
        j["integrator"] = {{"rel_tol", s.integrator->rel_tol}, {"abs_tol", s.integrator->abs_tol}};
    return j;
}

IntegratorConfig integrator_config(const Scenario& s)
{
    IntegratorConfig cfg;
    if (s.integrator) {
        cfg.rel_tol = s.integrator->rel_tol;
        cfg.abs_tol = s.integrator->abs_tol;
    }
    return cfg;
}

std::vector<double> scenario_grid(const Scenario& s)
{
    return s.grid ? make_grid(*s.grid) : default_grid(effective_network(s));
}

ReactionNetwork effective_network(const Scenario& s)
{
    if (s.balance == BalanceMode::Enforce)
        return balance_network(s.network);
    return s.network;
}

std::vector<InvariantSpec> resolve_invariants(const Scenario& s, const ReactionNetwork& net)
{
    std::vector<InvariantSpec> specs;
    for (const auto& e : s.invariants) {
        const auto a = net.index_of(e.a), b = net.index_of(e.b);
        if (e.expected_K) {
            InvariantSpec spec;
            spec.kind = e.kind;
            spec.a = a;
            spec.b = b;
            spec.expected_K = *e.expected_K;
            spec.provenance = KProvenance::UserSupplied;
            specs.push_back(spec);
        } else {
            specs.push_back(default_invariant_spec(net, e.kind, a, b));
        }
    }
    return specs;
}

} // namespace kinvar

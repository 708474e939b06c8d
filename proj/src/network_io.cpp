#include "kinvar/network_io.hpp"
#include "kinvar/errors.hpp"
#include "kinvar/exact.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace kinvar {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, unused] : j.items())
        if (!allowed.count(key))
            throw InputError(where + ": unknown field '" + key + "'");
}

struct ParsedRate {
    double value = 0.0;
    std::string exact;
};

ParsedRate parse_rate(const nlohmann::json& v, const std::string& where)
{
    if (v.is_number())
        return {v.get<double>(), {}};
    if (!v.is_string())
        throw InputError(where + ": rate must be a number or a rational string");
    const auto text = v.get<std::string>();
    const Rational q = parse_rational(text);
    double value = 0.0;
    if (text.find('/') == std::string::npos) {
        // decimal text: from_chars rounds correctly
        const auto first = text.find_first_not_of(" \t+");
        std::from_chars(text.data() + first, text.data() + text.size(), value);
    } else {
        value = to_double(q);
    }
    return {value, text};
}

std::vector<Term> parse_side(const nlohmann::json& side, const ReactionNetwork& net, const std::string& where)
{
    if (!side.is_array())
        throw InputError(where + ": expected an array of [name, coefficient] pairs");
    std::vector<Term> terms;
    for (const auto& entry : side) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() || !entry[1].is_number_integer())
            throw InputError(where + ": each term must be [\"name\", integer]");
        terms.push_back({net.index_of(entry[0].get<std::string>()), entry[1].get<int>()});
    }
    return terms;
}

nlohmann::ordered_json rate_to_json(double value, const std::string& exact)
{
    if (!exact.empty())
        return exact;
    return value;
}

} // namespace

ReactionNetwork network_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw InputError("network: expected a JSON object");
    reject_unknown(j, {"species", "reactions"}, "network");
    if (!j.contains("species") || !j["species"].is_array())
        throw InputError("network: missing 'species' array");
    if (!j.contains("reactions") || !j["reactions"].is_array())
        throw InputError("network: missing 'reactions' array");

    ReactionNetwork net;
    for (const auto& name : j["species"]) {
        if (!name.is_string())
            throw InputError("network.species: names must be strings");
        net.species.push_back({net.species.size(), name.get<std::string>()});
    }
    // Names are checked again in validate_network; index_of needs them unique first.
    {
        std::set<std::string> seen;
        for (const auto& s : net.species)
            if (!seen.insert(s.name).second)
                throw InputError("duplicate species name '" + s.name + "'");
    }

    std::size_t r = 0;
    for (const auto& rj : j["reactions"]) {
        const auto where = "network.reactions[" + std::to_string(r++) + "]";
        if (!rj.is_object())
            throw InputError(where + ": expected an object");
        reject_unknown(rj, {"reactants", "products", "k_forward", "k_backward"}, where);
        for (const char* key : {"reactants", "products", "k_forward"})
            if (!rj.contains(key))
                throw InputError(where + ": missing '" + key + "'");
        Reaction rx;
        rx.reactants = parse_side(rj["reactants"], net, where + ".reactants");
        rx.products = parse_side(rj["products"], net, where + ".products");
        const auto kf = parse_rate(rj["k_forward"], where + ".k_forward");
        rx.k_forward = kf.value;
        rx.exact_forward = kf.exact;
        if (rj.contains("k_backward")) {
            const auto kb = parse_rate(rj["k_backward"], where + ".k_backward");
            rx.k_backward = kb.value;
            rx.exact_backward = kb.exact;
        }
        net.reactions.push_back(std::move(rx));
    }
    return validate_network(std::move(net));
}

nlohmann::ordered_json network_to_json(const ReactionNetwork& net)
{
    nlohmann::ordered_json j;
    j["species"] = nlohmann::ordered_json::array();
    for (const auto& s : net.species)
        j["species"].push_back(s.name);
    j["reactions"] = nlohmann::ordered_json::array();
    for (const auto& rx : net.reactions) {
        nlohmann::ordered_json rj;
        auto side = [&](const std::vector<Term>& terms) {
            auto a = nlohmann::ordered_json::array();
            for (const auto& t : terms)
                a.push_back({net.species[t.species].name, t.coefficient});
            return a;
        };
        rj["reactants"] = side(rx.reactants);
        rj["products"] = side(rx.products);
        rj["k_forward"] = rate_to_json(rx.k_forward, rx.exact_forward);
        rj["k_backward"] = rate_to_json(rx.k_backward, rx.exact_backward);
        j["reactions"].push_back(std::move(rj));
    }
    return j;
}

nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

ReactionNetwork load_network(const std::filesystem::path& path)
{
    try {
        return network_from_json(read_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void save_network(const ReactionNetwork& net, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << network_to_json(net).dump(2) << '\n';
}

} // namespace kinvar

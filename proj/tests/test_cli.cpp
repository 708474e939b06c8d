#include "kinvar/commands.hpp"
#include "kinvar/csv.hpp"
#include "kinvar/errors.hpp"
#include "kinvar/network_io.hpp"
#include "kinvar/scenario.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>

#include <clocale>
#include <fstream>
#include <locale>
#include <sstream>

using namespace kinvar;
using namespace kinvar::testing;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace fs = std::filesystem;

namespace {

const fs::path data_dir = KINVAR_DATA_DIR;

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / "kinvar_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json parse_file(const fs::path& p)
{
    return nlohmann::json::parse(slurp(p));
}

int run(const std::string& cmd, const CommandOptions& opt, std::string* err_text = nullptr)
{
    std::ostringstream out, err;
    const int code = run_command(cmd, opt, out, err);
    if (err_text)
        *err_text = err.str();
    return code;
}

} // namespace

TEST_CASE("scenario round trip", "[cli][scenario]")
{
    for (const char* name : {"butene.json", "butene_balanced.json", "single.json", "two_step.json",
                             "dimer_2A_B.json", "dimer_2A_2B.json"}) {
        const auto s = load_scenario(data_dir / name);
        const auto text = scenario_to_json(s).dump(2);
        const auto back = scenario_from_json(nlohmann::json::parse(text));
        CHECK(back == s);
        CHECK(scenario_to_json(back).dump(2) == text);
    }
}

TEST_CASE("scenario diagnostics", "[cli][scenario]")
{
    const auto base = parse_file(data_dir / "single.json");
    auto bad = base;
    bad["experiment"]["a"] = "Z";
    CHECK_THROWS_WITH(scenario_from_json(bad), ContainsSubstring("experiment.a: unknown species 'Z'"));
    bad = base;
    bad["grid"]["points"] = 1;
    CHECK_THROWS_WITH(scenario_from_json(bad), ContainsSubstring("grid.points"));
    bad = base;
    bad["grid"]["t_max"] = -1.0;
    CHECK_THROWS_WITH(scenario_from_json(bad), ContainsSubstring("t_max"));
    bad = base;
    bad["colour"] = "blue";
    CHECK_THROWS_WITH(scenario_from_json(bad), ContainsSubstring("unknown field 'colour'"));
    bad = base;
    bad["invariants"][0]["kind"] = "ratio";
    CHECK_THROWS_AS(scenario_from_json(bad), InputError);
    bad = base;
    bad["engine"] = "quantum";
    CHECK_THROWS_AS(scenario_from_json(bad), InputError);

    const auto dir = scratch("syntax");
    std::ofstream(dir / "broken.json") << "{\n  \"network\": {,\n}";
    CHECK_THROWS_WITH(load_scenario(dir / "broken.json"), ContainsSubstring("line 2"));
}

TEST_CASE("grid flag", "[cli][scenario]")
{
    const auto g = parse_grid_flag("2.0,400,geometric");
    CHECK(g.t_max == 2.0);
    CHECK(g.points == 400);
    CHECK(g.geometric);
    CHECK(make_grid(g).size() == 400);
    CHECK_FALSE(parse_grid_flag("5,11,linear").geometric);
    CHECK_THROWS_AS(parse_grid_flag("5,1,linear"), InputError);
    CHECK_THROWS_AS(parse_grid_flag("5,10"), InputError);
    CHECK_THROWS_AS(parse_grid_flag("x,10,linear"), InputError);
    CHECK_THROWS_AS(parse_grid_flag("5,10,log"), InputError);
}

TEST_CASE("simulate writes the dual trajectories", "[cli]")
{
    const auto out = scratch("simulate");
    CommandOptions opt;
    opt.config = data_dir / "butene.json";
    opt.out = out;
    opt.oracle = true;
    opt.dump_config = out / "dump.json";
    CHECK(run("simulate", opt) == kExitOk);
    CHECK(fs::exists(out / "from_cis-2-butene.csv"));
    CHECK(fs::exists(out / "from_1-butene.csv"));
    const auto summary = parse_file(out / "summary.json");
    CHECK(summary["engine"] == "linear");
    CHECK(summary["grid"]["points"] == 400);
    CHECK(summary["grid"]["t_last"] == 2.0);
    CHECK(summary["conservation"]["max_drift"].get<double>() < 1e-10);
    for (const auto& c : summary["oracle"]["checks"])
        CHECK(c["agree"] == true);

    // the dumped scenario reproduces the run byte for byte
    const auto again = scratch("simulate_again");
    CommandOptions from_dump;
    from_dump.config = out / "dump.json";
    from_dump.out = again;
    CHECK(run("simulate", from_dump) == kExitOk);
    CHECK(slurp(again / "from_cis-2-butene.csv") == slurp(out / "from_cis-2-butene.csv"));
    CHECK(load_scenario(out / "dump.json") == load_scenario(data_dir / "butene.json"));
}

TEST_CASE("closed-form and linear engines give the same CSVs", "[cli]")
{
    const auto s = load_scenario(data_dir / "single.json");
    auto cf = s;
    cf.engine = Engine::ClosedForm;
    auto lin = s;
    lin.engine = Engine::Linear;
    const auto o1 = scratch("cf"), o2 = scratch("lin");
    CHECK(cmd_simulate(cf, o1).exit_code == kExitOk);
    CHECK(cmd_simulate(lin, o2).exit_code == kExitOk);
    auto read = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        std::vector<double> v;
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                v.push_back(std::stod(cell));
        }
        return v;
    };
    const auto a = read(o1 / "from_A.csv"), b = read(o2 / "from_A.csv");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) <= 1e-10);

    auto cyc = load_scenario(data_dir / "butene.json");
    cyc.engine = Engine::ClosedForm;
    CHECK_THROWS_WITH(cmd_simulate(cyc, scratch("cyc")), ContainsSubstring("engine mismatch"));
}

TEST_CASE("invariants command and its tolerance policy", "[cli]")
{
    CommandOptions opt;
    opt.config = data_dir / "butene.json";
    opt.out = scratch("inv");
    std::string err;
    CHECK(run("invariants", opt, &err) == kExitInputError);
    CHECK_THAT(err, ContainsSubstring("--tol"));
    opt.tol = 1e-6;
    CHECK(run("invariants", opt) == kExitInvariantFailure);
    opt.tol = 1e-2;
    CHECK(run("invariants", opt) == kExitOk);

    // balanced butene passes at the default tolerance with the balanced K
    CommandOptions bal;
    bal.config = data_dir / "butene.json";
    bal.balance = true;
    bal.out = scratch("inv_bal");
    CHECK(run("invariants", bal) == kExitOk);
    const auto rep = parse_file(bal.out / "invariants.json");
    const auto net = balance_network(load_network(data_dir / "butene_network.json"));
    CHECK_THAT(rep["reports"][0]["expected_K"].get<double>(),
               WithinRel(net.reactions[0].k_forward / net.reactions[0].k_backward, 1e-6));
    CHECK(rep["reports"][0]["verdict"] == true);

    CommandOptions dimer;
    dimer.config = data_dir / "dimer_2A_B.json";
    dimer.out = scratch("inv_dimer");
    CHECK(run("invariants", dimer) == kExitOk);
    const auto d = parse_file(dimer.out / "invariants.json");
    CHECK(d["reports"][0]["expected_K"] == 3.0);
}

TEST_CASE("prove command", "[cli]")
{
    CommandOptions opt;
    opt.network = data_dir / "four_cycle.json";
    opt.pair = "A,C";
    opt.out = scratch("prove");
    CHECK(run("prove", opt) == kExitOk);
    const auto j = parse_file(opt.out / "proof.json");
    CHECK(j["verified"] == true);
    CHECK(j["K_num"] == "3");
    CHECK(j["K_den"] == "1");

    opt.network = data_dir / "two_step_network.json";
    opt.pair = "A,B";
    CHECK(run("prove", opt) == kExitOk);
    CHECK(parse_file(opt.out / "proof.json")["K"] == "3");

    opt.network = data_dir / "three_cycle_unbalanced.json";
    CHECK(run("prove", opt) == kExitInvariantFailure);
    const auto bad = parse_file(opt.out / "proof.json");
    CHECK_FALSE(bad["cycle_violations"].empty());
    opt.balance = true;
    CHECK(run("prove", opt) == kExitOk);

    opt.pair = "A";
    CHECK(run("prove", opt) == kExitInputError);
    opt.pair = "A,Q";
    CHECK(run("prove", opt) == kExitInputError);
}

TEST_CASE("fig1 command", "[cli]")
{
    const auto out = scratch("fig1");
    const auto res = cmd_fig1(false, out);
    CHECK(res.exit_code == kExitOk);
    const auto csv = slurp(out / "fig1.csv");
    CHECK(csv.rfind("t,BA_over_AA,BB_over_AB,BA_over_AB\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 401);
    const auto d = fig1_data(false);
    CHECK(d.t.size() == 400);
    CHECK(d.t.front() == 1e-3);
    CHECK(d.t.back() == 2.0);
    CHECK(d.ba_over_aa.front() < 0.01);
    CHECK(d.bb_over_ab.front() > 50.0);
    CHECK(d.max_rel_deviation < 5e-3);
    CHECK(d.overshoot.overshoots);
    CHECK(fig1_data(true).max_rel_deviation < 1e-8);
}

TEST_CASE("balance command", "[cli]")
{
    CommandOptions opt;
    opt.network = data_dir / "butene_network.json";
    opt.out = scratch("balance");
    CHECK(run("balance", opt) == kExitOk);
    const auto j = parse_file(opt.out / "balanced.json");
    CHECK(j["before"]["satisfied"] == false);
    CHECK(j["after"]["satisfied"] == true);
    const auto net = network_from_json(j["network"]);
    CHECK(check_cycle_conditions(net, 1e-12).satisfied);
}

TEST_CASE("exit codes for bad input", "[cli]")
{
    CommandOptions opt;
    CHECK(run("simulate", opt) == kExitInputError);
    CHECK(run("dance", opt) == kExitInputError);
    opt.config = data_dir / "missing.json";
    CHECK(run("simulate", opt) == kExitInputError);
}

TEST_CASE("CSV output is locale independent and reproducible", "[cli][csv]")
{
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1234567.0) == "1234567");
    CHECK(format_double(1e-20) == "9.9999999999999995e-21");

    const auto net = make_network({"A", "B"}, {first_order(0, 1, 2.0, 1.0)});
    const auto traj = dual_experiment(net, 0, 1, make_time_grid(1.0, 5, false)).from_a;
    std::ostringstream before;
    write_trajectory_csv(before, traj);

    const auto* old = std::setlocale(LC_ALL, nullptr);
    const std::string saved = old ? old : "C";
    bool switched = false;
    for (const char* loc : {"de_DE.UTF-8", "fr_FR.UTF-8", "de_DE", "C.UTF-8"})
        if (std::setlocale(LC_ALL, loc)) {
            switched = true;
            break;
        }
    std::ostringstream after;
    after.imbue(std::locale::classic());
    write_trajectory_csv(after, traj);
    std::setlocale(LC_ALL, saved.c_str());
    (void)switched;
    CHECK(before.str() == after.str());
    CHECK(before.str().rfind("t,A,B\n0,1,0\n", 0) == 0);
    CHECK(before.str().find(';') == std::string::npos);
}

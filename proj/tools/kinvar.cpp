// kinvar: dual experiments, time invariants and symbolic proofs for
// reaction networks.
#include "kinvar/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace kinvar;
    CLI::App app{"Time invariants of chemical kinetics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "kinvar 0.1.0");

    CommandOptions opt;
    std::string config, out = ".", grid, engine, dump, network, pair;
    double tol = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--out", out, "Output directory")->capture_default_str();
    };
    auto scenario = [&](CLI::App* sub) {
        sub->add_option("--config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--grid", grid, "tmax,points,spacing (spacing: linear|geometric)");
        sub->add_option("--engine", engine, "auto|linear|nonlinear|closed-form");
        sub->add_flag("--balance", opt.balance, "Balance the cycle conditions before running");
        sub->add_option("--dump-config", dump, "Write the effective scenario to this file");
    };

    auto* simulate = app.add_subcommand("simulate", "Run the dual experiment and write trajectories");
    scenario(simulate);
    common(simulate);
    simulate->add_flag("--oracle", opt.oracle, "Cross-check against the other engines");

    auto* invariants = app.add_subcommand("invariants", "Evaluate the scenario's time invariants");
    scenario(invariants);
    common(invariants);
    auto* tol_opt = invariants->add_option("--tol", tol, "Verdict tolerance (default 1e-6)");

    auto* prove = app.add_subcommand("prove", "Exact fixed-proportion proof for a pair of species");
    prove->add_option("network", network, "Network JSON")->required()->check(CLI::ExistingFile);
    prove->add_option("--pair", pair, "A,B")->required();
    prove->add_flag("--balance", opt.balance, "Balance the rates exactly first");
    common(prove);

    auto* fig1 = app.add_subcommand("fig1", "Butene isomerisation ratios");
    fig1->add_flag("--balance", opt.balance, "Balance the published constants first");
    fig1->add_option("--grid", grid, "tmax,points,spacing");
    common(fig1);

    auto* balance = app.add_subcommand("balance", "Balance a network's cycle conditions");
    balance->add_option("network", network, "Network JSON")->required()->check(CLI::ExistingFile);
    common(balance);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    opt.out = out;
    if (!config.empty())
        opt.config = config;
    if (!grid.empty())
        opt.grid = grid;
    if (!engine.empty())
        opt.engine = engine;
    if (!dump.empty())
        opt.dump_config = dump;
    if (!network.empty())
        opt.network = network;
    if (!pair.empty())
        opt.pair = pair;
    if (tol_opt->count() > 0)
        opt.tol = tol;

    const auto* sub = app.get_subcommands().front();
    return run_command(sub->get_name(), opt, std::cout, std::cerr);
}

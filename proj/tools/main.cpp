#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "spacs/cli_ops.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Postselected weak measurement with a photon-added coherent meter"};
    app.require_subcommand(1);

    auto* fig = app.add_subcommand("figure", "Write a parameter-sweep CSV (plus .meta sidecar)");
    std::string fig_id, fig_out;
    int fig_points = 0;
    fig->add_option("id", fig_id, "one of fig1a fig1b fig1c fig1d fig2 fig3 fig4")->required();
    fig->add_option("--out", fig_out, "output CSV path")->required();
    fig->add_option("--points", fig_points, "override the sweep density");

    auto* cc = app.add_subcommand("crosscheck",
                                  "Closed forms vs numeric oracles over random configurations");
    std::uint64_t cc_seed = 20240915;
    int cc_points = 1000;
    std::string cc_out;
    cc->add_option("--seed", cc_seed, "RNG seed");
    cc->add_option("--points", cc_points, "number of random configurations");
    cc->add_option("--out", cc_out, "output CSV path")->required();

    auto* mc = app.add_subcommand("mc", "Monte Carlo Cramer-Rao experiment");
    std::string mc_config, mc_out;
    mc->add_option("--config", mc_config, "key=value config file")->required();
    mc->add_option("--out", mc_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spacs::cli::kExitUsageError;
    }

    try {
        if (fig->parsed()) return spacs::cli::run_figure(fig_id, fig_out, fig_points);
        if (cc->parsed()) return spacs::cli::run_crosscheck(cc_seed, cc_points, cc_out);
        if (mc->parsed()) return spacs::cli::run_mc(mc_config, mc_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return spacs::cli::kExitComputeError;
    }
    return spacs::cli::kExitUsageError;
}

#include <iostream>

#include <CLI11.hpp>

#include "sae/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Robust small-area Gini estimation with bias calibration"};
    app.require_subcommand(1);
    sae::io::CommandOptions o;

    auto common = [&](CLI::App* cmd) {
        cmd->add_option("--config", o.config, "YAML configuration file");
        cmd->add_option("--out", o.out, "output directory")->capture_default_str();
        cmd->add_option("--seed", o.seed, "master seed");
        cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        cmd->add_option("--method", o.method, "estimator (plugin, cd, wr, bc, sbc, abc, if-sbc, if-abc)");
        cmd->add_option("--scope", o.scope, "partial or full");
        cmd->add_option("--c", o.c, "calibration constant");
        cmd->add_option("--gamma", o.gamma, "skewness: a number or auto");
    };
    auto data = [&](CLI::App* cmd) {
        cmd->add_option("--sample", o.sample, "sample CSV (area_id, y, x1..xp)");
        cmd->add_option("--population", o.population, "population CSV (area_id, x1..xp)");
    };

    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo study over configured scenarios");
    common(simulate);
    auto* estimate = app.add_subcommand("estimate", "area Gini estimates from a sample and a population");
    common(estimate);
    data(estimate);
    estimate->add_flag("--export-cdf", o.export_cdf, "also write the calibrated CDFs");
    auto* tune = app.add_subcommand("tune", "bootstrap selection of (c, gamma)");
    common(tune);
    data(tune);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return sae::io::run_command(app.get_subcommands().front()->get_name(), o, std::cout, std::cerr);
}

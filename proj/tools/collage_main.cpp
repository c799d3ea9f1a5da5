// collage: Galerkin forward solver and collage-residual parameter recovery
// for the two-equation Dirichlet problem.
//
//   collage forward --config run.cfg [--out errors.csv] [--plot curves.dat]
//   collage inverse --config run.cfg [--mode l2] [--grid 251] [--n 7]
//   collage table1  [--out table1.csv]
//   collage table2  [--out table2.csv]
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "collage/cli/commands.hpp"
#include "collage/cli/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::string config;
    std::string out;
    std::string plot;
    std::string mode;
    std::optional<int> grid;
    std::optional<int> n;
};

void add_common(CLI::App* sub, Overrides& o, bool needs_config) {
    auto* cfg = sub->add_option("--config", o.config, "Path to a key = value run configuration");
    if (needs_config) cfg->required();
    sub->add_option("--out", o.out, "CSV output path (default: stdout)");
    sub->add_option("--plot", o.plot, "Write gnuplot data for the forward solutions");
    sub->add_option("--mode", o.mode, "Objective: paper-abs-sum, l1, l2, dual-norm");
    sub->add_option("--grid", o.grid, "Grid points per axis for the coarse scan");
    sub->add_option("--n", o.n, "Number of test functions g_3..g_{n+2}");
}

collage::cli::RunConfig resolve(const Overrides& o) {
    using collage::cli::ConfigError;
    collage::cli::RunConfig cfg =
        o.config.empty() ? collage::cli::reference_config() : collage::cli::load_config(o.config);
    if (!o.out.empty()) cfg.out = o.out;
    if (!o.plot.empty()) cfg.plot = o.plot;
    if (!o.mode.empty()) {
        const auto mode = collage::parse_objective_mode(o.mode);
        if (!mode) throw ConfigError("unknown objective mode '" + o.mode + "'");
        cfg.mode = *mode;
    }
    if (o.grid) cfg.grid = *o.grid;
    if (o.n) cfg.n = *o.n;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Galerkin forward solver and collage-type inverse solver"};
    app.require_subcommand(1);

    Overrides forward_opts, inverse_opts, table1_opts, table2_opts;
    auto* forward = app.add_subcommand("forward", "Galerkin errors for each m in the config");
    add_common(forward, forward_opts, true);
    auto* inverse = app.add_subcommand("inverse", "Recover (lambda1, lambda2) from forward targets");
    add_common(inverse, inverse_opts, true);
    auto* table1 = app.add_subcommand("table1", "Forward errors of the reference problem");
    add_common(table1, table1_opts, false);
    auto* table2 = app.add_subcommand("table2", "Inverse results of the reference problem");
    add_common(table2, table2_opts, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (forward->parsed()) collage::cli::cmd_forward(resolve(forward_opts), std::cout);
        if (inverse->parsed()) collage::cli::cmd_inverse(resolve(inverse_opts), std::cout);
        if (table1->parsed()) {
            table1_opts.config.clear();
            collage::cli::cmd_forward(resolve(table1_opts), std::cout);
        }
        if (table2->parsed()) {
            table2_opts.config.clear();
            collage::cli::cmd_inverse(resolve(table2_opts), std::cout);
        }
    } catch (const collage::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return 0;
}

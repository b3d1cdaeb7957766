// casimix command line: effective permittivities of metal-dielectric
// composites under several mixing rules, and the Casimir-Lifshitz force
// between composite slabs. See README.md for scenario file syntax.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "casimix/cli.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_numeric_error = 3;

void add_common(CLI::App* cmd, casimix::CommandOptions& opt, bool needs_out = true) {
    cmd->add_option("--scenario", opt.scenario_path, "scenario file")->required();
    if (needs_out) cmd->add_option("--out", opt.out_path, "output CSV path")->required();
    cmd->add_option("--rel-tol", opt.force_rel_tol, "relative tolerance of the force quadrature")
        ->check(CLI::Range(1e-12, 0.999));
    cmd->add_option("--jobs", opt.jobs, "worker threads (0 = available parallelism)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Casimir-Lifshitz forces between effective-medium composite slabs"};
    app.require_subcommand(1);

    casimix::CommandOptions opt;
    std::string rule_a, rule_b, validate_path;

    CLI::App* eps = app.add_subcommand(
        "epsilon-sweep", "effective permittivity over a filling-fraction or frequency grid");
    add_common(eps, opt);

    CLI::App* fvl = app.add_subcommand("force-vs-L", "reduction factor versus separation");
    add_common(fvl, opt);

    CLI::App* evf = app.add_subcommand("eta-vs-f", "reduction factor versus filling fraction");
    add_common(evf, opt);

    CLI::App* cmp = app.add_subcommand("compare", "reduction factors of two rules side by side");
    add_common(cmp, opt);
    cmp->add_option("--rule-a", rule_a, "first mixing rule")->required();
    cmp->add_option("--rule-b", rule_b, "second mixing rule")->required();

    CLI::App* val = app.add_subcommand("validate", "load and check a scenario, compute nothing");
    val->add_option("--scenario", validate_path, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_config_error;
    }

    try {
        if (eps->parsed()) casimix::cmd_epsilon_sweep(opt);
        if (fvl->parsed()) casimix::cmd_force_vs_separation(opt);
        if (evf->parsed()) casimix::cmd_eta_vs_filling(opt);
        if (cmp->parsed()) casimix::cmd_compare_rules(opt, rule_a, rule_b);
        if (val->parsed()) casimix::cmd_validate(validate_path, std::cout);
        return exit_ok;
    } catch (const casimix::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric_error;
    } catch (const casimix::ConvergenceError& e) {
        std::cerr << "numeric error: " << e.what() << " (best estimate " << e.estimate
                  << ", bound " << e.error_bound << ")\n";
        return exit_numeric_error;
    } catch (const std::runtime_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return exit_numeric_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

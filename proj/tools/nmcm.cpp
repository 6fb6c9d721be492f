// nmcm: command-line runner for collision-model simulations.
//
//   nmcm kernel   --config run.json [--output DIR] [--quiet]
//   nmcm simulate --config run.json [--output DIR] [--quiet]
//   nmcm converge --config run.json [--output DIR] [--quiet]
//   nmcm witness  --config run.json [--output DIR] [--quiet]

#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "nmcm/commands.hpp"
#include "nmcm/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Collision-model simulator for atoms coupled to structured waveguides"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    bool quiet = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Configuration file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--output", output_dir, "Output directory (overrides output.dir)");
        sub->add_flag("--quiet", quiet, "Suppress warnings and progress");
    };
    auto* kernel = app.add_subcommand("kernel", "Write the collision weight table");
    auto* simulate = app.add_subcommand("simulate", "Run one trajectory");
    auto* converge = app.add_subcommand("converge", "Sweep dt against the continuous-time reference");
    auto* witness = app.add_subcommand("witness", "Write the CP-divisibility report");
    for (auto* sub : {kernel, simulate, converge, witness}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? nmcm::kExitOk : nmcm::kExitUsage;
    }

    try {
        const nmcm::SimulationConfig config = nmcm::load_config(config_path);
        nmcm::CommandContext ctx;
        ctx.output_dir = output_dir.empty() ? config.output_dir : output_dir;
        ctx.log = quiet ? nullptr : &std::cerr;

        if (*kernel) {
            nmcm::cmd_kernel(config, ctx);
        } else if (*simulate) {
            nmcm::cmd_simulate(config, ctx);
        } else if (*converge) {
            nmcm::cmd_converge(config, {}, ctx);
        } else if (*witness) {
            nmcm::cmd_witness(config, ctx);
        }
    } catch (const nmcm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return nmcm::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return nmcm::kExitRuntime;
    }
    return nmcm::kExitOk;
}

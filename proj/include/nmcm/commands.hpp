// commands.hpp: Subcommands of the nmcm tool: kernel tables, trajectory
// runs, dt-convergence sweeps and divisibility reports.
#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nmcm/analysis.hpp"
#include "nmcm/config.hpp"
#include "nmcm/coupling.hpp"
#include "nmcm/engine.hpp"

namespace nmcm {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitRuntime = 3,
};

struct CommandContext {
    std::filesystem::path output_dir;
    std::ostream* log{nullptr};  // warnings and progress; null when quiet
};

/// Continuous-time amplitude in the frame the trajectory is reported in, when
/// one is known (white and mirror couplings).
std::optional<std::function<cplx(double)>> reference_amplitude(const SimulationConfig& config);

/// Writes weights.csv.
WeightMatrix cmd_kernel(const SimulationConfig& config, const CommandContext& ctx);

/// Writes trajectory.csv, summary.json, timing.json and, when a reference is
/// known, reference.csv sampled on the same grid.
Trajectory cmd_simulate(const SimulationConfig& config, const CommandContext& ctx);

struct ConvergenceRow {
    double dt{0.0};
    std::size_t n_steps{0};
    double max_abs_error{0.0};
    std::optional<double> observed_order;  // absent on the first row
};

/// Runs every dt over the same horizon and compares with the reference.
/// Mirror configs require tau / dt to be an integer. Writes convergence.csv
/// (rows ordered by decreasing dt).
std::vector<ConvergenceRow> cmd_converge(const SimulationConfig& config, std::vector<double> dt_list,
                                         const CommandContext& ctx);

/// Writes witness.json (report plus config snapshot).
DivisibilityReport cmd_witness(const SimulationConfig& config, const CommandContext& ctx);

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace nmcm

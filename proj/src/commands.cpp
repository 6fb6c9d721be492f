#include "nmcm/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <ostream>

#include "json.hpp"
#include "nmcm/config_json.hpp"
#include "nmcm/format.hpp"
#include "nmcm/reference.hpp"

namespace nmcm {

namespace fs = std::filesystem;

namespace {

constexpr double kDivisibilitySlack = 1e-9;

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void prepare_dir(const CommandContext& ctx) {
    std::error_code ec;
    fs::create_directories(ctx.output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + ctx.output_dir.string() + "'");
}

void log_lines(const CommandContext& ctx, const char* prefix, const std::vector<std::string>& lines) {
    if (!ctx.log) return;
    for (const auto& l : lines) *ctx.log << prefix << l << '\n';
}

double horizon(const SimulationConfig& config) {
    return config.t_max ? *config.t_max : static_cast<double>(*config.n_steps) * config.dt;
}

}  // namespace

std::optional<std::function<cplx(double)>> reference_amplitude(const SimulationConfig& config) {
    const auto& c = config.coupling;
    const double omega0 = config.rotating_frame ? 0.0 : config.omega0;
    const double gamma = c.gamma;
    switch (c.kind) {
        case CouplingConfig::Kind::White:
            return [omega0, gamma](double t) { return white_amplitude(omega0, gamma, t); };
        case CouplingConfig::Kind::Mirror: {
            const double phi = config.rotating_frame ? c.phi + config.omega0 * c.tau : c.phi;
            if (c.tau == 0.0) {
                // Both deltas at lag 0: a white coupling with rate gamma |1 - e^{-i phi}|^2.
                const double rate = gamma * std::norm(1.0 - std::polar(1.0, -phi));
                return [omega0, rate](double t) { return white_amplitude(omega0, rate, t); };
            }
            const auto sol = std::make_shared<DdeSolution>(solve_dde(omega0, gamma, phi, c.tau, horizon(config)));
            return [sol](double t) { return (*sol)(t); };
        }
        case CouplingConfig::Kind::Custom:
            return std::nullopt;
    }
    return std::nullopt;
}

WeightMatrix cmd_kernel(const SimulationConfig& config, const CommandContext& ctx) {
    validate(config);
    prepare_dir(ctx);
    const auto steps = resolve_steps(config);
    const WeightMatrix weights = collision_weights(time_kernel(config.coupling.to_spec()), config.dt, steps.n_steps);
    log_lines(ctx, "warning: ", weights.warnings().messages);
    auto out = open_output(ctx.output_dir / "weights.csv");
    write_weights_csv(out, weights);
    return weights;
}

Trajectory cmd_simulate(const SimulationConfig& config, const CommandContext& ctx) {
    prepare_dir(ctx);
    Trajectory traj = run(config);
    log_lines(ctx, "note: ", traj.notes);
    {
        auto out = open_output(ctx.output_dir / "trajectory.csv");
        write_trajectory_csv(out, traj);
    }
    {
        auto out = open_output(ctx.output_dir / "summary.json");
        out << trajectory_summary_json(traj);
    }
    {
        auto out = open_output(ctx.output_dir / "timing.json");
        out << trajectory_timing_json(traj);
    }
    if (const auto ref = reference_amplitude(config)) {
        SampledAmplitude samples;
        for (double t : traj.t) {
            samples.t.push_back(t);
            samples.eps.push_back((*ref)(t));
        }
        auto out = open_output(ctx.output_dir / "reference.csv");
        write_reference_csv(out, samples);
    }
    if (ctx.log) {
        *ctx.log << "simulated " << (traj.size() - 1) << " steps in "
                 << format_double(traj.wall_seconds.back()) << " s\n";
    }
    return traj;
}

std::vector<ConvergenceRow> cmd_converge(const SimulationConfig& config, std::vector<double> dt_list,
                                         const CommandContext& ctx) {
    validate(config);
    if (dt_list.empty()) dt_list = config.dt_list;
    if (dt_list.empty()) throw ConfigError("converge.dt_list", "no time steps given");
    std::sort(dt_list.begin(), dt_list.end(), std::greater<>());
    dt_list.erase(std::unique(dt_list.begin(), dt_list.end()), dt_list.end());

    const double t_end = horizon(config);
    std::vector<SimulationConfig> runs;
    for (std::size_t i = 0; i < dt_list.size(); ++i) {
        const double dt = dt_list[i];
        const std::string field = "converge.dt_list[" + std::to_string(i) + "]";
        if (!(dt > 0.0)) throw ConfigError(field, "must be positive");
        if (config.coupling.kind == CouplingConfig::Kind::Mirror) {
            const double cells = config.coupling.tau / dt;
            if (std::abs(cells - std::round(cells)) > kDivisibilitySlack * std::max(1.0, cells)) {
                throw ConfigError(field, "dt = " + format_double(dt) + " does not divide tau exactly");
            }
        }
        SimulationConfig c = config;
        c.dt = dt;
        c.n_steps.reset();
        c.t_max = t_end;
        validate(c);
        runs.push_back(std::move(c));
    }
    const auto ref = reference_amplitude(config);
    if (!ref) throw ConfigError("coupling.type", "no continuous-time reference for custom kernels");

    std::vector<std::future<ConvergenceRow>> jobs;
    for (const auto& c : runs) {
        jobs.push_back(std::async(std::launch::async, [&c, &ref] {
            const Trajectory traj = run(c);
            ConvergenceRow row;
            row.dt = c.dt;
            row.n_steps = traj.size() - 1;
            for (std::size_t i = 0; i < traj.size(); ++i) {
                row.max_abs_error = std::max(row.max_abs_error, std::abs(traj.eps[i] - (*ref)(traj.t[i])));
            }
            return row;
        }));
    }
    std::vector<ConvergenceRow> rows;
    for (auto& j : jobs) rows.push_back(j.get());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].max_abs_error > 0.0 && rows[i - 1].max_abs_error > 0.0) {
            rows[i].observed_order = std::log(rows[i - 1].max_abs_error / rows[i].max_abs_error) /
                                     std::log(rows[i - 1].dt / rows[i].dt);
        }
    }

    prepare_dir(ctx);
    auto out = open_output(ctx.output_dir / "convergence.csv");
    write_convergence_csv(out, rows);
    if (ctx.log) {
        for (const auto& r : rows) {
            *ctx.log << "dt=" << format_double(r.dt) << " max_abs_error=" << format_double(r.max_abs_error) << '\n';
        }
    }
    return rows;
}

DivisibilityReport cmd_witness(const SimulationConfig& config, const CommandContext& ctx) {
    prepare_dir(ctx);
    const Trajectory traj = run(config);
    log_lines(ctx, "note: ", traj.notes);
    DivisibilityReport report = analyze(traj);
    nlohmann::json j = nlohmann::json::parse(report_json(report));
    j["config"] = config_to_json(config);
    auto out = open_output(ctx.output_dir / "witness.json");
    out << j.dump(2) << '\n';
    if (ctx.log) {
        *ctx.log << "witness N = " << format_double(report.witness) << ", " << report.revivals.size()
                 << " revival interval(s)\n";
    }
    return report;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
    os << "dt,n_steps,max_abs_error,observed_order\n";
    for (const auto& r : rows) {
        os << format_double(r.dt) << ',' << r.n_steps << ',' << format_double(r.max_abs_error) << ','
           << (r.observed_order ? format_double(*r.observed_order) : std::string()) << '\n';
    }
}

}  // namespace nmcm

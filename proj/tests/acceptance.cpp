// acceptance: end-to-end checks, one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nmcm/analysis.hpp"
#include "nmcm/commands.hpp"
#include "nmcm/engine.hpp"
#include "nmcm/reference.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using nmcm::cplx;

namespace {

struct Outcome {
    bool pass{true};
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

nmcm::SimulationConfig white(double gamma, double dt, std::size_t n) {
    nmcm::SimulationConfig c;
    c.coupling.kind = nmcm::CouplingConfig::Kind::White;
    c.coupling.gamma = gamma;
    c.dt = dt;
    c.n_steps = n;
    return c;
}

nmcm::SimulationConfig mirror(double gamma, double phi, double tau, double dt, std::size_t n) {
    nmcm::SimulationConfig c;
    c.coupling.kind = nmcm::CouplingConfig::Kind::Mirror;
    c.coupling.gamma = gamma;
    c.coupling.phi = phi;
    c.coupling.tau = tau;
    c.dt = dt;
    c.n_steps = n;
    return c;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return a.size() == b.size() ? m : INFINITY;
}

Outcome white_decay() {
    const auto start = std::chrono::steady_clock::now();
    const auto traj = nmcm::run(white(1.0, 1e-3, 5000));
    double err = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        err = std::max(err, std::abs(std::abs(traj.eps[i]) - std::exp(-0.5 * traj.t[i])));
    }
    const double elapsed = seconds_since(start);

    auto coarse = white(1.0, 0.05, 100);
    const auto se = nmcm::run(coarse);
    coarse.representation = nmcm::Representation::FullFock;
    const double fock_gap = max_diff(se.eps, nmcm::run(coarse).eps);

    return {err <= 5e-3 && elapsed < 1.0 && fock_gap <= 1e-9,
            "max | |eps| - exp(-t/2) | = " + fmt("%.3e", err) + ", Fock cross-check " + fmt("%.1e", fock_gap) +
                ", " + fmt("%.3f", elapsed) + " s"};
}

Outcome mirror_convergence() {
    const auto start = std::chrono::steady_clock::now();
    const double tau = 1.0, t_end = 4.0;
    const auto sol = nmcm::solve_dde(0.0, 0.5, 0.0, tau, t_end);
    std::vector<double> errors;
    for (int k = 6; k <= 10; ++k) {
        const double dt = tau / std::ldexp(1.0, k);
        const auto traj = nmcm::run(mirror(0.5, 0.0, tau, dt, static_cast<std::size_t>(std::llround(t_end / dt))));
        double err = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) err = std::max(err, std::abs(traj.eps[i] - sol(traj.t[i])));
        errors.push_back(err);
    }
    const double elapsed = seconds_since(start);
    bool ok = elapsed < 10.0;
    std::string ratios;
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double r = errors[i - 1] / errors[i];
        ok = ok && errors[i] < errors[i - 1] && r >= 1.6 && r <= 2.4;
        ratios += (i > 1 ? " " : "") + fmt("%.3f", r);
    }
    return {ok, "errors " + fmt("%.2e", errors.front()) + " .. " + fmt("%.2e", errors.back()) + ", ratios [" + ratios +
                    "], " + fmt("%.3f", elapsed) + " s"};
}

Outcome bound_state() {
    const double tau = 1.0, gamma = 0.5, dt = tau / 512;
    const auto traj = nmcm::run(mirror(gamma, 0.0, tau, dt, static_cast<std::size_t>(std::llround(40.0 / dt))));
    const double value = std::abs(traj.eps.back());
    const double target = 1.0 / (1.0 + gamma * tau);
    const double dde = std::abs(nmcm::solve_dde(0.0, gamma, 0.0, tau, 40.0)(40.0));
    return {std::abs(value - target) <= 2e-2,
            "|eps(40)| = " + fmt("%.5f", value) + ", DDE " + fmt("%.5f", dde) + ", bound " + fmt("%.5f", target)};
}

Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    auto c = mirror(0.5, 0.0, 0.4, 0.1, 48);
    const auto exact = nmcm::run(c);
    c.representation = nmcm::Representation::FullFock;
    c.n_max = 1;
    const auto fock = nmcm::run(c);
    c.representation = nmcm::Representation::MirrorRecursion;
    const auto rec = nmcm::run(c);
    const double elapsed = seconds_since(start);
    const double gap_fock = max_diff(exact.eps, fock.eps);
    const double gap_rec = max_diff(exact.eps, rec.eps);
    const double c_const = 1.0;
    return {gap_fock <= 1e-9 && gap_rec <= c_const * c.dt && elapsed < 5.0,
            "exact-vs-Fock " + fmt("%.2e", gap_fock) + ", recursion-vs-exact " + fmt("%.3e", gap_rec) +
                " (<= dt), " + fmt("%.3f", elapsed) + " s"};
}

Outcome unitarity() {
    const double exact_drift = nmcm::run(mirror(0.5, 0.3, 0.2, 0.01, 10000)).max_norm_drift();
    std::vector<double> drift;
    for (double dt : {0.02, 0.01, 0.005}) {
        auto c = mirror(0.5, 0.0, 1.0, dt, static_cast<std::size_t>(std::llround(4.0 / dt)));
        c.stepper = nmcm::StepperKind::SecondOrder;
        drift.push_back(nmcm::run(c).max_norm_drift());
    }
    bool ok = exact_drift <= 1e-9;
    std::string ratios;
    for (std::size_t i = 1; i < drift.size(); ++i) {
        const double r = drift[i - 1] / drift[i];
        ok = ok && r >= 1.6 && r <= 2.4;
        ratios += (i > 1 ? " " : "") + fmt("%.3f", r);
    }
    return {ok, "exact drift " + fmt("%.2e", exact_drift) + " over 1e4 steps, second-order drift ratios [" + ratios +
                    "]"};
}

Outcome divisibility() {
    const auto start = std::chrono::steady_clock::now();
    const auto w = nmcm::analyze(nmcm::run(white(1.0, 0.01, 1000)));
    bool all_cp = true;
    for (bool f : w.cp) all_cp = all_cp && f;

    const double tau = 1.0, dt = 0.05;
    const std::size_t d = 20;
    const auto m = nmcm::analyze(nmcm::run(mirror(0.5, 0.0, tau, dt, 200)));
    const auto first = m.first_non_cp_step();
    const double elapsed = seconds_since(start);
    const bool ok = all_cp && w.witness == 0.0 && m.witness > 0.0 && first && *first > d && *first < 3 * d &&
                    elapsed < 2.0;
    return {ok, "white N = " + fmt("%g", w.witness) + (all_cp ? " all CP" : " non-CP") + ", mirror N = " +
                    fmt("%.4f", m.witness) + " first non-CP step " + (first ? std::to_string(*first) : "none") +
                    " (d = 20), " + fmt("%.3f", elapsed) + " s"};
}

Outcome kernel_correctness() {
    bool ok = true;
    const double phi = 0.9;
    const auto wm = nmcm::collision_weights(nmcm::time_kernel(nmcm::build_spec_mirror(1.0, phi, 0.5)), 0.1, 50);
    ok = ok && wm.lags().size() == 2 && wm.at_lag(0) == cplx(1.0, 0.0) &&
         wm.at_lag(5) == -std::polar(1.0, -phi) && !wm.warnings().discretization_mismatch;

    const auto smooth = nmcm::SmoothKernel::exponential(cplx(0.4, 0.1), 1.5, 0.73);
    const double dt = 0.05;
    const auto ws = nmcm::collision_weights(nmcm::TimeKernel({}, smooth), dt, 100);
    double worst = 0.0;
    for (std::size_t l = 0; l <= 16; ++l) {
        worst = std::max(worst, std::abs(ws.at_lag(l) - oracle::cell_average(smooth, 0.73, dt, l, 320, 320)));
    }
    ok = ok && worst <= 1e-8;

    bool stationary = true;
    for (const auto* w : {&wm, &ws}) {
        for (long n = 1; n < 40; ++n) {
            for (long k = 1; k < 40; ++k) stationary = stationary && (*w)(n, k) == (*w)(n + 1, k + 1);
        }
    }
    ok = ok && stationary;
    return {ok, std::string("mirror weights exact, smooth vs 2-D oracle ") + fmt("%.2e", worst) +
                    (stationary ? ", stationary" : ", NOT stationary")};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "nmcm_acceptance_determinism";
    fs::remove_all(root);
    auto c = mirror(0.5, 0.4, 0.3, 0.01, 500);
    c.omega0 = 1.0;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    nmcm::cmd_simulate(c, {root / "a", nullptr});
    nmcm::cmd_simulate(c, {root / "b", nullptr});
    bool same = true;
    for (const char* f : {"trajectory.csv", "reference.csv", "summary.json"}) {
        const std::string a = slurp(root / "a" / f);
        same = same && !a.empty() && a == slurp(root / "b" / f);
    }
    fs::remove_all(root);
    return {same, same ? "trajectory.csv, reference.csv, summary.json byte-identical" : "outputs differ"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"white-coupling decay", white_decay},
        {"mirror convergence to the delay equation", mirror_convergence},
        {"long-time bound value", bound_state},
        {"oracle equivalence", oracle_equivalence},
        {"unitarity", unitarity},
        {"divisibility witness", divisibility},
        {"kernel correctness", kernel_correctness},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                    o.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}

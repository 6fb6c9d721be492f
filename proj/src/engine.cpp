#include "nmcm/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "json.hpp"
#include "nmcm/config_json.hpp"
#include "nmcm/format.hpp"

namespace nmcm {

namespace {

constexpr cplx kI{0.0, 1.0};

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace

// ---------------------------------------------------------------------------
// CollisionPlan

CollisionPlan::CollisionPlan(std::vector<Coupling> couplings, double omega0, double dt, std::size_t n_steps)
    : couplings_(std::move(couplings)), omega0_(omega0), dt_(dt), n_steps_(n_steps) {
    std::sort(couplings_.begin(), couplings_.end(),
              [](const Coupling& a, const Coupling& b) { return a.lag < b.lag; });
    couplings_.erase(std::remove_if(couplings_.begin(), couplings_.end(),
                                    [](const Coupling& c) { return c.strength == cplx{0.0, 0.0}; }),
                     couplings_.end());
}

std::size_t CollisionPlan::max_lag() const noexcept {
    return couplings_.empty() ? 0 : couplings_.back().lag;
}

std::size_t CollisionPlan::min_lag() const noexcept {
    return couplings_.empty() ? 0 : couplings_.front().lag;
}

std::vector<Touch> CollisionPlan::touches(long n) const {
    std::vector<Touch> out;
    out.reserve(couplings_.size());
    for (const auto& c : couplings_) out.push_back({n - static_cast<long>(c.lag), c.strength});
    return out;
}

CollisionPlan build_plan(const WeightMatrix& strengths, double omega0, std::size_t n_steps) {
    std::vector<CollisionPlan::Coupling> couplings;
    for (const auto& [lag, g] : strengths.lags()) couplings.push_back({lag, g});
    return CollisionPlan(std::move(couplings), omega0, strengths.dt(), n_steps);
}

Eigen::MatrixXcd restricted_hamiltonian(const CollisionPlan& plan) {
    const auto m = static_cast<Eigen::Index>(plan.bandwidth());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m + 1);
    h(0, 0) = plan.omega0();
    for (Eigen::Index j = 0; j < m; ++j) {
        const cplx g = plan.couplings()[static_cast<std::size_t>(j)].strength;
        h(j + 1, 0) = g;
        h(0, j + 1) = std::conj(g);
    }
    return h;
}

// ---------------------------------------------------------------------------
// Single-excitation stepper

SingleExcitationStepper::SingleExcitationStepper(const CollisionPlan& plan, StepperKind kind) : plan_(plan) {
    const Eigen::MatrixXcd h = restricted_hamiltonian(plan);
    const double dt = plan.dt();
    if (kind == StepperKind::ExactExponential) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        const Eigen::VectorXcd phases =
            (es.eigenvalues().cast<cplx>() * (-kI * dt)).array().exp().matrix();
        propagator_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    } else {
        // I - i (H_S + V) dt - V^2 dt^2 / 2, dropping H_S^2 and the H_S V cross terms.
        Eigen::MatrixXcd v = h;
        v(0, 0) = 0.0;
        const auto id = Eigen::MatrixXcd::Identity(h.rows(), h.cols());
        propagator_ = id - kI * dt * h - (v * v) * (0.5 * dt * dt);
    }
}

double SingleExcitationStepper::advance(SingleExcitationState& state, long n) const {
    const auto touches = plan_.touches(n);
    const auto dim = static_cast<Eigen::Index>(touches.size() + 1);
    Eigen::VectorXcd x(dim);
    x(0) = state.eps;
    double before = std::norm(state.eps);
    for (std::size_t j = 0; j < touches.size(); ++j) {
        if (!state.contains(touches[j].ancilla)) {
            throw std::logic_error("internal error: plan touches ancilla " +
                                   std::to_string(touches[j].ancilla) + " missing from the state");
        }
        const cplx c = state.ancilla(touches[j].ancilla);
        x(static_cast<Eigen::Index>(j) + 1) = c;
        before += std::norm(c);
    }
    const Eigen::VectorXcd y = propagator_ * x;
    state.eps = y(0);
    for (std::size_t j = 0; j < touches.size(); ++j) {
        state.ancilla(touches[j].ancilla) = y(static_cast<Eigen::Index>(j) + 1);
    }
    return y.squaredNorm() - before;
}

void step_single_excitation(SingleExcitationState& state, const CollisionPlan& plan, long n,
                            StepperKind kind) {
    SingleExcitationStepper(plan, kind).advance(state, n);
}

// ---------------------------------------------------------------------------
// Full Fock stepper

FullFockStepper::FullFockStepper(const CollisionPlan& plan, int n_max) : plan_(plan), n_max_(n_max) {
    if (n_max < 1) throw std::domain_error("n_max must be at least 1");
    const std::size_t d = static_cast<std::size_t>(n_max) + 1;
    const std::size_t modes = plan.bandwidth();
    const std::size_t field_dim = ipow(d, modes);
    const auto dim = static_cast<Eigen::Index>(2 * field_dim);

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<std::size_t> occ(modes);
    for (std::size_t idx = 0; idx < 2 * field_dim; ++idx) {
        const std::size_t sys = idx / field_dim;
        std::size_t rest = idx % field_dim;
        for (std::size_t j = modes; j-- > 0;) {
            occ[j] = rest % d;
            rest /= d;
        }
        const auto col = static_cast<Eigen::Index>(idx);
        if (sys == TruncatedFockState::kExcited) h(col, col) += plan.omega0();
        for (std::size_t j = 0; j < modes; ++j) {
            const cplx g = plan.couplings()[j].strength;
            const std::size_t stride = ipow(d, modes - 1 - j);
            if (sys == TruncatedFockState::kExcited && occ[j] + 1 < d) {
                // g |g><e| a_j^dagger
                const auto row = static_cast<Eigen::Index>(idx - field_dim + stride);
                h(row, col) += g * std::sqrt(static_cast<double>(occ[j] + 1));
            }
            if (sys == TruncatedFockState::kGround && occ[j] > 0) {
                // g* |e><g| a_j
                const auto row = static_cast<Eigen::Index>(idx + field_dim - stride);
                h(row, col) += std::conj(g) * std::sqrt(static_cast<double>(occ[j]));
            }
        }
    }
    const Eigen::MatrixXcd generator = h * (-kI * plan.dt());
    propagator_ = generator.exp();
}

void FullFockStepper::advance(TruncatedFockState& state, long n) const {
    const auto touches = plan_.touches(n);
    const std::size_t d = state.local_dim();
    if (state.n_max() != n_max_) throw std::invalid_argument("Fock truncation differs from stepper");
    const std::size_t k_total = state.active_modes().size();
    const std::size_t field_dim = ipow(d, k_total);

    std::vector<std::size_t> strides;
    for (const auto& t : touches) {
        const int p = state.position(t.ancilla);
        if (p < 0) {
            throw std::domain_error("ancilla " + std::to_string(t.ancilla) + " touched at step " +
                                    std::to_string(n) + " is outside the active window");
        }
        strides.push_back(ipow(d, k_total - 1 - static_cast<std::size_t>(p)));
    }

    // Offsets of every local basis state (sys, touched occupations).
    const std::size_t local_field = ipow(d, touches.size());
    std::vector<std::size_t> offsets(2 * local_field);
    for (std::size_t local = 0; local < offsets.size(); ++local) {
        std::size_t off = (local / local_field) * field_dim;
        std::size_t rest = local % local_field;
        for (std::size_t j = touches.size(); j-- > 0;) {
            off += (rest % d) * strides[j];
            rest /= d;
        }
        offsets[local] = off;
    }

    auto& amp = state.amplitudes();
    Eigen::VectorXcd x(static_cast<Eigen::Index>(offsets.size()));
    for (std::size_t base = 0; base < field_dim; ++base) {
        bool untouched_base = true;
        for (std::size_t s : strides) {
            if ((base / s) % d != 0) {
                untouched_base = false;
                break;
            }
        }
        if (!untouched_base) continue;
        for (std::size_t l = 0; l < offsets.size(); ++l) {
            x(static_cast<Eigen::Index>(l)) = amp(static_cast<Eigen::Index>(base + offsets[l]));
        }
        const Eigen::VectorXcd y = propagator_ * x;
        for (std::size_t l = 0; l < offsets.size(); ++l) {
            amp(static_cast<Eigen::Index>(base + offsets[l])) = y(static_cast<Eigen::Index>(l));
        }
    }
}

void step_full(TruncatedFockState& state, const CollisionPlan& plan, long n) {
    FullFockStepper(plan, state.n_max()).advance(state, n);
}

// ---------------------------------------------------------------------------
// Mirror recursion

MirrorRecursionState init_mirror_recursion(std::size_t d, cplx beta) {
    if (d == 0) throw std::domain_error("mirror recursion requires a delay of at least one step");
    const double p = std::norm(beta);
    if (!(p <= 1.0 + 1e-14)) throw std::domain_error("initial amplitude |beta| must not exceed 1");
    MirrorRecursionState s;
    s.eps = beta;
    s.a_vac = cplx{std::sqrt(std::max(0.0, 1.0 - p)), 0.0};
    s.ring.assign(d, cplx{0.0, 0.0});
    return s;
}

void mirror_recursion_step(MirrorRecursionState& state, long n, double gamma, double phi, std::size_t d,
                           double omega0, double dt) {
    if (d == 0 || state.ring.size() != d) throw std::domain_error("mirror recursion requires d >= 1");
    const long back = n - static_cast<long>(d);
    const std::size_t slot = static_cast<std::size_t>(n % static_cast<long>(d));
    const cplx c_back = back >= 1 ? state.ring[slot] : cplx{0.0, 0.0};
    const cplx feedback = std::polar(1.0, phi);
    const double root = std::sqrt(gamma * dt);

    const cplx eps = state.eps;
    state.eps = eps - (kI * omega0 + gamma) * dt * eps + kI * root * feedback * c_back;
    const cplx c_new = -kI * root * eps + 0.5 * gamma * dt * feedback * c_back;
    // Second collision of ancilla n - d, after which it never returns.
    const cplx c_out = (1.0 - 0.5 * gamma * dt) * c_back + kI * root * std::conj(feedback) * eps;
    state.emitted_norm2 += std::norm(c_out);
    state.ring[slot] = c_new;
}

double norm(const MirrorRecursionState& state) {
    double sum = std::norm(state.a_vac) + std::norm(state.eps) + state.emitted_norm2;
    for (const auto& c : state.ring) sum += std::norm(c);
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// Trajectory runs

double Trajectory::max_norm_drift() const {
    double drift = 0.0;
    for (double v : norm) drift = std::max(drift, std::abs(v - 1.0));
    return drift;
}

Trajectory run(const SimulationConfig& config) {
    validate(config);
    const StepCount steps = resolve_steps(config);
    const std::size_t n_steps = steps.n_steps;
    const double dt = config.dt;

    TimeKernel kernel = time_kernel(config.coupling.to_spec());
    double omega0 = config.omega0;
    if (config.rotating_frame) {
        kernel = kernel.rotated(config.omega0);
        omega0 = 0.0;
    }
    const WeightMatrix weights = collision_weights(kernel, dt, n_steps);
    const WeightMatrix strengths = coupling_strengths(weights, config.coupling.gamma);
    const CollisionPlan plan = build_plan(strengths, omega0, n_steps);

    Trajectory traj;
    traj.config = config;
    traj.notes = weights.warnings().messages;
    if (steps.note) traj.notes.push_back(*steps.note);
    traj.n.reserve(n_steps + 1);
    traj.t.reserve(n_steps + 1);
    traj.eps.reserve(n_steps + 1);
    traj.pop_e.reserve(n_steps + 1);
    traj.norm.reserve(n_steps + 1);
    traj.wall_seconds.reserve(n_steps + 1);

    const auto start = std::chrono::steady_clock::now();
    auto record = [&](long n, cplx eps, double nrm) {
        traj.n.push_back(n);
        traj.t.push_back(static_cast<double>(n) * dt);
        traj.eps.push_back(eps);
        traj.pop_e.push_back(std::norm(eps));
        traj.norm.push_back(nrm);
        traj.wall_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    };

    switch (config.representation) {
        case Representation::SingleExcitation: {
            SingleExcitationState state = init_single_excitation(n_steps, config.beta, plan.prehistory());
            const SingleExcitationStepper stepper(plan, effective_stepper(config));
            double norm2 = norm(state) * norm(state);
            record(0, state.eps, std::sqrt(norm2));
            for (long n = 1; n <= static_cast<long>(n_steps); ++n) {
                norm2 += stepper.advance(state, n);
                record(n, state.eps, std::sqrt(norm2));
            }
            break;
        }
        case Representation::FullFock: {
            const std::size_t window =
                config.window.value_or(plan.max_lag() - plan.min_lag() + 1);
            const SingleExcitationState initial = init_single_excitation(0, config.beta);
            TruncatedFockState state = embed_single_excitation(initial, config.n_max, {});
            const FullFockStepper stepper(plan, config.n_max);
            auto eps_of = [](const TruncatedFockState& s) {
                return s.amplitude(TruncatedFockState::kExcited,
                                   std::vector<int>(s.active_modes().size(), 0));
            };
            record(0, eps_of(state), state.norm());
            for (long n = 1; n <= static_cast<long>(n_steps); ++n) {
                for (const auto& t : plan.touches(n)) {
                    if (state.position(t.ancilla) < 0) state.add_vacuum_mode(t.ancilla);
                }
                if (state.active_modes().size() > window) {
                    throw std::domain_error("full_fock window of " + std::to_string(window) +
                                            " modes is smaller than the kernel bandwidth");
                }
                stepper.advance(state, n);
                // Ancilla m is touched for the last time at step m + max_lag.
                const long leaving = n - static_cast<long>(plan.max_lag());
                if (state.position(leaving) >= 0) state.release_mode(leaving);
                record(n, eps_of(state), state.norm());
            }
            break;
        }
        case Representation::MirrorRecursion: {
            const std::size_t d = mirror_delay_steps(config);
            double phi = config.coupling.phi;
            if (config.rotating_frame) phi += config.omega0 * config.coupling.tau;
            MirrorRecursionState state = init_mirror_recursion(d, config.beta);
            record(0, state.eps, norm(state));
            for (long n = 1; n <= static_cast<long>(n_steps); ++n) {
                mirror_recursion_step(state, n, config.coupling.gamma, phi, d, omega0, dt);
                record(n, state.eps, norm(state));
            }
            break;
        }
    }
    return traj;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "n,t,re_eps,im_eps,abs_eps,pop_e,norm\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        os << traj.n[i] << ',' << format_double(traj.t[i]) << ',' << format_double(traj.eps[i].real()) << ','
           << format_double(traj.eps[i].imag()) << ',' << format_double(std::abs(traj.eps[i])) << ','
           << format_double(traj.pop_e[i]) << ',' << format_double(traj.norm[i]) << '\n';
    }
}

std::string trajectory_summary_json(const Trajectory& traj) {
    nlohmann::json j;
    j["config"] = config_to_json(traj.config);
    j["n_steps"] = traj.size() == 0 ? 0 : traj.size() - 1;
    if (traj.size() > 0) {
        const std::size_t last = traj.size() - 1;
        j["final"] = {{"t", traj.t[last]},
                      {"eps", complex_json(traj.eps[last])},
                      {"abs_eps", std::abs(traj.eps[last])},
                      {"pop_e", traj.pop_e[last]},
                      {"norm", traj.norm[last]}};
    }
    j["max_norm_drift"] = traj.max_norm_drift();
    j["notes"] = traj.notes;
    return j.dump(2) + "\n";
}

std::string trajectory_timing_json(const Trajectory& traj) {
    nlohmann::json j;
    j["steps"] = traj.size() == 0 ? 0 : traj.size() - 1;
    j["wall_seconds"] = traj.wall_seconds.empty() ? 0.0 : traj.wall_seconds.back();
    return j.dump(2) + "\n";
}

}  // namespace nmcm

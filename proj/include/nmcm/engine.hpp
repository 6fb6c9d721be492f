// engine.hpp: Collision plans, per-step propagators and trajectory runs.
//
// Step n (n = 1, 2, ...) is the collision during [t_{n-1}, t_n]; it maps
// eps^(n-1) to eps^(n) and couples the atom to ancillas m = n - l for every
// lag l with g(l) != 0. Ancillas with m <= 0 exist in vacuum, so the coupling
// pattern is identical at every step.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nmcm/config.hpp"
#include "nmcm/coupling.hpp"
#include "nmcm/state.hpp"

namespace nmcm {

struct Touch {
    long ancilla{0};
    cplx strength{0.0, 0.0};
};

class CollisionPlan {
public:
    struct Coupling {
        std::size_t lag{0};
        cplx strength{0.0, 0.0};
    };

    CollisionPlan(std::vector<Coupling> couplings, double omega0, double dt, std::size_t n_steps);

    /// Nonzero strengths, increasing lag.
    const std::vector<Coupling>& couplings() const noexcept { return couplings_; }
    std::size_t bandwidth() const noexcept { return couplings_.size(); }
    std::size_t max_lag() const noexcept;
    std::size_t min_lag() const noexcept;

    /// Vacuum ancillas with index <= 0 needed by the first steps.
    std::size_t prehistory() const noexcept { return max_lag(); }

    double omega0() const noexcept { return omega0_; }
    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }

    /// Ancillas touched at step n, in coupling order.
    std::vector<Touch> touches(long n) const;

private:
    std::vector<Coupling> couplings_;
    double omega0_;
    double dt_;
    std::size_t n_steps_;
};

CollisionPlan build_plan(const WeightMatrix& strengths, double omega0, std::size_t n_steps);

/// H_S + V_n restricted to span{|1_S>, |1_m> for touched m}: diagonal
/// (omega0, 0, ...), <1_m|V|1_S> = g in the first column.
Eigen::MatrixXcd restricted_hamiltonian(const CollisionPlan& plan);

/// Advances single-excitation states with a propagator computed once per plan.
class SingleExcitationStepper {
public:
    SingleExcitationStepper(const CollisionPlan& plan, StepperKind kind);

    /// Applies step n in place; returns the change of the squared norm.
    double advance(SingleExcitationState& state, long n) const;

    const Eigen::MatrixXcd& propagator() const noexcept { return propagator_; }

private:
    CollisionPlan plan_;
    Eigen::MatrixXcd propagator_;
};

void step_single_excitation(SingleExcitationState& state, const CollisionPlan& plan, long n,
                            StepperKind kind);

/// Exact propagation on the truncated Fock space (Pade exponential of the
/// atom (x) touched-mode Hamiltonian with truncated ladder operators).
class FullFockStepper {
public:
    FullFockStepper(const CollisionPlan& plan, int n_max);

    /// Throws std::domain_error when a touched ancilla is not active.
    void advance(TruncatedFockState& state, long n) const;

private:
    CollisionPlan plan_;
    int n_max_;
    Eigen::MatrixXcd propagator_;
};

void step_full(TruncatedFockState& state, const CollisionPlan& plan, long n);

/// State of the literal mirror recursion: only the last d ancilla amplitudes
/// are stored; ancillas leaving after their second collision add to emitted.
struct MirrorRecursionState {
    cplx a_vac{0.0, 0.0};
    cplx eps{1.0, 0.0};
    std::vector<cplx> ring;  // slot (m mod d) holds c_m for m in (n-d, n]
    double emitted_norm2{0.0};
};

MirrorRecursionState init_mirror_recursion(std::size_t d, cplx beta);

/// Step n of
///   eps' = eps - (i w0 + gamma) dt eps + i sqrt(gamma dt) e^{i phi} c_{n-d}
///   c_n' = -i sqrt(gamma dt) eps + (gamma dt / 2) e^{i phi} c_{n-d}
/// with c_m = 0 for m <= 0. Requires d >= 1.
void mirror_recursion_step(MirrorRecursionState& state, long n, double gamma, double phi,
                           std::size_t d, double omega0, double dt);

double norm(const MirrorRecursionState& state);

struct Trajectory {
    std::vector<long> n;
    std::vector<double> t;
    std::vector<cplx> eps;
    std::vector<double> pop_e;
    std::vector<double> norm;
    std::vector<double> wall_seconds;  // cumulative
    SimulationConfig config;
    std::vector<std::string> notes;

    std::size_t size() const noexcept { return n.size(); }
    double max_norm_drift() const;
};

/// Runs the configured representation from t = 0 to n_steps * dt. Row 0 is
/// the initial state. With rotating_frame the reported amplitude is
/// e^{i omega0 t} eps_lab(t).
Trajectory run(const SimulationConfig& config);

/// Columns n,t,re_eps,im_eps,abs_eps,pop_e,norm.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Final values, max norm drift, notes and the config snapshot. Wall time goes
/// to trajectory_timing_json so the summary is reproducible byte for byte.
std::string trajectory_summary_json(const Trajectory& traj);
std::string trajectory_timing_json(const Trajectory& traj);

}  // namespace nmcm

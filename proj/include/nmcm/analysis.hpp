// analysis.hpp: Reduced dynamical maps of the vacuum single-excitation
// family and CP-divisibility diagnostics on simulated trajectories.
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nmcm {

using cplx = std::complex<double>;
struct Trajectory;

/// Amplitude-damping-type qubit channel fixed by the decoherence factor G:
///   rho_ee -> |G|^2 rho_ee,  rho_ge -> conj(G) rho_ge,  trace preserved.
/// Matrices use the (e, g) basis.
class QubitChannel {
public:
    explicit QubitChannel(cplx g);

    cplx factor() const noexcept { return g_; }

    Eigen::Matrix2cd apply(const Eigen::Matrix2cd& rho) const;

    /// Choi matrix sum_ij |i><j| (x) E(|i><j|), 4x4 with input index major.
    Eigen::Matrix4cd choi() const;

    /// Action on vec(rho) (column stacking).
    Eigen::Matrix4cd superoperator() const;

    /// Ascending eigenvalues of the Choi matrix.
    Eigen::Vector4d choi_eigenvalues() const;

private:
    cplx g_;
};

/// Throws std::domain_error for |G| > 1 + 1e-9.
QubitChannel channel_from_amplitude(cplx g);

/// Map taking the state at one step to the next: ratio G_to / G_from.
struct IntermediateMap {
    cplx ratio;
    bool cp;                    // contraction test |ratio| <= 1
    double min_choi_eigenvalue; // Choi test; negative exactly when not CP
    bool cp_by_choi;
    std::optional<QubitChannel> channel;  // present when cp
};

/// Throws std::domain_error when G_from == 0 (the intermediate map is singular).
IntermediateMap intermediate_map(cplx g_from, cplx g_to);

struct RevivalInterval {
    std::size_t start{0};  // last step before |eps| grows
    std::size_t end{0};    // last step of the growth run
    double gain{0.0};      // |eps_end|^2 - |eps_start|^2
};

struct DivisibilityReport {
    /// cp[k] describes the map from step k to step k + 1 (collision k + 1).
    std::vector<bool> cp;
    std::vector<RevivalInterval> revivals;
    double witness{0.0};
    bool truncated{false};
    std::string note;

    /// Collision index of the first non-CP map, if any.
    std::optional<std::size_t> first_non_cp_step() const;
};

/// Diagnostics from a sequence of amplitudes eps^(0), eps^(1), ...
DivisibilityReport analyze(const std::vector<cplx>& eps);
DivisibilityReport analyze(const Trajectory& traj);

std::string report_json(const DivisibilityReport& report);

}  // namespace nmcm

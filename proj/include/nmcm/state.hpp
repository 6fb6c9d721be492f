// state.hpp: Joint atom + ancilla states: the exact single-excitation
// sector and a brute-force truncated Fock vector with a sliding mode window.
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace nmcm {

using cplx = std::complex<double>;

/// |Psi> = a_vac |g,vac> + eps |e,vac> + sum_m c_m |g,1_m>.
///
/// Ancilla indices run over [first_ancilla, last_ancilla]; indices <= 0 are
/// the vacuum modes that already sit at delayed positions before step 1.
struct SingleExcitationState {
    cplx a_vac{0.0, 0.0};
    cplx eps{1.0, 0.0};
    long first_ancilla{1};
    std::vector<cplx> c;

    long last_ancilla() const noexcept { return first_ancilla + static_cast<long>(c.size()) - 1; }
    bool contains(long m) const noexcept { return m >= first_ancilla && m <= last_ancilla(); }

    /// c_m; throws std::out_of_range for an index outside the register.
    cplx ancilla(long m) const;
    cplx& ancilla(long m);
};

/// Ancillas 1..n_steps plus `prehistory` vacuum modes with indices <= 0.
SingleExcitationState init_single_excitation(std::size_t n_steps, cplx beta,
                                             std::size_t prehistory = 0);

double norm(const SingleExcitationState& state);

/// Reduced atomic state in the (e, g) basis: rho(0,0) = rho_ee.
class QubitDensityMatrix {
public:
    /// Validates Hermiticity, unit trace (1e-12) and positivity (1e-10).
    explicit QubitDensityMatrix(const Eigen::Matrix2cd& rho);

    const Eigen::Matrix2cd& matrix() const noexcept { return rho_; }
    double ee() const { return rho_(0, 0).real(); }
    double gg() const { return rho_(1, 1).real(); }
    cplx ge() const { return rho_(1, 0); }
    cplx eg() const { return rho_(0, 1); }

private:
    Eigen::Matrix2cd rho_;
};

QubitDensityMatrix reduced_qubit_state(const SingleExcitationState& state);

/// Dense state over atom (x) active ancillas, each truncated at n_max photons.
///
/// Flat index = sys * D^K + sum_k occ_k * D^(K-1-k), D = n_max + 1, with sys
/// 0 = |g>, 1 = |e> and k the position in active_modes(). Modes released from
/// the window are projected onto their vacuum; the weight and N moments of the
/// discarded branches are kept so norm and N statistics stay exact.
class TruncatedFockState {
public:
    static constexpr int kGround = 0;
    static constexpr int kExcited = 1;

    /// Atom in a_g|g> + a_e|e>, no active modes.
    TruncatedFockState(int n_max, cplx a_g, cplx a_e);

    int n_max() const noexcept { return n_max_; }
    std::size_t local_dim() const noexcept { return static_cast<std::size_t>(n_max_) + 1; }
    const std::vector<long>& active_modes() const noexcept { return modes_; }
    const Eigen::VectorXcd& amplitudes() const noexcept { return amp_; }
    Eigen::VectorXcd& amplitudes() noexcept { return amp_; }
    std::size_t dimension() const noexcept { return static_cast<std::size_t>(amp_.size()); }

    /// Position of ancilla m in active_modes(), or -1.
    int position(long m) const noexcept;

    /// Appends ancilla m in its vacuum state (exact tensor product).
    void add_vacuum_mode(long m);

    /// Removes ancilla m, keeping the branch where it is in vacuum.
    void release_mode(long m);

    /// Amplitude of |sys> (x) |occupations...> in active_modes() order.
    cplx amplitude(int sys, const std::vector<int>& occupations) const;

    /// Norm over kept and discarded branches.
    double norm() const;
    double discarded_weight() const noexcept { return discarded_weight_; }

    /// <N> and <N^2> for N = |e><e| + sum_m n_m, including discarded branches.
    double excitation_mean() const;
    double excitation_second_moment() const;

private:
    // N eigenvalue of each flat basis index of the kept amplitudes.
    std::vector<int> excitation_numbers() const;

    int n_max_;
    std::vector<long> modes_;
    Eigen::VectorXcd amp_;
    double discarded_weight_{0.0};
    double discarded_n1_{0.0};
    double discarded_n2_{0.0};
};

/// Fock embedding of a single-excitation state over the given window.
/// Throws std::domain_error when a nonzero c_m lies outside the window.
TruncatedFockState embed_single_excitation(const SingleExcitationState& state, int n_max,
                                           const std::vector<long>& window);

/// Reads (a_vac, eps, c) back from the single-excitation components of the
/// kept branch. Ancillas outside the window are zero.
SingleExcitationState project_single_excitation(const TruncatedFockState& fock,
                                                long first_ancilla, std::size_t count);

/// Partial trace of the kept branch over all active modes, (e, g) basis.
Eigen::Matrix2cd reduced_system_matrix(const TruncatedFockState& fock);

double norm(const TruncatedFockState& state);

}  // namespace nmcm

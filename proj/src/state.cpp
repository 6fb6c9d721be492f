#include "nmcm/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace nmcm {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// SingleExcitationState

cplx SingleExcitationState::ancilla(long m) const {
    if (!contains(m)) throw std::out_of_range("ancilla index " + std::to_string(m) + " outside register");
    return c[static_cast<std::size_t>(m - first_ancilla)];
}

cplx& SingleExcitationState::ancilla(long m) {
    if (!contains(m)) throw std::out_of_range("ancilla index " + std::to_string(m) + " outside register");
    return c[static_cast<std::size_t>(m - first_ancilla)];
}

SingleExcitationState init_single_excitation(std::size_t n_steps, cplx beta, std::size_t prehistory) {
    const double p = std::norm(beta);
    if (!(p <= 1.0 + 1e-14)) throw std::domain_error("initial amplitude |beta| must not exceed 1");
    SingleExcitationState s;
    s.eps = beta;
    s.a_vac = cplx{std::sqrt(std::max(0.0, 1.0 - p)), 0.0};
    s.first_ancilla = 1 - static_cast<long>(prehistory);
    s.c.assign(n_steps + prehistory, cplx{0.0, 0.0});
    return s;
}

double norm(const SingleExcitationState& state) {
    double sum = std::norm(state.a_vac) + std::norm(state.eps);
    for (const auto& c : state.c) sum += std::norm(c);
    return std::sqrt(sum);
}

// ---------------------------------------------------------------------------
// QubitDensityMatrix

QubitDensityMatrix::QubitDensityMatrix(const Eigen::Matrix2cd& rho) : rho_(rho) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::domain_error("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-12) {
        throw std::domain_error("density matrix trace differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw std::domain_error("density matrix is not positive semidefinite");
    }
}

QubitDensityMatrix reduced_qubit_state(const SingleExcitationState& state) {
    Eigen::Matrix2cd rho;
    const double pe = std::norm(state.eps);
    const cplx ge = state.a_vac * std::conj(state.eps);
    rho << pe, std::conj(ge), ge, 1.0 - pe;
    return QubitDensityMatrix(rho);
}

// ---------------------------------------------------------------------------
// TruncatedFockState

TruncatedFockState::TruncatedFockState(int n_max, cplx a_g, cplx a_e) : n_max_(n_max), amp_(2) {
    if (n_max < 1) throw std::domain_error("n_max must be at least 1");
    amp_(kGround) = a_g;
    amp_(kExcited) = a_e;
}

int TruncatedFockState::position(long m) const noexcept {
    auto it = std::find(modes_.begin(), modes_.end(), m);
    return it == modes_.end() ? -1 : static_cast<int>(it - modes_.begin());
}

void TruncatedFockState::add_vacuum_mode(long m) {
    if (position(m) >= 0) throw std::logic_error("ancilla " + std::to_string(m) + " already active");
    const auto d = static_cast<Eigen::Index>(local_dim());
    Eigen::VectorXcd grown = Eigen::VectorXcd::Zero(amp_.size() * d);
    for (Eigen::Index i = 0; i < amp_.size(); ++i) grown(i * d) = amp_(i);
    amp_ = std::move(grown);
    modes_.push_back(m);
}

void TruncatedFockState::release_mode(long m) {
    const int k = position(m);
    if (k < 0) throw std::logic_error("ancilla " + std::to_string(m) + " is not active");
    const std::size_t d = local_dim();
    const std::size_t stride = ipow(d, modes_.size() - 1 - static_cast<std::size_t>(k));
    const auto excitations = excitation_numbers();

    Eigen::VectorXcd kept(amp_.size() / static_cast<Eigen::Index>(d));
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(amp_.size()); ++idx) {
        const std::size_t high = idx / (stride * d);
        const std::size_t occ = (idx / stride) % d;
        const std::size_t low = idx % stride;
        const cplx a = amp_(static_cast<Eigen::Index>(idx));
        if (occ == 0) {
            kept(static_cast<Eigen::Index>(high * stride + low)) = a;
        } else {
            const double w = std::norm(a);
            const double n = excitations[idx];
            discarded_weight_ += w;
            discarded_n1_ += w * n;
            discarded_n2_ += w * n * n;
        }
    }
    amp_ = std::move(kept);
    modes_.erase(modes_.begin() + k);
}

cplx TruncatedFockState::amplitude(int sys, const std::vector<int>& occupations) const {
    if (occupations.size() != modes_.size()) throw std::invalid_argument("occupation list size mismatch");
    std::size_t idx = static_cast<std::size_t>(sys);
    for (int occ : occupations) {
        if (occ < 0 || occ > n_max_) return {0.0, 0.0};
        idx = idx * local_dim() + static_cast<std::size_t>(occ);
    }
    return amp_(static_cast<Eigen::Index>(idx));
}

std::vector<int> TruncatedFockState::excitation_numbers() const {
    const std::size_t d = local_dim();
    std::vector<int> out(static_cast<std::size_t>(amp_.size()));
    for (std::size_t idx = 0; idx < out.size(); ++idx) {
        std::size_t rest = idx;
        int n = 0;
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            n += static_cast<int>(rest % d);
            rest /= d;
        }
        out[idx] = n + static_cast<int>(rest);  // rest is the atom digit
    }
    return out;
}

double TruncatedFockState::norm() const {
    return std::sqrt(amp_.squaredNorm() + discarded_weight_);
}

double TruncatedFockState::excitation_mean() const {
    const auto n = excitation_numbers();
    double sum = discarded_n1_;
    for (std::size_t i = 0; i < n.size(); ++i) sum += std::norm(amp_(static_cast<Eigen::Index>(i))) * n[i];
    return sum;
}

double TruncatedFockState::excitation_second_moment() const {
    const auto n = excitation_numbers();
    double sum = discarded_n2_;
    for (std::size_t i = 0; i < n.size(); ++i) {
        sum += std::norm(amp_(static_cast<Eigen::Index>(i))) * n[i] * n[i];
    }
    return sum;
}

double norm(const TruncatedFockState& state) { return state.norm(); }

TruncatedFockState embed_single_excitation(const SingleExcitationState& state, int n_max,
                                           const std::vector<long>& window) {
    for (long m = state.first_ancilla; m <= state.last_ancilla(); ++m) {
        if (state.ancilla(m) != cplx{0.0, 0.0} &&
            std::find(window.begin(), window.end(), m) == window.end()) {
            throw std::domain_error("window does not cover ancilla " + std::to_string(m) +
                                    " with nonzero amplitude");
        }
    }
    TruncatedFockState fock(n_max, state.a_vac, state.eps);
    for (long m : window) fock.add_vacuum_mode(m);

    const std::size_t d = fock.local_dim();
    const std::size_t k_total = window.size();
    for (std::size_t k = 0; k < k_total; ++k) {
        const long m = window[k];
        if (!state.contains(m)) continue;
        const std::size_t idx = ipow(d, k_total - 1 - k);  // |g> with one photon at position k
        fock.amplitudes()(static_cast<Eigen::Index>(idx)) = state.ancilla(m);
    }
    return fock;
}

SingleExcitationState project_single_excitation(const TruncatedFockState& fock, long first_ancilla,
                                                std::size_t count) {
    const auto& modes = fock.active_modes();
    std::vector<int> occ(modes.size(), 0);
    SingleExcitationState s;
    s.a_vac = fock.amplitude(TruncatedFockState::kGround, occ);
    s.eps = fock.amplitude(TruncatedFockState::kExcited, occ);
    s.first_ancilla = first_ancilla;
    s.c.assign(count, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (!s.contains(modes[k])) continue;
        occ[k] = 1;
        s.ancilla(modes[k]) = fock.amplitude(TruncatedFockState::kGround, occ);
        occ[k] = 0;
    }
    return s;
}

Eigen::Matrix2cd reduced_system_matrix(const TruncatedFockState& fock) {
    const auto half = fock.amplitudes().size() / 2;
    const auto g = fock.amplitudes().head(half);
    const auto e = fock.amplitudes().tail(half);
    Eigen::Matrix2cd rho;
    rho(0, 0) = e.squaredNorm();
    rho(1, 1) = g.squaredNorm();
    rho(1, 0) = e.dot(g);  // sum_r g_r * conj(e_r)
    rho(0, 1) = std::conj(rho(1, 0));
    return rho;
}

}  // namespace nmcm

// reference.hpp: Continuous-time references for the atomic amplitude:
// the delayed-feedback equation
//     eps'(t) = -(i w0 + gamma) eps(t) + gamma e^{i phi} eps(t - tau) theta(t - tau)
// solved exactly by the method of steps, and plain exponential decay.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace nmcm {

using cplx = std::complex<double>;

/// Exact solution with eps(0) = 1.
///
/// On [k tau, (k+1) tau]:
///     eps(t) = e^{-(i w0 + gamma) t} * sum_{j<=k} p_j (t - j tau)^j / j!,
/// p_0 = 1, p_j = kappa p_{j-1}, kappa = gamma e^{i phi} e^{(i w0 + gamma) tau}.
/// The feedback switches on at t = tau inclusive; the j = k term vanishes at
/// t = k tau, so both conventions give the same value there.
class DdeSolution {
public:
    DdeSolution(double omega0, double gamma, double phi, double tau, double t_max);

    cplx operator()(double t) const;

    /// floor(t / tau): index of the method-of-steps interval containing t.
    std::size_t interval_index(double t) const;

    double omega0() const noexcept { return omega0_; }
    double gamma() const noexcept { return gamma_; }
    double phi() const noexcept { return phi_; }
    double tau() const noexcept { return tau_; }
    double t_max() const noexcept { return t_max_; }

    /// kappa^j for j = 0..floor(t_max / tau).
    const std::vector<cplx>& coefficients() const noexcept { return coeffs_; }

private:
    double omega0_, gamma_, phi_, tau_, t_max_;
    std::vector<cplx> coeffs_;
};

/// Throws std::domain_error for tau <= 0 (use white_amplitude), gamma < 0 or
/// t_max <= 0.
DdeSolution solve_dde(double omega0, double gamma, double phi, double tau, double t_max);

/// e^{-(i w0 + gamma / 2) t}.
cplx white_amplitude(double omega0, double gamma, double t);

struct SampledAmplitude {
    std::vector<double> t;
    std::vector<cplx> eps;
};

/// Independent check of solve_dde: classical RK4 with step dt_fine and linear
/// interpolation of the stored history for the delayed argument.
/// Requires dt_fine <= tau / 1000 with tau an integer multiple of dt_fine.
SampledAmplitude dde_numeric_oracle(double omega0, double gamma, double phi, double tau, double dt_fine,
                                    double t_max);

/// Samples the reference on t = 0, dt, ..., n * dt.
SampledAmplitude sample(const DdeSolution& sol, double dt, std::size_t n);

/// Columns t,re_eps,im_eps,abs_eps.
void write_reference_csv(std::ostream& os, const SampledAmplitude& samples);

}  // namespace nmcm

#include "nmcm/reference.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nmcm/format.hpp"

namespace nmcm {

namespace {

constexpr cplx kI{0.0, 1.0};

}  // namespace

DdeSolution::DdeSolution(double omega0, double gamma, double phi, double tau, double t_max)
    : omega0_(omega0), gamma_(gamma), phi_(phi), tau_(tau), t_max_(t_max) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::domain_error("tau must be positive; use white_amplitude");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::domain_error("gamma must be nonnegative");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw std::domain_error("t_max must be positive");
    const cplx kappa = gamma * std::exp(kI * phi + (kI * omega0 + gamma) * tau);
    const auto k_max = static_cast<std::size_t>(std::floor(t_max / tau));
    coeffs_.reserve(k_max + 1);
    coeffs_.push_back(1.0);
    for (std::size_t j = 1; j <= k_max; ++j) coeffs_.push_back(coeffs_.back() * kappa);
}

std::size_t DdeSolution::interval_index(double t) const {
    return static_cast<std::size_t>(std::floor(t / tau_));
}

cplx DdeSolution::operator()(double t) const {
    if (t < 0.0) throw std::domain_error("DDE solution is defined for t >= 0");
    const cplx decay = std::exp(cplx{-gamma_ * t, -omega0_ * t});
    const std::size_t k = interval_index(t);
    if (k == 0 || gamma_ == 0.0) return decay;

    // Terms are combined in log form: kappa^j (t - j tau)^j / j! overflows long
    // before the product with e^{-gamma t} does.
    const cplx log_kappa = std::log(gamma_) + kI * phi_ + (kI * omega0_ + gamma_) * tau_;
    cplx sum = decay;
    for (std::size_t j = 1; j <= k; ++j) {
        const double lag = t - static_cast<double>(j) * tau_;
        if (lag <= 0.0) continue;
        const double jd = static_cast<double>(j);
        const cplx exponent = jd * log_kappa + jd * std::log(lag) - std::lgamma(jd + 1.0) -
                              cplx{gamma_ * t, omega0_ * t};
        sum += std::exp(exponent);
    }
    return sum;
}

DdeSolution solve_dde(double omega0, double gamma, double phi, double tau, double t_max) {
    return DdeSolution(omega0, gamma, phi, tau, t_max);
}

cplx white_amplitude(double omega0, double gamma, double t) {
    return std::exp(cplx{-0.5 * gamma * t, -omega0 * t});
}

SampledAmplitude dde_numeric_oracle(double omega0, double gamma, double phi, double tau, double dt_fine,
                                    double t_max) {
    if (!(tau > 0.0)) throw std::domain_error("tau must be positive");
    if (!(dt_fine > 0.0) || dt_fine > tau / 1000.0 * (1.0 + 1e-12)) {
        throw std::domain_error("dt_fine must lie in (0, tau / 1000]");
    }
    const auto lag_steps = static_cast<std::size_t>(std::llround(tau / dt_fine));
    if (std::abs(tau / dt_fine - static_cast<double>(lag_steps)) > 1e-9 * static_cast<double>(lag_steps)) {
        throw std::domain_error("tau must be an integer multiple of dt_fine");
    }
    const auto n = static_cast<std::size_t>(std::llround(t_max / dt_fine));
    const cplx a = kI * omega0 + gamma;
    const cplx b = gamma * std::exp(kI * phi);

    SampledAmplitude out;
    out.t.reserve(n + 1);
    out.eps.reserve(n + 1);
    out.t.push_back(0.0);
    out.eps.push_back(1.0);

    // Delayed value for stage fraction f of step i: the same fraction of step
    // i - lag_steps. Steps before the feedback switches on see zero, so the
    // jump at t = tau never falls inside a step.
    auto history = [&](std::size_t i, double f) -> cplx {
        if (i < lag_steps) return 0.0;
        const std::size_t j = i - lag_steps;
        return (1.0 - f) * out.eps[j] + f * out.eps[j + 1];
    };
    auto rhs = [&](std::size_t i, double f, cplx y) { return -a * y + b * history(i, f); };

    for (std::size_t i = 0; i < n; ++i) {
        const double h = dt_fine;
        const cplx y = out.eps.back();
        const cplx k1 = rhs(i, 0.0, y);
        const cplx k2 = rhs(i, 0.5, y + 0.5 * h * k1);
        const cplx k3 = rhs(i, 0.5, y + 0.5 * h * k2);
        const cplx k4 = rhs(i, 1.0, y + h * k3);
        out.eps.push_back(y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        out.t.push_back(static_cast<double>(i + 1) * dt_fine);
    }
    return out;
}

SampledAmplitude sample(const DdeSolution& sol, double dt, std::size_t n) {
    SampledAmplitude out;
    out.t.reserve(n + 1);
    out.eps.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = static_cast<double>(i) * dt;
        out.t.push_back(t);
        out.eps.push_back(sol(t));
    }
    return out;
}

void write_reference_csv(std::ostream& os, const SampledAmplitude& samples) {
    os << "t,re_eps,im_eps,abs_eps\n";
    for (std::size_t i = 0; i < samples.t.size(); ++i) {
        os << format_double(samples.t[i]) << ',' << format_double(samples.eps[i].real()) << ','
           << format_double(samples.eps[i].imag()) << ',' << format_double(std::abs(samples.eps[i])) << '\n';
    }
}

}  // namespace nmcm

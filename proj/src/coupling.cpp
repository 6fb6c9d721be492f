#include "nmcm/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "nmcm/format.hpp"

namespace nmcm {

namespace {

constexpr double kLagMatchTolerance = 1e-9;  // relative to dt

void require_nonnegative(double value, const char* what) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::domain_error(std::string(what) + " must be finite and nonnegative");
    }
}

// 32-point Gauss-Legendre on [a, b]; empty intervals contribute nothing.
template <class F>
cplx gauss32(F&& f, double a, double b) {
    if (!(b > a)) return {0.0, 0.0};
    return boost::math::quadrature::gauss<double, 32>::integrate(f, a, b);
}

}  // namespace

// ---------------------------------------------------------------------------
// SmoothKernel

SmoothKernel::SmoothKernel(Function f, double support, std::string label)
    : fn_(std::make_shared<const Function>(std::move(f))), support_(support), label_(std::move(label)) {
    if (!*fn_) throw std::invalid_argument("smooth kernel function is empty");
    require_nonnegative(support, "smooth kernel support");
}

cplx SmoothKernel::operator()(double s) const {
    if (s < 0.0 || s > support_) return {0.0, 0.0};
    return (*fn_)(s);
}

SmoothKernel SmoothKernel::exponential(cplx amplitude, double rate, double support) {
    require_nonnegative(rate, "exponential kernel rate");
    return SmoothKernel([amplitude, rate](double s) { return amplitude * std::exp(-rate * s); },
                        support, "exponential");
}

SmoothKernel SmoothKernel::modulated(double freq) const {
    auto inner = fn_;
    return SmoothKernel([inner, freq](double s) { return (*inner)(s) * std::polar(1.0, freq * s); },
                        support_, label_ + "+modulated");
}

// ---------------------------------------------------------------------------
// CouplingSpec constructors

CouplingSpec build_spec_white(double gamma) {
    require_nonnegative(gamma, "gamma");
    return {gamma, White{}};
}

CouplingSpec build_spec_mirror(double gamma, double phi, double tau) {
    require_nonnegative(gamma, "gamma");
    require_nonnegative(tau, "tau");
    if (!std::isfinite(phi)) throw std::domain_error("phi must be finite");
    return {gamma, Mirror{phi, tau}};
}

CouplingSpec build_spec_custom(double gamma, std::vector<DeltaTerm> deltas,
                               std::optional<SmoothKernel> smooth) {
    require_nonnegative(gamma, "gamma");
    for (const auto& d : deltas) require_nonnegative(d.lag, "delta lag");
    return {gamma, CustomKernel{std::move(deltas), std::move(smooth)}};
}

// ---------------------------------------------------------------------------
// TimeKernel

TimeKernel::TimeKernel(std::vector<DeltaTerm> deltas, std::optional<SmoothKernel> smooth)
    : smooth_(std::move(smooth)) {
    for (const auto& d : deltas) require_nonnegative(d.lag, "delta lag");
    std::stable_sort(deltas.begin(), deltas.end(),
                     [](const DeltaTerm& a, const DeltaTerm& b) { return a.lag < b.lag; });
    for (const auto& d : deltas) {
        if (!deltas_.empty() && deltas_.back().lag == d.lag) {
            deltas_.back().weight += d.weight;
            ++merged_;
        } else {
            deltas_.push_back(d);
        }
    }
}

double TimeKernel::support() const noexcept {
    double s = deltas_.empty() ? 0.0 : deltas_.back().lag;
    if (smooth_) s = std::max(s, smooth_->support());
    return s;
}

TimeKernel TimeKernel::rotated(double freq) const {
    std::vector<DeltaTerm> deltas = deltas_;
    for (auto& d : deltas) d.weight *= std::polar(1.0, -freq * d.lag);
    std::optional<SmoothKernel> smooth;
    if (smooth_) smooth = smooth_->modulated(-freq);
    TimeKernel out(std::move(deltas), std::move(smooth));
    out.merged_ = merged_;
    return out;
}

TimeKernel time_kernel(const CouplingSpec& spec) {
    struct Visitor {
        TimeKernel operator()(const White&) const { return TimeKernel({{0.0, 1.0}}, std::nullopt); }
        TimeKernel operator()(const Mirror& m) const {
            return TimeKernel({{0.0, 1.0}, {m.tau, -std::polar(1.0, -m.phi)}}, std::nullopt);
        }
        TimeKernel operator()(const CustomKernel& c) const { return TimeKernel(c.deltas, c.smooth); }
    };
    return std::visit(Visitor{}, spec.shape);
}

bool equivalent(const CouplingSpec& a, const CouplingSpec& b) {
    return a.gamma == b.gamma && time_kernel(a) == time_kernel(b);
}

// ---------------------------------------------------------------------------
// WeightMatrix

WeightMatrix::WeightMatrix(double dt, std::size_t n_steps, std::map<std::size_t, cplx> lags,
                           WeightWarnings warnings)
    : dt_(dt), n_steps_(n_steps), lags_(std::move(lags)), warnings_(std::move(warnings)) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("dt must be positive");
    if (n_steps == 0) throw std::domain_error("n_steps must be at least 1");
}

cplx WeightMatrix::at_lag(std::size_t lag) const {
    auto it = lags_.find(lag);
    return it == lags_.end() ? cplx{0.0, 0.0} : it->second;
}

cplx WeightMatrix::operator()(long n, long m) const {
    if (m > n) return {0.0, 0.0};
    return at_lag(static_cast<std::size_t>(n - m));
}

std::size_t WeightMatrix::max_lag() const noexcept {
    return lags_.empty() ? 0 : lags_.rbegin()->first;
}

WeightMatrix WeightMatrix::scaled(cplx factor) const {
    auto lags = lags_;
    for (auto& [lag, w] : lags) w *= factor;
    return WeightMatrix(dt_, n_steps_, std::move(lags), warnings_);
}

WeightMatrix collision_weights(const TimeKernel& kernel, double dt, std::size_t n_steps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::domain_error("dt must be positive");
    if (n_steps == 0) throw std::domain_error("n_steps must be at least 1");

    std::map<std::size_t, cplx> lags;
    WeightWarnings warnings;

    if (kernel.merged_count() > 0) {
        warnings.merged_deltas = true;
        warnings.messages.push_back("merged deltas: kernel deltas with coinciding lags were summed");
    }

    std::map<std::size_t, int> delta_hits;
    for (const auto& d : kernel.deltas()) {
        const double cells = d.lag / dt;
        const auto lag = static_cast<std::size_t>(std::llround(cells));
        const double offset = std::abs(d.lag - static_cast<double>(lag) * dt);
        if (offset > kLagMatchTolerance * dt) {
            warnings.discretization_mismatch = true;
            std::ostringstream msg;
            msg << "discretization mismatch: delta lag " << format_double(d.lag) << " is "
                << format_double(offset) << " away from " << lag << "*dt";
            warnings.messages.push_back(msg.str());
        }
        if (++delta_hits[lag] == 2) {
            warnings.merged_deltas = true;
            std::ostringstream msg;
            msg << "merged deltas: several delta lags round to lag index " << lag;
            warnings.messages.push_back(msg.str());
        }
        lags[lag] += d.weight;
    }

    if (const auto& smooth = kernel.smooth()) {
        const double support = smooth->support();
        for (std::size_t lag = 0; (static_cast<double>(lag) - 1.0) * dt < support; ++lag) {
            const double centre = static_cast<double>(lag) * dt;
            auto integrand = [&](double u) { return (*smooth)(u) * (dt - std::abs(u - centre)); };
            const double lo = std::max(0.0, centre - dt);
            const double hi = std::min(support, centre + dt);
            cplx integral = gauss32(integrand, lo, std::min(centre, hi)) +
                            gauss32(integrand, std::max(centre, lo), hi);
            lags[lag] += integral / dt;
        }
    }

    return WeightMatrix(dt, n_steps, std::move(lags), std::move(warnings));
}

WeightMatrix coupling_strengths(const WeightMatrix& weights, double gamma) {
    require_nonnegative(gamma, "gamma");
    return weights.scaled(std::sqrt(gamma / weights.dt()));
}

void write_weights_csv(std::ostream& os, const WeightMatrix& weights) {
    os << "lag,re_w,im_w\n";
    for (const auto& [lag, w] : weights.lags()) {
        os << lag << ',' << format_double(w.real()) << ',' << format_double(w.imag()) << '\n';
    }
}

}  // namespace nmcm

// coupling.hpp: Colored system-bath couplings, time-domain kernels and the
// lag-indexed collision weights they induce on a uniform time grid.
#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nmcm {

using cplx = std::complex<double>;

/// A delta contribution w * delta(s - lag) to the kernel.
struct DeltaTerm {
    double lag{0.0};
    cplx weight{1.0, 0.0};

    bool operator==(const DeltaTerm&) const = default;
};

/// Smooth part of a causal kernel, supported on [0, support].
///
/// Two SmoothKernel values compare equal only when they share the same
/// underlying callable (copies of one another) and the same support.
class SmoothKernel {
public:
    using Function = std::function<cplx(double)>;

    SmoothKernel(Function f, double support, std::string label = "custom");

    /// Kernel value at lag s; zero outside [0, support].
    cplx operator()(double s) const;

    double support() const noexcept { return support_; }
    const std::string& label() const noexcept { return label_; }

    bool operator==(const SmoothKernel& other) const noexcept {
        return fn_ == other.fn_ && support_ == other.support_;
    }

    /// kappa-exponential amplitude * exp(-rate * s) on [0, support].
    static SmoothKernel exponential(cplx amplitude, double rate, double support);

    /// Same kernel multiplied by exp(i * freq * s).
    SmoothKernel modulated(double freq) const;

private:
    std::shared_ptr<const Function> fn_;
    double support_;
    std::string label_;
};

struct White {
    bool operator==(const White&) const = default;
};

struct Mirror {
    double phi{0.0};
    double tau{0.0};
    bool operator==(const Mirror&) const = default;
};

struct CustomKernel {
    std::vector<DeltaTerm> deltas;
    std::optional<SmoothKernel> smooth;
    bool operator==(const CustomKernel&) const = default;
};

using CouplingShape = std::variant<White, Mirror, CustomKernel>;

/// Rate gamma plus the shape of F(omega), described through its kernel.
struct CouplingSpec {
    double gamma{0.0};
    CouplingShape shape{White{}};
};

CouplingSpec build_spec_white(double gamma);
CouplingSpec build_spec_mirror(double gamma, double phi, double tau);
CouplingSpec build_spec_custom(double gamma, std::vector<DeltaTerm> deltas,
                               std::optional<SmoothKernel> smooth = std::nullopt);

/// Time-domain kernel F(s): strictly increasing delta lags plus an optional
/// smooth part. Deltas at coinciding lags are merged on construction.
class TimeKernel {
public:
    TimeKernel() = default;
    TimeKernel(std::vector<DeltaTerm> deltas, std::optional<SmoothKernel> smooth);

    const std::vector<DeltaTerm>& deltas() const noexcept { return deltas_; }
    const std::optional<SmoothKernel>& smooth() const noexcept { return smooth_; }

    /// Largest lag with nonzero kernel support.
    double support() const noexcept;

    /// Number of input deltas folded into an earlier one with the same lag.
    std::size_t merged_count() const noexcept { return merged_; }

    /// Kernel in a frame rotating at freq: F(s) -> F(s) exp(-i freq s).
    TimeKernel rotated(double freq) const;

    bool operator==(const TimeKernel& other) const {
        return deltas_ == other.deltas_ && smooth_ == other.smooth_;
    }

private:
    std::vector<DeltaTerm> deltas_;
    std::optional<SmoothKernel> smooth_;
    std::size_t merged_{0};
};

TimeKernel time_kernel(const CouplingSpec& spec);

/// Same rate and same kernel (White == single unit delta, Mirror == delta pair).
bool equivalent(const CouplingSpec& a, const CouplingSpec& b);

struct WeightWarnings {
    bool discretization_mismatch{false};
    bool merged_deltas{false};
    std::vector<std::string> messages;
};

/// Stationary, causal lag table W(l), l = n - m >= 0.
///
/// Entries are stored per lag only, so W(n, m) == W(n + 1, m + 1) holds by
/// construction. The same type carries the scaled strengths g(l).
class WeightMatrix {
public:
    WeightMatrix(double dt, std::size_t n_steps, std::map<std::size_t, cplx> lags,
                 WeightWarnings warnings = {});

    double dt() const noexcept { return dt_; }
    std::size_t n_steps() const noexcept { return n_steps_; }
    const std::map<std::size_t, cplx>& lags() const noexcept { return lags_; }
    const WeightWarnings& warnings() const noexcept { return warnings_; }

    /// W(l); zero for lags that are not stored.
    cplx at_lag(std::size_t lag) const;

    /// W(n, m) = W(n - m) for n >= m, zero for m > n.
    cplx operator()(long n, long m) const;

    /// Largest stored lag (0 when empty).
    std::size_t max_lag() const noexcept;

    /// Returns a copy with every entry multiplied by factor.
    WeightMatrix scaled(cplx factor) const;

private:
    double dt_;
    std::size_t n_steps_;
    std::map<std::size_t, cplx> lags_;
    WeightWarnings warnings_;
};

/// Cell-averaged kernel weights on the grid t_n = n * dt.
///
/// Deltas are assigned to l = round(lag / dt). The smooth part is integrated
/// exactly in structure: the (n, m) cell average reduces to a triangle-weighted
/// lag integral, evaluated with 32-point Gauss-Legendre on each half cell.
WeightMatrix collision_weights(const TimeKernel& kernel, double dt, std::size_t n_steps);

/// g(l) = sqrt(gamma / dt) * W(l).
WeightMatrix coupling_strengths(const WeightMatrix& weights, double gamma);

/// CSV with header "lag,re_w,im_w", one row per stored lag.
void write_weights_csv(std::ostream& os, const WeightMatrix& weights);

}  // namespace nmcm

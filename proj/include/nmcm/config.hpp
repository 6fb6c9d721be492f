// config.hpp: Simulation configuration: data model, validation and the JSON
// file format used by the command-line runner.
#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmcm/coupling.hpp"

namespace nmcm {

enum class StepperKind { ExactExponential, SecondOrder };
enum class Representation { SingleExcitation, FullFock, MirrorRecursion };

/// Raised for invalid configuration content; the message names the field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Closed-form or tabulated smooth kernel as written in a config file.
struct SmoothSpec {
    enum class Kind { Exponential, Tabulated };
    Kind kind{Kind::Exponential};
    // exponential: amplitude * exp(-rate * s) on [0, support]
    cplx amplitude{1.0, 0.0};
    double rate{1.0};
    double support{0.0};
    // tabulated: values at s = j * step, linearly interpolated
    double step{0.0};
    std::vector<cplx> values;

    SmoothKernel to_kernel() const;
    bool operator==(const SmoothSpec&) const = default;
};

struct CouplingConfig {
    enum class Kind { White, Mirror, Custom };
    Kind kind{Kind::White};
    double gamma{1.0};
    double phi{0.0};  // mirror
    double tau{0.0};  // mirror
    std::vector<DeltaTerm> deltas;     // custom
    std::optional<SmoothSpec> smooth;  // custom

    CouplingSpec to_spec() const;
    bool operator==(const CouplingConfig&) const = default;
};

struct SimulationConfig {
    CouplingConfig coupling;
    double omega0{0.0};
    double dt{0.01};
    std::optional<std::size_t> n_steps;  // exactly one of n_steps / t_max
    std::optional<double> t_max;
    std::optional<StepperKind> stepper;  // default depends on representation
    Representation representation{Representation::SingleExcitation};
    int n_max{1};                       // full_fock
    std::optional<std::size_t> window;  // full_fock: max active modes
    cplx beta{1.0, 0.0};
    bool rotating_frame{false};
    std::string output_dir{"."};
    std::vector<double> dt_list;  // converge

    bool operator==(const SimulationConfig&) const = default;
};

/// Number of steps and, when derived from t_max, a note describing the rounding.
struct StepCount {
    std::size_t n_steps{0};
    std::optional<std::string> note;
};

StepCount resolve_steps(const SimulationConfig& config);

/// SecondOrder for representation mirror_recursion, else the configured kind
/// (ExactExponential when unset).
StepperKind effective_stepper(const SimulationConfig& config);

/// Delay in steps for a mirror coupling: round(tau / dt).
std::size_t mirror_delay_steps(const SimulationConfig& config);

/// Throws ConfigError on the first violated constraint.
void validate(const SimulationConfig& config);

/// Parses JSON text; unknown keys and type mismatches are ConfigError.
SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::string& path);

/// Canonical JSON text (2-space indent, stable key order).
std::string serialize_config(const SimulationConfig& config);

const char* to_string(StepperKind kind);
const char* to_string(Representation rep);

}  // namespace nmcm

#include "nmcm/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "nmcm/config_json.hpp"
#include "nmcm/format.hpp"

namespace nmcm {

using nlohmann::json;

namespace {

// Relative slack when converting t_max / dt and tau / dt to integers.
constexpr double kGridSlack = 1e-9;

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* a : allowed) known = known || it.key() == a;
        if (!known) throw ConfigError(join(where, it.key()), "unknown key");
    }
}

const json& require_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where.empty() ? "config" : where, "expected an object");
    return j;
}

double get_number(const json& obj, const std::string& where, const char* key) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(join(where, key), "expected a number");
    return v.get<double>();
}

cplx parse_complex(const json& v, const std::string& field) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ConfigError(field, "expected a number or [re, im]");
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

SmoothSpec parse_smooth(const json& j, const std::string& where) {
    require_object(j, where);
    if (!j.contains("type") || !j["type"].is_string()) throw ConfigError(join(where, "type"), "missing or not a string");
    const auto type = j["type"].get<std::string>();
    SmoothSpec s;
    if (type == "exponential") {
        reject_unknown(j, where, {"type", "amplitude", "rate", "support"});
        s.kind = SmoothSpec::Kind::Exponential;
        if (j.contains("amplitude")) s.amplitude = parse_complex(j["amplitude"], join(where, "amplitude"));
        if (!j.contains("rate")) throw ConfigError(join(where, "rate"), "missing");
        if (!j.contains("support")) throw ConfigError(join(where, "support"), "missing");
        s.rate = get_number(j, where, "rate");
        s.support = get_number(j, where, "support");
    } else if (type == "tabulated") {
        reject_unknown(j, where, {"type", "step", "values"});
        s.kind = SmoothSpec::Kind::Tabulated;
        if (!j.contains("step")) throw ConfigError(join(where, "step"), "missing");
        s.step = get_number(j, where, "step");
        if (!j.contains("values") || !j["values"].is_array()) throw ConfigError(join(where, "values"), "expected an array");
        for (std::size_t i = 0; i < j["values"].size(); ++i) {
            s.values.push_back(parse_complex(j["values"][i], join(where, "values[" + std::to_string(i) + "]")));
        }
    } else {
        throw ConfigError(join(where, "type"), "unknown smooth kernel type '" + type + "'");
    }
    return s;
}

json smooth_to_json(const SmoothSpec& s) {
    if (s.kind == SmoothSpec::Kind::Exponential) {
        return {{"type", "exponential"},
                {"amplitude", complex_to_json(s.amplitude)},
                {"rate", s.rate},
                {"support", s.support}};
    }
    json values = json::array();
    for (const auto& v : s.values) values.push_back(complex_to_json(v));
    return {{"type", "tabulated"}, {"step", s.step}, {"values", values}};
}

CouplingConfig parse_coupling(const json& j) {
    const std::string where = "coupling";
    require_object(j, where);
    if (!j.contains("type") || !j["type"].is_string()) throw ConfigError("coupling.type", "missing or not a string");
    const auto type = j["type"].get<std::string>();
    CouplingConfig c;
    if (type == "white") {
        reject_unknown(j, where, {"type", "gamma"});
        c.kind = CouplingConfig::Kind::White;
    } else if (type == "mirror") {
        reject_unknown(j, where, {"type", "gamma", "phi", "tau"});
        c.kind = CouplingConfig::Kind::Mirror;
        if (!j.contains("tau")) throw ConfigError("coupling.tau", "missing");
        c.tau = get_number(j, where, "tau");
        if (j.contains("phi")) c.phi = get_number(j, where, "phi");
    } else if (type == "custom") {
        reject_unknown(j, where, {"type", "gamma", "deltas", "smooth"});
        c.kind = CouplingConfig::Kind::Custom;
        if (j.contains("deltas")) {
            if (!j["deltas"].is_array()) throw ConfigError("coupling.deltas", "expected an array");
            for (std::size_t i = 0; i < j["deltas"].size(); ++i) {
                const std::string w = "coupling.deltas[" + std::to_string(i) + "]";
                const auto& d = require_object(j["deltas"][i], w);
                reject_unknown(d, w, {"lag", "weight"});
                if (!d.contains("lag")) throw ConfigError(join(w, "lag"), "missing");
                DeltaTerm term;
                term.lag = get_number(d, w, "lag");
                if (d.contains("weight")) term.weight = parse_complex(d["weight"], join(w, "weight"));
                c.deltas.push_back(term);
            }
        }
        if (j.contains("smooth")) c.smooth = parse_smooth(j["smooth"], "coupling.smooth");
    } else {
        throw ConfigError("coupling.type", "unknown coupling type '" + type + "'");
    }
    if (!j.contains("gamma")) throw ConfigError("coupling.gamma", "missing");
    c.gamma = get_number(j, where, "gamma");
    return c;
}

json coupling_to_json(const CouplingConfig& c) {
    json j;
    switch (c.kind) {
        case CouplingConfig::Kind::White:
            j = {{"type", "white"}, {"gamma", c.gamma}};
            break;
        case CouplingConfig::Kind::Mirror:
            j = {{"type", "mirror"}, {"gamma", c.gamma}, {"phi", c.phi}, {"tau", c.tau}};
            break;
        case CouplingConfig::Kind::Custom: {
            j = {{"type", "custom"}, {"gamma", c.gamma}};
            json deltas = json::array();
            for (const auto& d : c.deltas) deltas.push_back({{"lag", d.lag}, {"weight", complex_to_json(d.weight)}});
            j["deltas"] = deltas;
            if (c.smooth) j["smooth"] = smooth_to_json(*c.smooth);
            break;
        }
    }
    return j;
}

StepperKind parse_stepper(const json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "exact") return StepperKind::ExactExponential;
        if (s == "second_order") return StepperKind::SecondOrder;
    }
    throw ConfigError("stepper", "expected \"exact\" or \"second_order\"");
}

void check_finite(double v, const std::string& field) {
    if (!std::isfinite(v)) throw ConfigError(field, "must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------

const char* to_string(StepperKind kind) {
    return kind == StepperKind::ExactExponential ? "exact" : "second_order";
}

const char* to_string(Representation rep) {
    switch (rep) {
        case Representation::SingleExcitation: return "single_excitation";
        case Representation::FullFock: return "full_fock";
        case Representation::MirrorRecursion: return "mirror_recursion";
    }
    return "unknown";
}

SmoothKernel SmoothSpec::to_kernel() const {
    if (kind == Kind::Exponential) return SmoothKernel::exponential(amplitude, rate, support);
    const double h = step;
    const auto samples = values;
    const double support = h * static_cast<double>(samples.size() - 1);
    return SmoothKernel(
        [h, samples](double s) {
            const double x = s / h;
            const auto i = static_cast<std::size_t>(std::floor(x));
            if (i + 1 >= samples.size()) return samples.back();
            const double f = x - static_cast<double>(i);
            return (1.0 - f) * samples[i] + f * samples[i + 1];
        },
        support, "tabulated");
}

CouplingSpec CouplingConfig::to_spec() const {
    switch (kind) {
        case Kind::White: return build_spec_white(gamma);
        case Kind::Mirror: return build_spec_mirror(gamma, phi, tau);
        case Kind::Custom: {
            std::optional<SmoothKernel> k;
            if (smooth) k = smooth->to_kernel();
            return build_spec_custom(gamma, deltas, k);
        }
    }
    throw std::logic_error("unhandled coupling kind");
}

StepCount resolve_steps(const SimulationConfig& config) {
    if (config.n_steps) return {*config.n_steps, std::nullopt};
    const double ratio = *config.t_max / config.dt;
    const auto n = static_cast<std::size_t>(std::floor(ratio * (1.0 + kGridSlack)));
    std::ostringstream note;
    note << "n_steps = " << n << " from t_max = " << format_double(*config.t_max) << " (final t = "
         << format_double(static_cast<double>(n) * config.dt) << ")";
    return {n, note.str()};
}

StepperKind effective_stepper(const SimulationConfig& config) {
    if (config.representation == Representation::MirrorRecursion) return StepperKind::SecondOrder;
    return config.stepper.value_or(StepperKind::ExactExponential);
}

std::size_t mirror_delay_steps(const SimulationConfig& config) {
    return static_cast<std::size_t>(std::llround(config.coupling.tau / config.dt));
}

void validate(const SimulationConfig& config) {
    const auto& c = config.coupling;
    check_finite(c.gamma, "coupling.gamma");
    if (c.gamma < 0.0) throw ConfigError("coupling.gamma", "must be nonnegative");
    if (c.kind == CouplingConfig::Kind::Mirror) {
        check_finite(c.phi, "coupling.phi");
        check_finite(c.tau, "coupling.tau");
        if (c.tau < 0.0) throw ConfigError("coupling.tau", "must be nonnegative");
    }
    if (c.kind == CouplingConfig::Kind::Custom) {
        for (std::size_t i = 0; i < c.deltas.size(); ++i) {
            const std::string w = "coupling.deltas[" + std::to_string(i) + "]";
            check_finite(c.deltas[i].lag, w + ".lag");
            if (c.deltas[i].lag < 0.0) throw ConfigError(w + ".lag", "must be nonnegative");
        }
        if (c.smooth) {
            const auto& s = *c.smooth;
            if (s.kind == SmoothSpec::Kind::Exponential) {
                check_finite(s.rate, "coupling.smooth.rate");
                check_finite(s.support, "coupling.smooth.support");
                if (s.rate < 0.0) throw ConfigError("coupling.smooth.rate", "must be nonnegative");
                if (!(s.support > 0.0)) throw ConfigError("coupling.smooth.support", "must be positive");
            } else {
                check_finite(s.step, "coupling.smooth.step");
                if (!(s.step > 0.0)) throw ConfigError("coupling.smooth.step", "must be positive");
                if (s.values.size() < 2) throw ConfigError("coupling.smooth.values", "needs at least two samples");
            }
        }
    }
    check_finite(config.omega0, "omega0");
    check_finite(config.dt, "dt");
    if (!(config.dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (config.n_steps.has_value() == config.t_max.has_value()) {
        throw ConfigError("n_steps", "exactly one of n_steps and t_max must be given");
    }
    if (config.n_steps && *config.n_steps < 1) throw ConfigError("n_steps", "must be at least 1");
    if (config.t_max) {
        check_finite(*config.t_max, "t_max");
        if (!(*config.t_max > 0.0)) throw ConfigError("t_max", "must be positive");
        if (resolve_steps(config).n_steps < 1) throw ConfigError("t_max", "shorter than one step");
    }
    if (std::abs(config.beta) > 1.0 + 1e-14) throw ConfigError("beta", "|beta| must not exceed 1");
    if (config.representation == Representation::FullFock) {
        if (config.n_max < 1) throw ConfigError("representation.n_max", "must be at least 1");
        if (config.window && *config.window < 1) throw ConfigError("representation.window", "must be at least 1");
    }
    if (config.representation == Representation::MirrorRecursion) {
        if (c.kind != CouplingConfig::Kind::Mirror) {
            throw ConfigError("representation", "mirror_recursion requires a mirror coupling");
        }
        if (mirror_delay_steps(config) < 1) {
            throw ConfigError("representation", "mirror_recursion requires tau / dt to round to at least 1");
        }
        if (config.stepper == StepperKind::ExactExponential) {
            throw ConfigError("stepper", "mirror_recursion is the second-order recursion; use second_order");
        }
    }
    for (std::size_t i = 0; i < config.dt_list.size(); ++i) {
        const std::string w = "converge.dt_list[" + std::to_string(i) + "]";
        check_finite(config.dt_list[i], w);
        if (!(config.dt_list[i] > 0.0)) throw ConfigError(w, "must be positive");
    }
}

// ---------------------------------------------------------------------------
// JSON mapping

json config_to_json(const SimulationConfig& config) {
    json j;
    j["coupling"] = coupling_to_json(config.coupling);
    j["omega0"] = config.omega0;
    j["dt"] = config.dt;
    if (config.n_steps) j["n_steps"] = *config.n_steps;
    if (config.t_max) j["t_max"] = *config.t_max;
    if (config.stepper) j["stepper"] = to_string(*config.stepper);
    json rep = {{"type", to_string(config.representation)}};
    if (config.representation == Representation::FullFock) {
        rep["n_max"] = config.n_max;
        if (config.window) rep["window"] = *config.window;
    }
    j["representation"] = rep;
    j["beta"] = complex_to_json(config.beta);
    j["rotating_frame"] = config.rotating_frame;
    j["output"] = {{"dir", config.output_dir}};
    if (!config.dt_list.empty()) j["converge"] = {{"dt_list", config.dt_list}};
    return j;
}

SimulationConfig config_from_json(const json& j) {
    require_object(j, "");
    reject_unknown(j, "", {"coupling", "omega0", "dt", "n_steps", "t_max", "stepper", "representation", "beta",
                           "rotating_frame", "output", "converge"});
    SimulationConfig c;
    if (!j.contains("coupling")) throw ConfigError("coupling", "missing");
    c.coupling = parse_coupling(j["coupling"]);
    if (j.contains("omega0")) c.omega0 = get_number(j, "", "omega0");
    if (!j.contains("dt")) throw ConfigError("dt", "missing");
    c.dt = get_number(j, "", "dt");
    if (j.contains("n_steps")) {
        if (!j["n_steps"].is_number_integer() || j["n_steps"].get<long long>() < 0) {
            throw ConfigError("n_steps", "expected a nonnegative integer");
        }
        c.n_steps = j["n_steps"].get<std::size_t>();
    }
    if (j.contains("t_max")) c.t_max = get_number(j, "", "t_max");
    if (j.contains("stepper")) c.stepper = parse_stepper(j["stepper"]);
    if (j.contains("representation")) {
        const auto& r = j["representation"];
        std::string type;
        if (r.is_string()) {
            type = r.get<std::string>();
        } else if (r.is_object()) {
            reject_unknown(r, "representation", {"type", "n_max", "window"});
            if (!r.contains("type") || !r["type"].is_string()) {
                throw ConfigError("representation.type", "missing or not a string");
            }
            type = r["type"].get<std::string>();
            if (type != "full_fock" && (r.contains("n_max") || r.contains("window"))) {
                throw ConfigError("representation", "n_max and window apply to full_fock only");
            }
            if (r.contains("n_max")) {
                if (!r["n_max"].is_number_integer()) throw ConfigError("representation.n_max", "expected an integer");
                c.n_max = r["n_max"].get<int>();
            }
            if (r.contains("window")) {
                if (!r["window"].is_number_integer() || r["window"].get<long long>() < 0) {
                    throw ConfigError("representation.window", "expected a nonnegative integer");
                }
                c.window = r["window"].get<std::size_t>();
            }
        } else {
            throw ConfigError("representation", "expected a string or an object");
        }
        if (type == "single_excitation") c.representation = Representation::SingleExcitation;
        else if (type == "full_fock") c.representation = Representation::FullFock;
        else if (type == "mirror_recursion") c.representation = Representation::MirrorRecursion;
        else throw ConfigError("representation.type", "unknown representation '" + type + "'");
    }
    if (j.contains("beta")) c.beta = parse_complex(j["beta"], "beta");
    if (j.contains("rotating_frame")) {
        if (!j["rotating_frame"].is_boolean()) throw ConfigError("rotating_frame", "expected true or false");
        c.rotating_frame = j["rotating_frame"].get<bool>();
    }
    if (j.contains("output")) {
        const auto& o = require_object(j["output"], "output");
        reject_unknown(o, "output", {"dir"});
        if (o.contains("dir")) {
            if (!o["dir"].is_string()) throw ConfigError("output.dir", "expected a string");
            c.output_dir = o["dir"].get<std::string>();
        }
    }
    if (j.contains("converge")) {
        const auto& o = require_object(j["converge"], "converge");
        reject_unknown(o, "converge", {"dt_list"});
        if (o.contains("dt_list")) {
            if (!o["dt_list"].is_array()) throw ConfigError("converge.dt_list", "expected an array");
            for (std::size_t i = 0; i < o["dt_list"].size(); ++i) {
                const auto& v = o["dt_list"][i];
                if (!v.is_number()) throw ConfigError("converge.dt_list[" + std::to_string(i) + "]", "expected a number");
                c.dt_list.push_back(v.get<double>());
            }
        }
    }
    return c;
}

SimulationConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    SimulationConfig c = config_from_json(j);
    validate(c);
    return c;
}

SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const SimulationConfig& config) { return config_to_json(config).dump(2) + "\n"; }

}  // namespace nmcm

#include "nmcm/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "nmcm/engine.hpp"

namespace nmcm {

namespace {

// |ratio|^2 - 1 above this counts as growth; the Choi test uses the same
// scale since its smallest eigenvalue is 1 - |ratio|^2.
constexpr double kCpTolerance = 2e-12;

}  // namespace

QubitChannel::QubitChannel(cplx g) : g_(g) {}

Eigen::Matrix2cd QubitChannel::apply(const Eigen::Matrix2cd& rho) const {
    const double p = std::norm(g_);
    Eigen::Matrix2cd out;
    out(0, 0) = p * rho(0, 0);
    out(1, 1) = rho(1, 1) + (1.0 - p) * rho(0, 0);
    out(1, 0) = std::conj(g_) * rho(1, 0);
    out(0, 1) = g_ * rho(0, 1);
    return out;
}

Eigen::Matrix4cd QubitChannel::choi() const {
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
            unit(i, j) = 1.0;
            c.block<2, 2>(2 * i, 2 * j) = apply(unit);
        }
    }
    return c;
}

Eigen::Matrix4cd QubitChannel::superoperator() const {
    Eigen::Matrix4cd s = Eigen::Matrix4cd::Zero();
    for (int col = 0; col < 4; ++col) {
        Eigen::Matrix2cd unit = Eigen::Matrix2cd::Zero();
        unit(col % 2, col / 2) = 1.0;
        const Eigen::Matrix2cd out = apply(unit);
        for (int row = 0; row < 4; ++row) s(row, col) = out(row % 2, row / 2);
    }
    return s;
}

Eigen::Vector4d QubitChannel::choi_eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(choi(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

QubitChannel channel_from_amplitude(cplx g) {
    if (!(std::abs(g) <= 1.0 + 1e-9)) throw std::domain_error("|G| > 1 does not define a channel");
    return QubitChannel(g);
}

IntermediateMap intermediate_map(cplx g_from, cplx g_to) {
    if (g_from == cplx{0.0, 0.0}) throw std::domain_error("singular map: G_from = 0");
    IntermediateMap m{};
    m.ratio = g_to / g_from;
    m.cp = std::norm(m.ratio) - 1.0 <= kCpTolerance;
    m.min_choi_eigenvalue = QubitChannel(m.ratio).choi_eigenvalues()(0);
    m.cp_by_choi = m.min_choi_eigenvalue >= -kCpTolerance;
    if (m.cp) m.channel = QubitChannel(m.ratio);
    return m;
}

std::optional<std::size_t> DivisibilityReport::first_non_cp_step() const {
    for (std::size_t k = 0; k < cp.size(); ++k) {
        if (!cp[k]) return k + 1;
    }
    return std::nullopt;
}

DivisibilityReport analyze(const std::vector<cplx>& eps) {
    DivisibilityReport report;
    if (eps.empty()) return report;
    if (eps[0] == cplx{0.0, 0.0}) {
        report.truncated = true;
        report.note = "eps^(0) = 0: no excitation to track";
        return report;
    }
    const cplx eps0 = eps[0];
    std::optional<RevivalInterval> open;
    for (std::size_t n = 0; n + 1 < eps.size(); ++n) {
        const cplx g_from = eps[n] / eps0;
        if (g_from == cplx{0.0, 0.0}) {
            report.truncated = true;
            report.note = "eps^(" + std::to_string(n) + ") = 0: intermediate map is singular; report stops here";
            break;
        }
        const IntermediateMap m = intermediate_map(g_from, eps[n + 1] / eps0);
        report.cp.push_back(m.cp);
        if (!m.cp) {
            const double gain = std::norm(eps[n + 1]) - std::norm(eps[n]);
            report.witness += gain;
            if (!open) open = RevivalInterval{n, n + 1, 0.0};
            open->end = n + 1;
        } else if (open) {
            open->gain = std::norm(eps[open->end]) - std::norm(eps[open->start]);
            report.revivals.push_back(*open);
            open.reset();
        }
    }
    if (open) {
        open->gain = std::norm(eps[open->end]) - std::norm(eps[open->start]);
        report.revivals.push_back(*open);
    }
    return report;
}

DivisibilityReport analyze(const Trajectory& traj) { return analyze(traj.eps); }

std::string report_json(const DivisibilityReport& report) {
    nlohmann::json j;
    j["cp_flags"] = report.cp;
    const auto first = report.first_non_cp_step();
    j["first_non_cp_step"] = first ? nlohmann::json(*first) : nlohmann::json(nullptr);
    nlohmann::json revivals = nlohmann::json::array();
    for (const auto& r : report.revivals) {
        revivals.push_back({{"start", r.start}, {"end", r.end}, {"gain", r.gain}});
    }
    j["revivals"] = revivals;
    j["witness"] = report.witness;
    j["truncated"] = report.truncated;
    j["note"] = report.note;
    return j.dump(2) + "\n";
}

}  // namespace nmcm

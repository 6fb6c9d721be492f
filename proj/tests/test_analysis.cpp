#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "nmcm/analysis.hpp"
#include "nmcm/engine.hpp"

using nmcm::cplx;

TEST_CASE("channel action and Choi spectrum") {
    const cplx g = std::polar(0.6, 0.4);
    const nmcm::QubitChannel ch(g);
    Eigen::Matrix2cd rho;
    rho << 0.3, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.7;
    const auto out = ch.apply(rho);
    CHECK(out(0, 0).real() == doctest::Approx(0.36 * 0.3));
    CHECK(out.trace().real() == doctest::Approx(1.0));
    CHECK(std::abs(out(1, 0) - std::conj(g) * rho(1, 0)) < 1e-15);

    const auto ev = ch.choi_eigenvalues();
    CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ev(2) == doctest::Approx(1.0 - 0.36).epsilon(1e-14));
    CHECK(ev(3) == doctest::Approx(1.0 + 0.36).epsilon(1e-14));
}

TEST_CASE("superoperator agrees with apply") {
    const nmcm::QubitChannel ch(cplx(0.3, -0.5));
    Eigen::Matrix2cd rho;
    rho << 0.6, cplx(0.2, 0.1), cplx(0.2, -0.1), 0.4;
    Eigen::Vector4cd v;
    v << rho(0, 0), rho(1, 0), rho(0, 1), rho(1, 1);
    const Eigen::Vector4cd w = ch.superoperator() * v;
    const auto out = ch.apply(rho);
    CHECK(std::abs(w(0) - out(0, 0)) < 1e-15);
    CHECK(std::abs(w(1) - out(1, 0)) < 1e-15);
    CHECK(std::abs(w(2) - out(0, 1)) < 1e-15);
    CHECK(std::abs(w(3) - out(1, 1)) < 1e-15);
}

TEST_CASE("composition multiplies the decoherence factors") {
    const nmcm::QubitChannel a(std::polar(0.9, 0.3));
    const nmcm::QubitChannel b(std::polar(0.7, -1.1));
    const nmcm::QubitChannel ab(a.factor() * b.factor());
    CHECK((b.superoperator() * a.superoperator() - ab.superoperator()).norm() < 1e-15);
}

TEST_CASE("contraction test and Choi test agree") {
    for (double r : {0.2, 0.9, 0.999999, 1.0, 1.000001, 1.3}) {
        const auto m = nmcm::intermediate_map(cplx(0.5, 0.0), std::polar(0.5 * r, 0.7));
        CAPTURE(r);
        CHECK(m.cp == m.cp_by_choi);
        CHECK(m.cp == (r <= 1.0));
        CHECK(m.channel.has_value() == m.cp);
    }
    CHECK_THROWS_AS(nmcm::intermediate_map(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(nmcm::channel_from_amplitude(1.1), std::domain_error);
}

TEST_CASE("monotone decay is CP-divisible") {
    std::vector<cplx> eps;
    for (int n = 0; n <= 50; ++n) eps.push_back(std::exp(cplx(-0.05 * n, -0.3 * n)));
    const auto r = nmcm::analyze(eps);
    CHECK(r.cp.size() == 50);
    for (bool f : r.cp) CHECK(f);
    CHECK(r.witness == 0.0);
    CHECK(r.revivals.empty());
    CHECK_FALSE(r.first_non_cp_step().has_value());
}

TEST_CASE("revivals are detected and summed") {
    const std::vector<cplx> eps{1.0, 0.8, 0.6, 0.7, 0.75, 0.5, 0.55};
    const auto r = nmcm::analyze(eps);
    REQUIRE(r.first_non_cp_step().has_value());
    CHECK(*r.first_non_cp_step() == 3);
    REQUIRE(r.revivals.size() == 2);
    CHECK(r.revivals[0].start == 2);
    CHECK(r.revivals[0].end == 4);
    CHECK(r.revivals[0].gain == doctest::Approx(0.75 * 0.75 - 0.36));
    CHECK(r.witness == doctest::Approx((0.75 * 0.75 - 0.36) + (0.55 * 0.55 - 0.25)));
}

TEST_CASE("zero amplitude truncates the report") {
    const auto r = nmcm::analyze(std::vector<cplx>{1.0, 0.5, 0.0, 0.3});
    CHECK(r.truncated);
    CHECK(r.cp.size() == 2);
    CHECK_FALSE(r.note.empty());
    const auto j = nlohmann::json::parse(nmcm::report_json(r));
    CHECK(j["truncated"] == true);
    CHECK(j["first_non_cp_step"].is_null());
}

TEST_CASE("mirror feedback breaks CP divisibility after the delay") {
    nmcm::SimulationConfig c;
    c.coupling.kind = nmcm::CouplingConfig::Kind::Mirror;
    c.coupling.gamma = 0.5;
    c.coupling.tau = 1.0;
    c.dt = 0.05;
    c.n_steps = 200;
    const auto r = nmcm::analyze(nmcm::run(c));
    const std::size_t d = 20;
    REQUIRE(r.first_non_cp_step().has_value());
    CHECK(*r.first_non_cp_step() > d);
    CHECK(*r.first_non_cp_step() < 3 * d);
    CHECK(r.witness > 0.0);
}

#include <cmath>

#include "doctest.h"
#include "nmcm/state.hpp"
#include "oracles.hpp"

using nmcm::cplx;

TEST_CASE("single-excitation initial state") {
    const cplx beta{0.6, 0.0};
    const auto s = nmcm::init_single_excitation(10, beta, 3);
    CHECK(s.eps == beta);
    CHECK(s.a_vac.real() == doctest::Approx(0.8));
    CHECK(s.first_ancilla == -2);
    CHECK(s.last_ancilla() == 10);
    CHECK(nmcm::norm(s) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(s.ancilla(11), std::out_of_range);
    CHECK_THROWS_AS(s.ancilla(-3), std::out_of_range);
    CHECK_THROWS_AS(nmcm::init_single_excitation(4, cplx(1.1, 0.0)), std::domain_error);
}

TEST_CASE("reduced qubit state of the single-excitation family") {
    const cplx beta = std::polar(0.8, 0.3);
    auto s = nmcm::init_single_excitation(4, beta);
    s.eps *= 0.5;
    s.ancilla(2) = std::polar(std::sqrt(0.64 - 0.16), 1.0);
    const auto rho = nmcm::reduced_qubit_state(s);
    CHECK(rho.ee() == doctest::Approx(std::norm(s.eps)));
    CHECK(rho.gg() == doctest::Approx(1.0 - std::norm(s.eps)));
    CHECK(std::abs(rho.ge() - s.a_vac * std::conj(s.eps)) < 1e-15);
    CHECK(std::abs(rho.eg() - std::conj(rho.ge())) < 1e-15);
}

TEST_CASE("density matrix validation") {
    Eigen::Matrix2cd bad = Eigen::Matrix2cd::Zero();
    bad(0, 0) = 0.5;
    bad(1, 1) = 0.6;
    CHECK_THROWS(nmcm::QubitDensityMatrix(bad));
    bad(1, 1) = 0.5;
    bad(0, 1) = 0.7;
    bad(1, 0) = 0.7;
    CHECK_THROWS(nmcm::QubitDensityMatrix(bad));  // not positive
}

TEST_CASE("Fock vacuum modes are a tensor product") {
    nmcm::TruncatedFockState f(2, cplx(0.6, 0.0), cplx(0.0, 0.8));
    f.add_vacuum_mode(1);
    f.add_vacuum_mode(2);
    CHECK(f.dimension() == 2 * 3 * 3);
    CHECK(f.amplitude(nmcm::TruncatedFockState::kGround, {0, 0}) == cplx(0.6, 0.0));
    CHECK(f.amplitude(nmcm::TruncatedFockState::kExcited, {0, 0}) == cplx(0.0, 0.8));
    CHECK(f.amplitude(nmcm::TruncatedFockState::kExcited, {1, 0}) == cplx(0.0, 0.0));
    CHECK(f.norm() == doctest::Approx(1.0));
    CHECK(f.excitation_mean() == doctest::Approx(0.64));
    CHECK(f.position(2) == 1);
    CHECK(f.position(7) == -1);
}

TEST_CASE("embedding round trip and partial trace") {
    auto s = nmcm::init_single_excitation(3, cplx(0.5, 0.0), 1);
    s.eps = cplx(0.3, 0.1);
    s.ancilla(0) = cplx(0.2, -0.4);
    s.ancilla(2) = cplx(0.0, 0.3);
    const double n = nmcm::norm(s);
    s.a_vac = std::sqrt(std::max(0.0, 1.0 - (n * n - std::norm(s.a_vac))));
    const std::vector<long> window{0, 1, 2, 3};

    for (int n_max : {1, 2}) {
        const auto f = nmcm::embed_single_excitation(s, n_max, window);
        CHECK(f.norm() == doctest::Approx(nmcm::norm(s)).epsilon(1e-14));
        CHECK(f.excitation_mean() == doctest::Approx(std::norm(s.eps) + 0.2 * 0.2 + 0.4 * 0.4 + 0.09));

        const auto back = nmcm::project_single_excitation(f, s.first_ancilla, s.c.size());
        CHECK(back.a_vac == s.a_vac);
        CHECK(back.eps == s.eps);
        for (long m = s.first_ancilla; m <= s.last_ancilla(); ++m) CHECK(back.ancilla(m) == s.ancilla(m));

        const Eigen::Matrix2cd lib = nmcm::reduced_system_matrix(f);
        const Eigen::Matrix2cd ref = oracle::partial_trace(f);
        CHECK((lib - ref).norm() < 1e-15);
        CHECK((lib - nmcm::reduced_qubit_state(s).matrix()).norm() < 1e-15);
    }
    CHECK_THROWS_AS(nmcm::embed_single_excitation(s, 1, {1, 2, 3}), std::domain_error);
}

TEST_CASE("releasing a mode keeps norm and N moments exact") {
    auto s = nmcm::init_single_excitation(2, cplx(0.0, 0.0));
    s.a_vac = 0.0;
    s.eps = std::sqrt(0.5);
    s.ancilla(1) = cplx(0.0, std::sqrt(0.3));
    s.ancilla(2) = std::sqrt(0.2);
    auto f = nmcm::embed_single_excitation(s, 1, {1, 2});
    const double mean = f.excitation_mean();
    const double second = f.excitation_second_moment();
    f.release_mode(1);
    CHECK(f.active_modes() == std::vector<long>{2});
    CHECK(f.discarded_weight() == doctest::Approx(0.3));
    CHECK(f.norm() == doctest::Approx(1.0));
    CHECK(f.excitation_mean() == doctest::Approx(mean));
    CHECK(f.excitation_second_moment() == doctest::Approx(second));
    CHECK(f.amplitude(nmcm::TruncatedFockState::kExcited, {0}) == s.eps);
}

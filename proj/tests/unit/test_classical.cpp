#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "strobo/classical.hpp"
#include "strobo/errors.hpp"

using namespace strobo;
using namespace strobo::classical;

namespace {

double max_diff(const PhasePoint& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

}  // namespace

TEST_CASE("symplectic form is antisymmetric and squares to -1") {
    for (std::size_t n : {1u, 2u, 4u}) {
        const Eigen::MatrixXd w = SymplecticForm(n).matrix();
        CHECK((w + w.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const auto dim = static_cast<Eigen::Index>(2 * n);
        CHECK((w * w + Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("eom_rhs") {
    const auto osc = harmonic_oscillator(1.0, 0.5);
    const auto rhs = eom_rhs(osc, PhasePoint({1.0, 0.0}));
    CHECK(rhs[0] == 0.0);
    CHECK(rhs[1] == -1.0);

    const auto free4 = free_particle(4, 1.0, 0.5);
    const auto f = eom_rhs(free4, PhasePoint({0.3, -2.0, 5.0, 1.0, 1.0, 0.0, 0.0, 0.0}));
    const std::vector<double> expected{1, 0, 0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < 8; ++i) CHECK(f[i] == expected[i]);

    const auto rel = relativistic_particle(4, 1.0);
    const auto r = eom_rhs(rel, PhasePoint({0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0}));
    CHECK(r[0] == 1.0);
    for (std::size_t i = 1; i < 8; ++i) CHECK(r[i] == 0.0);

    const auto flat = ClassicalSystem::from_polynomial(1, Polynomial::constant(2, 3.0), 0.0, "flat");
    for (double v : eom_rhs(flat, PhasePoint({0.4, -1.3}))) CHECK(v == 0.0);

    CHECK_THROWS_AS(eom_rhs(osc, PhasePoint({1.0, 0.0, 0.0, 0.0})), ContractViolation);
}

TEST_CASE("constraint_residual") {
    CHECK(constraint_residual(harmonic_oscillator(1.0, 0.5), PhasePoint({0.0, 1.0})) == 0.0);
    CHECK(constraint_residual(harmonic_oscillator(2.0, 2.0), PhasePoint({1.0, 0.0})) == 0.0);
    const double m = 1.7;
    // p_mu = (m, 0): on the mass shell
    CHECK(std::abs(constraint_residual(relativistic_particle(2, m), PhasePoint({0.0, 0.0, m, 0.0}))) <
          1e-15);
    CHECK(std::abs(constraint_residual(relativistic_particle(2, m), PhasePoint({0.0, 0.0, m, 0.5}))) >
          0.01);
}

TEST_CASE("gradient consistency on 100 random points per catalog system") {
    CHECK(gradient_consistency(harmonic_oscillator(1.3, 0.5), 100, 1) <= 1e-6);
    CHECK(gradient_consistency(free_particle(3, 0.7, 0.5), 100, 2) <= 1e-6);
    CHECK(gradient_consistency(relativistic_particle(4, 2.0), 100, 3) <= 1e-6);
}

TEST_CASE("callback registration validates the gradient") {
    auto quartic = ClassicalSystem::from_callbacks(
        1, [](std::span<const double> x) { return 0.5 * x[1] * x[1] + 0.25 * std::pow(x[0], 4); },
        [](std::span<const double> x) { return std::vector<double>{std::pow(x[0], 3), x[1]}; }, 1.0,
        "quartic");
    CHECK(gradient_consistency(quartic, 100, 9) <= 1e-6);

    auto wrong = [] {
        return ClassicalSystem::from_callbacks(
            1, [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; },
            [](std::span<const double> x) { return std::vector<double>{x[0], x[1]}; }, 1.0, "bad");
    };
    CHECK_THROWS_AS(wrong(), ContractViolation);
}

TEST_CASE("integrate_trajectory matches the closed-form rotation") {
    const auto osc = harmonic_oscillator(1.0, 0.5);
    const PhasePoint start({1.0, 0.0});
    const double pi = std::numbers::pi;
    CHECK(max_diff(integrate_trajectory(osc, start, 2 * pi, 1e-3), {1.0, 0.0}) <= 1e-6);
    CHECK(max_diff(integrate_trajectory(osc, start, pi / 2, 1e-3), {0.0, -1.0}) <= 1e-6);
    // a step that does not divide tau is shrunk to land exactly on it
    CHECK(max_diff(integrate_trajectory(osc, start, 1.0, 0.3), {std::cos(1.0), -std::sin(1.0)}) <= 1e-3);

    const auto free3 = free_particle(3, 1.0, 0.5);
    const auto moved = integrate_trajectory(free3, PhasePoint({0, 0, 0, 0.5, -1.0, 2.0}), 1.0, 1e-2);
    CHECK(max_diff(moved, {0.5, -1.0, 2.0, 0.5, -1.0, 2.0}) <= 1e-12);

    CHECK(max_diff(integrate_trajectory(osc, start, 0.0, 1e-3), {1.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(integrate_trajectory(osc, start, 1.0, 0.0), ContractViolation);
    CHECK_THROWS_AS(integrate_trajectory(osc, start, -1.0, 1e-3), ContractViolation);
}

TEST_CASE("integrate_trajectory reports divergence") {
    // dq/dtau = q^2 blows up at tau = 1 from q = 1
    auto blowup = ClassicalSystem::from_callbacks(
        1, [](std::span<const double> x) { return x[1] * x[0] * x[0]; },
        [](std::span<const double> x) { return std::vector<double>{2 * x[0] * x[1], x[0] * x[0]}; },
        0.0, "blowup");
    CHECK_THROWS_AS(integrate_trajectory(blowup, PhasePoint({1.0, 0.0}), 5.0, 1e-2), DivergenceError);
}

TEST_CASE("liouville_propagate") {
    const auto osc = harmonic_oscillator(1.0, 0.5);
    const auto half_turn = liouville_propagate(osc, PhasePoint({1.0, 0.0}), std::numbers::pi);
    CHECK(max_diff(half_turn, {-1.0, 0.0}) <= 1e-9);
    CHECK(max_diff(liouville_propagate(osc, PhasePoint({0.3, 0.7}), 0.0), {0.3, 0.7}) <= 1e-15);
    const auto drift = liouville_propagate(free_particle(1, 1.0, 0.5), PhasePoint({0.0, 2.0}), 3.0);
    CHECK(max_diff(drift, {6.0, 2.0}) <= 1e-9);

    // a linear potential gives an affine flow: q(tau) = -g tau^2 / 2 from rest
    const auto fall = ClassicalSystem::from_polynomial(
        1, Polynomial(2, {Monomial{0.5, {0, 2}}, Monomial{9.81, {1, 0}}}), 0.0, "fall");
    CHECK(max_diff(liouville_propagate(fall, PhasePoint({0.0, 0.0}), 2.0), {-19.62, -19.62}) <= 1e-8);

    const auto quartic = ClassicalSystem::from_polynomial(
        1, Polynomial(2, {Monomial{0.5, {0, 2}}, Monomial{0.25, {4, 0}}}), 0.0, "quartic");
    CHECK_THROWS_AS(liouville_propagate(quartic, PhasePoint({1.0, 0.0}), 1.0), UnsupportedSystem);

    auto quartic_cb = ClassicalSystem::from_callbacks(
        1, [](std::span<const double> x) { return 0.5 * x[1] * x[1] + 0.25 * std::pow(x[0], 4); },
        [](std::span<const double> x) { return std::vector<double>{std::pow(x[0], 3), x[1]}; }, 1.0,
        "quartic-callbacks");
    CHECK_THROWS_AS(liouville_propagate(quartic_cb, PhasePoint({1.0, 0.0}), 1.0), UnsupportedSystem);
}

TEST_CASE("flow invariants for the oscillator") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        const double omega = 0.5 + std::abs(u(rng));
        const auto osc = harmonic_oscillator(omega, 0.5);
        const PhasePoint x({u(rng), u(rng)});
        for (double tau : {0.5, 3.0, 10.0}) {
            const auto exact = liouville_propagate(osc, x, tau);
            CHECK(std::abs(osc.hamiltonian(exact) - osc.hamiltonian(x)) <= 1e-9);
            const auto rk = integrate_trajectory(osc, x, tau, 1e-3);
            CHECK(max_diff(rk, {exact[0], exact[1]}) <= 1e-6);
            CHECK(std::abs(constraint_residual(osc, rk) - constraint_residual(osc, x)) <= 1e-8);
        }
    }
}

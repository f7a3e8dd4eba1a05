#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "strobo/clock.hpp"
#include "strobo/errors.hpp"
#include "strobo/evolution.hpp"
#include "strobo/lattice.hpp"
#include "strobo/su2.hpp"

using namespace strobo;
using namespace strobo::evolution;

namespace {

Eigen::VectorXcd random_state(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
    return v.normalized();
}

OperatorMatrix random_hermitian(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    return OperatorMatrix::from_dense(0.5 * (m + m.adjoint()));
}

OperatorMatrix case_b(std::size_t N) { return lattice::build_case_b(lattice::AngularGrid::make(N, 1.0, -0.5)); }

}  // namespace

TEST_CASE("evolution_matrix") {
    const auto b = case_b(16);
    CHECK(max_abs_difference(evolution_matrix(b, 0.0), OperatorMatrix::identity(16)) == 0.0);
    CHECK(unitarity_defect(evolution_matrix(b, 0.7).dense()) <= 1e-12);

    const auto grid = lattice::AngularGrid::make(16, 1.0, -0.5);
    const auto u = evolution_matrix(lattice::build_case_a(grid), 1.0);
    for (long m = 1; m <= 16; ++m) {
        const Eigen::VectorXcd v = lattice::angular_eigenvector(grid, m);
        const double gain = u.apply(v).norm();
        const double expected = std::exp(lattice::case_a_eigenvalue(grid, m).imag());
        CHECK(gain >= 1.0 - 1e-12);
        CHECK(std::abs(gain - expected) <= 1e-10 * expected);
    }
}

TEST_CASE("compose_check") {
    const auto b = case_b(16);
    CHECK(compose_check(b, 0.0, 0.0) == 0.0);
    CHECK(compose_check(b, 1.0, -1.0) <= 1e-10);
    CHECK(compose_check(random_hermitian(32, 11), 0.3, 1.1) <= 1e-10);
    const auto a = lattice::build_case_a(lattice::AngularGrid::make(12, 1.0, 0.3));
    CHECK(compose_check(a, 0.4, 0.5) <= 1e-10 * evolution_matrix(a, 0.9).max_norm());
}

TEST_CASE("unitarity for Hermitian generators") {
    const std::vector<OperatorMatrix> generators{
        case_b(8), case_b(33), su2::emergent_hamiltonian(su2::spin_matrices(2), 1.0),
        su2::oscillator_hamiltonian(su2::spin_matrices(5), su2::OscCoefficients::canonical(5, 1.0))};
    for (const auto& h : generators) {
        for (double tau : {0.1, 1.0, 10.0}) {
            CHECK(unitarity_defect(evolution_matrix(h, tau).dense()) <= 1e-12);
            const auto r = evolve(StateVector::for_operator(h, random_state(h.dim(), 3)), h, tau);
            CHECK(std::abs(r.norm_ratio - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("Case A never decreases the norm") {
    const auto grid = lattice::AngularGrid::make(16, 1.0, 0.3);
    const auto a = lattice::build_case_a(grid);
    double max_im = 0.0;
    for (auto e : lattice::case_a_spectrum(grid)) max_im = std::max(max_im, e.imag());
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = evolve(StateVector::for_operator(a, random_state(16, seed)), a, 0.8);
        CHECK(r.norm_ratio >= 1.0 - 1e-12);
        CHECK(r.norm_ratio <= std::exp(0.8 * max_im) * (1 + 1e-12));
    }
}

TEST_CASE("discrete_step reproduces the formal solution") {
    const auto h = case_b(32);
    const StateVector psi(random_state(32, 7), BasisKind::AngularGrid);
    const Eigen::VectorXcd exact = evolution_matrix(h, 1.0).apply(psi.amplitudes());
    const std::vector<clock::ClockDistribution> clocks{clock::ClockDistribution::delta(),
                                                       clock::ClockDistribution::gaussian(1.0),
                                                       clock::ClockDistribution::uniform(2.0)};
    for (const auto& c : clocks) {
        const auto step = discrete_step(psi, h, c, 1.0, 64);
        CHECK((step.state.amplitudes() - exact).norm() <= 1e-8);
        const auto twice = discrete_step(discrete_step(psi, h, c, 1.0, 64).state, h, c, 1.0, 64);
        const auto single = discrete_step(psi, h, c, 2.0, 64);
        CHECK((twice.state.amplitudes() - single.state.amplitudes()).norm() <= 1e-8);
    }
    const auto delta_step = discrete_step(psi, h, clock::ClockDistribution::delta(), 1.0, 64);
    CHECK((delta_step.state.amplitudes() - exact).norm() <= 1e-13);

    const StateVector wrong_basis(random_state(32, 7), BasisKind::Spin);
    CHECK_THROWS_AS(discrete_step(wrong_basis, h, clock::ClockDistribution::delta(), 1.0, 4), ContractViolation);
    const StateVector wrong_dim(random_state(8, 7), BasisKind::AngularGrid);
    CHECK_THROWS_AS(discrete_step(wrong_dim, h, clock::ClockDistribution::delta(), 1.0, 4), ContractViolation);
}

TEST_CASE("stationary_residual") {
    const auto grid = lattice::AngularGrid::make(24, 1.0, 0.3);
    const auto b = lattice::build_case_b(grid);
    for (long m : {1L, 5L, 24L}) {
        const StateVector v(lattice::angular_eigenvector(grid, m), BasisKind::AngularGrid);
        const double e = lattice::case_b_eigenvalue(grid, m);
        CHECK(stationary_residual(v, b, e) <= 1e-10);
        CHECK(stationary_residual(v, b, e + 1.0) >= 0.5);
    }
    const auto rep = su2::spin_matrices(4);
    const auto h = su2::h_operator(rep);
    Eigen::VectorXcd e2 = Eigen::VectorXcd::Zero(5);
    e2[2] = 1.0;
    CHECK(stationary_residual(StateVector(e2, BasisKind::Spin), h, 2.5) <= 1e-14);
}

TEST_CASE("expectation") {
    const auto psi = StateVector(random_state(6, 2), BasisKind::Generic);
    CHECK(std::abs(expectation(psi, OperatorMatrix::identity(6)) - 1.0) <= 1e-12);
    const auto herm = random_hermitian(6, 9);
    CHECK(std::abs(expectation(psi, herm).imag()) <= 1e-12);

    const auto rep = su2::spin_matrices(4);
    const auto h = su2::h_operator(rep);
    for (Index n = 0; n < 5; ++n) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(5);
        v[4 - n] = 1.0;
        CHECK(std::abs(expectation(StateVector(v, BasisKind::Spin), h) - (n + 0.5)) <= 1e-14);
    }

    const auto half = su2::spin_matrices(1);
    const auto qp = su2::qp_operators(half, su2::OscCoefficients::canonical(1, 1.0));
    Eigen::VectorXcd ground(2);
    ground << 0.0, 1.0;
    CHECK(std::abs(expectation(StateVector(ground, BasisKind::Spin), qp.q)) <= 1e-15);

    const StateVector unnormalized(Eigen::VectorXcd::Constant(6, 1.0), BasisKind::Generic);
    CHECK_THROWS_AS(expectation(unnormalized, herm), ContractViolation);
    CHECK_THROWS_AS(StateVector(Eigen::VectorXcd::Zero(3), BasisKind::Generic), ContractViolation);
}

TEST_CASE("constrained_expectation") {
    Eigen::VectorXcd d(4);
    d << 0.0, 1.0, 1.0, 3.0;
    const auto h = OperatorMatrix::diagonal(d);
    const auto psi = StateVector(random_state(4, 4), BasisKind::Generic);
    const auto herm = random_hermitian(4, 6);
    CHECK(std::abs(constrained_expectation(psi, herm, OperatorMatrix::identity(4)) - expectation(psi, herm)) <= 1e-14);
    CHECK(std::abs(constrained_expectation(psi, herm, OperatorMatrix::zero(4))) == 0.0);

    const auto window = lattice::constraint_projector(h, 1.0, 0.2);
    Eigen::VectorXcd inside = Eigen::VectorXcd::Zero(4);
    inside[1] = cplx(0.6, 0.0);
    inside[2] = cplx(0.0, 0.8);
    const StateVector psi_in(inside, BasisKind::Generic);
    Eigen::VectorXcd odiag(4);
    odiag << 2.0, -1.0, 5.0, 7.0;
    const auto o = OperatorMatrix::diagonal(odiag);
    CHECK(std::abs(constrained_expectation(psi_in, o, window.projector) - expectation(psi_in, o)) <= 1e-12);

    CHECK_THROWS_AS(constrained_expectation(psi, herm, cplx(2.0) * OperatorMatrix::identity(4)), ContractViolation);
}

TEST_CASE("Propagator matches the dense exponential for both generator kinds") {
    const auto herm = random_hermitian(10, 21);
    const Propagator p(herm);
    const Eigen::MatrixXcd direct = (cplx(0, -0.9) * herm.dense()).exp();
    CHECK((p.matrix(0.9) - direct).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("energy conservation in the su2 setting over 100 steps") {
    const int two_s = 2;
    const auto rep = su2::spin_matrices(two_s);
    const auto emergent = su2::emergent_hamiltonian(rep, 1.0);
    const auto osc = su2::embed(su2::oscillator_hamiltonian(rep, su2::OscCoefficients::canonical(two_s, 1.0)), 1);
    StateVector psi(random_state(emergent.dim(), 13), BasisKind::Tensor);
    const cplx start = expectation(psi, osc);
    const auto u = evolution_matrix(emergent, 0.05);
    double drift = 0.0;
    for (int step = 0; step < 100; ++step) {
        psi = StateVector(u.apply(psi.amplitudes()), BasisKind::Tensor).normalized();
        drift = std::max(drift, std::abs(expectation(psi, osc) - start));
    }
    CHECK(drift <= 1e-9);
}

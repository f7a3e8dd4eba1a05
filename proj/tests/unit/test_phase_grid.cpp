#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "strobo/classical.hpp"
#include "strobo/errors.hpp"
#include "strobo/phase_grid.hpp"

using namespace strobo;
using namespace strobo::lattice;

namespace {

const double kPi = std::numbers::pi;

// Multiplication symbol -pi . omega . gradH(kappa) at every grid point.
Eigen::VectorXcd symbol_times_wave(const classical::ClassicalSystem& system, const PhaseGrid& grid,
                                   std::span<const int> j) {
    const auto kappa = wave_vector(grid, j);
    const auto grad = system.gradient(classical::PhasePoint(kappa));
    const classical::SymplecticForm omega(system.dof());
    Eigen::VectorXcd wave = plane_wave(grid, j);
    for (Index flat = 0; flat < grid.dim(); ++flat) {
        const auto idx = grid.unflatten(flat);
        double s = 0.0;
        for (std::size_t a = 0; a < grid.axes(); ++a)
            for (std::size_t b = 0; b < grid.axes(); ++b)
                s -= grid.coordinate(a, idx[a]) * omega.entry(a, b) * grad[b];
        wave[flat] *= s;
    }
    return wave;
}

}  // namespace

TEST_CASE("phase grid geometry") {
    const PhaseGrid grid({4, 6}, {2.0, 3.0});
    CHECK(grid.dim() == 24);
    CHECK(grid.spacing(0) == 0.5);
    CHECK(grid.coordinate(0, 0) == -1.0);
    CHECK(grid.coordinate(0, 2) == 0.0);
    CHECK(grid.stride(1) == 1);
    CHECK(grid.stride(0) == 6);
    CHECK(grid.unflatten(13) == std::vector<std::size_t>{2, 1});
    CHECK_THROWS_AS(PhaseGrid({4}, {0.0}), ContractViolation);
    CHECK_THROWS_AS(PhaseGrid({4, 4}, {1.0}), ContractViolation);
}

TEST_CASE("fourier derivative is exact on band-limited waves") {
    const std::size_t M = 16;
    const double L = 5.0;
    const Eigen::MatrixXcd d = fourier_derivative(M, L);
    CHECK((d + d.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    for (int j = -7; j <= 7; ++j) {
        const double kappa = 2 * kPi * j / L;
        Eigen::VectorXcd w(M);
        for (std::size_t n = 0; n < M; ++n) w[n] = std::polar(1.0, kappa * (n * L / M));
        CHECK((d * w - cplx(0.0, kappa) * w).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("oscillator emergent Hamiltonian has the expected structure") {
    const double omega = 1.3;
    const auto osc = classical::harmonic_oscillator(omega, 0.5);
    const auto grid = PhaseGrid::uniform(2, 8, 6.0);
    const Eigen::MatrixXcd h = build_effective_hamiltonian(osc, grid).to_matrix().dense();

    const Eigen::MatrixXcd d = fourier_derivative(8, 6.0);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(8, 8);
    Eigen::MatrixXcd pi = Eigen::MatrixXcd::Zero(8, 8);
    for (std::size_t j = 0; j < 8; ++j) pi(j, j) = grid.coordinate(0, j);
    const Eigen::MatrixXcd pi_q = Eigen::kroneckerProduct(pi, id);
    const Eigen::MatrixXcd pi_p = Eigen::kroneckerProduct(id, pi);
    const Eigen::MatrixXcd d_q = Eigen::kroneckerProduct(d, id);
    const Eigen::MatrixXcd d_p = Eigen::kroneckerProduct(id, d);
    const Eigen::MatrixXcd expected = cplx(0, 1) * pi_q * d_p - cplx(0, omega * omega) * pi_p * d_q;
    CHECK((h - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant Hamiltonian gives the zero operator") {
    const auto flat = classical::ClassicalSystem::from_polynomial(1, Polynomial::constant(2, 4.0), 0.0, "flat");
    const auto grid = PhaseGrid::uniform(2, 6, 3.0);
    CHECK(build_effective_hamiltonian(flat, grid).to_matrix().max_norm() == 0.0);
}

TEST_CASE("emergent Hamiltonian multiplies plane waves by the classical symbol") {
    const auto grid = PhaseGrid::uniform(2, 32, 10.0);
    const auto osc = classical::harmonic_oscillator(0.8, 0.5);
    const auto op = build_effective_hamiltonian(osc, grid);
    for (const std::vector<int>& j : {std::vector<int>{0, 0}, {1, -2}, {5, 3}, {-9, 14}}) {
        const Eigen::VectorXcd diff = op.apply(plane_wave(grid, j)) - symbol_times_wave(osc, grid, j);
        CHECK(diff.cwiseAbs().maxCoeff() <= 1e-8);
    }

    const auto free2 = classical::free_particle(2, 1.5, 0.5);
    const auto grid4 = PhaseGrid::uniform(4, 8, 4.0);
    const auto op4 = build_effective_hamiltonian(free2, grid4);
    const std::vector<int> j4{1, -2, 3, 2};
    CHECK((op4.apply(plane_wave(grid4, j4)) - symbol_times_wave(free2, grid4, j4)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("matrix-free apply agrees with the materialized matrix") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const auto grid = PhaseGrid({6, 10}, {3.0, 4.0});
    const auto op = build_effective_hamiltonian(classical::harmonic_oscillator(1.0, 0.5), grid);
    Eigen::VectorXcd v(grid.dim());
    for (Index i = 0; i < v.size(); ++i) v[i] = cplx(g(rng), g(rng));
    CHECK((op.apply(v) - op.to_matrix().apply(v)).norm() <= 1e-12 * v.norm());
}

TEST_CASE("observable operators") {
    const auto grid = PhaseGrid::uniform(2, 16, 8.0);
    const auto q = observable_operator(Polynomial::variable(2, 0), grid);
    const std::vector<int> j{3, -1};
    const auto kappa = wave_vector(grid, j);
    const Eigen::VectorXcd w = plane_wave(grid, j);
    CHECK((q.apply(w) - kappa[0] * w).cwiseAbs().maxCoeff() <= 1e-12);

    const auto one = observable_operator(Polynomial::constant(2, 1.0), grid).to_matrix();
    CHECK(max_abs_difference(one, OperatorMatrix::identity(grid.dim())) == 0.0);

    Polynomial high(2, {Monomial{1.0, {8, 0}}});
    CHECK_THROWS_AS(observable_operator(high, grid), ResolutionError);
    CHECK_THROWS_AS(plane_wave(grid, std::vector<int>{8, 0}), ResolutionError);
}

TEST_CASE("lattice commutator residual decays with grid refinement") {
    const auto osc = classical::harmonic_oscillator(1.0, 0.5);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t M : {32u, 64u, 128u}) {
        const double L = std::sqrt(2 * kPi * static_cast<double>(M));
        const auto grid = PhaseGrid::uniform(2, M, L);
        const auto h_emergent = build_effective_hamiltonian(osc, grid);
        const auto h_obs = observable_operator(osc.hamiltonian_polynomial().value(), grid);
        const double residual = commutator_residual(h_obs, h_emergent, gaussian_state(grid, 1.6));
        MESSAGE("M=" << M << " residual=" << residual);
        CHECK(residual < previous);
        previous = residual;
    }
}

TEST_CASE("Taylor evolution conserves the norm and composes") {
    const auto grid = PhaseGrid::uniform(2, 16, 8.0);
    const auto osc = classical::harmonic_oscillator(1.0, 0.5);
    const auto op = build_effective_hamiltonian(osc, grid);
    const Eigen::VectorXcd psi = gaussian_state(grid, 1.0);
    CHECK(std::abs(psi.norm() - 1.0) <= 1e-14);
    const Eigen::VectorXcd once = evolve(op, psi, 0.6);
    const Eigen::VectorXcd twice = evolve(op, evolve(op, psi, 0.3), 0.3);
    CHECK((once - twice).norm() <= 1e-10);
    CHECK((evolve(op, psi, 0.0) - psi).norm() == 0.0);
    // the dense exponential as an independent oracle
    const Eigen::MatrixXcd u = (cplx(0, -0.6) * op.to_matrix().dense()).exp();
    CHECK((u * psi - once).norm() <= 1e-10);
}

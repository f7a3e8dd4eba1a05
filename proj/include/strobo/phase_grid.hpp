#pragma once

// Periodic grids over the conjugate variables pi_a and the structured
// operators built on them: the emergent Hamilton operator
//   -sum_{a,b} pi_a omega^{ab} (dH/dphi^b)(phi_hat),   phi_hat_a = -i d/dpi_a,
// and classical observables O(phi_hat). Derivatives are spectral (Fourier),
// so plane waves exp(i kappa . pi) with kappa on the grid's frequency lattice
// (|j| < M/2) are handled exactly. Multiplication by pi_a uses the principal
// value coordinate in [-L/2, L/2).

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "strobo/classical.hpp"
#include "strobo/operator_matrix.hpp"
#include "strobo/polynomial.hpp"

namespace strobo::lattice {

class PhaseGrid {
public:
    PhaseGrid(std::vector<std::size_t> sizes, std::vector<double> lengths);
    static PhaseGrid uniform(std::size_t axes, std::size_t points, double length);

    std::size_t axes() const { return sizes_.size(); }
    std::size_t size(std::size_t axis) const { return sizes_.at(axis); }
    double length(std::size_t axis) const { return lengths_.at(axis); }
    double spacing(std::size_t axis) const;
    double coordinate(std::size_t axis, std::size_t j) const;
    Index dim() const { return dim_; }
    std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

    // Multi-index of a flat index (last axis fastest).
    std::vector<std::size_t> unflatten(Index flat) const;

private:
    std::vector<std::size_t> sizes_;
    std::vector<double> lengths_;
    std::vector<std::size_t> strides_;
    Index dim_ = 0;
};

// Spectral first-derivative matrix on M periodic points of period L, Nyquist
// mode dropped; real and antisymmetric.
Eigen::MatrixXcd fourier_derivative(std::size_t points, double length);

// Sum of terms coeff * [pi_axis] * prod_c D_c^{k_c}, applied matrix-free.
class GridOperator {
public:
    struct Term {
        cplx coeff;
        int multiplier_axis = -1;  // -1: no pi multiplication
        std::vector<int> derivative_powers;
    };

    GridOperator(PhaseGrid grid, std::vector<Term> terms);

    const PhaseGrid& grid() const { return grid_; }
    const std::vector<Term>& terms() const { return terms_; }
    Index dim() const { return grid_.dim(); }

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    // Sparse materialization, for dim <= kMaxGridOperatorDim.
    OperatorMatrix to_matrix() const;

private:
    const Eigen::MatrixXcd& derivative_power(std::size_t axis, int power) const;
    double norm_bound() const;
    friend Eigen::VectorXcd evolve(const GridOperator&, const Eigen::VectorXcd&, double);

    PhaseGrid grid_;
    std::vector<Term> terms_;
    std::map<std::pair<std::size_t, int>, Eigen::MatrixXcd> powers_;
};

inline constexpr Index kMaxGridOperatorDim = Index{1} << 14;

GridOperator build_effective_hamiltonian(const classical::ClassicalSystem& system,
                                         const PhaseGrid& grid);

// O(phi_hat) for a polynomial O in the grid's variables. Every per-axis power
// k needs at least 2(k + 1) points on that axis.
GridOperator observable_operator(const Polynomial& observable, const PhaseGrid& grid);

// ||A B v - B A v|| / ||v||
double commutator_residual(const GridOperator& a, const GridOperator& b, const Eigen::VectorXcd& v);

// exp(i kappa . pi) with kappa_a = 2 pi j_a / L_a.
Eigen::VectorXcd plane_wave(const PhaseGrid& grid, std::span<const int> wave_numbers);
std::vector<double> wave_vector(const PhaseGrid& grid, std::span<const int> wave_numbers);

// Normalized centered Gaussian exp(-|pi|^2 / (4 sigma^2)).
Eigen::VectorXcd gaussian_state(const PhaseGrid& grid, double sigma);

// exp(-i tau A) v by a Taylor series on substeps with |tau| ||A||_est <= 1/2.
Eigen::VectorXcd evolve(const GridOperator& a, const Eigen::VectorXcd& v, double tau);

}  // namespace strobo::lattice

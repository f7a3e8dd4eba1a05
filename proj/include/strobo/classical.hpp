#pragma once

// Reparametrization-invariant classical systems: phase space, symplectic
// structure, Hamiltonian with constraint energy, and proper-time flow.
//
// Phase-space coordinates are ordered (q1..qn, p1..pn). Everything is
// dimensionless; there is no hbar anywhere in this library.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "strobo/polynomial.hpp"

namespace strobo::classical {

class PhasePoint {
public:
    explicit PhasePoint(std::vector<double> coords);

    std::size_t dof() const { return coords_.size() / 2; }
    std::size_t size() const { return coords_.size(); }
    std::span<const double> coords() const { return coords_; }
    double operator[](std::size_t a) const { return coords_[a]; }
    double q(std::size_t i) const { return coords_.at(i); }
    double p(std::size_t i) const { return coords_.at(dof() + i); }

private:
    std::vector<double> coords_;
};

// omega = [[0, I], [-I, 0]] on 2n-dimensional phase space.
class SymplecticForm {
public:
    explicit SymplecticForm(std::size_t dof);

    std::size_t dof() const { return dof_; }
    double entry(std::size_t a, std::size_t b) const;
    Eigen::MatrixXd matrix() const;
    std::vector<double> apply(std::span<const double> covector) const;

private:
    std::size_t dof_;
};

class ClassicalSystem {
public:
    using ScalarField = std::function<double(std::span<const double>)>;
    using VectorField = std::function<std::vector<double>(std::span<const double>)>;

    // Hamiltonian given as a polynomial in the 2n phase-space variables. The
    // gradient is derived symbolically, which also enables the lattice
    // operator builders.
    static ClassicalSystem from_polynomial(std::size_t dof, Polynomial hamiltonian,
                                           double epsilon, std::string label);

    // User-registered callbacks. The gradient is validated against central
    // finite differences of the Hamiltonian on random probe points.
    static ClassicalSystem from_callbacks(std::size_t dof, ScalarField hamiltonian,
                                          VectorField gradient, double epsilon,
                                          std::string label);

    std::size_t dof() const { return dof_; }
    std::size_t phase_dim() const { return 2 * dof_; }
    double epsilon() const { return epsilon_; }
    const std::string& label() const { return label_; }

    double hamiltonian(const PhasePoint& x) const;
    std::vector<double> gradient(const PhasePoint& x) const;

    const std::optional<Polynomial>& hamiltonian_polynomial() const { return hamiltonian_poly_; }
    const std::optional<std::vector<Polynomial>>& gradient_polynomials() const {
        return gradient_polys_;
    }

private:
    ClassicalSystem() = default;
    void require_dim(const PhasePoint& x) const;

    std::size_t dof_ = 0;
    ScalarField hamiltonian_;
    VectorField gradient_;
    double epsilon_ = 0.0;
    std::string label_;
    std::optional<Polynomial> hamiltonian_poly_;
    std::optional<std::vector<Polynomial>> gradient_polys_;
};

// Largest relative deviation between the registered gradient and a central
// finite-difference estimate, over `probes` points drawn uniformly from
// [-radius, radius]^{2n}.
double gradient_consistency(const ClassicalSystem& system, std::size_t probes,
                            std::uint64_t seed, double radius = 2.0);

// H = (p^2 + Omega^2 q^2) / 2 with the lapse eliminated.
ClassicalSystem harmonic_oscillator(double omega, double epsilon);

// H = |p|^2 / (2m) in `dof` dimensions.
ClassicalSystem free_particle(std::size_t dof, double mass, double epsilon);

// Coordinates (q^mu; p_mu), H = g^{mu nu} p_mu p_nu / (2m) with g = diag(+,-,...,-)
// and epsilon = m/2, so that dq^mu/dtau = p^mu/m and H - epsilon = (p.p - m^2)/(2m).
ClassicalSystem relativistic_particle(std::size_t spacetime_dims, double mass);

// Component a equals sum_b omega^{ab} dH/dphi^b at the point.
std::vector<double> eom_rhs(const ClassicalSystem& system, const PhasePoint& point);

double constraint_residual(const ClassicalSystem& system, const PhasePoint& point);

// Fixed-step classical Runge-Kutta. The step is shrunk so that an integer
// number of steps lands exactly on tau.
PhasePoint integrate_trajectory(const ClassicalSystem& system, const PhasePoint& start,
                                double tau, double step);

// exp(M tau) start, M = omega * Hessian(H), for quadratic Hamiltonians. The
// Hessian is taken by central differences of the gradient (step 1e-5); a
// constant gradient offset is carried through an augmented exponential.
PhasePoint liouville_propagate(const ClassicalSystem& system, const PhasePoint& start,
                               double tau);

inline constexpr double kHessianStep = 1e-5;

}  // namespace strobo::classical

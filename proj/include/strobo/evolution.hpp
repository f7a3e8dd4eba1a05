#pragma once

// Evolution operators exp(-i tau H), the discrete-time step averaged over the
// clock distribution, stationary states and (constrained) expectation values.
// States obey the proper-time translation property psi(tau) = exp(-i tau H) psi(0),
// and the reference proper-time offset is 0.

#include <cstddef>
#include <optional>

#include "strobo/clock.hpp"
#include "strobo/operator_matrix.hpp"

namespace strobo::evolution {

class StateVector {
public:
    StateVector(Eigen::VectorXcd amplitudes, BasisKind basis);
    static StateVector for_operator(const OperatorMatrix& op, Eigen::VectorXcd amplitudes);

    Index dim() const { return amplitudes_.size(); }
    const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
    BasisKind basis() const { return basis_; }
    double norm() const { return amplitudes_.norm(); }
    StateVector normalized() const;

private:
    Eigen::VectorXcd amplitudes_;
    BasisKind basis_;
};

struct EvolutionResult {
    StateVector state;
    double norm_ratio;        // ||out|| / ||in||
    double unitarity_defect;  // max |U^dagger U - I| of the step's net propagator
};

// Applies exp(-i tau H). Hermitian generators go through their spectral
// decomposition (computed once); others through a Pade scaling-and-squaring
// exponential per call.
class Propagator {
public:
    explicit Propagator(const OperatorMatrix& generator);

    Index dim() const { return generator_.dim(); }
    const OperatorMatrix& generator() const { return generator_; }
    Eigen::MatrixXcd matrix(double tau) const;
    Eigen::VectorXcd apply(double tau, const Eigen::VectorXcd& v) const;

private:
    OperatorMatrix generator_;
    std::optional<Eigen::MatrixXcd> vectors_;
    Eigen::VectorXd values_;
};

OperatorMatrix evolution_matrix(const OperatorMatrix& h, double tau);

double unitarity_defect(const Eigen::MatrixXcd& u);

// ||U(a) U(b) - U(a + b)||_max
double compose_check(const OperatorMatrix& h, double a, double b);

EvolutionResult evolve(const StateVector& psi, const OperatorMatrix& h, double tau);

// sum_k w_k exp(-i (T - tau_k) H) psi(tau_k), psi(tau_k) = exp(-i tau_k H) psi,
// over the clock's quadrature rule. The output is not renormalized.
EvolutionResult discrete_step(const StateVector& psi, const OperatorMatrix& h,
                              const clock::ClockDistribution& clock, double period,
                              std::size_t quad_nodes);

// ||H psi - E psi|| / ||psi||
double stationary_residual(const StateVector& psi, const OperatorMatrix& h, cplx energy);

cplx expectation(const StateVector& psi, const OperatorMatrix& o);

// <psi| O C |psi> for a Hermitian idempotent C.
cplx constrained_expectation(const StateVector& psi, const OperatorMatrix& o,
                             const OperatorMatrix& c);

}  // namespace strobo::evolution

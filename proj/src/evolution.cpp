#include "strobo/evolution.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "strobo/errors.hpp"
#include "strobo/spectral.hpp"

namespace strobo::evolution {

namespace {

void require_match(const StateVector& psi, const OperatorMatrix& op) {
    if (psi.dim() != op.dim()) {
        throw ContractViolation("state dimension " + std::to_string(psi.dim()) +
                                " does not match operator dimension " + std::to_string(op.dim()));
    }
    if (psi.basis() != op.basis().kind) {
        throw ContractViolation(std::string("state basis ") + to_string(psi.basis()) +
                                " does not match operator basis " + to_string(op.basis().kind));
    }
}

void require_normalized(const StateVector& psi) {
    if (std::abs(psi.norm() - 1.0) > 1e-10) {
        throw ContractViolation("expectation values need a normalized state (norm " +
                                std::to_string(psi.norm()) + ")");
    }
}

}  // namespace

StateVector::StateVector(Eigen::VectorXcd amplitudes, BasisKind basis)
    : amplitudes_(std::move(amplitudes)), basis_(basis) {
    if (amplitudes_.size() == 0) throw ContractViolation("state needs positive dimension");
    if (!amplitudes_.allFinite()) throw ContractViolation("state amplitudes must be finite");
    if (!(amplitudes_.norm() > 0.0)) throw ContractViolation("state must have positive norm");
}

StateVector StateVector::for_operator(const OperatorMatrix& op, Eigen::VectorXcd amplitudes) {
    if (amplitudes.size() != op.dim()) throw ContractViolation("state dimension mismatch");
    return StateVector(std::move(amplitudes), op.basis().kind);
}

StateVector StateVector::normalized() const {
    return StateVector(amplitudes_ / amplitudes_.norm(), basis_);
}

Propagator::Propagator(const OperatorMatrix& generator) : generator_(generator) {
    if (generator_.hermitian()) {
        auto spectrum = spectral::eig(generator_, spectral::EigMethod::Auto, true);
        values_.resize(static_cast<Index>(spectrum.eigenvalues.size()));
        for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i) {
            values_[static_cast<Index>(i)] = spectrum.eigenvalues[i].real();
        }
        vectors_ = std::move(*spectrum.eigenvectors);
    }
}

Eigen::MatrixXcd Propagator::matrix(double tau) const {
    if (!std::isfinite(tau)) throw ContractViolation("tau must be finite");
    if (tau == 0.0) return Eigen::MatrixXcd::Identity(dim(), dim());
    if (vectors_) {
        Eigen::VectorXcd phases(values_.size());
        for (Index i = 0; i < values_.size(); ++i) phases[i] = std::polar(1.0, -tau * values_[i]);
        return (*vectors_) * phases.asDiagonal() * vectors_->adjoint();
    }
    const Eigen::MatrixXcd scaled = cplx(0.0, -tau) * generator_.dense();
    return scaled.exp();
}

Eigen::VectorXcd Propagator::apply(double tau, const Eigen::VectorXcd& v) const {
    if (v.size() != dim()) throw ContractViolation("vector dimension does not match propagator");
    if (tau == 0.0) return v;
    if (vectors_) {
        Eigen::VectorXcd coeffs = vectors_->adjoint() * v;
        for (Index i = 0; i < values_.size(); ++i) coeffs[i] *= std::polar(1.0, -tau * values_[i]);
        return (*vectors_) * coeffs;
    }
    return matrix(tau) * v;
}

OperatorMatrix evolution_matrix(const OperatorMatrix& h, double tau) {
    Basis basis = h.basis();
    basis.circulant.reset();
    if (tau == 0.0) return OperatorMatrix::identity(h.dim(), std::move(basis));
    if (h.is_diagonal()) {
        Eigen::VectorXcd d = h.sparse().diagonal();
        for (Index i = 0; i < d.size(); ++i) d[i] = std::exp(cplx(0.0, -tau) * d[i]);
        return OperatorMatrix::diagonal(d, std::move(basis));
    }
    return OperatorMatrix::from_dense(Propagator(h).matrix(tau), std::move(basis));
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
    const Eigen::MatrixXcd gram = u.adjoint() * u;
    return (gram - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double compose_check(const OperatorMatrix& h, double a, double b) {
    const Propagator prop(h);
    const Eigen::MatrixXcd lhs = prop.matrix(a) * prop.matrix(b);
    return (lhs - prop.matrix(a + b)).cwiseAbs().maxCoeff();
}

EvolutionResult evolve(const StateVector& psi, const OperatorMatrix& h, double tau) {
    require_match(psi, h);
    const Propagator prop(h);
    const Eigen::MatrixXcd u = prop.matrix(tau);
    StateVector out(u * psi.amplitudes(), psi.basis());
    return EvolutionResult{out, out.norm() / psi.norm(), unitarity_defect(u)};
}

EvolutionResult discrete_step(const StateVector& psi, const OperatorMatrix& h,
                              const clock::ClockDistribution& clock, double period,
                              std::size_t quad_nodes) {
    require_match(psi, h);
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw ContractViolation("clock period T must be positive");
    }
    const auto rule = clock::quadrature(clock, quad_nodes);
    const Propagator prop(h);
    Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(psi.dim());
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double tau_k = rule.nodes[k];
        const Eigen::VectorXcd at_node = prop.apply(tau_k, psi.amplitudes());
        sum += rule.weights[k] * prop.apply(period - tau_k, at_node);
    }
    StateVector out(std::move(sum), psi.basis());
    const double ratio = out.norm() / psi.norm();
    return EvolutionResult{out, ratio, unitarity_defect(prop.matrix(period))};
}

double stationary_residual(const StateVector& psi, const OperatorMatrix& h, cplx energy) {
    require_match(psi, h);
    return (h.apply(psi.amplitudes()) - energy * psi.amplitudes()).norm() / psi.norm();
}

cplx expectation(const StateVector& psi, const OperatorMatrix& o) {
    require_match(psi, o);
    require_normalized(psi);
    return psi.amplitudes().dot(o.apply(psi.amplitudes()));
}

cplx constrained_expectation(const StateVector& psi, const OperatorMatrix& o,
                             const OperatorMatrix& c) {
    require_match(psi, o);
    require_match(psi, c);
    if (!c.hermitian()) throw ContractViolation("constraint projector must be Hermitian");
    const double idempotency = max_abs_difference(c * c, c);
    if (idempotency > 1e-10) {
        throw ContractViolation("constraint operator is not idempotent (defect " +
                                std::to_string(idempotency) + ")");
    }
    return psi.amplitudes().dot(o.apply(c.apply(psi.amplitudes())));
}

}  // namespace strobo::evolution

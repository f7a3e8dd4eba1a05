#include "strobo/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

#include "strobo/errors.hpp"

namespace strobo::classical {

namespace {

using Index = Eigen::Index;

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_relative_gradient_error(const ClassicalSystem& system, const PhasePoint& x) {
    const auto grad = system.gradient(x);
    std::vector<double> probe(x.coords().begin(), x.coords().end());
    double scale = 1.0;
    for (double g : grad) scale = std::max(scale, std::abs(g));
    double worst = 0.0;
    for (std::size_t a = 0; a < probe.size(); ++a) {
        const double h = 1e-5 * std::max(1.0, std::abs(probe[a]));
        const double saved = probe[a];
        probe[a] = saved + h;
        const double up = system.hamiltonian(PhasePoint(probe));
        probe[a] = saved - h;
        const double down = system.hamiltonian(PhasePoint(probe));
        probe[a] = saved;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - grad[a]) / scale);
    }
    return worst;
}

Eigen::MatrixXd finite_difference_hessian(const ClassicalSystem& system, const PhasePoint& x) {
    const std::size_t dim = x.size();
    Eigen::MatrixXd hess(dim, dim);
    std::vector<double> probe(x.coords().begin(), x.coords().end());
    for (std::size_t b = 0; b < dim; ++b) {
        const double saved = probe[b];
        probe[b] = saved + kHessianStep;
        const auto up = system.gradient(PhasePoint(probe));
        probe[b] = saved - kHessianStep;
        const auto down = system.gradient(PhasePoint(probe));
        probe[b] = saved;
        for (std::size_t a = 0; a < dim; ++a) {
            hess(static_cast<Index>(a), static_cast<Index>(b)) =
                (up[a] - down[a]) / (2.0 * kHessianStep);
        }
    }
    return 0.5 * (hess + hess.transpose());
}

}  // namespace

PhasePoint::PhasePoint(std::vector<double> coords) : coords_(std::move(coords)) {
    if (coords_.empty() || coords_.size() % 2 != 0) {
        throw ContractViolation("phase point must have even, positive length");
    }
    if (!all_finite(coords_)) throw ContractViolation("phase point entries must be finite");
}

SymplecticForm::SymplecticForm(std::size_t dof) : dof_(dof) {
    if (dof == 0) throw ContractViolation("symplectic form needs at least one degree of freedom");
}

double SymplecticForm::entry(std::size_t a, std::size_t b) const {
    if (a < dof_ && b == a + dof_) return 1.0;
    if (a >= dof_ && a < 2 * dof_ && b + dof_ == a) return -1.0;
    return 0.0;
}

Eigen::MatrixXd SymplecticForm::matrix() const {
    const auto n = static_cast<Eigen::Index>(dof_);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    w.topRightCorner(n, n).setIdentity();
    w.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return w;
}

std::vector<double> SymplecticForm::apply(std::span<const double> covector) const {
    if (covector.size() != 2 * dof_) throw ContractViolation("covector dimension mismatch");
    std::vector<double> out(2 * dof_);
    for (std::size_t i = 0; i < dof_; ++i) {
        out[i] = covector[dof_ + i];
        out[dof_ + i] = -covector[i];
    }
    return out;
}

ClassicalSystem ClassicalSystem::from_polynomial(std::size_t dof, Polynomial hamiltonian,
                                                 double epsilon, std::string label) {
    if (dof == 0) throw ContractViolation("system needs at least one degree of freedom");
    if (hamiltonian.variables() != 2 * dof) {
        throw ContractViolation("hamiltonian polynomial must have 2n variables");
    }
    ClassicalSystem sys;
    sys.dof_ = dof;
    sys.epsilon_ = epsilon;
    sys.label_ = std::move(label);
    std::vector<Polynomial> grads;
    grads.reserve(2 * dof);
    for (std::size_t a = 0; a < 2 * dof; ++a) grads.push_back(hamiltonian.derivative(a));
    sys.hamiltonian_poly_ = hamiltonian;
    sys.gradient_polys_ = grads;
    sys.hamiltonian_ = [h = std::move(hamiltonian)](std::span<const double> x) {
        return h.evaluate(x);
    };
    sys.gradient_ = [g = std::move(grads)](std::span<const double> x) {
        std::vector<double> out;
        out.reserve(g.size());
        for (const auto& component : g) out.push_back(component.evaluate(x));
        return out;
    };
    return sys;
}

ClassicalSystem ClassicalSystem::from_callbacks(std::size_t dof, ScalarField hamiltonian,
                                                VectorField gradient, double epsilon,
                                                std::string label) {
    if (dof == 0) throw ContractViolation("system needs at least one degree of freedom");
    if (!hamiltonian || !gradient) throw ContractViolation("callbacks must be callable");
    ClassicalSystem sys;
    sys.dof_ = dof;
    sys.epsilon_ = epsilon;
    sys.label_ = std::move(label);
    sys.hamiltonian_ = std::move(hamiltonian);
    sys.gradient_ = std::move(gradient);
    if (gradient_consistency(sys, 16, 0x5eedULL) > 1e-6) {
        throw ContractViolation("gradient of '" + sys.label_ +
                                "' does not match finite differences of its hamiltonian");
    }
    return sys;
}

void ClassicalSystem::require_dim(const PhasePoint& x) const {
    if (x.size() != phase_dim()) {
        throw ContractViolation("phase point dimension " + std::to_string(x.size()) +
                                " does not match system dimension " +
                                std::to_string(phase_dim()));
    }
}

double ClassicalSystem::hamiltonian(const PhasePoint& x) const {
    require_dim(x);
    return hamiltonian_(x.coords());
}

std::vector<double> ClassicalSystem::gradient(const PhasePoint& x) const {
    require_dim(x);
    auto g = gradient_(x.coords());
    if (g.size() != phase_dim()) throw ContractViolation("gradient callback returned wrong size");
    return g;
}

double gradient_consistency(const ClassicalSystem& system, std::size_t probes,
                            std::uint64_t seed, double radius) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(-radius, radius);
    double worst = 0.0;
    for (std::size_t i = 0; i < probes; ++i) {
        std::vector<double> x(system.phase_dim());
        for (auto& v : x) v = coord(rng);
        worst = std::max(worst, max_relative_gradient_error(system, PhasePoint(std::move(x))));
    }
    return worst;
}

ClassicalSystem harmonic_oscillator(double omega, double epsilon) {
    if (!(omega > 0.0)) throw ContractViolation("oscillator frequency must be positive");
    // (p^2 + Omega^2 q^2) / 2 in variables (q, p)
    Polynomial h(2, {Monomial{0.5 * omega * omega, {2, 0}}, Monomial{0.5, {0, 2}}});
    return ClassicalSystem::from_polynomial(1, std::move(h), epsilon, "harmonic-oscillator");
}

ClassicalSystem free_particle(std::size_t dof, double mass, double epsilon) {
    if (!(mass > 0.0)) throw ContractViolation("mass must be positive");
    std::vector<Monomial> terms;
    for (std::size_t i = 0; i < dof; ++i) {
        std::vector<int> powers(2 * dof, 0);
        powers[dof + i] = 2;
        terms.push_back(Monomial{0.5 / mass, std::move(powers)});
    }
    return ClassicalSystem::from_polynomial(dof, Polynomial(2 * dof, std::move(terms)), epsilon,
                                            "free-particle");
}

ClassicalSystem relativistic_particle(std::size_t spacetime_dims, double mass) {
    if (!(mass > 0.0)) throw ContractViolation("mass must be positive");
    if (spacetime_dims < 2) throw ContractViolation("need at least 1+1 spacetime dimensions");
    const std::size_t n = spacetime_dims;
    std::vector<Monomial> terms;
    for (std::size_t mu = 0; mu < n; ++mu) {
        std::vector<int> powers(2 * n, 0);
        powers[n + mu] = 2;
        const double metric = mu == 0 ? 1.0 : -1.0;
        terms.push_back(Monomial{metric * 0.5 / mass, std::move(powers)});
    }
    return ClassicalSystem::from_polynomial(n, Polynomial(2 * n, std::move(terms)), 0.5 * mass,
                                            "relativistic-particle");
}

std::vector<double> eom_rhs(const ClassicalSystem& system, const PhasePoint& point) {
    return SymplecticForm(system.dof()).apply(system.gradient(point));
}

double constraint_residual(const ClassicalSystem& system, const PhasePoint& point) {
    return system.hamiltonian(point) - system.epsilon();
}

PhasePoint integrate_trajectory(const ClassicalSystem& system, const PhasePoint& start,
                                double tau, double step) {
    if (!(step > 0.0)) throw ContractViolation("integration step must be positive");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ContractViolation("tau must be finite and >= 0");
    if (start.size() != system.phase_dim()) {
        throw ContractViolation("start point dimension does not match system");
    }
    if (tau == 0.0) return start;

    const auto steps = static_cast<std::size_t>(std::ceil(tau / step - 1e-9));
    const double h = tau / static_cast<double>(steps);
    const std::size_t dim = start.size();
    std::vector<double> x(start.coords().begin(), start.coords().end());
    std::vector<double> tmp(dim);

    auto rhs = [&](const std::vector<double>& at) {
        for (double v : at) {
            if (!std::isfinite(v)) throw DivergenceError("trajectory left the finite domain");
        }
        return eom_rhs(system, PhasePoint(at));
    };

    for (std::size_t s = 0; s < steps; ++s) {
        const auto k1 = rhs(x);
        for (std::size_t a = 0; a < dim; ++a) tmp[a] = x[a] + 0.5 * h * k1[a];
        const auto k2 = rhs(tmp);
        for (std::size_t a = 0; a < dim; ++a) tmp[a] = x[a] + 0.5 * h * k2[a];
        const auto k3 = rhs(tmp);
        for (std::size_t a = 0; a < dim; ++a) tmp[a] = x[a] + h * k3[a];
        const auto k4 = rhs(tmp);
        for (std::size_t a = 0; a < dim; ++a) {
            x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
        if (!all_finite(x)) throw DivergenceError("trajectory diverged at step " + std::to_string(s));
    }
    return PhasePoint(std::move(x));
}

PhasePoint liouville_propagate(const ClassicalSystem& system, const PhasePoint& start,
                               double tau) {
    if (start.size() != system.phase_dim()) {
        throw ContractViolation("start point dimension does not match system");
    }
    if (!std::isfinite(tau)) throw ContractViolation("tau must be finite");
    if (const auto& poly = system.hamiltonian_polynomial(); poly && poly->degree() > 2) {
        throw UnsupportedSystem("closed-form Liouville propagation needs a quadratic hamiltonian; '" +
                                system.label() + "' has degree " + std::to_string(poly->degree()));
    }

    const auto dim = static_cast<Index>(start.size());
    const Eigen::MatrixXd hess = finite_difference_hessian(system, start);

    // A quadratic hamiltonian has the same Hessian everywhere.
    std::vector<double> shifted(start.coords().begin(), start.coords().end());
    for (std::size_t a = 0; a < shifted.size(); ++a) {
        shifted[a] += 0.75 + 0.25 * static_cast<double>(a);
    }
    const Eigen::MatrixXd hess_far = finite_difference_hessian(system, PhasePoint(shifted));
    const double scale = std::max(1.0, hess.cwiseAbs().maxCoeff());
    if ((hess - hess_far).cwiseAbs().maxCoeff() > 1e-6 * scale) {
        throw UnsupportedSystem("closed-form Liouville propagation needs a quadratic hamiltonian; '" +
                                system.label() + "' has a position-dependent Hessian");
    }

    const Eigen::MatrixXd omega = SymplecticForm(system.dof()).matrix();
    const auto grad = system.gradient(start);
    Eigen::VectorXd x0(dim);
    Eigen::VectorXd g0(dim);
    for (Index a = 0; a < dim; ++a) {
        x0[a] = start[static_cast<std::size_t>(a)];
        g0[a] = grad[static_cast<std::size_t>(a)];
    }
    // grad H(x) = hess * x + offset
    const Eigen::VectorXd offset = g0 - hess * x0;

    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
    generator.topLeftCorner(dim, dim) = omega * hess;
    generator.topRightCorner(dim, 1) = omega * offset;
    const Eigen::MatrixXd flow = (tau * generator).exp();

    Eigen::VectorXd aug(dim + 1);
    aug.head(dim) = x0;
    aug[dim] = 1.0;
    const Eigen::VectorXd out = flow * aug;
    std::vector<double> coords(out.data(), out.data() + dim);
    if (!all_finite(coords)) throw DivergenceError("Liouville propagation produced non-finite state");
    return PhasePoint(std::move(coords));
}

}  // namespace strobo::classical

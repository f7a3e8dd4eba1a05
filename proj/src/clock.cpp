#include "strobo/clock.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "strobo/errors.hpp"

namespace strobo::clock {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix, weights
// the squared first components of the normalized eigenvectors.
QuadratureRule golub_welsch(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diagonal, off_diagonal, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw SolverError("Golub-Welsch eigensolve failed");
    QuadratureRule rule;
    const auto n = diagonal.size();
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
        const double v0 = solver.eigenvectors()(0, i);
        rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    }
    return rule;
}

void normalize(QuadratureRule& rule) {
    const double total = std::accumulate(rule.weights.begin(), rule.weights.end(), 0.0);
    for (auto& w : rule.weights) w /= total;
}

// Probabilists' measure exp(-x^2/2)/sqrt(2 pi): a_k = 0, b_k = sqrt(k).
QuadratureRule gauss_hermite(std::size_t n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd off(static_cast<Eigen::Index>(n > 0 ? n - 1 : 0));
    for (Eigen::Index k = 0; k < off.size(); ++k) off[k] = std::sqrt(static_cast<double>(k + 1));
    return golub_welsch(diag, off);
}

// Uniform measure on [-1, 1]: b_k = k / sqrt(4k^2 - 1).
QuadratureRule gauss_legendre(std::size_t n) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd off(static_cast<Eigen::Index>(n > 0 ? n - 1 : 0));
    for (Eigen::Index k = 0; k < off.size(); ++k) {
        const double kk = static_cast<double>(k + 1);
        off[k] = kk / std::sqrt(4.0 * kk * kk - 1.0);
    }
    return golub_welsch(diag, off);
}

}  // namespace

ClockDistribution ClockDistribution::delta() { return {ClockKind::Delta, 0.0}; }

ClockDistribution ClockDistribution::gaussian(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw ContractViolation("gaussian clock needs gamma > 0");
    }
    return {ClockKind::Gaussian, gamma};
}

ClockDistribution ClockDistribution::uniform(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw ContractViolation("uniform clock needs width > 0");
    }
    return {ClockKind::Uniform, width};
}

double ClockDistribution::standard_deviation() const {
    switch (kind_) {
        case ClockKind::Delta: return 0.0;
        case ClockKind::Gaussian: return 1.0 / std::sqrt(2.0 * parameter_);
        case ClockKind::Uniform: return parameter_ / std::sqrt(12.0);
    }
    return 0.0;
}

std::string ClockDistribution::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case ClockKind::Delta: out << "delta"; break;
        case ClockKind::Gaussian: out << "gaussian(gamma=" << parameter_ << ")"; break;
        case ClockKind::Uniform: out << "uniform(width=" << parameter_ << ")"; break;
    }
    return out.str();
}

double density(const ClockDistribution& dist, double offset) {
    switch (dist.kind()) {
        case ClockKind::Delta:
            throw UnsupportedQuery("the delta clock has no pointwise density");
        case ClockKind::Gaussian: {
            const double g = dist.gamma();
            return std::sqrt(g / std::numbers::pi) * std::exp(-g * offset * offset);
        }
        case ClockKind::Uniform:
            return std::abs(offset) <= 0.5 * dist.width() ? 1.0 / dist.width() : 0.0;
    }
    return 0.0;
}

QuadratureRule quadrature(const ClockDistribution& dist, std::size_t node_count) {
    if (node_count == 0) throw ContractViolation("quadrature needs at least one node");
    QuadratureRule rule;
    switch (dist.kind()) {
        case ClockKind::Delta:
            return QuadratureRule{{0.0}, {1.0}};
        case ClockKind::Gaussian: {
            rule = gauss_hermite(node_count);
            const double sigma = dist.standard_deviation();
            for (auto& x : rule.nodes) x *= sigma;
            break;
        }
        case ClockKind::Uniform: {
            rule = gauss_legendre(node_count);
            for (auto& x : rule.nodes) x *= 0.5 * dist.width();
            break;
        }
    }
    normalize(rule);
    return rule;
}

}  // namespace strobo::clock

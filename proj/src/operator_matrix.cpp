#include "strobo/operator_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "strobo/errors.hpp"

namespace strobo {

const char* to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::Generic: return "generic";
        case BasisKind::AngularGrid: return "angular-grid";
        case BasisKind::PhaseSpaceGrid: return "phase-space-grid";
        case BasisKind::Hypercubic: return "hypercubic";
        case BasisKind::Spin: return "spin";
        case BasisKind::Tensor: return "tensor";
    }
    return "unknown";
}

namespace {

double max_abs(const SparseMatrix& m) {
    double best = 0.0;
    for (Index k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            best = std::max(best, std::abs(it.value()));
        }
    }
    return best;
}

}  // namespace

OperatorMatrix::OperatorMatrix(SparseMatrix entries, Basis basis)
    : entries_(std::move(entries)), basis_(std::move(basis)) {
    if (entries_.rows() != entries_.cols()) {
        throw ContractViolation("OperatorMatrix must be square");
    }
    if (entries_.rows() == 0) {
        throw ContractViolation("OperatorMatrix must have positive dimension");
    }
    entries_.makeCompressed();
    for (Index k = 0; k < entries_.nonZeros(); ++k) {
        const cplx z = entries_.valuePtr()[k];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ContractViolation("OperatorMatrix entries must be finite");
        }
    }
    const SparseMatrix diff = entries_ - SparseMatrix(entries_.adjoint());
    hermiticity_defect_ = max_abs(diff);
    hermitian_ = hermiticity_defect_ <= kHermitianTolerance;
}

OperatorMatrix OperatorMatrix::from_dense(const Eigen::MatrixXcd& entries, Basis basis) {
    // sparseView with zero reference keeps every entry that is not exactly zero
    return OperatorMatrix(SparseMatrix(entries.sparseView(cplx(0.0), 0.0)), std::move(basis));
}

OperatorMatrix OperatorMatrix::identity(Index dim, Basis basis) {
    SparseMatrix m(dim, dim);
    m.setIdentity();
    return OperatorMatrix(std::move(m), std::move(basis));
}

OperatorMatrix OperatorMatrix::zero(Index dim, Basis basis) {
    return OperatorMatrix(SparseMatrix(dim, dim), std::move(basis));
}

OperatorMatrix OperatorMatrix::diagonal(const Eigen::VectorXcd& values, Basis basis) {
    const Index n = values.size();
    SparseMatrix m(n, n);
    m.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Index i = 0; i < n; ++i) {
        if (values[i] != cplx(0.0)) m.insert(i, i) = values[i];
    }
    return OperatorMatrix(std::move(m), std::move(basis));
}

bool OperatorMatrix::is_diagonal() const {
    for (Index k = 0; k < entries_.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(entries_, k); it; ++it) {
            if (it.row() != it.col() && it.value() != cplx(0.0)) return false;
        }
    }
    return true;
}

double OperatorMatrix::max_norm() const { return max_abs(entries_); }

Eigen::VectorXcd OperatorMatrix::apply(const Eigen::VectorXcd& v) const {
    if (v.size() != dim()) {
        throw ContractViolation("vector dimension does not match operator");
    }
    return entries_ * v;
}

OperatorMatrix OperatorMatrix::with_basis(Basis basis) const {
    OperatorMatrix copy = *this;
    copy.basis_ = std::move(basis);
    return copy;
}

OperatorMatrix OperatorMatrix::adjoint() const {
    Basis b = basis_;
    b.circulant.reset();
    return OperatorMatrix(SparseMatrix(entries_.adjoint()), std::move(b));
}

namespace {

Basis merged_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
    Basis out;
    out.kind = a.basis().kind == b.basis().kind ? a.basis().kind : BasisKind::Generic;
    out.label = a.basis().label == b.basis().label ? a.basis().label : std::string{};
    return out;
}

void require_same_dim(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.dim() != b.dim()) throw ContractViolation("operator dimensions differ");
}

}  // namespace

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_dim(a, b);
    return OperatorMatrix(SparseMatrix(a.entries_ + b.entries_), merged_basis(a, b));
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_dim(a, b);
    return OperatorMatrix(SparseMatrix(a.entries_ - b.entries_), merged_basis(a, b));
}

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_dim(a, b);
    return OperatorMatrix(SparseMatrix(a.entries_ * b.entries_), merged_basis(a, b));
}

OperatorMatrix operator*(cplx scale, const OperatorMatrix& a) {
    Basis b = a.basis_;
    b.circulant.reset();
    return OperatorMatrix(SparseMatrix(scale * a.entries_), std::move(b));
}

double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b) {
    require_same_dim(a, b);
    return max_abs(SparseMatrix(a.sparse() - b.sparse()));
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a * b - b * a;
}

OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) {
    return a * b + b * a;
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
    SparseMatrix out = Eigen::kroneckerProduct(a.sparse(), b.sparse()).eval();
    Basis basis;
    basis.kind = BasisKind::Tensor;
    basis.label = a.basis().label + "(x)" + b.basis().label;
    return OperatorMatrix(std::move(out), std::move(basis));
}

OperatorMatrix twisted_circulant_matrix(std::span<const cplx> first_row, double twist,
                                        Basis basis) {
    TwistedCirculant pattern;
    pattern.size = first_row.size();
    pattern.twist = twist;
    for (std::size_t j = 0; j < first_row.size(); ++j) {
        if (first_row[j] != cplx(0.0)) pattern.stencil.emplace_back(j, first_row[j]);
    }
    return twisted_circulant_matrix(pattern, std::move(basis));
}

OperatorMatrix twisted_circulant_matrix(const TwistedCirculant& pattern, Basis basis) {
    const auto n = static_cast<Index>(pattern.size);
    if (n == 0) throw ContractViolation("circulant size must be positive");
    const cplx wrap = std::polar(1.0, 2.0 * std::numbers::pi * pattern.twist);
    std::vector<Eigen::Triplet<cplx>> triplets;
    triplets.reserve(pattern.stencil.size() * pattern.size);
    for (Index row = 0; row < n; ++row) {
        for (const auto& [offset, coeff] : pattern.stencil) {
            const Index target = row + static_cast<Index>(offset);
            if (target < n) {
                triplets.emplace_back(row, target, coeff);
            } else {
                triplets.emplace_back(row, target - n, coeff * wrap);
            }
        }
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    basis.circulant = pattern;
    return OperatorMatrix(std::move(m), std::move(basis));
}

}  // namespace strobo

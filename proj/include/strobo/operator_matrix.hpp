#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace strobo {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-12;

enum class BasisKind { Generic, AngularGrid, PhaseSpaceGrid, Hypercubic, Spin, Tensor };

const char* to_string(BasisKind kind);

// Twisted circulant: A(n, (n+j) mod N) = c_j, picking up exp(2*pi*i*twist)
// when n + j wraps past N. Plane waves exp(i*theta_m*n), theta_m =
// 2*pi*(m + twist)/N, diagonalize it.
struct TwistedCirculant {
    std::size_t size = 0;
    std::vector<std::pair<std::size_t, cplx>> stencil;  // (offset j, c_j), c_j != 0
    double twist = 0.0;
};

struct Basis {
    BasisKind kind = BasisKind::Generic;
    std::optional<TwistedCirculant> circulant;
    std::string label;
};

// Square complex matrix with basis metadata. Storage is sparse; dense views
// are produced on demand for the direct solvers. Immutable after construction.
class OperatorMatrix {
public:
    OperatorMatrix() = default;
    explicit OperatorMatrix(SparseMatrix entries, Basis basis = {});

    static OperatorMatrix from_dense(const Eigen::MatrixXcd& entries, Basis basis = {});
    static OperatorMatrix identity(Index dim, Basis basis = {});
    static OperatorMatrix zero(Index dim, Basis basis = {});
    static OperatorMatrix diagonal(const Eigen::VectorXcd& values, Basis basis = {});

    Index dim() const { return entries_.rows(); }
    const SparseMatrix& sparse() const { return entries_; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries_); }
    const Basis& basis() const { return basis_; }

    bool hermitian() const { return hermitian_; }
    double hermiticity_defect() const { return hermiticity_defect_; }
    bool is_diagonal() const;
    double max_norm() const;

    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

    OperatorMatrix with_basis(Basis basis) const;
    OperatorMatrix adjoint() const;

    friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
    friend OperatorMatrix operator*(cplx scale, const OperatorMatrix& a);

private:
    SparseMatrix entries_;
    Basis basis_;
    bool hermitian_ = true;
    double hermiticity_defect_ = 0.0;
};

double max_abs_difference(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

// Materializes a twisted circulant from its full first row. The returned
// operator keeps the stencil so solvers can take the Fourier fast path.
OperatorMatrix twisted_circulant_matrix(std::span<const cplx> first_row, double twist,
                                        Basis basis = {});
OperatorMatrix twisted_circulant_matrix(const TwistedCirculant& pattern, Basis basis = {});

}  // namespace strobo

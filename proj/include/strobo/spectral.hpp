#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strobo/operator_matrix.hpp"

namespace strobo::spectral {

struct SpectrumReport {
    std::vector<cplx> eigenvalues;  // sorted by real part, then imaginary part
    bool hermitian = false;
    double residual_max = 0.0;      // max over pairs of ||A v - lambda v||_2, ||v|| = 1
    std::string method;
    // Columns aligned with `eigenvalues`; only filled on request.
    std::optional<Eigen::MatrixXcd> eigenvectors;
};

enum class EigMethod { Auto, Dense, Circulant, Diagonal };

inline constexpr Index kDenseEigCap = Index{1} << 14;

// Full spectrum with per-pair residual certification. Auto picks the diagonal
// or twisted-circulant fast path when the operator carries that structure,
// otherwise the dense Hermitian or general solver.
SpectrumReport eig(const OperatorMatrix& a, EigMethod method = EigMethod::Auto,
                   bool keep_vectors = false);

// Eigenvalues of the twisted circulant with the given first row, evaluated on
// the twisted Fourier frequencies 2*pi*(m + twist)/N. Entry m-1 holds label m,
// m = 1..N.
std::vector<cplx> circulant_eig(std::span<const cplx> first_row, double twist);

void sort_spectrum(std::vector<cplx>& values);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of log(y) against log(x).
LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ConvergenceReport {
    std::vector<std::size_t> Ns;
    std::vector<double> errors;
    std::vector<std::size_t> fit_Ns;  // the largest decade of N
    double fitted_order = 0.0;
    double r_squared = 0.0;
    bool accepted = false;
    std::string diagnosis;
};

using OperatorBuilder = std::function<OperatorMatrix(std::size_t)>;
using ReferenceValues = std::function<std::vector<cplx>(std::size_t)>;

// For every N: build, solve, and take the worst distance from a reference
// value to its nearest eigenvalue. The slope is fitted on log-log axes over
// the Ns within a factor 10 of the largest one. Non-monotone, degenerate
// (errors at rounding level) or poorly fitting data is rejected but reported.
ConvergenceReport convergence_study(const OperatorBuilder& builder,
                                    const ReferenceValues& reference,
                                    std::span<const std::size_t> Ns);

inline constexpr double kDegenerateError = 1e-13;
inline constexpr double kMinRSquared = 0.99;

}  // namespace strobo::spectral

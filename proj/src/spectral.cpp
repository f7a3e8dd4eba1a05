#include "strobo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "strobo/errors.hpp"
#include "strobo/parallel.hpp"

namespace strobo::spectral {

namespace {

bool spectral_less(const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

double certify_threshold(const OperatorMatrix& a) {
    return 1e-9 * a.max_norm() + std::numeric_limits<double>::min();
}

void check_certificate(const SpectrumReport& report, const OperatorMatrix& a) {
    if (!(report.residual_max <= certify_threshold(a))) {
        std::ostringstream msg;
        msg << report.method << " eigensolver failed certification: residual "
            << report.residual_max << " exceeds 1e-9 * max-norm " << a.max_norm()
            << " (dim " << a.dim() << ")";
        throw SolverError(msg.str());
    }
    if (report.hermitian) {
        for (const auto& z : report.eigenvalues) {
            if (std::abs(z.imag()) > 1e-10) {
                throw SolverError("hermitian spectrum has an imaginary part above 1e-10");
            }
        }
    }
}

// Sorts eigenvalues and, if present, the matching eigenvector columns.
void finalize(SpectrumReport& report) {
    const std::size_t n = report.eigenvalues.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return spectral_less(report.eigenvalues[i], report.eigenvalues[j]);
    });
    std::vector<cplx> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = report.eigenvalues[order[i]];
    report.eigenvalues = std::move(sorted);
    if (report.eigenvectors) {
        Eigen::MatrixXcd reordered(report.eigenvectors->rows(), report.eigenvectors->cols());
        for (std::size_t i = 0; i < n; ++i) {
            reordered.col(static_cast<Index>(i)) = report.eigenvectors->col(static_cast<Index>(order[i]));
        }
        report.eigenvectors = std::move(reordered);
    }
}

// 2 pi (m + twist) j / n, reduced modulo 2 pi before scaling so large j keep
// full precision.
double twisted_phase(std::size_t m, double twist, std::size_t j, std::size_t n) {
    const double turns = static_cast<double>((m * j) % n) + std::fmod(twist * static_cast<double>(j),
                                                                      static_cast<double>(n));
    return 2.0 * std::numbers::pi * turns / static_cast<double>(n);
}

Eigen::MatrixXcd random_unitary(Index n) {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd g(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) g(i, j) = cplx(gauss(rng), gauss(rng));
    return Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
}

SpectrumReport diagonal_path(const OperatorMatrix& a, bool keep_vectors) {
    SpectrumReport report;
    report.method = "diagonal";
    report.hermitian = a.hermitian();
    const Index n = a.dim();
    const Eigen::VectorXcd diag = a.sparse().diagonal();
    report.eigenvalues.assign(diag.data(), diag.data() + n);
    // The unit vector e_i is certified against the stored matrix column.
    double worst = 0.0;
    for (Index i = 0; i < n; ++i) {
        Eigen::VectorXcd col = a.sparse().col(i);
        col[i] -= diag[i];
        worst = std::max(worst, col.norm());
    }
    report.residual_max = worst;
    if (keep_vectors) report.eigenvectors = Eigen::MatrixXcd::Identity(n, n);
    return report;
}

SpectrumReport circulant_path(const OperatorMatrix& a, bool keep_vectors) {
    const auto& pattern = *a.basis().circulant;
    if (static_cast<Index>(pattern.size) != a.dim()) {
        throw ContractViolation("circulant metadata does not match operator dimension");
    }
    if (max_abs_difference(a, twisted_circulant_matrix(pattern)) > 1e-12 * (1.0 + a.max_norm())) {
        throw ContractViolation("circulant metadata does not match operator entries");
    }
    std::vector<cplx> row(pattern.size, cplx(0.0));
    for (const auto& [offset, coeff] : pattern.stencil) row[offset] = coeff;

    SpectrumReport report;
    report.method = "circulant";
    report.hermitian = a.hermitian();
    report.eigenvalues = circulant_eig(row, pattern.twist);

    const auto n = static_cast<Index>(pattern.size);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    if (keep_vectors) report.eigenvectors = Eigen::MatrixXcd(n, n);
    double worst = 0.0;
    Eigen::VectorXcd v(n);
    for (Index m = 1; m <= n; ++m) {
        for (Index j = 0; j < n; ++j) {
            v[j] = std::polar(norm, twisted_phase(static_cast<std::size_t>(m), pattern.twist,
                                                  static_cast<std::size_t>(j), pattern.size));
        }
        const Eigen::VectorXcd r = a.sparse() * v - report.eigenvalues[static_cast<std::size_t>(m - 1)] * v;
        worst = std::max(worst, r.norm());
        if (keep_vectors) report.eigenvectors->col(m - 1) = v;
    }
    report.residual_max = worst;
    return report;
}

double max_residual(const Eigen::MatrixXcd& dense, const std::vector<cplx>& values,
                    const Eigen::MatrixXcd& vectors) {
    double worst = 0.0;
    for (Index i = 0; i < vectors.cols(); ++i) {
        const Eigen::VectorXcd v = vectors.col(i).normalized();
        const Eigen::VectorXcd r = dense * v - values[static_cast<std::size_t>(i)] * v;
        worst = std::max(worst, r.norm());
    }
    return worst;
}

void hermitian_solve(const Eigen::MatrixXcd& dense, SpectrumReport& report, Eigen::MatrixXcd& vectors) {
    report.method = "dense-hermitian";
    // Average with the adjoint so the solver sees an exactly Hermitian input.
    const Eigen::MatrixXcd sym = 0.5 * (dense + dense.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw SolverError("self-adjoint eigensolver did not converge (dim " +
                          std::to_string(dense.rows()) + ")");
    }
    const auto& values = solver.eigenvalues();
    report.eigenvalues.clear();
    for (Index i = 0; i < values.size(); ++i) report.eigenvalues.emplace_back(values[i], 0.0);
    vectors = solver.eigenvectors();
}

// Normal A = H + iK with [H, K] = 0: a generic real combination H + alpha K
// shares the eigenvectors, and the eigenvalues are Rayleigh quotients.
bool normal_solve(const Eigen::MatrixXcd& dense, double scale, SpectrumReport& report,
                  Eigen::MatrixXcd& vectors) {
    const Eigen::MatrixXcd adj = dense.adjoint();
    if ((dense * adj - adj * dense).cwiseAbs().maxCoeff() > 1e-12 * scale * scale) return false;
    constexpr double kAlpha = 0.6180339887498949;
    const Eigen::MatrixXcd h = 0.5 * (dense + adj);
    const Eigen::MatrixXcd k = cplx(0.0, -0.5) * (dense - adj);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h + kAlpha * k);
    if (solver.info() != Eigen::Success) return false;
    vectors = solver.eigenvectors();
    report.eigenvalues.resize(static_cast<std::size_t>(vectors.cols()));
    for (Index i = 0; i < vectors.cols(); ++i) {
        report.eigenvalues[static_cast<std::size_t>(i)] = vectors.col(i).dot(dense * vectors.col(i));
    }
    report.method = "dense-normal";
    return max_residual(dense, report.eigenvalues, vectors) <= 1e-9 * scale;
}

void general_solve(const Eigen::MatrixXcd& dense, SpectrumReport& report, Eigen::MatrixXcd& vectors) {
    report.method = "dense-general";
    // Shifts of twisted cyclic structure stall the Hessenberg QR sweep, so
    // the iteration runs on a fixed random unitary conjugate.
    const Eigen::MatrixXcd q = random_unitary(dense.rows());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(q.adjoint() * dense * q);
    if (solver.info() != Eigen::Success) {
        throw SolverError("complex eigensolver did not converge (dim " + std::to_string(dense.rows()) +
                          ", QR iterations exhausted)");
    }
    const auto& values = solver.eigenvalues();
    report.eigenvalues.assign(values.data(), values.data() + values.size());
    vectors = q * solver.eigenvectors();
}

SpectrumReport dense_path(const OperatorMatrix& a, bool keep_vectors) {
    if (a.dim() > kDenseEigCap) {
        throw ResourceError("dense eigensolve capped at dimension " + std::to_string(kDenseEigCap));
    }
    const Eigen::MatrixXcd dense = a.dense();
    SpectrumReport report;
    report.hermitian = a.hermitian();
    Eigen::MatrixXcd vectors;
    if (a.hermitian()) {
        hermitian_solve(dense, report, vectors);
    } else if (!normal_solve(dense, a.max_norm(), report, vectors)) {
        general_solve(dense, report, vectors);
    }
    report.residual_max = max_residual(dense, report.eigenvalues, vectors);
    if (keep_vectors) report.eigenvectors = std::move(vectors);
    return report;
}

}  // namespace

void sort_spectrum(std::vector<cplx>& values) {
    std::stable_sort(values.begin(), values.end(), spectral_less);
}

std::vector<cplx> circulant_eig(std::span<const cplx> first_row, double twist) {
    const std::size_t n = first_row.size();
    std::vector<cplx> out(n);
    for (std::size_t m = 1; m <= n; ++m) {
        cplx sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (first_row[j] != cplx(0.0)) {
                sum += first_row[j] * std::polar(1.0, twisted_phase(m, twist, j, n));
            }
        }
        out[m - 1] = sum;
    }
    return out;
}

SpectrumReport eig(const OperatorMatrix& a, EigMethod method, bool keep_vectors) {
    if (method == EigMethod::Auto) {
        if (a.is_diagonal()) {
            method = EigMethod::Diagonal;
        } else if (a.basis().circulant) {
            method = EigMethod::Circulant;
        } else {
            method = EigMethod::Dense;
        }
    }
    SpectrumReport report;
    switch (method) {
        case EigMethod::Diagonal:
            if (!a.is_diagonal()) throw ContractViolation("diagonal eigensolve on a non-diagonal matrix");
            report = diagonal_path(a, keep_vectors);
            break;
        case EigMethod::Circulant:
            if (!a.basis().circulant) {
                throw ContractViolation("circulant eigensolve needs circulant metadata");
            }
            report = circulant_path(a, keep_vectors);
            break;
        case EigMethod::Dense:
        case EigMethod::Auto:
            report = dense_path(a, keep_vectors);
            break;
    }
    check_certificate(report, a);
    if (report.hermitian) {
        for (auto& z : report.eigenvalues) z = cplx(z.real(), 0.0);
    }
    finalize(report);
    return report;
}

LogLogFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ContractViolation("log-log fit needs at least two paired samples");
    }
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double cov = sxy - sx * sy / n;
    const double var_x = sxx - sx * sx / n;
    const double var_y = syy - sy * sy / n;
    LogLogFit fit;
    fit.slope = cov / var_x;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r_squared = var_y > 0.0 ? cov * cov / (var_x * var_y) : 1.0;
    return fit;
}

ConvergenceReport convergence_study(const OperatorBuilder& builder,
                                    const ReferenceValues& reference,
                                    std::span<const std::size_t> Ns) {
    if (Ns.size() < 2) throw ContractViolation("convergence study needs at least two grid sizes");
    for (std::size_t i = 1; i < Ns.size(); ++i) {
        if (Ns[i] <= Ns[i - 1]) throw ContractViolation("grid sizes must be strictly increasing");
    }

    ConvergenceReport report;
    report.Ns.assign(Ns.begin(), Ns.end());
    report.errors.assign(Ns.size(), 0.0);
    parallel_for(Ns.size(), [&](std::size_t i) {
        const OperatorMatrix op = builder(Ns[i]);
        const SpectrumReport spectrum = eig(op);
        double worst = 0.0;
        for (const cplx& target : reference(Ns[i])) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const cplx& lambda : spectrum.eigenvalues) {
                nearest = std::min(nearest, std::abs(lambda - target));
            }
            worst = std::max(worst, nearest);
        }
        report.errors[i] = worst;
    });

    const std::size_t largest = report.Ns.back();
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < report.Ns.size(); ++i) {
        if (10 * report.Ns[i] >= largest) {
            report.fit_Ns.push_back(report.Ns[i]);
            fx.push_back(static_cast<double>(report.Ns[i]));
            fy.push_back(report.errors[i]);
        }
    }
    if (fx.size() < 2) {
        report.fit_Ns = report.Ns;
        fx.clear();
        fy.clear();
        for (std::size_t i = 0; i < report.Ns.size(); ++i) {
            fx.push_back(static_cast<double>(report.Ns[i]));
            fy.push_back(report.errors[i]);
        }
    }

    const bool degenerate = std::any_of(report.errors.begin(), report.errors.end(),
                                        [](double e) { return !(e > kDegenerateError); });
    if (degenerate) {
        report.fitted_order = std::numeric_limits<double>::quiet_NaN();
        report.r_squared = std::numeric_limits<double>::quiet_NaN();
        report.diagnosis = "degenerate: errors at rounding level, no convergence order to fit";
        return report;
    }

    const LogLogFit fit = fit_loglog(fx, fy);
    report.fitted_order = fit.slope;
    report.r_squared = fit.r_squared;

    for (std::size_t i = 1; i < report.errors.size(); ++i) {
        if (!(report.errors[i] < report.errors[i - 1])) {
            report.diagnosis = "non-monotone errors at N = " + std::to_string(report.Ns[i]);
            return report;
        }
    }
    if (fit.r_squared < kMinRSquared) {
        report.diagnosis = "poor log-log fit";
        return report;
    }
    report.accepted = true;
    report.diagnosis = "ok";
    return report;
}

}  // namespace strobo::spectral

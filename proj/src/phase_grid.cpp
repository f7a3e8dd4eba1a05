#include "strobo/phase_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

#include "strobo/errors.hpp"

namespace strobo::lattice {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx minus_i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, -1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, 1.0};
    }
}

}  // namespace

PhaseGrid::PhaseGrid(std::vector<std::size_t> sizes, std::vector<double> lengths)
    : sizes_(std::move(sizes)), lengths_(std::move(lengths)) {
    if (sizes_.empty() || sizes_.size() != lengths_.size()) {
        throw ContractViolation("phase grid needs one size and one length per axis");
    }
    strides_.assign(sizes_.size(), 1);
    double total = 1.0;
    for (std::size_t a = sizes_.size(); a-- > 0;) {
        if (sizes_[a] < 2) throw ContractViolation("each grid axis needs at least 2 points");
        if (!(lengths_[a] > 0.0)) throw ContractViolation("grid lengths must be positive");
        strides_[a] = static_cast<std::size_t>(total);
        total *= static_cast<double>(sizes_[a]);
    }
    if (total > static_cast<double>(Index{1} << 30)) throw ResourceError("phase grid too large");
    dim_ = static_cast<Index>(total);
}

PhaseGrid PhaseGrid::uniform(std::size_t axes, std::size_t points, double length) {
    return PhaseGrid(std::vector<std::size_t>(axes, points), std::vector<double>(axes, length));
}

double PhaseGrid::spacing(std::size_t axis) const {
    return lengths_.at(axis) / static_cast<double>(sizes_.at(axis));
}

double PhaseGrid::coordinate(std::size_t axis, std::size_t j) const {
    const auto m = static_cast<double>(sizes_.at(axis));
    return (static_cast<double>(j) - std::floor(m / 2.0)) * spacing(axis);
}

std::vector<std::size_t> PhaseGrid::unflatten(Index flat) const {
    std::vector<std::size_t> idx(sizes_.size());
    auto rest = static_cast<std::size_t>(flat);
    for (std::size_t a = 0; a < sizes_.size(); ++a) {
        idx[a] = rest / strides_[a];
        rest %= strides_[a];
    }
    return idx;
}

Eigen::MatrixXcd fourier_derivative(std::size_t points, double length) {
    const auto m = static_cast<Index>(points);
    const double h = length / static_cast<double>(points);
    // Circulant: column offset d carries (1/M) sum_k (i kappa_k) exp(i kappa_k d h)
    // over the symmetric frequency set, Nyquist excluded.
    Eigen::VectorXcd kernel = Eigen::VectorXcd::Zero(m);
    const long half = static_cast<long>(points) / 2;
    const long lo = (points % 2 == 0) ? -half + 1 : -half;
    for (Index d = 0; d < m; ++d) {
        cplx sum = 0.0;
        for (long k = lo; k <= half; ++k) {
            if (points % 2 == 0 && k == half) continue;
            const double kappa = kTwoPi * static_cast<double>(k) / length;
            sum += cplx(0.0, kappa) * std::polar(1.0, kappa * static_cast<double>(d) * h);
        }
        kernel[d] = cplx(sum.real() / static_cast<double>(m), 0.0);
    }
    Eigen::MatrixXcd out(m, m);
    for (Index r = 0; r < m; ++r) {
        for (Index c = 0; c < m; ++c) {
            // (D f)(r) = sum_c kernel(r - c) f(c)
            out(r, c) = kernel[((r - c) % m + m) % m];
        }
    }
    return out;
}

GridOperator::GridOperator(PhaseGrid grid, std::vector<Term> terms)
    : grid_(std::move(grid)), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.derivative_powers.size() != grid_.axes()) {
            throw ContractViolation("term derivative powers must match grid axes");
        }
        if (t.multiplier_axis >= static_cast<int>(grid_.axes())) {
            throw ContractViolation("multiplier axis out of range");
        }
        for (std::size_t a = 0; a < grid_.axes(); ++a) {
            const int k = t.derivative_powers[a];
            if (k < 0) throw ContractViolation("derivative powers must be nonnegative");
            if (k == 0 || powers_.count({a, k})) continue;
            Eigen::MatrixXcd d = fourier_derivative(grid_.size(a), grid_.length(a));
            Eigen::MatrixXcd p = d;
            for (int i = 1; i < k; ++i) p = (p * d).eval();
            powers_.emplace(std::make_pair(a, k), std::move(p));
        }
    }
}

const Eigen::MatrixXcd& GridOperator::derivative_power(std::size_t axis, int power) const {
    return powers_.at({axis, power});
}

Eigen::VectorXcd GridOperator::apply(const Eigen::VectorXcd& v) const {
    if (v.size() != dim()) throw ContractViolation("vector dimension does not match grid operator");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
    Eigen::VectorXcd work;
    for (const auto& term : terms_) {
        work = v;
        for (std::size_t a = 0; a < grid_.axes(); ++a) {
            const int k = term.derivative_powers[a];
            if (k == 0) continue;
            const auto& mat = derivative_power(a, k);
            const auto m = static_cast<Index>(grid_.size(a));
            const auto stride = static_cast<Index>(grid_.stride(a));
            const Index block = m * stride;
            Eigen::VectorXcd line(m);
            for (Index outer = 0; outer < dim(); outer += block) {
                for (Index inner = 0; inner < stride; ++inner) {
                    const Index base = outer + inner;
                    for (Index j = 0; j < m; ++j) line[j] = work[base + j * stride];
                    const Eigen::VectorXcd mapped = mat * line;
                    for (Index j = 0; j < m; ++j) work[base + j * stride] = mapped[j];
                }
            }
        }
        if (term.multiplier_axis >= 0) {
            const auto axis = static_cast<std::size_t>(term.multiplier_axis);
            for (Index i = 0; i < dim(); ++i) {
                const auto j = (static_cast<std::size_t>(i) / grid_.stride(axis)) % grid_.size(axis);
                work[i] *= grid_.coordinate(axis, j);
            }
        }
        out += term.coeff * work;
    }
    return out;
}

OperatorMatrix GridOperator::to_matrix() const {
    if (dim() > kMaxGridOperatorDim) {
        throw ResourceError("grid operator materialization capped at dimension " +
                            std::to_string(kMaxGridOperatorDim));
    }
    SparseMatrix total(dim(), dim());
    for (const auto& term : terms_) {
        SparseMatrix factor(1, 1);
        factor.insert(0, 0) = term.coeff;
        for (std::size_t a = 0; a < grid_.axes(); ++a) {
            const auto m = static_cast<Index>(grid_.size(a));
            SparseMatrix axis_op(m, m);
            const int k = term.derivative_powers[a];
            if (k == 0) {
                axis_op.setIdentity();
            } else {
                axis_op = derivative_power(a, k).sparseView(cplx(0.0), 0.0);
            }
            if (term.multiplier_axis == static_cast<int>(a)) {
                SparseMatrix diag(m, m);
                for (Index j = 0; j < m; ++j) diag.insert(j, j) = grid_.coordinate(a, static_cast<std::size_t>(j));
                axis_op = (diag * axis_op).eval();
            }
            factor = SparseMatrix(Eigen::kroneckerProduct(factor, axis_op).eval());
        }
        total += factor;
    }
    Basis basis;
    basis.kind = BasisKind::PhaseSpaceGrid;
    basis.label = "phase-grid";
    return OperatorMatrix(std::move(total), std::move(basis));
}

double GridOperator::norm_bound() const {
    double bound = 0.0;
    for (const auto& term : terms_) {
        double t = std::abs(term.coeff);
        for (std::size_t a = 0; a < grid_.axes(); ++a) {
            if (term.derivative_powers[a] > 0) {
                const double kmax = std::numbers::pi / grid_.spacing(a);
                t *= std::pow(kmax, term.derivative_powers[a]);
            }
        }
        if (term.multiplier_axis >= 0) t *= 0.5 * grid_.length(static_cast<std::size_t>(term.multiplier_axis));
        bound += t;
    }
    return bound;
}

GridOperator build_effective_hamiltonian(const classical::ClassicalSystem& system,
                                         const PhaseGrid& grid) {
    const auto& grads = system.gradient_polynomials();
    if (!grads) {
        throw UnsupportedSystem("'" + system.label() +
                                "' has no polynomial gradient; the lattice builder needs one");
    }
    if (grid.axes() != system.phase_dim()) {
        throw ContractViolation("grid must have one axis per phase-space coordinate");
    }
    if (grid.dim() > kMaxGridOperatorDim) {
        throw ResourceError("emergent Hamiltonian grid capped at dimension " +
                            std::to_string(kMaxGridOperatorDim));
    }
    const classical::SymplecticForm omega(system.dof());
    std::vector<GridOperator::Term> terms;
    for (std::size_t a = 0; a < system.phase_dim(); ++a) {
        for (std::size_t b = 0; b < system.phase_dim(); ++b) {
            const double w = omega.entry(a, b);
            if (w == 0.0) continue;
            for (const auto& mono : (*grads)[b].terms()) {
                int degree = 0;
                for (int k : mono.powers) degree += k;
                terms.push_back(GridOperator::Term{-w * mono.coeff * minus_i_power(degree),
                                                   static_cast<int>(a), mono.powers});
            }
        }
    }
    return GridOperator(grid, std::move(terms));
}

GridOperator observable_operator(const Polynomial& observable, const PhaseGrid& grid) {
    if (observable.variables() != grid.axes()) {
        throw ContractViolation("observable must have one variable per grid axis");
    }
    for (std::size_t a = 0; a < grid.axes(); ++a) {
        const int k = observable.max_power(a);
        if (k > 0 && 2 * static_cast<std::size_t>(k + 1) > grid.size(a)) {
            throw ResolutionError("power " + std::to_string(k) + " on axis " + std::to_string(a) +
                                  " needs at least " + std::to_string(2 * (k + 1)) + " points");
        }
    }
    std::vector<GridOperator::Term> terms;
    for (const auto& mono : observable.terms()) {
        int degree = 0;
        for (int k : mono.powers) degree += k;
        terms.push_back(GridOperator::Term{mono.coeff * minus_i_power(degree), -1, mono.powers});
    }
    return GridOperator(grid, std::move(terms));
}

double commutator_residual(const GridOperator& a, const GridOperator& b, const Eigen::VectorXcd& v) {
    const Eigen::VectorXcd ab = a.apply(b.apply(v));
    const Eigen::VectorXcd ba = b.apply(a.apply(v));
    return (ab - ba).norm() / v.norm();
}

std::vector<double> wave_vector(const PhaseGrid& grid, std::span<const int> wave_numbers) {
    if (wave_numbers.size() != grid.axes()) throw ContractViolation("one wave number per axis");
    std::vector<double> kappa(grid.axes());
    for (std::size_t a = 0; a < grid.axes(); ++a) {
        if (2 * static_cast<std::size_t>(std::abs(wave_numbers[a])) >= grid.size(a)) {
            throw ResolutionError("wave number beyond the grid band limit");
        }
        kappa[a] = kTwoPi * wave_numbers[a] / grid.length(a);
    }
    return kappa;
}

Eigen::VectorXcd plane_wave(const PhaseGrid& grid, std::span<const int> wave_numbers) {
    const auto kappa = wave_vector(grid, wave_numbers);
    Eigen::VectorXcd v(grid.dim());
    for (Index i = 0; i < grid.dim(); ++i) {
        const auto idx = grid.unflatten(i);
        double phase = 0.0;
        for (std::size_t a = 0; a < grid.axes(); ++a) phase += kappa[a] * grid.coordinate(a, idx[a]);
        v[i] = std::polar(1.0, phase);
    }
    return v;
}

Eigen::VectorXcd gaussian_state(const PhaseGrid& grid, double sigma) {
    if (!(sigma > 0.0)) throw ContractViolation("gaussian width must be positive");
    Eigen::VectorXcd v(grid.dim());
    for (Index i = 0; i < grid.dim(); ++i) {
        const auto idx = grid.unflatten(i);
        double r2 = 0.0;
        for (std::size_t a = 0; a < grid.axes(); ++a) {
            const double x = grid.coordinate(a, idx[a]);
            r2 += x * x;
        }
        v[i] = std::exp(-r2 / (4.0 * sigma * sigma));
    }
    return v / v.norm();
}

Eigen::VectorXcd evolve(const GridOperator& a, const Eigen::VectorXcd& v, double tau) {
    const double bound = a.norm_bound();
    const auto substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(2.0 * std::abs(tau) * bound)));
    const double dt = tau / static_cast<double>(substeps);
    Eigen::VectorXcd state = v;
    for (std::size_t s = 0; s < substeps; ++s) {
        Eigen::VectorXcd term = state;
        Eigen::VectorXcd sum = state;
        for (int k = 1; k <= 40; ++k) {
            term = a.apply(term) * cplx(0.0, -dt / k);
            sum += term;
            if (term.norm() <= 1e-17 * sum.norm()) break;
        }
        state = std::move(sum);
    }
    return state;
}

}  // namespace strobo::lattice

#include "strobo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "strobo/errors.hpp"
#include "strobo/spectral.hpp"

namespace strobo::lattice {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Basis angular_basis(const AngularGrid& grid, const char* which) {
    Basis b;
    b.kind = BasisKind::AngularGrid;
    b.label = std::string(which) + "(N=" + std::to_string(grid.N) + ")";
    return b;
}

}  // namespace

AngularGrid AngularGrid::make(std::size_t N, double omega, double delta) {
    if (N < 2) throw ContractViolation("angular grid needs N >= 2");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ContractViolation("Omega must be positive");
    if (!std::isfinite(delta)) throw ContractViolation("twist phase must be finite");
    return AngularGrid{N, omega, delta};
}

double AngularGrid::site(std::size_t n) const {
    return kTwoPi * static_cast<double>(n) / static_cast<double>(N);
}

double AngularGrid::scale() const { return omega * static_cast<double>(N) / kTwoPi; }

OperatorMatrix build_case_a(const AngularGrid& grid) {
    const double c = grid.scale();
    std::vector<cplx> row(grid.N, cplx(0.0));
    row[0] = cplx(0.0, c);
    row[1] = cplx(0.0, -c);
    return twisted_circulant_matrix(row, grid.delta, angular_basis(grid, "case-a"));
}

OperatorMatrix build_case_b(const AngularGrid& grid) {
    const double half = 0.5 * grid.scale();
    std::vector<cplx> row(grid.N, cplx(0.0));
    row[1] += cplx(0.0, -half);
    // backward hop: offset N-1, which wraps on every row but the first
    row[grid.N - 1] += cplx(0.0, half) * std::polar(1.0, -kTwoPi * grid.delta);
    return twisted_circulant_matrix(row, grid.delta, angular_basis(grid, "case-b"));
}

cplx case_a_eigenvalue(const AngularGrid& grid, long m) {
    const double theta = kTwoPi * (static_cast<double>(m) + grid.delta) / static_cast<double>(grid.N);
    return cplx(0.0, grid.scale()) * (1.0 - std::polar(1.0, theta));
}

double case_b_eigenvalue(const AngularGrid& grid, long m) {
    const double theta = kTwoPi * (static_cast<double>(m) + grid.delta) / static_cast<double>(grid.N);
    return grid.scale() * std::sin(theta);
}

std::vector<cplx> case_a_spectrum(const AngularGrid& grid) {
    std::vector<cplx> out;
    out.reserve(grid.N);
    for (std::size_t m = 1; m <= grid.N; ++m) out.push_back(case_a_eigenvalue(grid, static_cast<long>(m)));
    return out;
}

std::vector<double> case_b_spectrum(const AngularGrid& grid) {
    std::vector<double> out;
    out.reserve(grid.N);
    for (std::size_t m = 1; m <= grid.N; ++m) out.push_back(case_b_eigenvalue(grid, static_cast<long>(m)));
    return out;
}

Eigen::VectorXcd angular_eigenvector(const AngularGrid& grid, long m) {
    const auto n = static_cast<Index>(grid.N);
    const double norm = 1.0 / std::sqrt(static_cast<double>(grid.N));
    Eigen::VectorXcd v(n);
    for (Index i = 0; i < n; ++i) {
        const double phi = grid.site(static_cast<std::size_t>(i + 1));
        v[i] = std::polar(norm, (static_cast<double>(m) + grid.delta) * phi);
    }
    return v;
}

std::vector<cplx> match_to_labels(std::span<const cplx> numeric, std::span<const cplx> formula) {
    if (numeric.size() != formula.size()) {
        throw ContractViolation("cannot match spectra of different sizes");
    }
    std::vector<bool> used(numeric.size(), false);
    std::vector<cplx> out(formula.size());
    for (std::size_t i = 0; i < formula.size(); ++i) {
        std::size_t best = numeric.size();
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < numeric.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(numeric[j] - formula[i]);
            if (d < best_dist) {
                best_dist = d;
                best = j;
            }
        }
        used[best] = true;
        out[i] = numeric[best];
    }
    return out;
}

HypercubicLattice HypercubicLattice::make(std::size_t N, double spacing, std::size_t dims,
                                          double mass, std::vector<double> delta_x,
                                          std::vector<double> delta_xbar) {
    if (N < 1) throw ContractViolation("lattice needs N >= 1");
    if (!(spacing > 0.0)) throw ContractViolation("lattice spacing must be positive");
    if (dims != 2 && dims != 4) throw ContractViolation("spacetime dimension must be 2 or 4");
    if (!(mass > 0.0)) throw ContractViolation("mass must be positive");
    if (delta_x.size() != dims || delta_xbar.size() != dims) {
        throw ContractViolation("phase vectors must have one entry per spacetime dimension");
    }
    return HypercubicLattice{N, spacing, dims, mass, std::move(delta_x), std::move(delta_xbar)};
}

cplx free_particle_energy(const HypercubicLattice& lat, std::span<const int> k_x,
                          std::span<const int> k_xbar) {
    if (k_x.size() != lat.dims || k_xbar.size() != lat.dims) {
        throw ContractViolation("mode labels must have one entry per spacetime dimension");
    }
    const double n = static_cast<double>(lat.N);
    cplx bracket = 0.0;
    for (std::size_t mu = 0; mu < lat.dims; ++mu) {
        // l * 2 pi (k + delta) / L = 2 pi (k + delta) / N
        const double ax = kTwoPi * (k_x[mu] + lat.delta_x[mu]) / n;
        const double axbar = kTwoPi * (k_xbar[mu] + lat.delta_xbar[mu]) / n;
        const cplx term = (std::polar(1.0, ax) - 1.0) * (std::polar(1.0, axbar) - 1.0);
        bracket += mu == 0 ? term : -term;
    }
    return -bracket / (lat.mass * lat.spacing * lat.spacing);
}

void for_each_free_particle_mode(const HypercubicLattice& lat,
                                 const std::function<void(const FreeParticleMode&)>& visit) {
    if (lat.dims == 4 && lat.N > 16) {
        throw ResourceError("4-dimensional mode enumeration is capped at N = 16 per axis");
    }
    const double prefactor = std::pow(kTwoPi / lat.box_length(), 2) / lat.mass;
    const std::size_t slots = 2 * lat.dims;
    std::vector<int> labels(slots, 1);
    FreeParticleMode mode;
    mode.k_x.resize(lat.dims);
    mode.k_xbar.resize(lat.dims);
    const int top = static_cast<int>(lat.N);
    while (true) {
        std::copy_n(labels.begin(), lat.dims, mode.k_x.begin());
        std::copy_n(labels.begin() + static_cast<long>(lat.dims), lat.dims, mode.k_xbar.begin());
        double symbol = 0.0;
        for (std::size_t mu = 0; mu < lat.dims; ++mu) {
            const double prod = (mode.k_x[mu] + lat.delta_x[mu]) * (mode.k_xbar[mu] + lat.delta_xbar[mu]);
            symbol += mu == 0 ? prod : -prod;
        }
        mode.minkowski_symbol = symbol;
        mode.continuum_energy = prefactor * symbol;
        mode.lattice_energy = free_particle_energy(lat, mode.k_x, mode.k_xbar);
        visit(mode);

        std::size_t slot = slots;
        while (slot > 0) {
            --slot;
            if (labels[slot] < top) {
                ++labels[slot];
                break;
            }
            labels[slot] = 1;
            if (slot == 0) return;
        }
    }
}

std::vector<FreeParticleMode> free_particle_spectrum(const HypercubicLattice& lat) {
    double count = 1.0;
    for (std::size_t i = 0; i < 2 * lat.dims; ++i) count *= static_cast<double>(lat.N);
    if (count > static_cast<double>(kMaxMaterializedModes)) {
        throw ResourceError("mode enumeration too large to materialize (" +
                            std::to_string(static_cast<long long>(count)) +
                            " entries); use for_each_free_particle_mode");
    }
    std::vector<FreeParticleMode> out;
    out.reserve(static_cast<std::size_t>(count));
    for_each_free_particle_mode(lat, [&](const FreeParticleMode& m) { out.push_back(m); });
    return out;
}

std::vector<FreeParticleMode> onshell_select(const HypercubicLattice& lat,
                                             std::span<const FreeParticleMode> entries) {
    if (lat.dims != 2) throw ContractViolation("on-shell selection is defined in 1+1 dimensions");
    std::vector<FreeParticleMode> out;
    for (const auto& e : entries) {
        const double lhs = e.k_xbar.at(0) + lat.delta_xbar[0];
        const double rhs = -(e.k_xbar.at(1) + lat.delta_xbar[1]);
        if (std::abs(lhs - rhs) <= 1e-9) out.push_back(e);
    }
    return out;
}

HypercubicLattice positive_phase_lattice(int two_s, double box_length, double mass) {
    if (two_s < 0) throw ContractViolation("spin must be nonnegative");
    const std::size_t n = static_cast<std::size_t>(two_s) + 1;
    return HypercubicLattice::make(n, box_length / static_cast<double>(n), 2, mass, {0.0, 0.0},
                                   {0.5, 0.5 - two_s - 3.0});
}

SpinLabels spin_labels(const FreeParticleMode& mode, int two_s) {
    if (mode.k_x.size() != 2 || mode.k_xbar.size() != 2) {
        throw ContractViolation("spin labels are defined for 1+1 dimensional modes");
    }
    return SpinLabels{two_s + 2 - 2 * mode.k_xbar[1], 2 * mode.k_x[0] - two_s - 2,
                      2 * mode.k_x[1] - two_s - 2};
}

ProjectorResult constraint_projector(const OperatorMatrix& hamiltonian, double epsilon,
                                     std::optional<double> window) {
    if (!hamiltonian.hermitian()) {
        throw ContractViolation("constraint projector needs a Hermitian operator (defect " +
                                std::to_string(hamiltonian.hermiticity_defect()) + ")");
    }
    if (window && !(*window > 0.0)) throw ContractViolation("window must be positive");

    const auto spectrum = spectral::eig(hamiltonian, spectral::EigMethod::Auto, true);
    const auto& values = spectrum.eigenvalues;

    double width = 0.0;
    if (window) {
        width = *window;
    } else {
        std::size_t nearest = 0;
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (std::abs(values[i].real() - epsilon) < std::abs(values[nearest].real() - epsilon)) {
                nearest = i;
            }
        }
        const double center = values[nearest].real();
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& v : values) {
            const double d = std::abs(v.real() - center);
            if (d > 1e-9 * (1.0 + std::abs(center))) gap = std::min(gap, d);
        }
        // a single distinct eigenvalue has no gap; take the whole spectrum
        width = std::isfinite(gap) ? 0.5 * gap : std::abs(center - epsilon) + 1.0;
    }

    const Index n = hamiltonian.dim();
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i].real() - epsilon) <= width) {
            const auto v = spectrum.eigenvectors->col(static_cast<Index>(i));
            p.noalias() += v * v.adjoint();
            ++rank;
        }
    }
    p = 0.5 * (p + p.adjoint()).eval();
    Basis basis = hamiltonian.basis();
    basis.circulant.reset();
    return ProjectorResult{OperatorMatrix::from_dense(p, std::move(basis)), rank, width, rank == 0};
}

}  // namespace strobo::lattice

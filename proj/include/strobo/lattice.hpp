#pragma once

// Finite matrix realizations of the emergent Hamilton operator for the two
// worked models: the oscillator on an angular grid (one-sided Case A and
// centered Case B differences) and the free relativistic particle on a
// hypercubic phase-space lattice. Also the spectral-window constraint
// projector.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "strobo/operator_matrix.hpp"

namespace strobo::lattice {

// Sites phi_n = 2*pi*n/N, n = 1..N (stored at index n-1). The wraparound
// carries the twist phase exp(2*pi*i*delta).
struct AngularGrid {
    std::size_t N = 0;
    double omega = 1.0;
    double delta = 0.0;

    static AngularGrid make(std::size_t N, double omega, double delta);
    double site(std::size_t n) const;
    double scale() const;  // Omega N / (2 pi)
};

// -i (Omega N / 2pi) (T_delta - I)
OperatorMatrix build_case_a(const AngularGrid& grid);
// -i (Omega N / 4pi) (T_delta - T_delta^dagger)
OperatorMatrix build_case_b(const AngularGrid& grid);

// Closed forms, label m = 1..N.
cplx case_a_eigenvalue(const AngularGrid& grid, long m);
double case_b_eigenvalue(const AngularGrid& grid, long m);
std::vector<cplx> case_a_spectrum(const AngularGrid& grid);
std::vector<double> case_b_spectrum(const AngularGrid& grid);

// N^{-1/2} exp(i (m + delta) phi_n), the common eigenvector of both cases.
Eigen::VectorXcd angular_eigenvector(const AngularGrid& grid, long m);

// Greedy minimal-distance assignment: result[i] is the numeric value paired
// with formula[i]. Each numeric value is used once.
std::vector<cplx> match_to_labels(std::span<const cplx> numeric, std::span<const cplx> formula);

// Hypercubic phase-space lattice with N sites per axis and spacing l, box
// length L = N l. Phases are in units of 2*pi/L, so momentum component mu of
// mode k is 2*pi*(k^mu + delta^mu)/L.
struct HypercubicLattice {
    std::size_t N = 0;
    double spacing = 1.0;
    std::size_t dims = 2;
    double mass = 1.0;
    std::vector<double> delta_x;
    std::vector<double> delta_xbar;

    static HypercubicLattice make(std::size_t N, double spacing, std::size_t dims, double mass,
                                  std::vector<double> delta_x, std::vector<double> delta_xbar);
    double box_length() const { return static_cast<double>(N) * spacing; }
};

struct FreeParticleMode {
    std::vector<int> k_x;      // each component in 1..N
    std::vector<int> k_xbar;
    cplx lattice_energy;       // finite-spacing eigenvalue
    double minkowski_symbol;   // (k_x + delta_x).(k_xbar + delta_xbar), metric (+,-,...)
    double continuum_energy;   // (2 pi / L)^2 / m * minkowski_symbol
};

cplx free_particle_energy(const HypercubicLattice& lat, std::span<const int> k_x,
                          std::span<const int> k_xbar);

// Streams every mode (N^{2 dims} of them). dims = 4 is allowed up to N = 16.
void for_each_free_particle_mode(const HypercubicLattice& lat,
                                 const std::function<void(const FreeParticleMode&)>& visit);

inline constexpr std::size_t kMaxMaterializedModes = std::size_t{1} << 22;

// Materialized enumeration; refuses more than kMaxMaterializedModes entries.
std::vector<FreeParticleMode> free_particle_spectrum(const HypercubicLattice& lat);

// 1+1 dimensions, massless limit: keeps modes whose kbar obeys
// kbar^0 + deltabar^0 = -(kbar^1 + deltabar^1) to 1e-9.
std::vector<FreeParticleMode> onshell_select(const HypercubicLattice& lat,
                                             std::span<const FreeParticleMode> entries);

// 1+1 lattice with N = 2s+1 and the phases deltabar = (1/2, 1/2 - 2s - 3),
// delta = (0, 0), for which the on-shell spectrum is positive.
HypercubicLattice positive_phase_lattice(int two_s, double box_length, double mass);

// Doubled spin labels 2*sbar_z, 2*s_z^0, 2*s_z^1 of an on-shell mode, from
// sbar_z = s + 1 - kbar^1 and s_z^mu = k^mu - s - 1.
struct SpinLabels {
    int two_sbar_z;
    int two_sz0;
    int two_sz1;
};
SpinLabels spin_labels(const FreeParticleMode& mode, int two_s);

struct ProjectorResult {
    OperatorMatrix projector;
    std::size_t rank = 0;
    double window = 0.0;
    bool empty = false;
};

// Spectral projector onto eigenvalues in [epsilon - window, epsilon + window].
// Without a window, half the gap between the eigenvalue closest to epsilon
// and its nearest distinct neighbour is used.
ProjectorResult constraint_projector(const OperatorMatrix& hamiltonian, double epsilon,
                                     std::optional<double> window = std::nullopt);

}  // namespace strobo::lattice

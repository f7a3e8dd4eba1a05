#pragma once

// Spin-s regularization of the oscillator algebra and the emergent
// three-oscillator Hamiltonian of the free relativistic particle.
//
// Basis: S_z eigenstates with s_z descending, index i <-> s_z = s - i. The
// h operator S_z + s + 1/2 therefore has its smallest value 1/2 in the last
// slot.

#include <vector>

#include "strobo/operator_matrix.hpp"

namespace strobo::su2 {

struct SpinRep {
    int two_s = 0;
    OperatorMatrix Sz;
    OperatorMatrix Splus;
    OperatorMatrix Sminus;

    double s() const { return 0.5 * two_s; }
    Index dim() const { return two_s + 1; }
    OperatorMatrix Sx() const;
    OperatorMatrix Sy() const;
};

SpinRep spin_matrices(int two_s);

struct OscCoefficients {
    cplx a;
    cplx b;
    double omega = 1.0;

    // a = i Omega^{-1/2} / sqrt(s + 1/2), b = Omega^{1/2} / sqrt(s + 1/2)
    static OscCoefficients canonical(int two_s, double omega);
};

OperatorMatrix h_operator(const SpinRep& rep);

struct QPPair {
    OperatorMatrix q;
    OperatorMatrix p;
};

// q = (a S_- + a* S_+)/2, p = (b S_- + b* S_+)/2. Requires Im(a* b) = -2/(2s+1)
// to 1e-14, which turns [q, p] into i (1 - 2h/(2s+1)).
QPPair qp_operators(const SpinRep& rep, const OscCoefficients& coeffs);

// p^2/2 + Omega^2 q^2/2
OperatorMatrix oscillator_hamiltonian(const SpinRep& rep, const OscCoefficients& coeffs);

// Omega (n + 1/2) - (Omega/4 + Omega (n + 1/2)^2) / (2s + 1), n = 0..2s.
std::vector<double> oscillator_spectrum(int two_s, double omega);

// Max-norm residuals of the exact finite-s operator identities.
struct IdentityResiduals {
    double ladder = 0.0;      // [S+, S-] - 2 Sz
    double casimir = 0.0;     // Sx^2 + Sy^2 + Sz^2 - s(s+1)
    double hsq = 0.0;         // h - (Sx^2 + Sy^2 + 1/4 + h^2) / (2s+1)
    double commutator = 0.0;  // [q, p] - i (1 - 2h/(2s+1))
    double sumsqu = 0.0;      // Sx^2 + Sy^2 - ((2s+1)^2/4)(|a|^2 p^2 + |b|^2 q^2 - (Im a Im b + Re a Re b){q, p})
    double hsq1 = 0.0;        // Omega h - p^2/2 - Omega^2 q^2/2 - (Omega^2/4 + (Omega h)^2) / ((2s+1) Omega)

    double max() const;
};

IdentityResiduals verify_identities(const SpinRep& rep, const OscCoefficients& coeffs);

inline constexpr Index kMaxTensorDim = Index{1} << 15;

// Places op in slot 0, 1 or 2 of a three-factor tensor product.
OperatorMatrix embed(const OperatorMatrix& op, int slot);

// Omega (1 + hbar + h0 + h1 + hbar (h0 + h1)), factors ordered hbar (x) h0 (x) h1.
OperatorMatrix emergent_hamiltonian(const SpinRep& rep, double omega);

// Omega (1 + hbar)(h0 - h1): the indefinite operator from the symmetric phase choice.
OperatorMatrix bad_phase_hamiltonian(const SpinRep& rep, double omega);

// (2 pi / (sqrt(m) L))^2
double emergent_prefactor(double mass, double box_length);

}  // namespace strobo::su2

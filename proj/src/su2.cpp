#include "strobo/su2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "strobo/errors.hpp"

namespace strobo::su2 {

namespace {

Basis spin_basis(int two_s) {
    Basis b;
    b.kind = BasisKind::Spin;
    b.label = "spin(2s=" + std::to_string(two_s) + ")";
    return b;
}

OperatorMatrix scaled_identity(Index dim, double value, const Basis& basis) {
    return cplx(value) * OperatorMatrix::identity(dim, basis);
}

void require_dim(const SpinRep& rep) {
    const Index d = rep.dim();
    if (d * d * d > kMaxTensorDim) {
        throw ResourceError("tensor space of dimension " + std::to_string(d * d * d) +
                            " exceeds the cap " + std::to_string(kMaxTensorDim));
    }
}

}  // namespace

OperatorMatrix SpinRep::Sx() const { return cplx(0.5) * (Splus + Sminus); }

OperatorMatrix SpinRep::Sy() const { return cplx(0.0, -0.5) * (Splus - Sminus); }

SpinRep spin_matrices(int two_s) {
    if (two_s < 0) throw ContractViolation("2s must be nonnegative");
    const Index dim = two_s + 1;
    const double s = 0.5 * two_s;
    Eigen::VectorXcd sz(dim);
    SparseMatrix plus(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        const double m = s - static_cast<double>(i);
        sz[i] = m;
        if (i > 0) {
            // <m+1| S+ |m> sits at row i-1, column i
            plus.insert(i - 1, i) = std::sqrt(s * (s + 1.0) - m * (m + 1.0));
        }
    }
    const Basis basis = spin_basis(two_s);
    OperatorMatrix splus(plus, basis);
    OperatorMatrix sminus(SparseMatrix(plus.adjoint()), basis);
    return SpinRep{two_s, OperatorMatrix::diagonal(sz, basis), std::move(splus), std::move(sminus)};
}

OscCoefficients OscCoefficients::canonical(int two_s, double omega) {
    if (!(omega > 0.0)) throw ContractViolation("Omega must be positive");
    const double norm = std::sqrt(0.5 * two_s + 0.5);
    return OscCoefficients{cplx(0.0, 1.0 / (std::sqrt(omega) * norm)),
                           cplx(std::sqrt(omega) / norm, 0.0), omega};
}

OperatorMatrix h_operator(const SpinRep& rep) {
    return rep.Sz + scaled_identity(rep.dim(), rep.s() + 0.5, rep.Sz.basis());
}

QPPair qp_operators(const SpinRep& rep, const OscCoefficients& coeffs) {
    const double required = -2.0 / (rep.two_s + 1.0);
    const double actual = (std::conj(coeffs.a) * coeffs.b).imag();
    if (std::abs(actual - required) > 1e-14) {
        throw ContractViolation("Im(a* b) = " + std::to_string(actual) + " but the commutator needs " +
                                std::to_string(required));
    }
    OperatorMatrix q = cplx(0.5) * (coeffs.a * rep.Sminus + std::conj(coeffs.a) * rep.Splus);
    OperatorMatrix p = cplx(0.5) * (coeffs.b * rep.Sminus + std::conj(coeffs.b) * rep.Splus);
    return QPPair{std::move(q), std::move(p)};
}

OperatorMatrix oscillator_hamiltonian(const SpinRep& rep, const OscCoefficients& coeffs) {
    const auto [q, p] = qp_operators(rep, coeffs);
    return cplx(0.5) * (p * p) + cplx(0.5 * coeffs.omega * coeffs.omega) * (q * q);
}

std::vector<double> oscillator_spectrum(int two_s, double omega) {
    std::vector<double> out;
    for (int n = 0; n <= two_s; ++n) {
        const double level = n + 0.5;
        out.push_back(omega * level - (omega / 4.0 + omega * level * level) / (two_s + 1.0));
    }
    return out;
}

double IdentityResiduals::max() const {
    return std::max({ladder, casimir, hsq, commutator, sumsqu, hsq1});
}

IdentityResiduals verify_identities(const SpinRep& rep, const OscCoefficients& coeffs) {
    const Index dim = rep.dim();
    const Basis& basis = rep.Sz.basis();
    const double s = rep.s();
    const double n2 = rep.two_s + 1.0;
    const OperatorMatrix id = OperatorMatrix::identity(dim, basis);
    const OperatorMatrix h = h_operator(rep);
    const OperatorMatrix sx = rep.Sx();
    const OperatorMatrix sy = rep.Sy();
    const OperatorMatrix transverse = sx * sx + sy * sy;
    const auto [q, p] = qp_operators(rep, coeffs);
    const cplx a = coeffs.a;
    const cplx b = coeffs.b;
    const double omega = coeffs.omega;

    IdentityResiduals r;
    r.ladder = max_abs_difference(commutator(rep.Splus, rep.Sminus), cplx(2.0) * rep.Sz);
    r.casimir = max_abs_difference(transverse + rep.Sz * rep.Sz, cplx(s * (s + 1.0)) * id);
    r.hsq = max_abs_difference(h, cplx(1.0 / n2) * (transverse + cplx(0.25) * id + h * h));
    r.commutator = max_abs_difference(commutator(q, p), cplx(0.0, 1.0) * (id - cplx(2.0 / n2) * h));
    const double cross = a.imag() * b.imag() + a.real() * b.real();
    const OperatorMatrix rhs = cplx(n2 * n2 / 4.0) *
                               (cplx(std::norm(a)) * (p * p) + cplx(std::norm(b)) * (q * q) -
                                cplx(cross) * anticommutator(q, p));
    r.sumsqu = max_abs_difference(transverse, rhs);
    const OperatorMatrix omega_h = cplx(omega) * h;
    const OperatorMatrix nonlinear =
        cplx(0.5) * (p * p) + cplx(0.5 * omega * omega) * (q * q) +
        cplx(1.0 / (n2 * omega)) * (cplx(0.25 * omega * omega) * id + omega_h * omega_h);
    r.hsq1 = max_abs_difference(omega_h, nonlinear);
    return r;
}

OperatorMatrix embed(const OperatorMatrix& op, int slot) {
    if (slot < 0 || slot > 2) throw ContractViolation("tensor slot must be 0, 1 or 2");
    const Index d = op.dim();
    if (d * d * d > kMaxTensorDim) throw ResourceError("tensor space exceeds dimension cap");
    const OperatorMatrix id = OperatorMatrix::identity(d, op.basis());
    const OperatorMatrix& f0 = slot == 0 ? op : id;
    const OperatorMatrix& f1 = slot == 1 ? op : id;
    const OperatorMatrix& f2 = slot == 2 ? op : id;
    return kron(kron(f0, f1), f2);
}

OperatorMatrix emergent_hamiltonian(const SpinRep& rep, double omega) {
    if (!(omega > 0.0)) throw ContractViolation("Omega must be positive");
    require_dim(rep);
    const OperatorMatrix h = h_operator(rep);
    const OperatorMatrix hbar = embed(h, 0);
    const OperatorMatrix h0 = embed(h, 1);
    const OperatorMatrix h1 = embed(h, 2);
    const OperatorMatrix id = OperatorMatrix::identity(hbar.dim(), hbar.basis());
    return cplx(omega) * (id + hbar + h0 + h1 + hbar * (h0 + h1));
}

OperatorMatrix bad_phase_hamiltonian(const SpinRep& rep, double omega) {
    if (!(omega > 0.0)) throw ContractViolation("Omega must be positive");
    require_dim(rep);
    const OperatorMatrix h = h_operator(rep);
    const OperatorMatrix hbar = embed(h, 0);
    const OperatorMatrix id = OperatorMatrix::identity(hbar.dim(), hbar.basis());
    return cplx(omega) * ((id + hbar) * (embed(h, 1) - embed(h, 2)));
}

double emergent_prefactor(double mass, double box_length) {
    if (!(mass > 0.0) || !(box_length > 0.0)) {
        throw ContractViolation("mass and box length must be positive");
    }
    const double root = 2.0 * std::numbers::pi / (std::sqrt(mass) * box_length);
    return root * root;
}

}  // namespace strobo::su2

#include "strobo/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "strobo/errors.hpp"

namespace strobo {

Polynomial::Polynomial(std::size_t variables, std::vector<Monomial> terms)
    : variables_(variables), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
        if (t.powers.size() != variables_) {
            throw ContractViolation("monomial arity does not match polynomial");
        }
        if (std::any_of(t.powers.begin(), t.powers.end(), [](int p) { return p < 0; })) {
            throw ContractViolation("monomial powers must be nonnegative");
        }
    }
    canonicalize();
}

Polynomial Polynomial::constant(std::size_t variables, double value) {
    return Polynomial(variables, {Monomial{value, std::vector<int>(variables, 0)}});
}

Polynomial Polynomial::variable(std::size_t variables, std::size_t index) {
    std::vector<int> powers(variables, 0);
    powers.at(index) = 1;
    return Polynomial(variables, {Monomial{1.0, std::move(powers)}});
}

void Polynomial::canonicalize() {
    std::map<std::vector<int>, double> merged;
    for (const auto& t : terms_) merged[t.powers] += t.coeff;
    terms_.clear();
    for (auto& [powers, coeff] : merged) {
        if (coeff != 0.0) terms_.push_back(Monomial{coeff, powers});
    }
}

int Polynomial::degree() const {
    int best = 0;
    for (const auto& t : terms_) {
        int d = 0;
        for (int p : t.powers) d += p;
        best = std::max(best, d);
    }
    return best;
}

int Polynomial::max_power(std::size_t var) const {
    int best = 0;
    for (const auto& t : terms_) best = std::max(best, t.powers.at(var));
    return best;
}

double Polynomial::evaluate(std::span<const double> x) const {
    if (x.size() != variables_) throw ContractViolation("polynomial argument arity mismatch");
    double sum = 0.0;
    for (const auto& t : terms_) {
        double term = t.coeff;
        for (std::size_t v = 0; v < variables_; ++v) {
            for (int k = 0; k < t.powers[v]; ++k) term *= x[v];
        }
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::derivative(std::size_t var) const {
    if (var >= variables_) throw ContractViolation("derivative variable out of range");
    std::vector<Monomial> out;
    for (const auto& t : terms_) {
        if (t.powers[var] == 0) continue;
        Monomial d = t;
        d.coeff *= t.powers[var];
        d.powers[var] -= 1;
        out.push_back(std::move(d));
    }
    return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    if (other.variables_ != variables_) throw ContractViolation("polynomial arity mismatch");
    std::vector<Monomial> all = terms_;
    all.insert(all.end(), other.terms_.begin(), other.terms_.end());
    return Polynomial(variables_, std::move(all));
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (other.variables_ != variables_) throw ContractViolation("polynomial arity mismatch");
    std::vector<Monomial> out;
    for (const auto& a : terms_) {
        for (const auto& b : other.terms_) {
            Monomial m{a.coeff * b.coeff, a.powers};
            for (std::size_t v = 0; v < variables_; ++v) m.powers[v] += b.powers[v];
            out.push_back(std::move(m));
        }
    }
    return Polynomial(variables_, std::move(out));
}

Polynomial Polynomial::scaled(double factor) const {
    std::vector<Monomial> out = terms_;
    for (auto& t : out) t.coeff *= factor;
    return Polynomial(variables_, std::move(out));
}

}  // namespace strobo

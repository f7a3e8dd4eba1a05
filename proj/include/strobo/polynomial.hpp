#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace strobo {

struct Monomial {
    double coeff = 0.0;
    std::vector<int> powers;  // one exponent per variable
};

// Real polynomial in a fixed number of variables. Like terms are merged and
// zero terms dropped on construction.
class Polynomial {
public:
    explicit Polynomial(std::size_t variables = 0, std::vector<Monomial> terms = {});

    static Polynomial constant(std::size_t variables, double value);
    static Polynomial variable(std::size_t variables, std::size_t index);

    std::size_t variables() const { return variables_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const;
    int max_power(std::size_t var) const;

    double evaluate(std::span<const double> x) const;
    Polynomial derivative(std::size_t var) const;

    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    Polynomial scaled(double factor) const;

private:
    void canonicalize();

    std::size_t variables_;
    std::vector<Monomial> terms_;
};

}  // namespace strobo

#pragma once

// Distribution of proper time around a clock tick, P(tau - t). Only
// translation-invariant shapes exist: none of these types carries t.

#include <cstddef>
#include <string>
#include <vector>

namespace strobo::clock {

enum class ClockKind { Delta, Gaussian, Uniform };

class ClockDistribution {
public:
    static ClockDistribution delta();
    // P(x) = sqrt(gamma/pi) exp(-gamma x^2)
    static ClockDistribution gaussian(double gamma);
    // P(x) = 1/width on [-width/2, width/2]
    static ClockDistribution uniform(double width);

    ClockKind kind() const { return kind_; }
    double gamma() const { return parameter_; }
    double width() const { return parameter_; }
    double standard_deviation() const;
    std::string describe() const;

private:
    ClockDistribution(ClockKind kind, double parameter) : kind_(kind), parameter_(parameter) {}

    ClockKind kind_;
    double parameter_;
};

struct QuadratureRule {
    std::vector<double> nodes;    // proper-time offsets, strictly increasing
    std::vector<double> weights;  // positive, summing to 1
};

double density(const ClockDistribution& dist, double offset);

// Gaussian: Gauss-Hermite nodes for exp(-gamma x^2). Uniform: Gauss-Legendre on
// the support. Delta: the single node 0. Weights are renormalized to sum to 1.
QuadratureRule quadrature(const ClockDistribution& dist, std::size_t node_count);

}  // namespace strobo::clock

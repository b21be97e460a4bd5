#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace rml {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule of order n, cached per order.
const GaussRule& gauss_legendre(int n);

// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Trapezoid weights on an increasing grid.
std::vector<double> trapezoid_weights(std::span<const double> x);

}  // namespace rml

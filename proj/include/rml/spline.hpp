#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace rml {

// Not-a-knot cubic spline system on fixed knots. Factorisations of the
// tridiagonal system and its transpose are precomputed, so both the forward
// solve (values -> second derivatives) and the adjoint map (functionals of
// the spline -> weights on the values) cost O(n).
class SplineSystem {
 public:
  explicit SplineSystem(std::vector<double> knots);

  std::size_t size() const { return x_.size(); }
  std::span<const double> knots() const { return x_; }

  // Second derivatives at the knots.
  std::vector<double> second_derivatives(std::span<const double> y) const;

  // Given a functional L(s) = sum_i a_i y_i + sum_i b_i M_i, writes the
  // equivalent weights w with L(s) = sum_i w_i y_i. a and b have size n.
  void adjoint(std::span<const double> a, std::span<const double> b, std::span<double> w) const;

 private:
  std::vector<double> x_, h_;
  // forward Thomas factorisation of the interior system
  std::vector<double> sub_, diag_, sup_;
  std::vector<double> fwd_c_, fwd_den_;
  std::vector<double> adj_c_, adj_den_;
  bool linear_ = false;  // fewer than 4 knots: piecewise linear
};

class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y);

  // Evaluates the spline; outside the knots the end cubics are extended.
  double operator()(double x) const;
  std::span<const double> knots() const { return x_; }
  std::span<const double> values() const { return y_; }

 private:
  std::vector<double> x_, y_, m_;
};

}  // namespace rml

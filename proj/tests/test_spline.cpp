#include <cmath>
#include <random>

#include "doctest.h"
#include "rml/spline.hpp"

using namespace rml;

namespace {

std::vector<double> random_knots(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> x{0.3};
  for (std::size_t i = 1; i < n; ++i) x.push_back(x.back() + 0.05 + 0.2 * double(rng() >> 11) * 0x1p-53);
  return x;
}

}  // namespace

TEST_CASE("not-a-knot spline reproduces cubics") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {4u, 5u, 9u, 40u}) {
    auto x = random_knots(rng, n);
    auto cubic = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t - 0.25 * t * t * t; };
    std::vector<double> y;
    for (double t : x) y.push_back(cubic(t));
    CubicSpline s(x, y);
    for (double t = x.front() - 0.2; t < x.back() + 0.2; t += 0.013)
      CHECK(std::abs(s(t) - cubic(t)) < 1e-10 * (1 + std::abs(cubic(t))));
  }
}

TEST_CASE("spline interpolates its knots and converges at fourth order") {
  auto err = [](std::size_t n) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(3.0 * double(i) / double(n - 1));
      y.push_back(std::sin(2 * x.back()));
    }
    CubicSpline s(x, y);
    double e = 0;
    for (double t = 0; t <= 3; t += 0.0007) e = std::max(e, std::abs(s(t) - std::sin(2 * t)));
    return e;
  };
  double e1 = err(41), e2 = err(81);
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("adjoint weights reproduce linear functionals of the spline") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {4u, 6u, 30u}) {
    auto x = random_knots(rng, n);
    SplineSystem sys(x);
    std::vector<double> a(n), b(n), y(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = double(rng() >> 11) * 0x1p-53 - 0.5;
      b[i] = double(rng() >> 11) * 0x1p-53 - 0.5;
      y[i] = double(rng() >> 11) * 0x1p-53 - 0.5;
    }
    auto M = sys.second_derivatives(y);
    double direct = 0;
    for (std::size_t i = 0; i < n; ++i) direct += a[i] * y[i] + b[i] * M[i];
    sys.adjoint(a, b, w);
    double via = 0;
    for (std::size_t i = 0; i < n; ++i) via += w[i] * y[i];
    CHECK(via == doctest::Approx(direct).epsilon(1e-11));
  }
}

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "rml/errors.hpp"
#include "rml/lorentz.hpp"

using namespace rml::lorentz;

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * double(rng() >> 11) * 0x1p-53;
}

// indicator of a set of measure m under mu_2: one step cell [0, sqrt(2m)]
SampledFunction indicator(double m) {
  double b = std::sqrt(2 * m);
  return SampledFunction({0.0, b}, {1.0}, WeightedMeasure::half_line(2, b), Interpolation::Step);
}

double indicator_norm(double p, double q, double m) {
  if (q == kInfinity) return std::pow(m, 1 / p);
  return std::pow(p / q, 1 / q) * std::pow(m, 1 / p);
}

SampledFunction sampled(double d, double R, std::size_t n, double (*fn)(double)) {
  std::vector<double> x, v;
  for (std::size_t i = 0; i <= n; ++i) {
    x.push_back(R * double(i) / double(n));
    v.push_back(fn(x.back()));
  }
  return SampledFunction(x, v, WeightedMeasure::half_line(d, R));
}

// composite Gauss-Legendre oracle on [0, R]
double lp_quadrature(double d, double R, double p, double (*fn)(double)) {
  const double g[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  const double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                       0.2369268850561891};
  long double acc = 0;
  int panels = 20000;
  for (int i = 0; i < panels; ++i) {
    double a = R * i / panels, b = R * (i + 1) / panels;
    for (int k = 0; k < 5; ++k) {
      double x = 0.5 * (a + b) + 0.5 * (b - a) * g[k];
      acc += 0.5 * (b - a) * w[k] * std::pow(std::abs(fn(x)), p) * std::pow(x, d - 1);
    }
  }
  return std::pow(double(acc), 1 / p);
}

double bump(double r) { return r < 1 || r > 3 ? 0.0 : std::pow(std::sin(std::acos(-1.0) * (r - 1) / 2), 4); }
double gauss(double r) { return std::exp(-r * r / 2); }

}  // namespace

TEST_CASE("measures of intervals") {
  auto mu2 = WeightedMeasure::half_line(2, 10);
  CHECK(mu2.measure(1, 2) == doctest::Approx(1.5).epsilon(1e-15));
  auto mu3 = WeightedMeasure::half_line(3, 1e6);
  double a = 9e5, b = a + 1e-3;
  double len = b - a;
  CHECK(mu3.measure(a, b) == doctest::Approx(a * a * len + a * len * len + len * len * len / 3).epsilon(1e-12));
  auto tilde = WeightedMeasure::line(3, 10);
  CHECK(tilde.measure(-1, 2) == doctest::Approx((8.0 - 1) / 3 + (27.0 - 1) / 3).epsilon(1e-14));
  CHECK(tilde.measure(-3, -1) == doctest::Approx((64.0 - 8) / 3).epsilon(1e-14));
  CHECK_THROWS_AS(mu2.measure(-1, 1), rml::DomainError);
  CHECK_THROWS_AS(mu2.measure(2, 1), rml::DomainError);
  CHECK(tilde.density(-2) == doctest::Approx(9.0));
}

TEST_CASE("exponent ranges and duality") {
  CHECK_THROWS_AS(LorentzExponents(0.5, 2), rml::RangeError);
  CHECK_THROWS_AS(LorentzExponents(2, 0.5), rml::RangeError);
  LorentzExponents e(1.2, kInfinity);
  CHECK(e.p_dual() == doctest::Approx(6.0));
  CHECK(e.q_dual() == 1.0);
  CHECK(LorentzExponents(1.5, 1).q_dual() == kInfinity);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    double d = uniform(rng, 1.2, 6);
    double p = uniform(rng, 1.001, 3);
    LorentzExponents f(p, 2);
    CHECK(f.in_paper_range(d) == f.dual_range(d));
  }
  CHECK(LorentzExponents(1.2, 1.2).in_paper_range(2));
  CHECK_FALSE(LorentzExponents(1.5, 1.5).in_paper_range(2));
}

TEST_CASE("distribution function examples") {
  auto chi = SampledFunction({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 0.0}, WeightedMeasure::half_line(2, 3),
                             Interpolation::Step);
  CHECK(distribution_function(chi, 0.5) == doctest::Approx(1.5));
  auto zero = SampledFunction({0.0, 1.0}, {0.0, 0.0}, WeightedMeasure::half_line(2, 1));
  CHECK(distribution_function(zero, 0.1) == 0.0);
  std::vector<double> x, v;
  for (int i = 0; i <= 40000; ++i) {
    x.push_back(40.0 * i / 40000);
    v.push_back(std::exp(-x.back()));
  }
  SampledFunction e(x, v, WeightedMeasure::half_line(2, 40));
  CHECK(distribution_function(e, std::exp(-1.0)) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK_THROWS_AS(distribution_function(e, 0.0), rml::DomainError);
  CHECK_THROWS_AS(distribution_function(e, -1.0), rml::DomainError);
}

TEST_CASE("linear interpolation level sets are exact") {
  // f(x) = x on [0, 2] under mu_2: {f > s} = (s, 2]
  SampledFunction f({0.0, 2.0}, {0.0, 2.0}, WeightedMeasure::half_line(2, 2));
  CHECK(distribution_function(f, 0.5) == doctest::Approx((4 - 0.25) / 2).epsilon(1e-14));
  // negative lobes count through |f|
  SampledFunction g({-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}, WeightedMeasure::line(2, 1));
  CHECK(distribution_function(g, 0.5) == doctest::Approx(2 * (4 - 2.25) / 2).epsilon(1e-14));
}

TEST_CASE("indicator closed forms") {
  CHECK(lorentz_norm(indicator(4), {2, 2}).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lorentz_norm(indicator(1), {4.0 / 3, 1}).value == doctest::Approx(4.0 / 3).epsilon(1e-12));
  CHECK(lorentz_norm(indicator(32), {5, kInfinity}).value == doctest::Approx(2.0).epsilon(1e-12));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    double p = uniform(rng, 1.01, 8), m = std::exp(uniform(rng, -5, 8));
    double q = i % 5 == 0 ? kInfinity : uniform(rng, 1, 10);
    INFO("p=" << p << " q=" << q << " m=" << m);
    CHECK(lorentz_norm(indicator(m), {p, q}).value == doctest::Approx(indicator_norm(p, q, m)).epsilon(1e-6));
  }
}

TEST_CASE("q = p matches direct weighted quadrature") {
  for (double d : {2.0, 3.0, 2.5}) {
    for (double p : {1.2, 2.0, 3.5}) {
      auto f = sampled(d, 6, 120000, bump);
      double ref = lp_quadrature(d, 6, p, bump);
      INFO("d=" << d << " p=" << p);
      CHECK(lorentz_norm(f, {p, p}).value == doctest::Approx(ref).epsilon(1e-8));
    }
  }
  auto g = sampled(3, 12, 150000, gauss);
  CHECK(lorentz_norm(g, {1.5, 1.5}).value == doctest::Approx(lp_quadrature(3, 12, 1.5, gauss)).epsilon(1e-8));
}

TEST_CASE("homogeneity") {
  auto f = sampled(2, 6, 500, bump);
  std::vector<double> v(f.values().begin(), f.values().end());
  for (double c : {-3.0, 0.25, 1e6}) {
    std::vector<double> w;
    for (double x : v) w.push_back(c * x);
    SampledFunction g({f.grid().begin(), f.grid().end()}, w, f.measure());
    for (auto e : {LorentzExponents(1.2, 1.2), LorentzExponents(1.5, kInfinity), LorentzExponents(3, 1)})
      CHECK(lorentz_norm(g, e).value == doctest::Approx(std::abs(c) * lorentz_norm(f, e).value).epsilon(1e-14));
  }
}

TEST_CASE("rearrangement invariance on an equal-weight grid") {
  // cells of equal mu_2 measure: r_i = sqrt(i)
  std::mt19937_64 rng(23);
  std::vector<double> x, v;
  for (int i = 0; i <= 400; ++i) x.push_back(std::sqrt(double(i)));
  for (int i = 0; i < 400; ++i) v.push_back(uniform(rng, -2, 2));
  auto mu = WeightedMeasure::half_line(2, 20);
  SampledFunction f(x, v, mu, Interpolation::Step);
  std::shuffle(v.begin(), v.end(), rng);
  SampledFunction g(x, v, mu, Interpolation::Step);
  for (auto e : {LorentzExponents(1.2, 1.2), LorentzExponents(2.5, kInfinity), LorentzExponents(4, 1.5)})
    CHECK(lorentz_norm(g, e).value == doctest::Approx(lorentz_norm(f, e).value).epsilon(1e-8));
}

TEST_CASE("nesting in the secondary index") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x{0.0}, v;
    int cells = 1 + int(rng() % 30);
    for (int c = 0; c < cells; ++c) {
      x.push_back(x.back() + uniform(rng, 0.01, 2));
      v.push_back(uniform(rng, -1, 1) * std::exp(uniform(rng, -3, 3)));
    }
    SampledFunction f(x, v, WeightedMeasure::half_line(2.5, x.back()), Interpolation::Step);
    double p = uniform(rng, 1.05, 4), q1 = uniform(rng, 1, 4);
    double q2 = i % 2 ? kInfinity : q1 + uniform(rng, 0, 6);
    double c = indicator_norm(p, q2, 1) / indicator_norm(p, q1, 1);
    INFO("p=" << p << " q1=" << q1 << " q2=" << q2);
    CHECK(lorentz_norm(f, {p, q2}).value <= c * lorentz_norm(f, {p, q1}).value * (1 + 1e-12));
  }
}

TEST_CASE("tail flag follows the boundary value") {
  auto inside = sampled(2, 10, 1000, bump);
  CHECK_FALSE(lorentz_norm(inside, {2, 2}).tail_flag);
  auto cut = sampled(2, 2, 1000, bump);
  CHECK(lorentz_norm(cut, {2, 2}).tail_flag);
}

TEST_CASE("power-weight threshold scan") {
  std::vector<double> R{1e2, 1e3, 1e4};
  auto converging = power_weight_norm_scan(2, 5, R);
  CHECK((converging[2] - converging[1]) / (converging[1] - converging[0]) < 1.0);
  auto diverging = power_weight_norm_scan(2, 3, R);
  CHECK(diverging[2] / diverging[0] >= 2.0);
  auto borderline = power_weight_norm_scan(3, 3, R);
  double d1 = borderline[1] - borderline[0], d2 = borderline[2] - borderline[1];
  CHECK(std::abs(d2 / d1 - 1.0) < 0.2);
  // closed form: integral of (r^d/d)^{1/p'-1} (1+r)^{-(d-1)/2} r^{d-1} dr
  auto direct = [](double d, double pp, double R) {
    long double acc = 0;
    int n = 2000000;
    double lo = 1e-9;
    for (int i = 0; i < n; ++i) {
      double a = lo * std::pow(R / lo, double(i) / n), b = lo * std::pow(R / lo, double(i + 1) / n);
      double r = 0.5 * (a + b);
      acc += (b - a) * std::pow(std::pow(r, d) / d, 1 / pp - 1) * std::pow(1 + r, -(d - 1) / 2) * std::pow(r, d - 1);
    }
    // (0, lo): integrand ~ d^{1-1/p'} r^{d/p'-1}
    acc += std::pow(d, 1 - 1 / pp) * std::pow(lo, d / pp) / (d / pp);
    return double(acc);
  };
  CHECK(converging[1] == doctest::Approx(direct(2, 5, 1e3)).epsilon(1e-4));
  CHECK(borderline[0] == doctest::Approx(direct(3, 3, 1e2)).epsilon(1e-4));
}

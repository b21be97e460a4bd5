#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rml/errors.hpp"
#include "rml/hankel.hpp"

using namespace rml::hankel;
using std::numbers::pi;

namespace {

double gaussian(double r) { return std::exp(-0.5 * r * r); }

double smooth_step(double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double a = std::exp(-1 / x), b = std::exp(-1 / (1 - x));
  return a / (a + b);
}

double bump12(double r) { return smooth_step((r - 1) / 0.5) * smooth_step((2 - r) / 0.5); }

}  // namespace

TEST_CASE("grids") {
  auto g = hybrid_grid(4096, 30);
  CHECK(g.size() == 4096);
  CHECK(g.back() == 30.0);
  CHECK(max_admissible_frequency(g) > 30.0);
  auto u = uniform_grid(100, 10);
  CHECK(u.front() == doctest::Approx(0.1));
  CHECK(max_step(u) == doctest::Approx(0.1));
  CHECK_THROWS_AS(RadialProfile({0.0, 1.0}, {1.0, 1.0}, 2), rml::DomainError);
  CHECK_THROWS_AS(RadialProfile({1.0, 2.0}, {1.0, 1.0}, 1), rml::UnsupportedDimension);
}

TEST_CASE("Gaussian is a fixed point") {
  for (double d : {2.0, 3.0}) {
    auto f = sample_profile(hybrid_grid(4096, 30), gaussian, d);
    std::vector<double> rho;
    for (double x = 0; x <= 8.0001; x += 0.05) rho.push_back(x);
    auto F = hankel_transform(f, rho);
    double err = 0;
    for (std::size_t i = 0; i < rho.size(); ++i) err = std::max(err, std::abs(F[i] - gaussian(rho[i])));
    INFO("d=" << d);
    CHECK(err <= 1e-8);
  }
  auto f3 = sample_profile(hybrid_grid(4096, 30), gaussian, 3);
  std::vector<double> rho{0, 1, 2};
  auto F = hankel_transform(f3, rho);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(F[i] - gaussian(rho[i])) < 1e-8);
}

TEST_CASE("indicator of the unit ball in d = 3") {
  auto f = sample_profile(uniform_grid(400, 1.0), [](double) { return 1.0; }, 3);
  std::vector<double> rho{pi};
  double ref = std::sqrt(2 / pi) / (pi * pi);
  CHECK(std::abs(hankel_transform(f, rho)[0] - ref) < 1e-8);
}

TEST_CASE("zero profile transforms to zero") {
  auto f = sample_profile(uniform_grid(64, 8), [](double) { return 0.0; }, 2.5);
  std::vector<double> rho{0, 0.5, 3};
  for (double v : hankel_transform(f, rho)) CHECK(v == 0.0);
  CHECK(hankel_roundtrip_error(f) == 0.0);
}

TEST_CASE("coarse grids raise a resolution error naming the admissible frequency") {
  auto f = sample_profile(uniform_grid(100, 10), gaussian, 2);
  std::vector<double> rho{20.0};
  try {
    hankel_transform(f, rho);
    FAIL("expected a resolution error");
  } catch (const rml::ResolutionError& e) {
    CHECK(e.max_admissible() == doctest::Approx(pi / 0.4));
    CHECK(std::string(e.what()).find("maximum admissible rho") != std::string::npos);
  }
}

TEST_CASE("linearity") {
  auto grid = uniform_grid(300, 12);
  auto f = sample_profile(grid, gaussian, 2);
  auto g = sample_profile(grid, [](double r) { return bump12(r); }, 2);
  std::vector<double> mix;
  for (std::size_t i = 0; i < grid.size(); ++i) mix.push_back(2.5 * f.values[i] - 0.75 * g.values[i]);
  RadialProfile h(grid, mix, 2);
  std::vector<double> rho{0, 0.3, 1.1, 4};
  auto a = hankel_transform(f, rho), b = hankel_transform(g, rho), c = hankel_transform(h, rho);
  for (std::size_t i = 0; i < rho.size(); ++i)
    CHECK(std::abs(c[i] - (2.5 * a[i] - 0.75 * b[i])) <= 1e-12 * (std::abs(c[i]) + 1));
}

TEST_CASE("plan reuse is bitwise identical") {
  auto grid = hybrid_grid(512, 10);
  auto f = sample_profile(grid, gaussian, 3);
  std::vector<double> rho{0, 0.5, 1, 2};
  HankelPlan plan(3, grid, rho);
  auto a = plan.apply(f.values);
  auto b = plan.apply(f.values);
  auto c = hankel_transform(f, rho);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i] == c[i]);
  }
}

TEST_CASE("Gaussian self-inversion converges") {
  auto err = [](double d, std::size_t n) {
    return hankel_roundtrip_error(sample_profile(hybrid_grid(n, 30), gaussian, d));
  };
  double e1 = err(3, 4096), e2 = err(3, 8192);
  CHECK(e1 <= 1e-6);
  CHECK(e1 / e2 >= 4.0);
}

TEST_CASE("smooth bump on [1, 2] self-inverts") {
  auto run = [](std::size_t n) {
    auto f = sample_profile(uniform_grid(n, 4), bump12, 2);
    return hankel_roundtrip_error(f, {max_admissible_frequency(f.grid), 0});
  };
  double e1 = run(800), e2 = run(1600);
  MESSAGE("bump roundtrip " << e1 << " -> " << e2);
  CHECK(e1 <= 1e-5);
  CHECK(e1 / e2 >= 4.0);
}

TEST_CASE("Parseval on the Gaussian suite") {
  for (double d : {2.0, 3.0, 4.0}) {
    auto grid = hybrid_grid(4096, 30);
    auto f = sample_profile(grid, gaussian, d);
    RadialProfile F(grid, hankel_transform(f, grid), d);
    CHECK(l2_norm(F) == doctest::Approx(l2_norm(f)).epsilon(1e-6));
    CHECK(l2_norm(f) == doctest::Approx(std::sqrt(std::tgamma(d / 2) * std::pow(2.0, d / 2 - 1) / std::pow(2.0, d / 2))).epsilon(1e-8));
  }
}

TEST_CASE("compact transforms against closed forms") {
  CompactSource ball{0.0, 1.0, {}, [](double) { return 1.0; }};
  std::vector<double> rho{pi};
  CHECK(std::abs(compact_transform(ball, TransformKind::Hankel, 3, rho)[0] - std::sqrt(2 / pi) / (pi * pi)) < 1e-12);

  CompactSource gauss{0.0, 12.0, {}, gaussian};
  std::vector<double> targets;
  for (double x = 0; x <= 8; x += 0.25) targets.push_back(x);
  for (double d : {2.0, 3.0, 2.5}) {
    auto F = compact_transform(gauss, TransformKind::Hankel, d, targets);
    for (std::size_t i = 0; i < targets.size(); ++i) CHECK(std::abs(F[i] - gaussian(targets[i])) < 1e-12);
  }

  CompactSource slab{0.5, 1.0, {}, [](double) { return 1.0; }};
  std::vector<double> xs;
  for (double x = 0.01; x < 500; x *= 1.3) xs.push_back(x);
  auto k = compact_transform(slab, TransformKind::Cosine, 0, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = xs[i];
    CHECK(std::abs(k[i] - (std::sin(x) - std::sin(x / 2)) / (pi * x)) < 1e-12);
  }
}

TEST_CASE("graded panels resolve endpoint singularities") {
  // (1 - x^2)^{1/2} on [0, 1] against cos: the integral at 0 is pi / 4
  CompactSource semi{0.0, 1.0, {{1.0, true}}, [](double x) { return std::sqrt(std::max(0.0, 1 - x * x)); }};
  std::vector<double> x0{0.0, 2.0};
  auto v = compact_transform(semi, TransformKind::Cosine, 0, x0);
  CHECK(v[0] == doctest::Approx(0.25).epsilon(1e-12));
  // (1/pi) int_0^1 sqrt(1-x^2) cos(2x) dx = J_1(2) / 4
  CHECK(v[1] == doctest::Approx(std::cyl_bessel_j(1.0, 2.0) / 4).epsilon(1e-11));
}

TEST_CASE("smooth compact data transforms decay rapidly") {
  CompactSource src{0.5, 2.0, {}, [](double x) { return smooth_step((x - 0.5) / 0.25) * smooth_step((2 - x) / 0.25); }};
  std::vector<double> r;
  for (double x = 1; x <= 1000; x *= 1.02) r.push_back(x);
  auto k = compact_transform(src, TransformKind::Hankel, 3, r);
  double c = 0, tail = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double v = std::abs(k[i]) * std::pow(1 + r[i], 5);
    if (r[i] <= 100) c = std::max(c, v);
    if (r[i] > 100) CHECK(v <= c);
    if (r[i] >= 500) tail = std::max(tail, v);
  }
  CHECK(tail <= 1e-2 * c);
}

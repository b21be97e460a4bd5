#include <cmath>
#include <random>

#include "doctest.h"
#include "rml/errors.hpp"
#include "rml/radial_operators.hpp"

using namespace rml::operators;
using namespace rml::multipliers;
using rml::hankel::CompactSource;
using rml::hankel::compact_transform;
using rml::hankel::TransformKind;

namespace {

// H_d of a smooth bump supported in [lo, hi]
RadialProfile band_limited(double d, std::vector<double> grid, double lo, double hi, double shift = 0) {
  CompactSource src;
  src.lo = lo;
  src.hi = hi;
  double w = 0.5 * (hi - lo);
  src.eval = [=](double x) {
    return smooth_step((x - lo) / w) * smooth_step((hi - x) / w) * (1 + shift * std::cos(7 * x));
  };
  auto v = compact_transform(src, TransformKind::Hankel, d, grid);
  return RadialProfile(std::move(grid), std::move(v), d);
}

double sup_diff(const RadialProfile& a, const RadialProfile& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s = std::max(s, std::abs(a.values[i] - b.values[i]));
  return s;
}

double sup_abs(const RadialProfile& a) {
  double s = 0;
  for (double v : a.values) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

TEST_CASE("t-grids and weights") {
  auto g = geometric_t_grid(9);
  CHECK(g.front() == 1.0);
  CHECK(g.back() == 2.0);
  CHECK(g[4] == doctest::Approx(std::sqrt(2.0)));
  auto w = t_weights(uniform_t_grid(5));
  double s = 0;
  for (double x : w) s += x;
  CHECK(s == doctest::Approx(1.0));
  CHECK(t_weights(std::vector<double>{1.5}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(t_weights(std::vector<double>{0.5, 1.5}), rml::RangeError);
  CHECK_THROWS_AS(t_weights(std::vector<double>{}), rml::DomainError);
  // nesting: every other point of the 17-point grid is the 9-point grid
  auto fine = geometric_t_grid(17);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(fine[2 * k] == g[k]);
}

TEST_CASE("time families") {
  auto grid = rml::hankel::uniform_grid(100, 10);
  auto a = rml::hankel::sample_profile(grid, [](double r) { return std::exp(-r); }, 2);
  auto b = rml::hankel::sample_profile(grid, [](double r) { return std::sin(r); }, 2);
  auto ts = uniform_t_grid(3);
  auto fam = TimeFamily::separable(ts, {a, b}, {{1, 0}, {1, 1}, {0, -2}});
  CHECK(fam.is_separable());
  CHECK(fam.at(1).values[5] == doctest::Approx(a.values[5] + b.values[5]));
  auto bn = fam.b_norm();
  double r = grid[7];
  double expect = 0.25 * std::exp(-r) + 0.5 * std::abs(std::exp(-r) + std::sin(r)) + 0.25 * 2 * std::abs(std::sin(r));
  CHECK(bn[7] == doctest::Approx(expect));
  CHECK(fam.scaled(3).b_norm()[7] == doctest::Approx(3 * expect));
  auto other = rml::hankel::sample_profile(rml::hankel::uniform_grid(50, 10), [](double) { return 1.0; }, 2);
  CHECK_THROWS_AS(TimeFamily(ts, {a, b, other}), rml::DomainError);
  CHECK_THROWS_AS(TimeFamily(ts, {a, b}), rml::DomainError);
}

TEST_CASE("zero multiplier gives zero") {
  auto f = band_limited(2, rml::hankel::uniform_grid(400, 20), 0.6, 1.8);
  CHECK(sup_abs(apply_multiplier(zero_multiplier(), f, 2)) == 0.0);
  CHECK(sup_abs(maximal_operator(zero_multiplier(), f, 2, geometric_t_grid(8))) == 0.0);
}

TEST_CASE("a multiplier equal to 1 on the band acts as the identity") {
  for (double d : {2.0, 3.0}) {
    auto f = band_limited(d, rml::hankel::uniform_grid(2000, 100), 0.7, 1.7);
    auto out = apply_multiplier(smooth_bump(), f, d);
    CHECK(sup_diff(out, f) <= 1e-5 * sup_abs(f));
  }
}

TEST_CASE("apply_multiplier is linear") {
  auto grid = rml::hankel::uniform_grid(800, 40);
  auto f = band_limited(2, grid, 0.5, 2.0);
  auto g = band_limited(2, grid, 0.6, 1.4, 0.3);
  std::vector<double> sum(grid.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = 2 * f.values[i] - 3 * g.values[i];
  RadialProfile h(grid, sum, 2);
  auto m = bochner_riesz({0.5});
  auto tf = apply_multiplier(m, f, 2), tg = apply_multiplier(m, g, 2), th = apply_multiplier(m, h, 2);
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(th.values[i] - 2 * tf.values[i] + 3 * tg.values[i]));
  CHECK(worst <= 1e-10 * sup_abs(th));
}

TEST_CASE("maximal operator dominates every scale exactly") {
  auto f = band_limited(2, rml::hankel::uniform_grid(600, 30), 0.5, 2.0, 0.2);
  auto m = bochner_riesz({1.0});
  auto ts = geometric_t_grid(9);
  auto mx = maximal_operator(m, f, 2, ts);
  auto single = maximal_operator(m, f, 2, std::vector<double>{1.0});
  auto t1 = apply_multiplier(m, f, 2);
  for (std::size_t i = 0; i < t1.values.size(); ++i) CHECK(single.values[i] == std::abs(t1.values[i]));
  for (double t0 : ts) {
    auto col = apply_scaled(m, f, 2, t0);
    for (std::size_t i = 0; i < col.values.size(); ++i) CHECK(mx.values[i] >= std::abs(col.values[i]));
  }
  auto finer = maximal_operator(m, f, 2, geometric_t_grid(17));
  for (std::size_t i = 0; i < mx.values.size(); ++i) CHECK(finer.values[i] >= mx.values[i]);
  CHECK_THROWS_AS(maximal_operator(m, f, 2, std::vector<double>{}), rml::DomainError);
  CHECK_THROWS_AS(apply_scaled(m, f, 2, 2.5), rml::RangeError);
}

TEST_CASE("maximal operator converges under t-grid refinement") {
  auto grid = rml::hankel::uniform_grid(600, 60);
  for (double lambda : {0.5, 1.0}) {
    auto f = band_limited(2, grid, 0.5, 2.0, 0.4);
    auto m = bochner_riesz({lambda});
    double a = sup_abs(maximal_operator(m, f, 2, geometric_t_grid(64)));
    double b = sup_abs(maximal_operator(m, f, 2, geometric_t_grid(128)));
    CHECK(std::abs(a - b) <= 0.01 * b);
  }
}

TEST_CASE("averaged dual operator: reductions") {
  auto grid = rml::hankel::uniform_grid(600, 30);
  auto g = band_limited(3, grid, 0.5, 2.0, 0.3);
  auto m = bochner_riesz({1.0});
  auto ts = uniform_t_grid(9);
  auto avg = averaged_dual_operator(m, TimeFamily::constant(ts, g), 3, false);
  auto direct = apply_multiplier(m, g, 3);
  CHECK(sup_diff(avg, direct) <= 1e-12 * sup_abs(direct));

  // a family living on a single t-node
  std::size_t k0 = 3;
  std::vector<std::vector<double>> coef(ts.size(), std::vector<double>{0.0});
  coef[k0][0] = 1.0;
  auto hat = averaged_dual_operator(m, TimeFamily::separable(ts, {g}, coef), 3);
  auto col = apply_scaled(m, g, 3, ts[k0]);
  double w = t_weights(ts)[k0];
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(hat.values[i] == doctest::Approx(w * col.values[i]).epsilon(1e-12).scale(sup_abs(col)));

  // the generic path agrees with the separable one
  auto sep = TimeFamily::separable(ts, {g, band_limited(3, grid, 0.7, 1.5)},
                                   {{1, 0}, {0.5, 1}, {0, 1}, {1, 1}, {2, 0}, {0, 0}, {1, -1}, {0, 3}, {1, 0}});
  TimeFamily generic(ts, sep.profiles());
  auto a1 = averaged_dual_operator(m, sep, 3), a2 = averaged_dual_operator(m, generic, 3);
  CHECK(sup_diff(a1, a2) <= 1e-12 * sup_abs(a1));
}

TEST_CASE("duality of the averaged operator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double d : {2.0, 3.0}) {
    auto grid = rml::hankel::uniform_grid(2500, 50);
    std::vector<RadialProfile> basis{band_limited(d, grid, 0.5, 1.2), band_limited(d, grid, 0.9, 2.0, 0.5),
                                     band_limited(d, grid, 0.6, 1.9, -0.4)};
    auto ts = uniform_t_grid(17);
    std::vector<std::vector<double>> coef;
    for (std::size_t k = 0; k < ts.size(); ++k) coef.push_back({u(rng), u(rng), u(rng)});
    auto fam = TimeFamily::separable(ts, basis, coef);
    auto h = band_limited(d, grid, 0.5, 2.0, 0.7);
    for (const auto& m : {bochner_riesz({0.5}), bochner_riesz({1.0}), smooth_bump()}) {
      double lhs = rml::hankel::inner_product(averaged_dual_operator(m, fam, d), h);
      auto cols = apply_scales(m, h, d, ts);
      auto w = t_weights(ts);
      double rhs = 0, scale = 0;
      for (std::size_t k = 0; k < ts.size(); ++k) {
        double v = rml::hankel::inner_product(fam.at(k), cols[k]);
        rhs += w[k] * v;
        scale += w[k] * std::abs(v);
      }
      CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(std::abs(rhs), 1e-3 * scale));
    }
  }
}

TEST_CASE("L2 contraction") {
  auto grid = rml::hankel::uniform_grid(1500, 60);
  for (double d : {2.0, 3.0}) {
    for (const auto& m : {bochner_riesz({0.5}), bochner_riesz({1.5}), smooth_bump(), slab(0.8, 1.2)}) {
      auto f = band_limited(d, grid, 0.5, 2.0, 0.5);
      double ratio = rml::hankel::l2_norm(apply_multiplier(m, f, d)) / rml::hankel::l2_norm(f);
      CHECK(ratio <= m.sup_bound() * (1 + 1e-6));
    }
  }
}

TEST_CASE("coarse grids raise a resolution error") {
  auto f = rml::hankel::sample_profile(rml::hankel::uniform_grid(50, 100), [](double r) { return std::exp(-r); }, 2);
  CHECK_THROWS_AS(apply_multiplier(smooth_bump(), f, 2), rml::ResolutionError);
  CHECK_THROWS_AS(apply_multiplier(smooth_bump(), f, 3), rml::DomainError);
}

#include <chrono>
#include <cmath>

#include "doctest.h"
#include "rml/equivalence_probe.hpp"
#include "rml/errors.hpp"
#include "rml/suites.hpp"

using namespace rml::probe;
using rml::lorentz::kInfinity;
using rml::multipliers::bochner_riesz;
using rml::multipliers::zero_multiplier;

namespace {

std::string range_message(double d, double p) {
  try {
    check_paper_range(d, p, p);
  } catch (const rml::RangeError& e) {
    return e.what();
  }
  return "";
}

std::vector<RadialProfile> small_suite(double d, double c = 1.0) {
  auto grid = rml::hankel::uniform_grid(400, 40);
  rml::suites::SuiteOptions o;
  o.random_count = 2;
  o.focus_radii = {15.0};
  auto s = rml::suites::profile_suite(5, d, grid, o);
  for (auto& f : s)
    for (double& v : f.values) v *= c;
  return s;
}

ChainOptions light() {
  ChainOptions o;
  o.t_points = 16;
  o.kernel = {2048, 100};
  return o;
}

}  // namespace

TEST_CASE("exponent range predicate") {
  CHECK(range_message(2, 1.5) == "p must be < 2d/(d+1) = 4/3");
  CHECK(range_message(3, 1.6) == "p must be < 2d/(d+1) = 3/2");
  CHECK(range_message(2, 1.0) == "p must be > 1");
  CHECK(range_message(2, 1.2) == "");
  CHECK_THROWS_AS(check_paper_range(0.5, 1.2, 2), rml::UnsupportedDimension);
  CHECK_THROWS_AS(check_paper_range(2, 1.2, 0.5), rml::RangeError);
  CHECK(upper_exponent_text(2.5).rfind("2d/(d+1) = 1.42857", 0) == 0);
}

TEST_CASE("A(p,q): zero, convergence inside the range and divergence below the critical exponent") {
  CHECK(compute_A(zero_multiplier(), 2, 1.2, kInfinity).value == 0.0);
  auto m = bochner_riesz({1.0});
  double a100 = compute_A(m, 2, 1.2, kInfinity, {100, 0.05}).value;
  double a200 = compute_A(m, 2, 1.2, kInfinity, {200, 0.05}).value;
  double a400 = compute_A(m, 2, 1.2, kInfinity, {400, 0.05}).value;
  CHECK(a100 > 0);
  CHECK(std::abs(a400 - a200) <= std::abs(a200 - a100) + 1e-12 * a400);
  CHECK(std::abs(a400 - a200) <= 0.01 * a400);
  // d = 3, lambda = 1/2: critical exponent 6/5, so p = 1.05 diverges
  auto half = bochner_riesz({0.5});
  double b100 = compute_A(half, 3, 1.05, 1.05, {100, 0.05}).value;
  double b200 = compute_A(half, 3, 1.05, 1.05, {200, 0.05}).value;
  double b400 = compute_A(half, 3, 1.05, 1.05, {400, 0.05}).value;
  CHECK(b200 >= 1.05 * b100);
  CHECK(b400 >= 1.05 * b200);
}

TEST_CASE("chain check") {
  auto suite = small_suite(2);
  auto zero = chain_check(zero_multiplier(), 2, 1.2, 1.2, suite, light());
  CHECK(zero.A == 0.0);
  CHECK(zero.hankel_norm == 0.0);
  CHECK(zero.T_lower == 0.0);
  CHECK(zero.M_lower == 0.0);

  auto m = bochner_riesz({1.0});
  auto rep = chain_check(m, 2, 1.2, 1.2, suite, light());
  CHECK(rep.domination);
  for (double v : {rep.A, rep.hankel_norm, rep.T_lower, rep.M_lower}) {
    CHECK(std::isfinite(v));
    CHECK(v > 0);
  }
  // enlarging the suite never lowers the bounds
  std::vector<RadialProfile> part(suite.begin(), suite.begin() + 2);
  auto sub = chain_check(m, 2, 1.2, 1.2, part, light());
  CHECK(sub.T_lower <= rep.T_lower);
  CHECK(sub.M_lower <= rep.M_lower);
  // homogeneous of degree zero
  auto scaled = chain_check(m, 2, 1.2, 1.2, small_suite(2, 37.5), light());
  for (std::size_t i = 0; i < suite.size(); ++i) {
    CHECK(std::abs(scaled.t_ratios[i] - rep.t_ratios[i]) <= 1e-10 * rep.t_ratios[i]);
    CHECK(std::abs(scaled.m_ratios[i] - rep.m_ratios[i]) <= 1e-10 * rep.m_ratios[i]);
  }
  // bitwise reproducible
  auto again = chain_check(m, 2, 1.2, 1.2, suite, light());
  CHECK(again.t_ratios == rep.t_ratios);
  CHECK(again.m_ratios == rep.m_ratios);
  CHECK(again.A == rep.A);
}

TEST_CASE("rank correlation") {
  std::vector<double> a{1, 2, 3, 4}, b{10, 20, 25, 100}, c{4, 3, 2, 1};
  CHECK(spearman(a, b) == doctest::Approx(1.0));
  CHECK(spearman(a, c) == doctest::Approx(-1.0));
  std::vector<double> tied{1, 1, 2, 3};
  CHECK(spearman(tied, a) == doctest::Approx(0.9486832980505138));
  CHECK_THROWS_AS(spearman(a, std::vector<double>{1, 2}), rml::DomainError);
}

TEST_CASE("equivalence scan on a degenerate suite is vacuous") {
  auto grid = rml::hankel::uniform_grid(400, 40);
  std::vector<RadialProfile> suite{RadialProfile(grid, std::vector<double>(grid.size(), 0.0), 2)};
  std::vector<double> lambdas{0.5, 1.0};
  auto rep = equivalence_scan(lambdas, 2, 1.2, kInfinity, suite, light());
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) {
    CHECK(r.vacuous);
    CHECK(r.ratio == 0.0);
    CHECK(r.hankel_norm > 0);
  }
  CHECK(rep.rows[0].hankel_norm > rep.rows[1].hankel_norm);
  CHECK_THROWS_AS(equivalence_scan(std::vector<double>{2.5}, 2, 1.2, kInfinity, suite, light()), rml::RangeError);
}

TEST_CASE("critical exponent scan") {
  CHECK_THROWS_AS(critical_exponent_scan(1.0, 3), rml::RangeError);
  CriticalOptions o;
  o.r0 = 50;
  o.doublings = 2;
  o.step = 0.1;
  auto rep = critical_exponent_scan(0.5, 3, o);
  CHECK(rep.p_c == doctest::Approx(1.2));
  REQUIRE(rep.weak_norms.size() == 3);
  for (std::size_t k = 1; k < 3; ++k) CHECK(rep.strong_norms[k] > rep.strong_norms[k - 1]);
}

TEST_CASE("dual inequality check") {
  auto grid = rml::hankel::uniform_grid(400, 40);
  auto ts = rml::operators::uniform_t_grid(9);
  auto fams = rml::suites::random_families(9, 2, 2, grid, ts);
  auto m = bochner_riesz({1.0});
  std::vector<TimeFamily> zero{fams[0].scaled(0.0)};
  CHECK(dual_inequality_check(m, 2, 1.2, 1.2, zero).max_ratio == 0.0);
  auto rep = dual_inequality_check(m, 2, 1.2, 1.2, fams);
  CHECK(std::isfinite(rep.max_ratio));
  CHECK(rep.max_ratio > 0);
  std::vector<TimeFamily> scaled{fams[0].scaled(4.25), fams[1].scaled(4.25)};
  auto rs = dual_inequality_check(m, 2, 1.2, 1.2, scaled);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(rs.ratios[i] - rep.ratios[i]) <= 1e-10 * rep.ratios[i]);
  CHECK_THROWS_AS(dual_inequality_check(m, 2, 1.5, 1.5, fams), rml::RangeError);
}

#include "rml/suites.hpp"

#include <cmath>
#include <numbers>

#include "rml/errors.hpp"
#include "rml/hankel.hpp"
#include "rml/multipliers.hpp"
#include "rml/special_functions.hpp"

namespace rml::suites {

using multipliers::smooth_step;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double SpectralBump::operator()(double rho) const {
  return smooth_step((rho - lo) / w) * smooth_step((hi - rho) / w);
}

double FamilySpec::coefficient(std::size_t j, double t) const {
  return c[j] + e[j] * std::cos(std::numbers::pi * w[j] * (t - 1.0) + phi[j]);
}

namespace {

RadialProfile transform_bump(const SpectralBump& b, double d, const std::vector<double>& grid) {
  hankel::CompactSource src;
  src.lo = b.lo;
  src.hi = b.hi;
  src.eval = b;
  return RadialProfile(grid, hankel::compact_transform(src, hankel::TransformKind::Hankel, d, grid), d);
}

std::mt19937_64 stream(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

TimeFamily FamilySpec::build(double d, const std::vector<double>& grid, const std::vector<double>& t_grid) const {
  std::vector<RadialProfile> basis;
  for (const auto& b : bumps) basis.push_back(transform_bump(b, d, grid));
  std::vector<std::vector<double>> coef(t_grid.size(), std::vector<double>(bumps.size()));
  for (std::size_t k = 0; k < t_grid.size(); ++k)
    for (std::size_t j = 0; j < bumps.size(); ++j) coef[k][j] = coefficient(j, t_grid[k]);
  return TimeFamily::separable(t_grid, std::move(basis), std::move(coef));
}

FamilySpec random_family(std::uint64_t seed, std::size_t index, std::size_t terms) {
  if (terms == 0) throw DomainError("a family needs at least one term");
  auto rng = stream(seed, index);
  FamilySpec s;
  for (std::size_t j = 0; j < terms; ++j) {
    double lo = 0.5 + 0.8 * uniform01(rng);
    double hi = lo + 0.3 + (1.7 - lo) * uniform01(rng);
    double w = 0.5 * (hi - lo) * (0.3 + 0.7 * uniform01(rng));
    s.bumps.push_back({lo, hi, w});
    s.c.push_back(2.0 * uniform01(rng) - 1.0);
    s.e.push_back(2.0 * uniform01(rng) - 1.0);
    s.w.push_back(0.5 + 2.5 * uniform01(rng));
    s.phi.push_back(2.0 * std::numbers::pi * uniform01(rng));
  }
  return s;
}

std::vector<TimeFamily> random_families(std::uint64_t seed, std::size_t count, double d,
                                        const std::vector<double>& grid, const std::vector<double>& t_grid) {
  std::vector<TimeFamily> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(random_family(seed, i).build(d, grid, t_grid));
  return out;
}

RadialProfile random_band_limited(std::uint64_t seed, std::size_t index, double d, const std::vector<double>& grid) {
  auto spec = random_family(seed, index);
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t j = 0; j < spec.bumps.size(); ++j) {
    auto p = transform_bump(spec.bumps[j], d, grid);
    double a = spec.coefficient(j, 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * p.values[i];
  }
  return RadialProfile(grid, std::move(v), d);
}

RadialProfile focusing_profile(double d, const std::vector<double>& grid, double r0) {
  if (!(r0 > 0)) throw DomainError("focusing radius must be positive");
  return hankel::sample_profile(
      grid, [=](double r) { return special::kernel_b(d, r) * smooth_step((1.0 - r / r0) / 0.5); }, d);
}

std::vector<RadialProfile> profile_suite(std::uint64_t seed, double d, const std::vector<double>& grid,
                                         const SuiteOptions& opts) {
  std::vector<RadialProfile> out;
  for (std::size_t i = 0; i < opts.random_count; ++i) out.push_back(random_band_limited(seed, i, d, grid));
  for (double r0 : opts.focus_radii) out.push_back(focusing_profile(d, grid, r0));
  return out;
}

}  // namespace rml::suites

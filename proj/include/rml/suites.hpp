#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rml/radial_operators.hpp"

namespace rml::suites {

using hankel::RadialProfile;
using operators::TimeFamily;

// Uniform double in [0, 1) from the top 53 bits; fixed across standard libraries.
double uniform01(std::mt19937_64& rng);

// Smooth bump on [lo, hi] with transition width w.
struct SpectralBump {
  double lo, hi, w;
  double operator()(double rho) const;
};

// f_t = sum_j a_j(t) H_d[g_j] with g_j smooth bumps inside [1/2, 2] and
// a_j(t) = c_j + e_j cos(pi w_j (t - 1) + phi_j).
struct FamilySpec {
  std::vector<SpectralBump> bumps;
  std::vector<double> c, e, w, phi;

  double coefficient(std::size_t j, double t) const;
  TimeFamily build(double d, const std::vector<double>& grid, const std::vector<double>& t_grid) const;
};

FamilySpec random_family(std::uint64_t seed, std::size_t index, std::size_t terms = 4);
std::vector<TimeFamily> random_families(std::uint64_t seed, std::size_t count, double d,
                                        const std::vector<double>& grid, const std::vector<double>& t_grid);

// H_d[g] for one random spectral bump combination.
RadialProfile random_band_limited(std::uint64_t seed, std::size_t index, double d, const std::vector<double>& grid);
// B_d(r) bump(r / R0), bump equal to 1 on [0, 1/2] and vanishing from 1 on
RadialProfile focusing_profile(double d, const std::vector<double>& grid, double r0);

struct SuiteOptions {
  std::size_t random_count = 6;
  std::vector<double> focus_radii{10.0, 20.0, 40.0};
};

std::vector<RadialProfile> profile_suite(std::uint64_t seed, double d, const std::vector<double>& grid,
                                         const SuiteOptions& opts = {});

}  // namespace rml::suites

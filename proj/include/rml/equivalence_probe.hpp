#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rml/lorentz.hpp"
#include "rml/multipliers.hpp"
#include "rml/radial_operators.hpp"

namespace rml::probe {

using hankel::RadialProfile;
using multipliers::Multiplier;
using operators::TimeFamily;

// Throws RangeError naming the violated constraint unless 1 < p < 2d/(d+1)
// and q >= 1 (q may be infinite).
void check_paper_range(double d, double p, double q);
// "2d/(d+1) = 4/3" style text for the upper exponent.
std::string upper_exponent_text(double d);

struct AOptions {
  double radius = 200.0;
  double step = 0.05;
};

// || (1+|x|)^{-(d-1)/2} kappa ||_{L^{p,q}(mu~_d)} on [-R, R]
lorentz::NormValue weighted_kernel_norm(const multipliers::LineKernel& kappa, double d,
                                        const lorentz::LorentzExponents& e);
lorentz::NormValue compute_A(const Multiplier& m, double d, double p, double q, const AOptions& opts = {});

// || H_d m ||_{L^{p,q}(mu_d)} on [0, R]
lorentz::NormValue hankel_norm(const Multiplier& m, double d, double p, double q,
                               const multipliers::KernelGrid& grid = {});

struct ChainOptions {
  std::size_t t_points = 64;
  AOptions a{};
  multipliers::KernelGrid kernel{};
};

struct ChainReport {
  double A = 0.0;
  double hankel_norm = 0.0;
  double T_lower = 0.0;  // lower bound
  double M_lower = 0.0;  // lower bound
  bool tail_flag = false;
  // ||M f||_{p'} >= ||T f||_{p'} for every suite member
  bool domination = true;
  std::vector<double> t_ratios, m_ratios;
};

ChainReport chain_check(const Multiplier& m, double d, double p, double q, std::span<const RadialProfile> suite,
                        const ChainOptions& opts = {});

struct EquivalenceRow {
  double lambda, p, q;
  double A, hankel_norm, T_lower, M_lower, ratio;
  bool tail_flag;
  bool vacuous;  // M_lower = 0
};

struct EquivalenceReport {
  std::vector<EquivalenceRow> rows;
  double band_width = 0.0;           // max ratio / min ratio over non-vacuous rows
  double rank_correlation = 0.0;     // Spearman between hankel_norm and M_lower
  double hankel_vs_lambda = 0.0;     // Spearman between hankel_norm and -lambda
  double maximal_vs_lambda = 0.0;    // Spearman between M_lower and -lambda
};

EquivalenceReport equivalence_scan(std::span<const double> lambdas, double d, double p, double q,
                                   std::span<const RadialProfile> suite, const ChainOptions& opts = {},
                                   const multipliers::CutoffWidths& cutoff = {});

double spearman(std::span<const double> a, std::span<const double> b);

struct CriticalOptions {
  double r0 = 100.0;
  std::size_t doublings = 4;
  double step = 0.05;
};

struct CriticalReport {
  double p_c;
  std::vector<double> radii;
  std::vector<double> weak_norms;    // q = infinity
  std::vector<double> strong_norms;  // q = p_c
  std::vector<double> weak_growth, strong_growth;  // successive ratios
  bool weak_stable = false;    // every weak ratio within 5% of 1
  bool strong_growing = false; // every strong ratio >= 1.05
};

CriticalReport critical_exponent_scan(double lambda, double d, const CriticalOptions& opts = {},
                                      const multipliers::CutoffWidths& cutoff = {});

struct DualReport {
  double A = 0.0;
  std::vector<double> ratios;
  double max_ratio = 0.0;
};

// ||int_I T_{m(./t)} f_t dt||_{L^{p,q}} / (A(p,q) ||int_I |f_t| dt||_{L^p})
DualReport dual_inequality_check(const Multiplier& m, double d, double p, double q,
                                 std::span<const TimeFamily> families, const AOptions& a = {});

}  // namespace rml::probe

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rml/lorentz.hpp"
#include "rml/multipliers.hpp"
#include "rml/radial_operators.hpp"
#include "rml/special_functions.hpp"

namespace rml::decomposition {

using hankel::RadialProfile;
using multipliers::Multiplier;
using operators::TimeFamily;

// eta = S((rho - 1/8) / (1/8)) S((8 - rho) / 4): supported in [1/8, 8], 1 on [1/4, 4]
struct CutoffFunction {
  double operator()(double rho) const;
};

// w_N(x) = (1 + |x|)^{-N}
struct MajorantWeight {
  double N = 10.0;
  explicit MajorantWeight(double n = 10.0);
  double operator()(double x) const;
};

// I_m = [2^m, 2^{m+1}), I_m* = [2^{m-2}, 2^{m+3})
struct DyadicBlock {
  int m;
  double lo() const;
  double hi() const;
  double star_lo() const;
  double star_hi() const;
  bool in_block(double r) const { return r >= lo() && r < hi(); }
  bool in_star(double r) const { return r >= star_lo() && r < star_hi(); }
  // chi_(0, 2^{m-2})(r) + chi_{I_m*}(r) + chi_[2^{m+3}, inf)(r)
  int partition_count(double r) const;
};

// Blocks I_m meeting [r_min, r_max].
std::vector<DyadicBlock> covering_blocks(double r_min, double r_max);

struct QuadratureOptions {
  double N = 10.0;
  double max_panel = 0.02;  // rho-panels of the bilinear kernel
  double line_step = 0.05;  // 1-D grid of the majorant
  double line_margin = 50.0;

  QuadratureOptions refined() const;
};

// K(r, s)[g] = int int_I m(rho/t) g(t) dt B_d(r rho) B_d(s rho) d mu_d(rho), with
// g sampled on t_grid (trapezoid in t). Nodes are fixed for all r, s up to the
// given maxima so many pairs share one setup.
class BilinearKernel {
 public:
  BilinearKernel(const Multiplier& m, double d, std::vector<double> t_grid, double r_max, double s_max,
                 const QuadratureOptions& opts = {});

  // K(r_i, s)[g] for every r_i
  std::vector<double> evaluate(std::span<const double> r, double s, std::span<const double> g) const;
  double operator()(double r, double s, std::span<const double> g) const;
  std::size_t node_count() const { return x_.size(); }

 private:
  double d_;
  std::vector<double> t_, tw_;
  std::vector<double> x_, w_;
  std::vector<double> mt_;  // [node][k]: tw_k m(x / t_k)
  double r_max_, s_max_;
  std::shared_ptr<const special::KernelTable> table_;
};

double bilinear_kernel(const Multiplier& m, double r, double s, std::span<const double> t_grid,
                       std::span<const double> g, double d, const QuadratureOptions& opts = {});

// Kernel average K[g](x) = int_I g(t) kappa_t(x) dt and the majorant
// W[g] = |K[g]| * w_N on a symmetric uniform grid [-X, X].
class Majorant {
 public:
  Majorant(const Multiplier& m, std::vector<double> t_grid, double x_max, const QuadratureOptions& opts = {});
  ~Majorant();
  Majorant(const Majorant&) = delete;
  Majorant& operator=(const Majorant&) = delete;

  std::span<const double> grid() const { return grid_; }
  std::vector<double> kernel_average(std::span<const double> g) const;
  std::vector<double> majorant(std::span<const double> g) const;
  // W(|x|) by linear interpolation on the grid, 0 beyond it
  double at(std::span<const double> w, double x) const;
  double step() const { return step_; }

 private:
  std::vector<double> t_, tw_;
  std::vector<double> grid_;
  std::vector<double> kt_;  // [k][i]: t_k kappa(t_k x_i)
  double step_;
  std::size_t half_;
  struct Fft;
  std::unique_ptr<Fft> fft_;
};

// W[f(s)](x) for each target.
std::vector<double> majorant_W(const Multiplier& m, const TimeFamily& fam, double s, std::span<const double> x,
                               const QuadratureOptions& opts = {});

struct ProbePair {
  double r, s;
};

struct BoundReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;  // per pair
  std::size_t violations = 0;  // RHS = 0 with |LHS| above tolerance
  ProbePair argmax{0, 0};
};

// |K(r,s)[f(s)]| against sum_{+-,+-} W[f(s)](+-r +- s) / [(1+r)(1+s)]^{(d-1)/2}
BoundReport kernel_bound_check(const Multiplier& m, const TimeFamily& fam, std::span<const ProbePair> probe,
                               double d, const QuadratureOptions& opts = {});

std::vector<ProbePair> square_probe(std::size_t n);  // {1..n}^2

struct EHS {
  RadialProfile E, S, H;
};

EHS split_EHS(const Multiplier& m, const TimeFamily& fam, double d, const QuadratureOptions& opts = {});

// Lorentz norm of r -> |f(r)|_B over mu_d.
lorentz::NormValue b_lorentz_norm(const TimeFamily& fam, const lorentz::LorentzExponents& e);

struct PropositionRatios {
  double h = 0.0, s = 0.0, e = 0.0;
  // W-chain suprema over s on the family grid
  double w_lorentz = 0.0, w_l1 = 0.0, w_sigma = 0.0;
};

struct PropositionReport {
  double A_pq = 0.0, A_pinf = 0.0;
  std::vector<PropositionRatios> per_family;
  PropositionRatios max;
};

// Ratios ||Hf|| / (A(p,q) ||f||_{p,inf,B}), ||sum S_m f|| / (A(p,inf) ||f||_{p,q,B}),
// ||Ef|| / (A(p,inf) ||f||_{p,q,B}) and the W-chain ratios, for each family.
PropositionReport proposition_checks(const Multiplier& m, double d, double p, double q,
                                     std::span<const TimeFamily> families, const QuadratureOptions& opts = {});
// One report per q; the decomposition is shared.
std::vector<PropositionReport> proposition_checks(const Multiplier& m, double d, double p, std::span<const double> qs,
                                                  std::span<const TimeFamily> families,
                                                  const QuadratureOptions& opts = {});

}  // namespace rml::decomposition

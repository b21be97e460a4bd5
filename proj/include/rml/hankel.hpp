#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "rml/lorentz.hpp"

namespace rml::hankel {

// Samples of a radial function on an increasing grid in (0, R].
struct RadialProfile {
  std::vector<double> grid;
  std::vector<double> values;
  double d;

  RadialProfile(std::vector<double> grid, std::vector<double> values, double d);
  double radius() const { return grid.back(); }
};

RadialProfile sample_profile(std::vector<double> grid, const std::function<double(double)>& fn, double d);

// n points: linear on (0, r_lin], geometric on (r_lin, R] with matched step.
std::vector<double> hybrid_grid(std::size_t n, double radius, double r_lin = 4.0);
// r_i = i R / n, i = 1..n
std::vector<double> uniform_grid(std::size_t n, double radius);

// Largest cell, counting the segment [0, grid[0]].
double max_step(std::span<const double> grid);
double max_admissible_frequency(std::span<const double> grid);

// Transform of cubic-spline interpolants on a fixed source grid, evaluated at
// fixed targets. Each cell carries a four-point Gauss rule; the segment
// [0, r_0] uses the first spline piece. Resolution requires rho h <= pi/4 on
// every cell, which keeps each cell within a quarter Bessel period.
class HankelPlan {
 public:
  HankelPlan(double d, std::vector<double> source_grid, std::vector<double> targets);

  std::vector<double> apply(std::span<const double> values) const;

  double dimension() const { return d_; }
  std::span<const double> source_grid() const { return grid_; }
  std::span<const double> targets() const { return targets_; }
  bool cached() const { return !rows_.empty(); }

  static constexpr double kCacheLimit = 1e8;

 private:
  void build_row(double rho, std::span<double> row) const;

  double d_;
  std::vector<double> grid_;
  std::vector<double> targets_;
  std::vector<double> rows_;
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

std::vector<double> hankel_transform(const RadialProfile& f, std::span<const double> targets);

struct RoundtripOptions {
  // band = 0: the intermediate transform is sampled on f's own grid.
  // band > 0: it is sampled on a uniform grid over (0, band] with the given
  // number of points (0 picks spacing pi / (16 R)).
  double band = 0.0;
  std::size_t points = 0;
};

// || H(H f) - f ||_inf / ||f||_inf on f's grid.
double hankel_roundtrip_error(const RadialProfile& f, const RoundtripOptions& opts = {});

// Integrals of the spline interpolants against r^{d-1} dr over [0, R].
double inner_product(const RadialProfile& a, const RadialProfile& b);
double l2_norm(const RadialProfile& f);
double l1_norm(const RadialProfile& f);

// Spline interpolant evaluated anywhere in [0, R]; zero beyond R.
std::function<double(double)> interpolant(const RadialProfile& f);

// Profile as a Lorentz-ready function on [0, R], with r = 0 prepended.
lorentz::SampledFunction as_sampled(const RadialProfile& f);

struct Breakpoint {
  double position;
  bool graded = false;  // endpoint singularity: panels next to it use u^4 grading
};

// An analytically known source supported on [lo, hi].
struct CompactSource {
  double lo;
  double hi;
  std::vector<Breakpoint> breakpoints;
  std::function<double(double)> eval;
  // radial extent of oscillation inside the source itself; caps panel length
  double oscillation = 0.0;
};

enum class TransformKind {
  Hankel,  // integral of src(x) B_d(r x) x^{d-1} dx
  Cosine   // (1/pi) integral of src(x) cos(r x) dx
};

struct PanelOptions {
  double max_panel = 0.02;
  int order = 15;
};

struct QuadratureNodes {
  std::vector<double> x, w;
};

// Gauss panels of length <= panel over [src.lo, src.hi], cut at the
// breakpoints. Weights carry x^{d-1} (Hankel) or 1/pi (Cosine).
QuadratureNodes panel_nodes(const CompactSource& src, TransformKind kind, double d, double panel, int order = 15);

std::vector<double> compact_transform(const CompactSource& src, TransformKind kind, double d,
                                      std::span<const double> targets, const PanelOptions& opts = {});

}  // namespace rml::hankel

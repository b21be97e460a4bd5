#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rml/hankel.hpp"

namespace rml::multipliers {

// Smooth step built from exp(-1/x): 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x);

// Transition widths of the cutoff chi at 1/2 and at 2.
struct CutoffWidths {
  double lower = 0.4;
  double upper = 0.5;
};

// chi(xi) = S((xi - 1/2) / lower) S((2 - xi) / upper)
double cutoff_chi(double xi, const CutoffWidths& widths);

class Multiplier {
 public:
  Multiplier(std::string label, std::function<double(double)> eval, double support_lo, double support_hi,
             double sup_bound, std::vector<hankel::Breakpoint> breakpoints = {}, nlohmann::json params = {});

  // Zero outside the support certificate.
  double operator()(double xi) const;

  const std::string& label() const { return label_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }
  double sup_bound() const { return sup_; }
  bool is_zero() const { return lo_ >= hi_; }
  // Kind and parameters, as written into reports.
  const nlohmann::json& params() const { return params_; }

  // xi -> m(xi / t)
  Multiplier dilated(double t) const;
  hankel::CompactSource source() const;

 private:
  std::string label_;
  std::function<double(double)> eval_;
  double lo_;
  double hi_;
  double sup_;
  std::vector<hankel::Breakpoint> breakpoints_;
  nlohmann::json params_;
};

struct BochnerRieszParams {
  double lambda;
  CutoffWidths cutoff{};
};

// (1 - xi^2)_+^lambda chi(xi), support [1/2, 1].
Multiplier bochner_riesz(const BochnerRieszParams& params);
// Equal to 1 on [0.6, 1.8].
Multiplier smooth_bump();
Multiplier zero_multiplier();
// Indicator of [lo, hi].
Multiplier slab(double lo, double hi);
// Linear interpolation of (xi, value) samples, clamped to [1/2, 2].
Multiplier sampled(std::string label, std::vector<std::pair<double, double>> samples);
// {"label", "kind": "bochner_riesz" | "bump" | "sampled", "lambda"?, "samples"?}
Multiplier from_json(const nlohmann::json& j);

struct KernelGrid {
  std::size_t points = 4096;
  double radius = 200.0;
};

struct RadialKernel {
  hankel::RadialProfile profile;
  std::string label;
};

// H_d m on the hybrid grid.
RadialKernel kernel_of(const Multiplier& m, double d, const KernelGrid& grid = {});
RadialKernel kernel_of(const Multiplier& m, double d, std::vector<double> grid);

// Even kernel on the symmetric uniform grid [-R, R].
struct LineKernel {
  std::vector<double> grid;
  std::vector<double> values;
  std::string label;
};

// (1/pi) int_0^inf m(xi) cos(x xi) d xi
LineKernel one_dim_kernel(const Multiplier& m, double radius = 200.0, double step = 0.05);

// x -> t^d kappa(t x), resampled on the same grid; zero beyond the grid.
RadialKernel dilate_kernel(const RadialKernel& k, double t);
// x -> t kappa(t x)
LineKernel dilate_kernel(const LineKernel& k, double t);

// Negated log-log slope through the local maxima of |kappa| in [r0, r1].
double decay_exponent_fit(std::span<const double> grid, std::span<const double> values, double r0, double r1);
double decay_exponent_fit(const RadialKernel& k, double r0, double r1);

// Peak positions and heights used by decay_exponent_fit.
std::vector<std::pair<double, double>> local_maxima(std::span<const double> grid, std::span<const double> values,
                                                    double r0, double r1);

}  // namespace rml::multipliers

#pragma once

#include <limits>
#include <span>
#include <vector>

namespace rml::lorentz {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class MeasureKind {
  HalfLinePower,    // r^{d-1} dr on (0, R]
  LineShiftedPower  // (1+|x|)^{d-1} dx on [-R, R]
};

class WeightedMeasure {
 public:
  static WeightedMeasure half_line(double d, double radius);
  static WeightedMeasure line(double d, double radius);

  MeasureKind kind() const { return kind_; }
  double dimension() const { return d_; }
  double radius() const { return radius_; }
  double domain_lo() const { return kind_ == MeasureKind::HalfLinePower ? 0.0 : -radius_; }
  double domain_hi() const { return radius_; }

  double density(double x) const;
  // Measure of [a, b] for domain points a <= b.
  double measure(double a, double b) const;

 private:
  WeightedMeasure(MeasureKind kind, double d, double radius);
  MeasureKind kind_;
  double d_;
  double radius_;
};

struct LorentzExponents {
  double p;
  double q;

  // p in [1, inf), q in [1, inf]; q may be kInfinity.
  LorentzExponents(double p, double q);

  bool q_infinite() const { return q == kInfinity; }
  double p_dual() const;
  double q_dual() const;
  LorentzExponents dual() const { return {p_dual(), q_dual()}; }

  // 1 < p < 2d/(d+1)
  bool in_paper_range(double d) const;
  // p' > 2d/(d-1)
  bool dual_range(double d) const;
};

double paper_upper_exponent(double d);

enum class Interpolation {
  Linear,  // values at grid points, linear in between
  Step     // one value per cell [grid[i], grid[i+1])
};

class SampledFunction {
 public:
  SampledFunction(std::vector<double> grid, std::vector<double> values, WeightedMeasure measure,
                  Interpolation mode = Interpolation::Linear);

  std::span<const double> grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  const WeightedMeasure& measure() const { return measure_; }
  Interpolation mode() const { return mode_; }

 private:
  std::vector<double> grid_;
  std::vector<double> values_;
  WeightedMeasure measure_;
  Interpolation mode_;
};

struct NormValue {
  double value = 0.0;
  bool tail_flag = false;  // |f| at the truncation boundary exceeds 1e-9 max|f|
};

// mu{ x : |f(x)| > s }
double distribution_function(const SampledFunction& f, double s);

NormValue lorentz_norm(const SampledFunction& f, const LorentzExponents& e);

// Atoms (|value|, mass) representing f: exact cells in step mode, four Gauss
// nodes per cell in linear mode. The atom positions depend on the grid and
// measure only, so pointwise domination of samples carries over to norms.
struct Atom {
  double value;
  double mass;
};
std::vector<Atom> atoms(const SampledFunction& f);

// Lorentz functional of a finite atom list.
double lorentz_of_atoms(std::vector<Atom> atoms, const LorentzExponents& e);

// || (1+r)^{-(d-1)/2} ||_{L^{p',1}(mu_d on (0, R])} for each R.
std::vector<double> power_weight_norm_scan(double d, double p_dual, std::span<const double> radii);

}  // namespace rml::lorentz

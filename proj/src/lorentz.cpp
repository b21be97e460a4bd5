#include "rml/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rml/errors.hpp"
#include "rml/quadrature.hpp"

namespace rml::lorentz {

namespace {

// ((c + len)^d - c^d) / d for c > 0, accurate for short intervals far out.
double power_increment(double c, double len, double d) {
  if (len <= 0) return 0.0;
  if (c <= 0) return std::pow(len, d) / d;
  return std::pow(c, d) * std::expm1(d * std::log1p(len / c)) / d;
}

}  // namespace

WeightedMeasure::WeightedMeasure(MeasureKind kind, double d, double radius)
    : kind_(kind), d_(d), radius_(radius) {
  if (!(d > 1) || !std::isfinite(d)) throw UnsupportedDimension("d must exceed 1");
  if (!(radius > 0) || !std::isfinite(radius)) throw DomainError("truncation radius must be positive and finite");
}

WeightedMeasure WeightedMeasure::half_line(double d, double radius) {
  return WeightedMeasure(MeasureKind::HalfLinePower, d, radius);
}

WeightedMeasure WeightedMeasure::line(double d, double radius) {
  return WeightedMeasure(MeasureKind::LineShiftedPower, d, radius);
}

double WeightedMeasure::density(double x) const {
  if (kind_ == MeasureKind::HalfLinePower) return std::pow(x, d_ - 1.0);
  return std::pow(1.0 + std::abs(x), d_ - 1.0);
}

double WeightedMeasure::measure(double a, double b) const {
  if (!(a <= b) || a < domain_lo() || b > domain_hi())
    throw DomainError("measure interval outside the domain");
  if (kind_ == MeasureKind::HalfLinePower) return power_increment(a, b - a, d_);
  if (a >= 0) return power_increment(1.0 + a, b - a, d_);
  if (b <= 0) return power_increment(1.0 - b, b - a, d_);
  return power_increment(1.0, -a, d_) + power_increment(1.0, b, d_);
}

LorentzExponents::LorentzExponents(double p_, double q_) : p(p_), q(q_) {
  if (!(p >= 1) || !std::isfinite(p)) throw RangeError("p must satisfy 1 <= p < infinity");
  if (!(q >= 1)) throw RangeError("q must satisfy 1 <= q <= infinity");
}

double LorentzExponents::p_dual() const { return p == 1 ? kInfinity : p / (p - 1.0); }

double LorentzExponents::q_dual() const {
  if (q_infinite()) return 1.0;
  if (q == 1) return kInfinity;
  return q / (q - 1.0);
}

double paper_upper_exponent(double d) { return 2.0 * d / (d + 1.0); }

bool LorentzExponents::in_paper_range(double d) const { return p > 1 && p < paper_upper_exponent(d); }

bool LorentzExponents::dual_range(double d) const {
  return p > 1 && p_dual() > 2.0 * d / (d - 1.0);
}

SampledFunction::SampledFunction(std::vector<double> grid, std::vector<double> values, WeightedMeasure measure,
                                 Interpolation mode)
    : grid_(std::move(grid)), values_(std::move(values)), measure_(measure), mode_(mode) {
  if (grid_.size() < 2) throw DomainError("sampled function needs at least two grid points");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw DomainError("grid must be strictly increasing");
  if (grid_.front() < measure_.domain_lo() || grid_.back() > measure_.domain_hi())
    throw DomainError("grid lies outside the measure's domain");
  std::size_t expected = mode_ == Interpolation::Linear ? grid_.size() : grid_.size() - 1;
  if (values_.size() != expected) throw DomainError("grid and values differ in length");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("sampled values must be finite");
}

double distribution_function(const SampledFunction& f, double s) {
  if (!(s > 0)) throw DomainError("level s must be positive");
  const auto& mu = f.measure();
  auto x = f.grid();
  auto v = f.values();
  CompensatedSum total;
  if (f.mode() == Interpolation::Step) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (std::abs(v[i]) > s) total.add(mu.measure(x[i], x[i + 1]));
    return total.value();
  }
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    for (double sign : {1.0, -1.0}) {
      double a = sign * v[i], b = sign * v[i + 1];
      bool in_a = a > s, in_b = b > s;
      if (!in_a && !in_b) continue;
      double lo = x[i], hi = x[i + 1];
      if (in_a != in_b) {
        double cross = x[i] + (s - a) / (b - a) * (x[i + 1] - x[i]);
        cross = std::clamp(cross, x[i], x[i + 1]);
        if (in_a)
          hi = cross;
        else
          lo = cross;
      }
      total.add(mu.measure(lo, hi));
    }
  }
  return total.value();
}

std::vector<Atom> atoms(const SampledFunction& f) {
  const auto& mu = f.measure();
  auto x = f.grid();
  auto v = f.values();
  std::vector<Atom> out;
  if (f.mode() == Interpolation::Step) {
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back({std::abs(v[i]), mu.measure(x[i], x[i + 1])});
    return out;
  }
  const GaussRule& rule = gauss_legendre(4);
  out.reserve(4 * x.size());
  auto emit = [&](std::size_t i, double a, double b) {
    double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double raw[4], pos[4], sum = 0.0;
    for (int k = 0; k < 4; ++k) {
      pos[k] = mid + half * rule.nodes[static_cast<std::size_t>(k)];
      raw[k] = half * rule.weights[static_cast<std::size_t>(k)] * mu.density(pos[k]);
      sum += raw[k];
    }
    double scale = sum > 0 ? mu.measure(a, b) / sum : 0.0;
    double h = x[i + 1] - x[i];
    for (int k = 0; k < 4; ++k) {
      double t = (pos[k] - x[i]) / h;
      out.push_back({std::abs((1.0 - t) * v[i] + t * v[i + 1]), raw[k] * scale});
    }
  };
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (mu.kind() == MeasureKind::LineShiftedPower && x[i] < 0 && x[i + 1] > 0) {
      emit(i, x[i], 0.0);
      emit(i, 0.0, x[i + 1]);
    } else {
      emit(i, x[i], x[i + 1]);
    }
  }
  return out;
}

double lorentz_of_atoms(std::vector<Atom> list, const LorentzExponents& e) {
  std::erase_if(list, [](const Atom& a) { return !(a.value > 0) || !(a.mass > 0); });
  if (list.empty()) return 0.0;
  std::stable_sort(list.begin(), list.end(), [](const Atom& a, const Atom& b) { return a.value > b.value; });
  double vmax = list.front().value;
  double T = 0.0;
  if (e.q_infinite()) {
    double best = 0.0;
    for (const auto& a : list) {
      T += a.mass;
      best = std::max(best, a.value * std::pow(T, 1.0 / e.p));
    }
    return best;
  }
  double expo = e.q / e.p;
  CompensatedSum acc;
  for (const auto& a : list) {
    double inc = T > 0 ? std::pow(T, expo) * std::expm1(expo * std::log1p(a.mass / T)) : std::pow(a.mass, expo);
    acc.add(std::pow(a.value / vmax, e.q) * inc);
    T += a.mass;
  }
  return vmax * std::pow(e.p / e.q * acc.value(), 1.0 / e.q);
}

NormValue lorentz_norm(const SampledFunction& f, const LorentzExponents& e) {
  NormValue out;
  out.value = lorentz_of_atoms(atoms(f), e);
  auto v = f.values();
  double vmax = 0.0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  double edge = std::abs(v.back());
  if (f.measure().kind() == MeasureKind::LineShiftedPower) edge = std::max(edge, std::abs(v.front()));
  out.tail_flag = vmax > 0 && edge > 1e-9 * vmax;
  return out;
}

std::vector<double> power_weight_norm_scan(double d, double p_dual, std::span<const double> radii) {
  if (!(p_dual > 1)) throw RangeError("p' must exceed 1");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 1e-3)) throw DomainError("radii must exceed 1e-3");
    if (i && !(radii[i] > radii[i - 1])) throw DomainError("radii must be increasing");
  }
  LorentzExponents e(p_dual, 1.0);
  std::vector<double> out;
  for (double R : radii) {
    double lo = 1e-3;
    auto n = static_cast<std::size_t>(std::ceil(400.0 * std::log10(R / lo)));
    std::vector<double> grid{0.0}, values{1.0};
    for (std::size_t k = 0; k <= n; ++k) {
      double r = k == n ? R : lo * std::pow(R / lo, static_cast<double>(k) / static_cast<double>(n));
      grid.push_back(r);
      values.push_back(std::pow(1.0 + r, -0.5 * (d - 1.0)));
    }
    SampledFunction f(std::move(grid), std::move(values), WeightedMeasure::half_line(d, R));
    out.push_back(lorentz_norm(f, e).value);
  }
  return out;
}

}  // namespace rml::lorentz

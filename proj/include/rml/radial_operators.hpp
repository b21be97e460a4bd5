#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rml/hankel.hpp"
#include "rml/multipliers.hpp"

namespace rml::operators {

using hankel::RadialProfile;
using multipliers::Multiplier;

// t-grids in I = [1, 2]
std::vector<double> geometric_t_grid(std::size_t n);
std::vector<double> uniform_t_grid(std::size_t n);
// Trapezoid weights on an increasing t-grid; a single node gets weight 1.
std::vector<double> t_weights(std::span<const double> t_grid);

// t -> f_t on a shared radial grid. A separable family stores basis profiles
// and coefficients a_j(t), f_t = sum_j a_j(t) phi_j, which lets the operators
// transform the basis once.
class TimeFamily {
 public:
  TimeFamily(std::vector<double> t_grid, std::vector<RadialProfile> profiles);
  static TimeFamily separable(std::vector<double> t_grid, std::vector<RadialProfile> basis,
                              std::vector<std::vector<double>> coefficients);
  static TimeFamily constant(std::vector<double> t_grid, const RadialProfile& g);

  std::size_t size() const { return t_.size(); }
  const std::vector<double>& t_grid() const { return t_; }
  const RadialProfile& at(std::size_t k) const { return profiles_[k]; }
  const std::vector<RadialProfile>& profiles() const { return profiles_; }
  std::span<const double> grid() const { return profiles_.front().grid; }
  double dimension() const { return profiles_.front().d; }

  bool is_separable() const { return !basis_.empty(); }
  const std::vector<RadialProfile>& basis() const { return basis_; }
  const std::vector<std::vector<double>>& coefficients() const { return coef_; }

  // |f(r)|_B = int_I |f_t(r)| dt, trapezoid in t
  std::vector<double> b_norm() const;
  RadialProfile b_norm_profile() const;
  TimeFamily scaled(double c) const;

 private:
  TimeFamily() = default;
  std::vector<double> t_;
  std::vector<RadialProfile> profiles_;
  std::vector<RadialProfile> basis_;
  std::vector<std::vector<double>> coef_;
};

// H_d[m H_d f] on f's grid.
RadialProfile apply_multiplier(const Multiplier& m, const RadialProfile& f, double d);
// T_{m(./t)} f for one t in [1, 2].
RadialProfile apply_scaled(const Multiplier& m, const RadialProfile& f, double d, double t);
// T_{m(./t)} f for every t of the grid; entry k matches apply_scaled at t_grid[k] bit for bit.
std::vector<RadialProfile> apply_scales(const Multiplier& m, const RadialProfile& f, double d,
                                        std::span<const double> t_grid);

// r -> max_k |T_{m(./t_k)} f(r)|
RadialProfile maximal_operator(const Multiplier& m, const RadialProfile& f, double d,
                               std::span<const double> t_grid);

// r -> int_I T_{m(./t)} f_t (r) dt; with dilate = false every t uses m itself.
RadialProfile averaged_dual_operator(const Multiplier& m, const TimeFamily& f, double d, bool dilate = true);

}  // namespace rml::operators

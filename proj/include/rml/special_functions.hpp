#pragma once

#include <cstddef>
#include <vector>

namespace rml::special {

struct BesselOrder {
  double alpha;

  // alpha = (d - 2) / 2; requires d > 1.
  static BesselOrder for_dimension(double d);
};

// J_alpha(x) for alpha >= -1/2, x >= 0.
double bessel_j(BesselOrder order, double x);

// Individual evaluation paths, exposed for cross-checks.
double bessel_j_series(double alpha, double x);
double bessel_j_recurrence(double alpha, double x);
// Returns false when the Hankel expansion has not converged at x.
bool bessel_j_asymptotic(double alpha, double x, double& out);
double bessel_j_large(double alpha, double x);

// Argument below which bessel_j uses the ascending series.
double series_switch(double alpha);

// B_d(x) = x^{-(d-2)/2} J_{(d-2)/2}(x), continuous at 0.
double kernel_b(double d, double x);
double kernel_b_at_zero(double d);

// Tabulated B_d on [0, x_max] with quintic Hermite interpolation, using
// B' = -x B_{d+2} and B'' = -B + (d-1) B_{d+2}. Arguments beyond the table
// fall back to kernel_b.
class KernelTable {
 public:
  KernelTable(double d, double x_max, double step = 1.0 / 32.0);

  double operator()(double x) const {
    if (x >= x_max_) return kernel_b(d_, x);
    double u = x * inv_step_;
    auto i = static_cast<std::size_t>(u);
    double t = u - static_cast<double>(i);
    const double* a = &data_[3 * i];
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double h3 = 10 * t3 - 15 * t4 + 6 * t5;
    double h0 = 1 - h3;
    double h1 = t - 6 * t3 + 8 * t4 - 3 * t5;
    double h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    double h4 = -4 * t3 + 7 * t4 - 3 * t5;
    double h5 = 0.5 * (t3 - 2 * t4 + t5);
    return h0 * a[0] + h1 * a[1] + h2 * a[2] + h3 * a[3] + h4 * a[4] + h5 * a[5];
  }

  double dimension() const { return d_; }
  double x_max() const { return x_max_; }

 private:
  double d_;
  double x_max_;
  double inv_step_;
  std::vector<double> data_;  // per node: B, step*B', step^2*B''
};

}  // namespace rml::special

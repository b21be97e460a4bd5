#include "rml/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rml/errors.hpp"

namespace rml::special {

namespace {

void check_order(double alpha) {
  if (!std::isfinite(alpha) || alpha < -0.5)
    throw DomainError("Bessel order must be finite and >= -1/2");
}

void check_argument(double x) {
  if (!std::isfinite(x) || x < 0) throw DomainError("Bessel argument must be finite and >= 0");
}

// (x/2)^alpha / Gamma(alpha + 1) for x > 0.
double series_prefactor(double alpha, double x) {
  if (alpha == 0) return 1.0;
  return std::exp(alpha * std::log(0.5 * x) - std::lgamma(alpha + 1.0));
}

// sum_k (-x^2/4)^k / (k! (alpha+1)_k)
double reduced_series(double alpha, double x) {
  double q = -0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= q / (k * (k + alpha));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

}  // namespace

BesselOrder BesselOrder::for_dimension(double d) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  return BesselOrder{0.5 * (d - 2.0)};
}

double series_switch(double alpha) { return std::max(2.0, alpha); }

double bessel_j_series(double alpha, double x) {
  check_order(alpha);
  check_argument(x);
  if (x == 0) return alpha == 0 ? 1.0 : 0.0;
  return series_prefactor(alpha, x) * reduced_series(alpha, x);
}

bool bessel_j_asymptotic(double alpha, double x, double& out) {
  double mu = 4.0 * alpha * alpha;
  double p = 1.0, q = 0.0;
  double term = 1.0, prev = 1.0;
  bool converged = false;
  for (int k = 1; k < 200; ++k) {
    double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (term == 0.0) {
      converged = true;
      break;
    }
    if (std::abs(term) > std::abs(prev) && k > 2) break;
    switch (k % 4) {
      case 0: p += term; break;
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
    }
    if (std::abs(term) < 1e-17) {
      converged = true;
      break;
    }
    prev = term;
  }
  if (!converged) return false;
  // cos/sin of x - (2 alpha + 1) pi / 4 without forming the shifted argument
  double c = (2.0 * alpha + 1.0) * std::numbers::pi / 4.0;
  double cx = std::cos(x), sx = std::sin(x), cc = std::cos(c), sc = std::sin(c);
  double cw = cx * cc + sx * sc;
  double sw = sx * cc - cx * sc;
  out = std::sqrt(2.0 / (std::numbers::pi * x)) * (p * cw - q * sw);
  return true;
}

double bessel_j_recurrence(double alpha, double x) {
  check_order(alpha);
  check_argument(x);
  if (x == 0) return alpha == 0 ? 1.0 : 0.0;
  int n = static_cast<int>(std::ceil(x + 12.0 * std::cbrt(x) + 24.0 + alpha));
  if (n % 2) ++n;
  // weights in (x/2)^alpha = sum_k c_k Gamma(alpha+1) J_{alpha+2k}(x)
  std::vector<double> c(static_cast<std::size_t>(n / 2 + 1));
  c[0] = 1.0;
  double g = 1.0;  // Gamma(alpha+k) / (k! Gamma(alpha+1))
  for (int k = 1; k <= n / 2; ++k) {
    if (k > 1) g *= (alpha + k - 1) / k;
    c[static_cast<std::size_t>(k)] = (alpha + 2.0 * k) * g;
  }
  double jp = 0.0, j = 1e-30, norm = 0.0;
  for (int m = n; m >= 1; --m) {
    if (m % 2 == 0) norm += c[static_cast<std::size_t>(m / 2)] * j;
    double jm = 2.0 * (alpha + m) / x * j - jp;
    jp = j;
    j = jm;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += c[0] * j;
  return series_prefactor(alpha, x) * j / norm;
}

double bessel_j_large(double alpha, double x) {
  double out = 0.0;
  if (x >= std::max(25.0, 2.0 * alpha * alpha) && bessel_j_asymptotic(alpha, x, out)) return out;
  return bessel_j_recurrence(alpha, x);
}

double bessel_j(BesselOrder order, double x) {
  check_order(order.alpha);
  check_argument(x);
  if (x == 0) {
    if (order.alpha == 0) return 1.0;
    if (order.alpha > 0) return 0.0;
    throw DomainError("J_alpha(0) is unbounded for alpha < 0");
  }
  if (x < series_switch(order.alpha)) return bessel_j_series(order.alpha, x);
  return bessel_j_large(order.alpha, x);
}

double kernel_b_at_zero(double d) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  double alpha = 0.5 * (d - 2.0);
  return std::exp(-alpha * std::numbers::ln2 - std::lgamma(0.5 * d));
}

double kernel_b(double d, double x) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  check_argument(x);
  double alpha = 0.5 * (d - 2.0);
  if (x < series_switch(alpha)) return kernel_b_at_zero(d) * reduced_series(alpha, x);
  return std::pow(x, -alpha) * bessel_j_large(alpha, x);
}

KernelTable::KernelTable(double d, double x_max, double step) : d_(d) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(step > 0) || !std::isfinite(x_max) || x_max < 0) throw DomainError("invalid kernel table range");
  auto n = static_cast<std::size_t>(std::ceil(x_max / step)) + 1;
  x_max_ = static_cast<double>(n) * step;
  inv_step_ = 1.0 / step;
  data_.resize(3 * (n + 1));
  for (std::size_t i = 0; i <= n; ++i) {
    double x = static_cast<double>(i) * step;
    double b = kernel_b(d, x);
    double b2 = kernel_b(d + 2.0, x);
    data_[3 * i] = b;
    data_[3 * i + 1] = step * (-x * b2);
    data_[3 * i + 2] = step * step * (-b + (d - 1.0) * b2);
  }
}

}  // namespace rml::special

#include "rml/spline.hpp"

#include <algorithm>

#include "rml/errors.hpp"

namespace rml {

namespace {

void check_knots(const std::vector<double>& x) {
  if (x.size() < 2) throw DomainError("spline needs at least two knots");
  for (std::size_t i = 1; i < x.size(); ++i)
    if (!(x[i] > x[i - 1])) throw DomainError("spline knots must be strictly increasing");
}

}  // namespace

SplineSystem::SplineSystem(std::vector<double> knots) : x_(std::move(knots)) {
  check_knots(x_);
  std::size_t n = x_.size();
  h_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h_[i] = x_[i + 1] - x_[i];
  if (n < 4) {
    linear_ = true;
    return;
  }
  // unknowns M_1..M_{n-2}, stored at index i-1
  std::size_t m = n - 2;
  sub_.assign(m, 0.0);
  diag_.assign(m, 0.0);
  sup_.assign(m, 0.0);
  for (std::size_t i = 1; i <= n - 2; ++i) {
    sub_[i - 1] = h_[i - 1] / 6.0;
    diag_[i - 1] = (h_[i - 1] + h_[i]) / 3.0;
    sup_[i - 1] = h_[i] / 6.0;
  }
  double h0 = h_[0], h1 = h_[1];
  sub_[0] = 0.0;
  diag_[0] = (h0 + h1) * (h0 + 2.0 * h1) / (6.0 * h1);
  sup_[0] = (h1 * h1 - h0 * h0) / (6.0 * h1);
  double ha = h_[n - 3], hb = h_[n - 2];
  sub_[m - 1] = (ha * ha - hb * hb) / (6.0 * ha);
  diag_[m - 1] = (ha + hb) * (2.0 * ha + hb) / (6.0 * ha);
  sup_[m - 1] = 0.0;

  fwd_c_.resize(m);
  fwd_den_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double den = diag_[i] - (i ? sub_[i] * fwd_c_[i - 1] : 0.0);
    fwd_den_[i] = den;
    fwd_c_[i] = sup_[i] / den;
  }
  // transpose: sub'_i = sup_{i-1}, sup'_i = sub_{i+1}
  adj_c_.resize(m);
  adj_den_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double lower = i ? sup_[i - 1] : 0.0;
    double upper = i + 1 < m ? sub_[i + 1] : 0.0;
    double den = diag_[i] - (i ? lower * adj_c_[i - 1] : 0.0);
    adj_den_[i] = den;
    adj_c_[i] = upper / den;
  }
}

std::vector<double> SplineSystem::second_derivatives(std::span<const double> y) const {
  std::size_t n = x_.size();
  if (y.size() != n) throw DomainError("spline values and knots differ in length");
  std::vector<double> M(n, 0.0);
  if (linear_) return M;
  std::size_t m = n - 2;
  std::vector<double> z(m);
  for (std::size_t i = 1; i <= n - 2; ++i)
    z[i - 1] = (y[i + 1] - y[i]) / h_[i] - (y[i] - y[i - 1]) / h_[i - 1];
  for (std::size_t i = 0; i < m; ++i)
    z[i] = (z[i] - (i ? sub_[i] * z[i - 1] : 0.0)) / fwd_den_[i];
  for (std::size_t i = m - 1; i-- > 0;) z[i] -= fwd_c_[i] * z[i + 1];
  for (std::size_t i = 0; i < m; ++i) M[i + 1] = z[i];
  double h0 = h_[0], h1 = h_[1];
  M[0] = ((h0 + h1) * M[1] - h0 * M[2]) / h1;
  double ha = h_[n - 3], hb = h_[n - 2];
  M[n - 1] = ((ha + hb) * M[n - 2] - hb * M[n - 3]) / ha;
  return M;
}

void SplineSystem::adjoint(std::span<const double> a, std::span<const double> b,
                           std::span<double> w) const {
  std::size_t n = x_.size();
  std::copy(a.begin(), a.end(), w.begin());
  if (linear_) return;
  std::size_t m = n - 2;
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = b[i + 1];
  double h0 = h_[0], h1 = h_[1];
  z[0] += b[0] * (h0 + h1) / h1;
  z[1] -= b[0] * h0 / h1;
  double ha = h_[n - 3], hb = h_[n - 2];
  z[m - 1] += b[n - 1] * (ha + hb) / ha;
  z[m - 2] -= b[n - 1] * hb / ha;
  // solve T^T z' = z
  for (std::size_t i = 0; i < m; ++i)
    z[i] = (z[i] - (i ? sup_[i - 1] * z[i - 1] : 0.0)) / adj_den_[i];
  for (std::size_t i = m - 1; i-- > 0;) z[i] -= adj_c_[i] * z[i + 1];
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t i = k + 1;
    double zi = z[k];
    w[i + 1] += zi / h_[i];
    w[i] -= zi / h_[i] + zi / h_[i - 1];
    w[i - 1] += zi / h_[i - 1];
  }
}

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw DomainError("spline values and knots differ in length");
  SplineSystem system(x_);
  m_ = system.second_derivatives(y_);
}

double CubicSpline::operator()(double x) const {
  std::size_t n = x_.size();
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t c = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  c = std::min(c, n - 2);
  double h = x_[c + 1] - x_[c];
  double t = (x - x_[c]) / h;
  double s = 1.0 - t;
  return s * y_[c] + t * y_[c + 1] + h * h / 6.0 * ((s * s * s - s) * m_[c] + (t * t * t - t) * m_[c + 1]);
}

}  // namespace rml

#include "rml/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "rml/errors.hpp"
#include "rml/parallel.hpp"
#include "rml/quadrature.hpp"
#include "rml/special_functions.hpp"
#include "rml/spline.hpp"

namespace rml::hankel {

namespace {

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2) throw DomainError("radial grid needs at least two points");
  if (!(grid[0] > 0)) throw DomainError("radial grid must lie in (0, R]");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("radial grid must be strictly increasing");
  if (!std::isfinite(grid.back())) throw DomainError("radial grid must be finite");
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> g, std::vector<double> v, double dim)
    : grid(std::move(g)), values(std::move(v)), d(dim) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  check_grid(grid);
  if (grid.size() != values.size()) throw DomainError("grid and values differ in length");
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("profile values must be finite");
}

RadialProfile sample_profile(std::vector<double> grid, const std::function<double(double)>& fn, double d) {
  std::vector<double> v;
  v.reserve(grid.size());
  for (double r : grid) v.push_back(fn(r));
  return RadialProfile(std::move(grid), std::move(v), d);
}

std::vector<double> hybrid_grid(std::size_t n, double radius, double r_lin) {
  if (n < 8 || !(radius > r_lin) || !(r_lin > 0)) throw DomainError("hybrid grid needs n >= 8 and R > r_lin > 0");
  // n_lin linear points of step h = r_lin / n_lin, then geometric ratio 1 + h / r_lin
  // reaching R in the remaining points: n_lin (1 + ln(R / r_lin)) ~= n
  double lg = std::log(radius / r_lin);
  auto n_lin = static_cast<std::size_t>(std::floor(static_cast<double>(n) / (1.0 + lg)));
  n_lin = std::clamp<std::size_t>(n_lin, 2, n - 2);
  std::size_t n_geo = n - n_lin;
  std::vector<double> g;
  g.reserve(n);
  for (std::size_t i = 1; i <= n_lin; ++i) g.push_back(r_lin * static_cast<double>(i) / static_cast<double>(n_lin));
  for (std::size_t i = 1; i <= n_geo; ++i)
    g.push_back(i == n_geo ? radius : r_lin * std::exp(lg * static_cast<double>(i) / static_cast<double>(n_geo)));
  return g;
}

std::vector<double> uniform_grid(std::size_t n, double radius) {
  if (n < 2 || !(radius > 0)) throw DomainError("uniform grid needs n >= 2 and R > 0");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = radius * static_cast<double>(i + 1) / static_cast<double>(n);
  return g;
}

double max_step(std::span<const double> grid) {
  check_grid(grid);
  double h = grid[0];
  for (std::size_t i = 1; i < grid.size(); ++i) h = std::max(h, grid[i] - grid[i - 1]);
  return h;
}

double max_admissible_frequency(std::span<const double> grid) {
  return std::numbers::pi / (4.0 * max_step(grid));
}

struct HankelPlan::Impl {
  SplineSystem spline;
  special::KernelTable table;
  // per node: position, weight * x^{d-1}, and the four spline basis factors
  std::vector<double> x, w, e0, e1, e2, e3;
  std::vector<std::size_t> cell;
  std::size_t cells;

  Impl(double d, const std::vector<double>& grid, double x_max) : spline(grid), table(d, x_max) {
    const GaussRule& rule = gauss_legendre(4);
    std::size_t n = grid.size();
    cells = n - 1;
    auto add_segment = [&](double a, double b, std::size_t c) {
      double h = grid[c + 1] - grid[c];
      double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t k = 0; k < 4; ++k) {
        double xk = mid + half * rule.nodes[k];
        double t = (xk - grid[c]) / h, s = 1.0 - t;
        x.push_back(xk);
        w.push_back(half * rule.weights[k] * std::pow(xk, d - 1.0));
        e0.push_back(s);
        e1.push_back(t);
        e2.push_back(h * h / 6.0 * (s * s * s - s));
        e3.push_back(h * h / 6.0 * (t * t * t - t));
        cell.push_back(c);
      }
    };
    add_segment(0.0, grid[0], 0);
    for (std::size_t c = 0; c + 1 < n; ++c) add_segment(grid[c], grid[c + 1], c);
  }
};

HankelPlan::HankelPlan(double d, std::vector<double> source_grid, std::vector<double> targets)
    : d_(d), grid_(std::move(source_grid)), targets_(std::move(targets)) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  check_grid(grid_);
  double rho_max = 0.0;
  for (double rho : targets_) {
    if (!(rho >= 0) || !std::isfinite(rho)) throw DomainError("transform targets must be finite and >= 0");
    rho_max = std::max(rho_max, rho);
  }
  double admissible = max_admissible_frequency(grid_);
  if (rho_max > admissible * (1 + 1e-12)) {
    std::ostringstream msg;
    msg << "grid too coarse for rho = " << rho_max << "; maximum admissible rho is " << admissible;
    throw ResolutionError(msg.str(), admissible);
  }
  impl_ = std::make_shared<const Impl>(d_, grid_, rho_max * grid_.back() + 1.0);
  std::size_t n = grid_.size();
  if (static_cast<double>(n) * static_cast<double>(targets_.size()) <= kCacheLimit) {
    rows_.assign(n * targets_.size(), 0.0);
    parallel_for(targets_.size(), [&](std::size_t j) { build_row(targets_[j], std::span(rows_).subspan(j * n, n)); });
  }
}

void HankelPlan::build_row(double rho, std::span<double> row) const {
  const Impl& im = *impl_;
  std::size_t n = grid_.size();
  std::vector<double> a(n, 0.0), b(n, 0.0);
  for (std::size_t k = 0; k < im.x.size(); ++k) {
    double g = im.table(rho * im.x[k]) * im.w[k];
    std::size_t c = im.cell[k];
    a[c] += g * im.e0[k];
    a[c + 1] += g * im.e1[k];
    b[c] += g * im.e2[k];
    b[c + 1] += g * im.e3[k];
  }
  im.spline.adjoint(a, b, row);
}

std::vector<double> HankelPlan::apply(std::span<const double> values) const {
  std::size_t n = grid_.size();
  if (values.size() != n) throw DomainError("profile does not match the plan's source grid");
  std::vector<double> out(targets_.size());
  auto dot = [&](std::span<const double> row) {
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) s.add(row[i] * values[i]);
    return s.value();
  };
  if (cached()) {
    for (std::size_t j = 0; j < targets_.size(); ++j) out[j] = dot(std::span(rows_).subspan(j * n, n));
  } else {
    parallel_for(targets_.size(), [&](std::size_t j) {
      std::vector<double> row(n);
      build_row(targets_[j], row);
      out[j] = dot(row);
    });
  }
  return out;
}

std::vector<double> hankel_transform(const RadialProfile& f, std::span<const double> targets) {
  HankelPlan plan(f.d, f.grid, std::vector<double>(targets.begin(), targets.end()));
  return plan.apply(f.values);
}

double hankel_roundtrip_error(const RadialProfile& f, const RoundtripOptions& opts) {
  double fmax = 0.0;
  for (double v : f.values) fmax = std::max(fmax, std::abs(v));
  if (fmax == 0.0) return 0.0;
  std::vector<double> back;
  if (opts.band > 0) {
    std::size_t points = opts.points;
    if (points == 0)
      points = static_cast<std::size_t>(std::ceil(opts.band * 16.0 * f.radius() / std::numbers::pi));
    auto mid = uniform_grid(points, opts.band);
    HankelPlan forward(f.d, f.grid, mid);
    HankelPlan inverse(f.d, mid, f.grid);
    back = inverse.apply(forward.apply(f.values));
  } else {
    HankelPlan plan(f.d, f.grid, f.grid);
    back = plan.apply(plan.apply(f.values));
  }
  double err = 0.0;
  for (std::size_t i = 0; i < back.size(); ++i) err = std::max(err, std::abs(back[i] - f.values[i]));
  return err / fmax;
}

namespace {

// integral of u(r) v(r) r^{d-1} over [0, R] for spline interpolants, or u alone when v is null
double spline_integral(const RadialProfile& a, const RadialProfile* b, bool absolute) {
  CubicSpline sa(a.grid, a.values);
  std::unique_ptr<CubicSpline> sb;
  if (b) {
    if (b->grid != a.grid) throw DomainError("profiles must share a grid");
    sb = std::make_unique<CubicSpline>(b->grid, b->values);
  }
  const GaussRule& rule = gauss_legendre(6);
  CompensatedSum sum;
  auto seg = [&](double lo, double hi) {
    double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double x = mid + half * rule.nodes[k];
      double u = sa(x) * (sb ? (*sb)(x) : 1.0);
      if (absolute) u = std::abs(u);
      sum.add(half * rule.weights[k] * u * std::pow(x, a.d - 1.0));
    }
  };
  seg(0.0, a.grid[0]);
  for (std::size_t i = 0; i + 1 < a.grid.size(); ++i) seg(a.grid[i], a.grid[i + 1]);
  return sum.value();
}

}  // namespace

double inner_product(const RadialProfile& a, const RadialProfile& b) { return spline_integral(a, &b, false); }

double l2_norm(const RadialProfile& f) { return std::sqrt(std::max(0.0, spline_integral(f, &f, false))); }

double l1_norm(const RadialProfile& f) { return spline_integral(f, nullptr, true); }

std::function<double(double)> interpolant(const RadialProfile& f) {
  auto s = std::make_shared<CubicSpline>(f.grid, f.values);
  double R = f.radius();
  return [s, R](double r) { return r > R ? 0.0 : (*s)(r); };
}

lorentz::SampledFunction as_sampled(const RadialProfile& f) {
  CubicSpline s(f.grid, f.values);
  std::vector<double> g{0.0}, v{s(0.0)};
  g.insert(g.end(), f.grid.begin(), f.grid.end());
  v.insert(v.end(), f.values.begin(), f.values.end());
  return lorentz::SampledFunction(std::move(g), std::move(v), lorentz::WeightedMeasure::half_line(f.d, f.radius()));
}

QuadratureNodes panel_nodes(const CompactSource& src, TransformKind kind, double d, double panel, int order) {
  if (!(panel > 0)) throw DomainError("panel length must be positive");
  const GaussRule& rule = gauss_legendre(order);
  std::vector<Breakpoint> edges{{src.lo, false}, {src.hi, false}};
  for (const auto& bp : src.breakpoints) {
    if (bp.position < src.lo || bp.position > src.hi) continue;
    edges.push_back(bp);
  }
  std::stable_sort(edges.begin(), edges.end(), [](auto& a, auto& b) { return a.position < b.position; });
  // merge coincident edges, keeping the graded flag if any copy has it
  // x^{d-1} is not smooth at 0 for non-integer d
  if (kind == TransformKind::Hankel && edges.front().position == 0.0) edges.front().graded = true;
  std::vector<Breakpoint> merged;
  for (const auto& e : edges) {
    if (!merged.empty() && e.position == merged.back().position)
      merged.back().graded = merged.back().graded || e.graded;
    else
      merged.push_back(e);
  }
  QuadratureNodes ns;
  auto push = [&](double xi, double weight) {
    if (weight == 0.0) return;
    if (kind == TransformKind::Hankel)
      weight *= std::pow(xi, d - 1.0);
    else
      weight /= std::numbers::pi;
    ns.x.push_back(xi);
    ns.w.push_back(weight);
  };
  for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
    double a = merged[i].position, b = merged[i + 1].position;
    double len = b - a;
    if (!(len > 0)) continue;
    auto count = static_cast<std::size_t>(std::ceil(len / panel - 1e-12));
    count = std::max<std::size_t>(count, 1);
    if (count == 1 && merged[i].graded && merged[i + 1].graded) count = 2;
    for (std::size_t p = 0; p < count; ++p) {
      double pa = a + len * static_cast<double>(p) / static_cast<double>(count);
      double pb = p + 1 == count ? b : a + len * static_cast<double>(p + 1) / static_cast<double>(count);
      bool grade_left = p == 0 && merged[i].graded;
      bool grade_right = p + 1 == count && merged[i + 1].graded;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        double u = 0.5 * (1.0 + rule.nodes[k]);
        double wu = 0.5 * rule.weights[k];
        if (grade_left) {
          push(pa + (pb - pa) * u * u * u * u, wu * 4.0 * (pb - pa) * u * u * u);
        } else if (grade_right) {
          push(pb - (pb - pa) * u * u * u * u, wu * 4.0 * (pb - pa) * u * u * u);
        } else {
          push(pa + (pb - pa) * u, wu * (pb - pa));
        }
      }
    }
  }
  return ns;
}

std::vector<double> compact_transform(const CompactSource& src, TransformKind kind, double d,
                                      std::span<const double> targets, const PanelOptions& opts) {
  if (kind == TransformKind::Hankel && !(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(src.hi >= src.lo) || src.lo < 0) throw DomainError("compact source needs 0 <= lo <= hi");
  std::vector<double> out(targets.size(), 0.0);
  if (src.hi == src.lo || targets.empty()) return out;
  double cap = opts.max_panel;
  if (src.oscillation > 0) cap = std::min(cap, std::numbers::pi / src.oscillation);
  double x0 = std::numbers::pi / cap;
  // targets grouped by level; level k panels have length cap / 2^k
  std::map<int, std::vector<std::size_t>> levels;
  double x_max = 0.0;
  for (std::size_t j = 0; j < targets.size(); ++j) {
    double x = targets[j];
    if (!(x >= 0) || !std::isfinite(x)) throw DomainError("transform targets must be finite and >= 0");
    x_max = std::max(x_max, x);
    int k = x <= x0 ? 0 : static_cast<int>(std::ceil(std::log2(x / x0)));
    levels[k].push_back(j);
  }
  std::unique_ptr<special::KernelTable> table;
  if (kind == TransformKind::Hankel && targets.size() > 64)
    table = std::make_unique<special::KernelTable>(d, x_max * src.hi + 1.0);
  for (const auto& [k, members] : levels) {
    QuadratureNodes ns = panel_nodes(src, kind, d, cap / std::ldexp(1.0, k), opts.order);
    std::vector<double> f(ns.x.size());
    for (std::size_t i = 0; i < ns.x.size(); ++i) f[i] = ns.w[i] * src.eval(ns.x[i]);
    parallel_for(members.size(), [&](std::size_t m) {
      std::size_t j = members[m];
      double x = targets[j];
      CompensatedSum s;
      if (kind == TransformKind::Cosine) {
        for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * std::cos(x * ns.x[i]));
      } else if (table) {
        for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * (*table)(x * ns.x[i]));
      } else {
        for (std::size_t i = 0; i < f.size(); ++i) s.add(f[i] * special::kernel_b(d, x * ns.x[i]));
      }
      out[j] = s.value();
    });
  }
  return out;
}

}  // namespace rml::hankel

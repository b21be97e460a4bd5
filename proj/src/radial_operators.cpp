#include "rml/radial_operators.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rml/errors.hpp"
#include "rml/parallel.hpp"
#include "rml/quadrature.hpp"
#include "rml/special_functions.hpp"

namespace rml::operators {

std::vector<double> geometric_t_grid(std::size_t n) {
  if (n == 0) throw DomainError("t-grid needs at least one point");
  if (n == 1) return {1.0};
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = std::exp2(static_cast<double>(k) / static_cast<double>(n - 1));
  t.back() = 2.0;
  return t;
}

std::vector<double> uniform_t_grid(std::size_t n) {
  if (n == 0) throw DomainError("t-grid needs at least one point");
  if (n == 1) return {1.0};
  std::vector<double> t(n);
  for (std::size_t k = 0; k < n; ++k) t[k] = 1.0 + static_cast<double>(k) / static_cast<double>(n - 1);
  return t;
}

namespace {

void check_t_grid(std::span<const double> t) {
  if (t.empty()) throw DomainError("t-grid is empty");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!(t[k] >= 1.0 && t[k] <= 2.0)) throw RangeError("t must lie in [1, 2]");
    if (k > 0 && !(t[k] > t[k - 1])) throw DomainError("t-grid must be strictly increasing");
  }
}

}  // namespace

std::vector<double> t_weights(std::span<const double> t_grid) {
  check_t_grid(t_grid);
  if (t_grid.size() == 1) return {1.0};
  return trapezoid_weights(t_grid);
}

TimeFamily::TimeFamily(std::vector<double> t_grid, std::vector<RadialProfile> profiles)
    : t_(std::move(t_grid)), profiles_(std::move(profiles)) {
  check_t_grid(t_);
  if (profiles_.size() != t_.size()) throw DomainError("time family needs one profile per t");
  for (const auto& p : profiles_) {
    if (p.grid != profiles_.front().grid) throw DomainError("time family profiles must share one radial grid");
    if (p.d != profiles_.front().d) throw DomainError("time family profiles must share one dimension");
  }
}

TimeFamily TimeFamily::separable(std::vector<double> t_grid, std::vector<RadialProfile> basis,
                                 std::vector<std::vector<double>> coefficients) {
  if (basis.empty()) throw DomainError("separable family needs a basis");
  if (coefficients.size() != t_grid.size()) throw DomainError("separable family needs coefficients per t");
  std::vector<RadialProfile> profiles;
  const auto& grid = basis.front().grid;
  for (const auto& c : coefficients) {
    if (c.size() != basis.size()) throw DomainError("coefficient count must match the basis");
    std::vector<double> v(grid.size(), 0.0);
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (basis[j].grid != grid) throw DomainError("time family profiles must share one radial grid");
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[j] * basis[j].values[i];
    }
    profiles.emplace_back(grid, std::move(v), basis.front().d);
  }
  TimeFamily fam(std::move(t_grid), std::move(profiles));
  fam.basis_ = std::move(basis);
  fam.coef_ = std::move(coefficients);
  return fam;
}

TimeFamily TimeFamily::constant(std::vector<double> t_grid, const RadialProfile& g) {
  std::vector<std::vector<double>> c(t_grid.size(), std::vector<double>{1.0});
  return separable(std::move(t_grid), {g}, std::move(c));
}

std::vector<double> TimeFamily::b_norm() const {
  auto w = t_weights(t_);
  std::vector<double> out(grid().size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CompensatedSum s;
    for (std::size_t k = 0; k < t_.size(); ++k) s.add(w[k] * std::abs(profiles_[k].values[i]));
    out[i] = s.value();
  }
  return out;
}

RadialProfile TimeFamily::b_norm_profile() const {
  return RadialProfile(profiles_.front().grid, b_norm(), dimension());
}

TimeFamily TimeFamily::scaled(double c) const {
  TimeFamily out = *this;
  for (auto& p : out.profiles_)
    for (double& v : p.values) v *= c;
  for (auto& p : out.basis_)
    for (double& v : p.values) v *= c;
  return out;
}

namespace {

constexpr int kOrder = 15;

struct ScaleNodes {
  double t = 1.0;
  std::vector<std::size_t> excluded;  // base panels replaced by the nodes below
  std::vector<double> x, w;
};

// Fixed panel lattice a + p h over the multiplier's support for every t in
// the request. Panels containing a dilated breakpoint t b are replaced, for
// that t only, by sub-panels cut at t b (graded next to singular points).
// The lattice depends on the multiplier and on r_max alone, so a column for
// a given t comes out identical whatever other scales share the run.
struct Layout {
  double a = 0, h = 0;
  std::size_t panels = 0;
  std::vector<double> x, w;
  std::vector<ScaleNodes> scales;
};

void push_panel(double pa, double pb, bool grade_left, bool grade_right, double d, std::vector<double>& x,
                std::vector<double>& w) {
  const GaussRule& rule = gauss_legendre(kOrder);
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    double u = 0.5 * (1.0 + rule.nodes[k]);
    double wu = 0.5 * rule.weights[k];
    double xi, wt;
    if (grade_left) {
      xi = pa + (pb - pa) * u * u * u * u;
      wt = wu * 4.0 * (pb - pa) * u * u * u;
    } else if (grade_right) {
      xi = pb - (pb - pa) * u * u * u * u;
      wt = wu * 4.0 * (pb - pa) * u * u * u;
    } else {
      xi = pa + (pb - pa) * u;
      wt = wu * (pb - pa);
    }
    x.push_back(xi);
    w.push_back(wt * std::pow(xi, d - 1.0));
  }
}

Layout make_layout(const Multiplier& m, double d, double r_max, std::span<const double> ts, bool dilate) {
  Layout L;
  double t_top = dilate ? ts.back() : 1.0;
  L.a = m.support_lo();
  L.h = std::min(0.02, std::numbers::pi / r_max);
  double span = m.support_hi() * t_top - L.a;
  L.panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / L.h - 1e-9)));
  const GaussRule& rule = gauss_legendre(kOrder);
  for (std::size_t p = 0; p < L.panels; ++p) {
    double pa = L.a + L.h * static_cast<double>(p);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      double xi = pa + L.h * 0.5 * (1.0 + rule.nodes[k]);
      L.x.push_back(xi);
      L.w.push_back(0.5 * L.h * rule.weights[k] * std::pow(xi, d - 1.0));
    }
  }
  std::vector<hankel::Breakpoint> bps{{m.support_lo(), false}, {m.support_hi(), false}};
  for (const auto& bp : m.source().breakpoints) bps.push_back(bp);
  double tol = 1e-12 * L.h;
  for (double t : ts) {
    double s = dilate ? t : 1.0;
    std::map<std::size_t, std::vector<hankel::Breakpoint>> cuts;
    for (const auto& bp : bps) {
      double c = bp.position * s;
      double rel = (c - L.a) / L.h;
      auto p = static_cast<std::size_t>(std::clamp(std::floor(rel), 0.0, static_cast<double>(L.panels - 1)));
      double pa = L.a + L.h * static_cast<double>(p), pb = pa + L.h;
      if (std::abs(c - pa) <= tol) {
        if (bp.graded) {
          cuts[p].push_back({pa, true});
          if (p > 0) cuts[p - 1].push_back({pa, true});
        }
      } else if (std::abs(c - pb) <= tol) {
        if (bp.graded) {
          cuts[p].push_back({pb, true});
          if (p + 1 < L.panels) cuts[p + 1].push_back({pb, true});
        }
      } else if (c > pa && c < pb) {
        cuts[p].push_back(bp.graded ? hankel::Breakpoint{c, true} : hankel::Breakpoint{c, false});
      }
    }
    ScaleNodes sc;
    sc.t = t;
    for (auto& [p, list] : cuts) {
      double pa = L.a + L.h * static_cast<double>(p), pb = pa + L.h;
      list.push_back({pa, false});
      list.push_back({pb, false});
      std::sort(list.begin(), list.end(), [](auto& u, auto& v) { return u.position < v.position; });
      std::vector<hankel::Breakpoint> merged;
      for (const auto& e : list) {
        if (!merged.empty() && std::abs(e.position - merged.back().position) <= tol)
          merged.back().graded = merged.back().graded || e.graded;
        else
          merged.push_back(e);
      }
      sc.excluded.push_back(p);
      for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        double u = merged[i].position, v = merged[i + 1].position;
        bool gl = merged[i].graded, gr = merged[i + 1].graded;
        if (gl && gr) {
          double mid = 0.5 * (u + v);
          push_panel(u, mid, true, false, d, sc.x, sc.w);
          push_panel(mid, v, false, true, d, sc.x, sc.w);
        } else {
          push_panel(u, v, gl, gr, d, sc.x, sc.w);
        }
      }
    }
    L.scales.push_back(std::move(sc));
  }
  return L;
}

// Forward transforms at the base nodes and at every scale's extra nodes.
struct Forward {
  std::vector<double> base;
  std::vector<std::vector<double>> extra;  // per scale
};

class ForwardPlans {
 public:
  ForwardPlans(const Layout& L, double d, const std::vector<double>& grid) : L_(L) {
    std::vector<double> ex;
    for (const auto& sc : L.scales) ex.insert(ex.end(), sc.x.begin(), sc.x.end());
    base_ = std::make_unique<hankel::HankelPlan>(d, grid, L.x);
    if (!ex.empty()) extra_ = std::make_unique<hankel::HankelPlan>(d, grid, std::move(ex));
  }

  Forward operator()(std::span<const double> values) const {
    Forward F;
    F.base = base_->apply(values);
    std::vector<double> ex = extra_ ? extra_->apply(values) : std::vector<double>{};
    std::size_t off = 0;
    for (const auto& sc : L_.scales) {
      F.extra.emplace_back(ex.begin() + static_cast<std::ptrdiff_t>(off),
                           ex.begin() + static_cast<std::ptrdiff_t>(off + sc.x.size()));
      off += sc.x.size();
    }
    return F;
  }

 private:
  const Layout& L_;
  std::unique_ptr<hankel::HankelPlan> base_, extra_;
};

Forward combine(const std::vector<Forward>& basis, std::span<const double> coef) {
  Forward F;
  F.base.assign(basis.front().base.size(), 0.0);
  F.extra.resize(basis.front().extra.size());
  for (std::size_t s = 0; s < F.extra.size(); ++s) F.extra[s].assign(basis.front().extra[s].size(), 0.0);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    for (std::size_t i = 0; i < F.base.size(); ++i) F.base[i] += coef[j] * basis[j].base[i];
    for (std::size_t s = 0; s < F.extra.size(); ++s)
      for (std::size_t i = 0; i < F.extra[s].size(); ++i) F.extra[s][i] += coef[j] * basis[j].extra[s][i];
  }
  return F;
}

// Spectral data for the back transform: base columns S[i * C + c] and extra
// (node, weighted value) lists per column.
struct Spectrum {
  std::size_t columns = 0;
  std::vector<double> S;
  std::vector<std::vector<double>> ex_x, ex_s;
};

// Adds w * sigma_t to column c, where sigma_t = m_t F on the nodes of scale k.
void accumulate(Spectrum& sp, std::size_t c, double weight, const Layout& L, std::size_t k, const Forward& F,
                const Multiplier& m, bool dilate) {
  const ScaleNodes& sc = L.scales[k];
  double s = dilate ? sc.t : 1.0;
  std::vector<char> skip(L.panels, 0);
  for (std::size_t p : sc.excluded) skip[p] = 1;
  std::size_t per = static_cast<std::size_t>(kOrder);
  for (std::size_t i = 0; i < L.x.size(); ++i) {
    if (skip[i / per]) continue;
    double mv = m(L.x[i] / s);
    if (mv == 0.0) continue;
    sp.S[i * sp.columns + c] += weight * (L.w[i] * mv * F.base[i]);
  }
  for (std::size_t i = 0; i < sc.x.size(); ++i) {
    double mv = m(sc.x[i] / s);
    if (mv == 0.0) continue;
    sp.ex_x[c].push_back(sc.x[i]);
    sp.ex_s[c].push_back(weight * (sc.w[i] * mv * F.extra[k][i]));
  }
}

std::vector<std::vector<double>> back_transform(const Spectrum& sp, const Layout& L, double d,
                                                const std::vector<double>& grid) {
  std::size_t C = sp.columns;
  double x_max = L.a + L.h * static_cast<double>(L.panels);
  special::KernelTable table(d, grid.back() * x_max + 1.0);
  std::vector<std::vector<double>> out(C, std::vector<double>(grid.size()));
  parallel_for(grid.size(), [&](std::size_t j) {
    double r = grid[j];
    std::vector<double> acc(C, 0.0);
    for (std::size_t i = 0; i < L.x.size(); ++i) {
      double k = table(r * L.x[i]);
      const double* s = &sp.S[i * C];
      for (std::size_t c = 0; c < C; ++c) acc[c] += k * s[c];
    }
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t e = 0; e < sp.ex_x[c].size(); ++e) acc[c] += table(r * sp.ex_x[c][e]) * sp.ex_s[c][e];
      out[c][j] = acc[c];
    }
  });
  return out;
}

Spectrum empty_spectrum(std::size_t columns, const Layout& L) {
  Spectrum sp;
  sp.columns = columns;
  sp.S.assign(L.x.size() * columns, 0.0);
  sp.ex_x.resize(columns);
  sp.ex_s.resize(columns);
  return sp;
}

void check_dimension(const RadialProfile& f, double d) {
  if (f.d != d) throw DomainError("profile dimension does not match d");
}

}  // namespace

std::vector<RadialProfile> apply_scales(const Multiplier& m, const RadialProfile& f, double d,
                                        std::span<const double> t_grid) {
  check_dimension(f, d);
  check_t_grid(t_grid);
  std::vector<RadialProfile> out;
  if (m.is_zero()) {
    for (std::size_t k = 0; k < t_grid.size(); ++k)
      out.emplace_back(f.grid, std::vector<double>(f.grid.size(), 0.0), d);
    return out;
  }
  Layout L = make_layout(m, d, f.radius(), t_grid, true);
  ForwardPlans plans(L, d, f.grid);
  Forward F = plans(f.values);
  Spectrum sp = empty_spectrum(t_grid.size(), L);
  for (std::size_t k = 0; k < t_grid.size(); ++k) accumulate(sp, k, 1.0, L, k, F, m, true);
  auto cols = back_transform(sp, L, d, f.grid);
  for (auto& c : cols) out.emplace_back(f.grid, std::move(c), d);
  return out;
}

RadialProfile apply_scaled(const Multiplier& m, const RadialProfile& f, double d, double t) {
  std::vector<double> ts{t};
  return std::move(apply_scales(m, f, d, ts).front());
}

RadialProfile apply_multiplier(const Multiplier& m, const RadialProfile& f, double d) {
  return apply_scaled(m, f, d, 1.0);
}

RadialProfile maximal_operator(const Multiplier& m, const RadialProfile& f, double d,
                               std::span<const double> t_grid) {
  auto cols = apply_scales(m, f, d, t_grid);
  std::vector<double> v(f.grid.size(), 0.0);
  for (const auto& c : cols)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::max(v[i], std::abs(c.values[i]));
  return RadialProfile(f.grid, std::move(v), d);
}

RadialProfile averaged_dual_operator(const Multiplier& m, const TimeFamily& fam, double d, bool dilate) {
  check_dimension(fam.at(0), d);
  std::vector<double> grid(fam.grid().begin(), fam.grid().end());
  if (m.is_zero()) return RadialProfile(grid, std::vector<double>(grid.size(), 0.0), d);
  const auto& ts = fam.t_grid();
  auto wt = t_weights(ts);
  Layout L = make_layout(m, d, grid.back(), ts, dilate);
  ForwardPlans plans(L, d, grid);
  Spectrum sp = empty_spectrum(1, L);
  if (fam.is_separable()) {
    std::vector<Forward> basis;
    for (const auto& b : fam.basis()) basis.push_back(plans(b.values));
    for (std::size_t k = 0; k < ts.size(); ++k)
      accumulate(sp, 0, wt[k], L, k, combine(basis, fam.coefficients()[k]), m, dilate);
  } else {
    for (std::size_t k = 0; k < ts.size(); ++k) accumulate(sp, 0, wt[k], L, k, plans(fam.at(k).values), m, dilate);
  }
  auto cols = back_transform(sp, L, d, grid);
  return RadialProfile(std::move(grid), std::move(cols.front()), d);
}

}  // namespace rml::operators

#include "rml/kernel_decomposition.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <functional>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "rml/equivalence_probe.hpp"
#include "rml/errors.hpp"
#include "rml/parallel.hpp"
#include "rml/quadrature.hpp"
#include "rml/spline.hpp"

namespace rml::decomposition {

using multipliers::smooth_step;

double CutoffFunction::operator()(double rho) const {
  return smooth_step((rho - 0.125) / 0.125) * smooth_step((8.0 - rho) / 4.0);
}

MajorantWeight::MajorantWeight(double n) : N(n) {
  if (!(n > 1)) throw DomainError("N must exceed 1");
}

double MajorantWeight::operator()(double x) const { return std::pow(1.0 + std::abs(x), -N); }

double DyadicBlock::lo() const { return std::ldexp(1.0, m); }
double DyadicBlock::hi() const { return std::ldexp(1.0, m + 1); }
double DyadicBlock::star_lo() const { return std::ldexp(1.0, m - 2); }
double DyadicBlock::star_hi() const { return std::ldexp(1.0, m + 3); }

int DyadicBlock::partition_count(double r) const {
  int below = (r > 0 && r < star_lo()) ? 1 : 0;
  int star = in_star(r) ? 1 : 0;
  int above = r >= star_hi() ? 1 : 0;
  return below + star + above;
}

std::vector<DyadicBlock> covering_blocks(double r_min, double r_max) {
  if (!(r_min > 0) || !(r_max >= r_min)) throw DomainError("covering blocks need 0 < r_min <= r_max");
  std::vector<DyadicBlock> out;
  for (int m = std::ilogb(r_min); m <= std::ilogb(r_max); ++m) out.push_back({m});
  return out;
}

QuadratureOptions QuadratureOptions::refined() const {
  QuadratureOptions o = *this;
  o.max_panel *= 0.5;
  o.line_step *= 0.5;
  return o;
}

namespace {

double b_factor(double d, double r, double s) { return std::pow((1.0 + r) * (1.0 + s), -(d - 1.0) / 2.0); }

}  // namespace

BilinearKernel::BilinearKernel(const Multiplier& m, double d, std::vector<double> t_grid, double r_max,
                               double s_max, const QuadratureOptions& opts)
    : d_(d), t_(std::move(t_grid)), r_max_(r_max), s_max_(s_max) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(r_max > 0) || !(s_max > 0)) throw DomainError("bilinear kernel needs positive r and s ranges");
  tw_ = operators::t_weights(t_);
  if (m.is_zero()) return;
  hankel::CompactSource src;
  src.lo = m.support_lo() * t_.front();
  src.hi = m.support_hi() * t_.back();
  src.eval = [](double) { return 0.0; };
  std::vector<hankel::Breakpoint> base{{m.support_lo(), false}, {m.support_hi(), false}};
  for (const auto& bp : m.source().breakpoints) base.push_back(bp);
  for (double t : t_)
    for (const auto& bp : base) src.breakpoints.push_back({bp.position * t, bp.graded});
  double panel = std::min(opts.max_panel, std::numbers::pi / (r_max + s_max));
  auto nodes = hankel::panel_nodes(src, hankel::TransformKind::Hankel, d, panel);
  x_ = std::move(nodes.x);
  w_ = std::move(nodes.w);
  std::size_t T = t_.size();
  mt_.resize(x_.size() * T);
  for (std::size_t i = 0; i < x_.size(); ++i)
    for (std::size_t k = 0; k < T; ++k) mt_[i * T + k] = tw_[k] * m(x_[i] / t_[k]);
  table_ = std::make_shared<special::KernelTable>(d, std::max(r_max, s_max) * src.hi + 1.0);
}

std::vector<double> BilinearKernel::evaluate(std::span<const double> r, double s, std::span<const double> g) const {
  if (g.size() != t_.size()) throw DomainError("g must be sampled on the t-grid");
  if (!(s >= 0) || s > s_max_ * (1 + 1e-12)) throw DomainError("s outside the bilinear kernel range");
  std::vector<double> out(r.size(), 0.0);
  if (x_.empty()) return out;
  std::size_t T = t_.size();
  std::vector<double> G(x_.size());
  for (std::size_t i = 0; i < x_.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < T; ++k) acc += mt_[i * T + k] * g[k];
    G[i] = acc == 0.0 ? 0.0 : w_[i] * (*table_)(s * x_[i]) * acc;
  }
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (!(r[j] >= 0) || r[j] > r_max_ * (1 + 1e-12)) throw DomainError("r outside the bilinear kernel range");
    CompensatedSum sum;
    for (std::size_t i = 0; i < x_.size(); ++i) sum.add(G[i] * (*table_)(r[j] * x_[i]));
    out[j] = sum.value();
  }
  return out;
}

double BilinearKernel::operator()(double r, double s, std::span<const double> g) const {
  double rr[1] = {r};
  return evaluate(rr, s, g)[0];
}

double bilinear_kernel(const Multiplier& m, double r, double s, std::span<const double> t_grid,
                       std::span<const double> g, double d, const QuadratureOptions& opts) {
  BilinearKernel k(m, d, std::vector<double>(t_grid.begin(), t_grid.end()), std::max(r, 1.0), std::max(s, 1.0),
                   opts);
  return k(r, s, g);
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

// Linear convolution with w_N through a zero-padded real FFT of length L >= 2n - 1.
struct Majorant::Fft {
  std::size_t n = 0, L = 0;
  fftw_plan fwd = nullptr, bwd = nullptr;
  std::vector<std::complex<double>> kernel;

  Fft(std::size_t n_, double step, const MajorantWeight& w) : n(n_) {
    L = 1;
    while (L < 2 * n - 1) L <<= 1;
    double* in = fftw_alloc_real(L);
    fftw_complex* out = fftw_alloc_complex(L / 2 + 1);
    {
      std::lock_guard lock(fftw_planner_mutex());
      fwd = fftw_plan_dft_r2c_1d(static_cast<int>(L), in, out, FFTW_ESTIMATE);
      bwd = fftw_plan_dft_c2r_1d(static_cast<int>(L), out, in, FFTW_ESTIMATE);
    }
    std::fill(in, in + L, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double v = w(static_cast<double>(k) * step);
      in[k] = v;
      if (k > 0) in[L - k] = v;
    }
    fftw_execute_dft_r2c(fwd, in, out);
    kernel.resize(L / 2 + 1);
    for (std::size_t k = 0; k <= L / 2; ++k) kernel[k] = {out[k][0], out[k][1]};
    fftw_free(in);
    fftw_free(out);
  }

  ~Fft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }

  // out_i = sum_j a_j w((i - j) step)
  std::vector<double> convolve(std::span<const double> a) const {
    double* in = fftw_alloc_real(L);
    fftw_complex* spec = fftw_alloc_complex(L / 2 + 1);
    std::fill(in, in + L, 0.0);
    std::copy(a.begin(), a.end(), in);
    fftw_execute_dft_r2c(fwd, in, spec);
    for (std::size_t k = 0; k <= L / 2; ++k) {
      std::complex<double> z(spec[k][0], spec[k][1]);
      z *= kernel[k];
      spec[k][0] = z.real();
      spec[k][1] = z.imag();
    }
    fftw_execute_dft_c2r(bwd, spec, in);
    std::vector<double> out(n);
    double scale = 1.0 / static_cast<double>(L);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, in[i] * scale);
    fftw_free(in);
    fftw_free(spec);
    return out;
  }
};

Majorant::Majorant(const Multiplier& m, std::vector<double> t_grid, double x_max, const QuadratureOptions& opts)
    : t_(std::move(t_grid)), step_(opts.line_step) {
  if (!(x_max > 0) || !(step_ > 0)) throw DomainError("majorant grid needs positive extent and step");
  tw_ = operators::t_weights(t_);
  half_ = static_cast<std::size_t>(std::ceil(x_max / step_));
  std::size_t n = 2 * half_ + 1;
  grid_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    grid_[i] = step_ * (static_cast<double>(i) - static_cast<double>(half_));
  // kappa on [0, 2X] with the same step, dilated by spline interpolation
  double X = step_ * static_cast<double>(half_);
  auto kappa = multipliers::one_dim_kernel(m, 2.0 * X, step_);
  std::size_t mid = kappa.grid.size() / 2;
  std::vector<double> kx(kappa.grid.begin() + static_cast<std::ptrdiff_t>(mid), kappa.grid.end());
  std::vector<double> kv(kappa.values.begin() + static_cast<std::ptrdiff_t>(mid), kappa.values.end());
  CubicSpline spline(kx, kv);
  kt_.resize(t_.size() * n);
  for (std::size_t k = 0; k < t_.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) {
      double y = t_[k] * std::abs(grid_[i]);
      kt_[k * n + i] = t_[k] == 1.0 ? kv[i >= half_ ? i - half_ : half_ - i] : t_[k] * spline(y);
    }
  fft_ = std::make_unique<Fft>(n, step_, MajorantWeight(opts.N));
}

Majorant::~Majorant() = default;

std::vector<double> Majorant::kernel_average(std::span<const double> g) const {
  if (g.size() != t_.size()) throw DomainError("g must be sampled on the t-grid");
  std::size_t n = grid_.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < t_.size(); ++k) {
    double c = tw_[k] * g[k];
    if (c == 0.0) continue;
    const double* row = &kt_[k * n];
    for (std::size_t i = 0; i < n; ++i) out[i] += c * row[i];
  }
  return out;
}

std::vector<double> Majorant::majorant(std::span<const double> g) const {
  auto K = kernel_average(g);
  std::size_t n = K.size();
  bool zero = true;
  for (std::size_t i = 0; i < n; ++i) {
    double c = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    K[i] = c * step_ * std::abs(K[i]);
    zero = zero && K[i] == 0.0;
  }
  if (zero) return std::vector<double>(n, 0.0);
  return fft_->convolve(K);
}

double Majorant::at(std::span<const double> w, double x) const {
  double u = std::abs(x) / step_;
  auto i = static_cast<std::size_t>(u);
  if (i >= half_) return i == half_ && u == static_cast<double>(half_) ? w[2 * half_] : 0.0;
  double frac = u - static_cast<double>(i);
  return (1.0 - frac) * w[half_ + i] + frac * w[half_ + i + 1];
}

namespace {

// f_{t_k}(grid[i]) for every k
std::vector<double> column_at(const TimeFamily& fam, std::size_t i) {
  std::vector<double> g(fam.size());
  for (std::size_t k = 0; k < fam.size(); ++k) g[k] = fam.at(k).values[i];
  return g;
}

// f_{t_k}(s) for every k
std::vector<double> family_at(const TimeFamily& fam, const std::vector<std::function<double(double)>>& splines,
                              double s) {
  std::vector<double> g(fam.size());
  for (std::size_t k = 0; k < fam.size(); ++k) g[k] = splines[k](s);
  return g;
}

std::vector<std::function<double(double)>> family_splines(const TimeFamily& fam) {
  std::vector<std::function<double(double)>> out;
  for (const auto& p : fam.profiles()) out.push_back(hankel::interpolant(p));
  return out;
}

}  // namespace

std::vector<double> majorant_W(const Multiplier& m, const TimeFamily& fam, double s, std::span<const double> x,
                               const QuadratureOptions& opts) {
  double x_max = 1.0;
  for (double v : x) x_max = std::max(x_max, std::abs(v));
  Majorant mj(m, fam.t_grid(), x_max + opts.line_margin, opts);
  auto W = mj.majorant(family_at(fam, family_splines(fam), s));
  std::vector<double> out;
  for (double v : x) out.push_back(mj.at(W, v));
  return out;
}

std::vector<ProbePair> square_probe(std::size_t n) {
  std::vector<ProbePair> out;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) out.push_back({static_cast<double>(i), static_cast<double>(j)});
  return out;
}

BoundReport kernel_bound_check(const Multiplier& m, const TimeFamily& fam, std::span<const ProbePair> probe,
                               double d, const QuadratureOptions& opts) {
  BoundReport rep;
  rep.ratios.assign(probe.size(), 0.0);
  if (probe.empty()) return rep;
  double r_max = 0, s_max = 0;
  std::map<double, std::vector<std::size_t>> by_s;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    if (!(probe[i].r > 0) || !(probe[i].s > 0)) throw DomainError("probe pairs need r, s > 0");
    if (probe[i].s > fam.grid().back() || probe[i].r > fam.grid().back())
      throw DomainError("probe pairs must lie within the family grid");
    r_max = std::max(r_max, probe[i].r);
    s_max = std::max(s_max, probe[i].s);
    by_s[probe[i].s].push_back(i);
  }
  BilinearKernel bk(m, d, fam.t_grid(), r_max, s_max, opts);
  Majorant mj(m, fam.t_grid(), r_max + s_max + opts.line_margin, opts);
  auto splines = family_splines(fam);
  std::vector<std::pair<double, std::vector<std::size_t>>> groups(by_s.begin(), by_s.end());
  std::vector<std::size_t> flags(groups.size(), 0);
  parallel_for(groups.size(), [&](std::size_t gi) {
    const auto& [s, members] = groups[gi];
    auto g = family_at(fam, splines, s);
    std::vector<double> rs;
    for (std::size_t idx : members) rs.push_back(probe[idx].r);
    auto K = bk.evaluate(rs, s, g);
    auto W = mj.majorant(g);
    for (std::size_t j = 0; j < members.size(); ++j) {
      double r = rs[j];
      double rhs = (2.0 * mj.at(W, r + s) + 2.0 * mj.at(W, r - s)) * b_factor(d, r, s);
      double lhs = std::abs(K[j]);
      double ratio = 0.0;
      if (rhs > 0)
        ratio = lhs / rhs;
      else if (lhs > 1e-12)
        ++flags[gi];
      rep.ratios[members[j]] = ratio;
    }
  });
  for (std::size_t f : flags) rep.violations += f;
  for (std::size_t i = 0; i < probe.size(); ++i)
    if (rep.ratios[i] > rep.max_ratio) {
      rep.max_ratio = rep.ratios[i];
      rep.argmax = probe[i];
    }
  return rep;
}

namespace {

// Trapezoid weights on [0, R] for the grid (value 0 assumed at r = 0), times r^{d-1}.
std::vector<double> radial_weights(std::span<const double> grid, double d) {
  std::size_t n = grid.size();
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double left = i == 0 ? 0.0 : grid[i - 1];
    double right = i + 1 == n ? grid[i] : grid[i + 1];
    w[i] = 0.5 * (right - left) * std::pow(grid[i], d - 1.0);
  }
  return w;
}

}  // namespace

EHS split_EHS(const Multiplier& m, const TimeFamily& fam, double d, const QuadratureOptions& opts) {
  std::vector<double> grid(fam.grid().begin(), fam.grid().end());
  std::size_t n = grid.size();
  double R = grid.back();
  Majorant mj(m, fam.t_grid(), 2.0 * R + opts.line_margin, opts);
  auto ws = radial_weights(grid, d);
  // phi[i * n + j] = sum_{+-,+-} W[f(s_i)](+-r_j +- s_i) [(1+r_j)(1+s_i)]^{-(d-1)/2} * weight_i
  std::vector<double> phi(n * n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    auto g = column_at(fam, i);
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) return;
    auto W = mj.majorant(g);
    double s = grid[i];
    for (std::size_t j = 0; j < n; ++j) {
      double r = grid[j];
      phi[i * n + j] = ws[i] * (2.0 * mj.at(W, r + s) + 2.0 * mj.at(W, r - s)) * b_factor(d, r, s);
    }
  });
  std::vector<double> E(n, 0.0), S(n, 0.0), H(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double r = grid[j];
    CompensatedSum e, s_sum, h;
    for (std::size_t i = 0; i < n; ++i) {
      double s = grid[i];
      double v = phi[i * n + j];
      if (s > 4.0 * r) e.add(v);
      if (s < r / 4.0) h.add(v);
      DyadicBlock blk{std::ilogb(s)};
      if (blk.in_star(r)) s_sum.add(v);
    }
    E[j] = e.value();
    S[j] = s_sum.value();
    H[j] = h.value();
  }
  return {RadialProfile(grid, std::move(E), d), RadialProfile(grid, std::move(S), d),
          RadialProfile(grid, std::move(H), d)};
}

lorentz::NormValue b_lorentz_norm(const TimeFamily& fam, const lorentz::LorentzExponents& e) {
  return lorentz::lorentz_norm(hankel::as_sampled(fam.b_norm_profile()), e);
}

namespace {

double safe_ratio(double num, double den) {
  if (den > 0) return num / den;
  return num <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

double profile_norm(const RadialProfile& f, const lorentz::LorentzExponents& e) {
  return lorentz::lorentz_norm(hankel::as_sampled(f), e).value;
}

}  // namespace

std::vector<PropositionReport> proposition_checks(const Multiplier& m, double d, double p, std::span<const double> qs,
                                                  std::span<const TimeFamily> families,
                                                  const QuadratureOptions& opts) {
  for (double q : qs) probe::check_paper_range(d, p, q);
  std::vector<PropositionReport> reps(qs.size());
  std::vector<lorentz::LorentzExponents> e_q;
  for (std::size_t a = 0; a < qs.size(); ++a) {
    reps[a].A_pq = probe::compute_A(m, d, p, qs[a]).value;
    e_q.emplace_back(p, qs[a]);
  }
  double A_pinf = probe::compute_A(m, d, p, lorentz::kInfinity).value;
  for (auto& r : reps) r.A_pinf = A_pinf;
  lorentz::LorentzExponents e_pinf(p, lorentz::kInfinity);
  double sigma = 1.3 * p;
  lorentz::LorentzExponents e_sigma(sigma, sigma);
  for (const auto& fam : families) {
    auto ehs = split_EHS(m, fam, d, opts);
    double f_pinf = b_lorentz_norm(fam, e_pinf).value;
    // W-chain data at 16 radii spread over the grid
    auto grid = fam.grid();
    Majorant mj(m, fam.t_grid(), 2.0 * grid.back() + opts.line_margin, opts);
    auto bn = fam.b_norm();
    std::vector<double> lg(mj.grid().begin(), mj.grid().end());
    auto measure = lorentz::WeightedMeasure::line(d, lg.back());
    std::vector<lorentz::SampledFunction> chain;
    std::vector<double> chain_bn;
    double w_l1 = 0.0, w_sigma = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
      std::size_t i = (2 * k + 1) * grid.size() / 32;
      if (bn[i] == 0.0) continue;
      auto W = mj.majorant(column_at(fam, i));
      std::vector<double> weighted(W.size());
      CompensatedSum l1;
      for (std::size_t j = 0; j < W.size(); ++j) {
        weighted[j] = W[j] * std::pow(1.0 + std::abs(lg[j]), -(d - 1.0) / 2.0);
        double c = (j == 0 || j + 1 == W.size()) ? 0.5 : 1.0;
        l1.add(c * mj.step() * W[j]);
      }
      chain.emplace_back(lg, std::move(weighted), measure);
      chain_bn.push_back(bn[i]);
      w_l1 = std::max(w_l1, safe_ratio(l1.value(), A_pinf * bn[i]));
      w_sigma = std::max(w_sigma, safe_ratio(lorentz::lorentz_norm(chain.back(), e_sigma).value, A_pinf * bn[i]));
    }
    for (std::size_t a = 0; a < qs.size(); ++a) {
      auto& rep = reps[a];
      double f_pq = b_lorentz_norm(fam, e_q[a]).value;
      PropositionRatios r;
      r.h = safe_ratio(profile_norm(ehs.H, e_q[a]), rep.A_pq * f_pinf);
      r.s = safe_ratio(profile_norm(ehs.S, e_q[a]), A_pinf * f_pq);
      r.e = safe_ratio(profile_norm(ehs.E, e_q[a]), A_pinf * f_pq);
      for (std::size_t c = 0; c < chain.size(); ++c)
        r.w_lorentz =
            std::max(r.w_lorentz, safe_ratio(lorentz::lorentz_norm(chain[c], e_q[a]).value, rep.A_pq * chain_bn[c]));
      r.w_l1 = w_l1;
      r.w_sigma = w_sigma;
      rep.max.h = std::max(rep.max.h, r.h);
      rep.max.s = std::max(rep.max.s, r.s);
      rep.max.e = std::max(rep.max.e, r.e);
      rep.max.w_lorentz = std::max(rep.max.w_lorentz, r.w_lorentz);
      rep.max.w_l1 = std::max(rep.max.w_l1, r.w_l1);
      rep.max.w_sigma = std::max(rep.max.w_sigma, r.w_sigma);
      rep.per_family.push_back(r);
    }
  }
  return reps;
}

PropositionReport proposition_checks(const Multiplier& m, double d, double p, double q,
                                     std::span<const TimeFamily> families, const QuadratureOptions& opts) {
  double qs[1] = {q};
  return proposition_checks(m, d, p, qs, families, opts).front();
}

}  // namespace rml::decomposition

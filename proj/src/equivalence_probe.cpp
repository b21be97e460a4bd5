#include "rml/equivalence_probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "rml/errors.hpp"
#include "rml/hankel.hpp"

namespace rml::probe {

std::string upper_exponent_text(double d) {
  char buf[64];
  if (d == std::floor(d) && d < 1e6) {
    long num = 2 * static_cast<long>(d), den = static_cast<long>(d) + 1;
    long g = std::gcd(num, den);
    num /= g;
    den /= g;
    if (den == 1)
      std::snprintf(buf, sizeof buf, "2d/(d+1) = %ld", num);
    else
      std::snprintf(buf, sizeof buf, "2d/(d+1) = %ld/%ld", num, den);
  } else {
    std::snprintf(buf, sizeof buf, "2d/(d+1) = %.6g", lorentz::paper_upper_exponent(d));
  }
  return buf;
}

void check_paper_range(double d, double p, double q) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(p > 1)) throw RangeError("p must be > 1");
  if (!(p < lorentz::paper_upper_exponent(d))) throw RangeError("p must be < " + upper_exponent_text(d));
  if (!(q >= 1)) throw RangeError("q must be >= 1");
}

namespace {

double safe_ratio(double num, double den) {
  if (den > 0) return num / den;
  return num <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
}

lorentz::NormValue profile_norm(const RadialProfile& f, const lorentz::LorentzExponents& e) {
  return lorentz::lorentz_norm(hankel::as_sampled(f), e);
}

}  // namespace

lorentz::NormValue weighted_kernel_norm(const multipliers::LineKernel& kappa, double d,
                                        const lorentz::LorentzExponents& e) {
  std::vector<double> v(kappa.values.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = kappa.values[i] * std::pow(1.0 + std::abs(kappa.grid[i]), -(d - 1.0) / 2.0);
  lorentz::SampledFunction f(kappa.grid, std::move(v), lorentz::WeightedMeasure::line(d, kappa.grid.back()));
  return lorentz::lorentz_norm(f, e);
}

lorentz::NormValue compute_A(const Multiplier& m, double d, double p, double q, const AOptions& opts) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  lorentz::LorentzExponents e(p, q);
  return weighted_kernel_norm(multipliers::one_dim_kernel(m, opts.radius, opts.step), d, e);
}

lorentz::NormValue hankel_norm(const Multiplier& m, double d, double p, double q,
                               const multipliers::KernelGrid& grid) {
  lorentz::LorentzExponents e(p, q);
  return profile_norm(multipliers::kernel_of(m, d, grid).profile, e);
}

ChainReport chain_check(const Multiplier& m, double d, double p, double q, std::span<const RadialProfile> suite,
                        const ChainOptions& opts) {
  check_paper_range(d, p, q);
  if (suite.empty()) throw DomainError("chain check needs a nonempty suite");
  lorentz::LorentzExponents e(p, q), e_p(p, p);
  auto dual = e.dual();
  lorentz::LorentzExponents e_pd(dual.p, dual.p);
  ChainReport rep;
  auto a = compute_A(m, d, p, q, opts.a);
  auto h = hankel_norm(m, d, p, q, opts.kernel);
  rep.A = a.value;
  rep.hankel_norm = h.value;
  rep.tail_flag = a.tail_flag || h.tail_flag;
  auto ts = operators::geometric_t_grid(opts.t_points);
  rep.t_ratios.assign(suite.size(), 0.0);
  rep.m_ratios.assign(suite.size(), 0.0);
  std::vector<char> dominated(suite.size(), 1);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const auto& f = suite[i];
    auto tf = operators::apply_multiplier(m, f, d);
    auto mf = operators::maximal_operator(m, f, d, ts);
    rep.t_ratios[i] = safe_ratio(profile_norm(tf, e).value, profile_norm(f, e_p).value);
    double m_norm = profile_norm(mf, e_pd).value;
    rep.m_ratios[i] = safe_ratio(m_norm, profile_norm(f, dual).value);
    dominated[i] = m_norm >= profile_norm(tf, e_pd).value;
  }
  for (std::size_t i = 0; i < suite.size(); ++i) {
    rep.T_lower = std::max(rep.T_lower, rep.t_ratios[i]);
    rep.M_lower = std::max(rep.M_lower, rep.m_ratios[i]);
    rep.domination = rep.domination && dominated[i];
  }
  return rep;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("spearman needs equal-length samples");
  std::size_t n = a.size();
  if (n < 2) return 0.0;
  auto ranks = [n](std::span<const double> x) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto i, auto j) { return x[i] < x[j]; });
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
      double avg = 0.5 * static_cast<double>(i + j);
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  auto ra = ranks(a), rb = ranks(b);
  double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(n);
  double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(n);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

EquivalenceReport equivalence_scan(std::span<const double> lambdas, double d, double p, double q,
                                   std::span<const RadialProfile> suite, const ChainOptions& opts,
                                   const multipliers::CutoffWidths& cutoff) {
  check_paper_range(d, p, q);
  for (double l : lambdas)
    if (!(l > 0 && l <= 2)) throw RangeError("lambda must lie in (0, 2]");
  EquivalenceReport rep;
  std::vector<double> hn, ml, neg;
  for (double l : lambdas) {
    auto c = chain_check(multipliers::bochner_riesz({l, cutoff}), d, p, q, suite, opts);
    EquivalenceRow row{l, p, q, c.A, c.hankel_norm, c.T_lower, c.M_lower, 0.0, c.tail_flag, c.M_lower == 0.0};
    row.ratio = row.vacuous ? 0.0 : safe_ratio(c.M_lower, c.hankel_norm);
    rep.rows.push_back(row);
    hn.push_back(c.hankel_norm);
    ml.push_back(c.M_lower);
    neg.push_back(-l);
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& r : rep.rows) {
    if (r.vacuous) continue;
    lo = std::min(lo, r.ratio);
    hi = std::max(hi, r.ratio);
  }
  rep.band_width = hi > 0 ? hi / lo : 0.0;
  rep.rank_correlation = spearman(hn, ml);
  rep.hankel_vs_lambda = spearman(hn, neg);
  rep.maximal_vs_lambda = spearman(ml, neg);
  return rep;
}

CriticalReport critical_exponent_scan(double lambda, double d, const CriticalOptions& opts,
                                      const multipliers::CutoffWidths& cutoff) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(lambda > 0)) throw RangeError("lambda must be > 0");
  CriticalReport rep;
  rep.p_c = 2.0 * d / (d + 1.0 + 2.0 * lambda);
  if (!(rep.p_c > 1) || !(rep.p_c < lorentz::paper_upper_exponent(d))) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "p_c = %.6g must lie in (1, %s)", rep.p_c, upper_exponent_text(d).c_str());
    throw RangeError(buf);
  }
  if (!(opts.r0 > 0) || !(opts.step > 0) || opts.doublings == 0)
    throw DomainError("critical scan needs r0 > 0, step > 0 and at least one doubling");
  double r_max = std::ldexp(opts.r0, static_cast<int>(opts.doublings));
  auto n = static_cast<std::size_t>(std::llround(r_max / opts.step));
  auto grid = hankel::uniform_grid(n, r_max);
  auto kernel = multipliers::kernel_of(multipliers::bochner_riesz({lambda, cutoff}), d, grid).profile;
  lorentz::LorentzExponents weak(rep.p_c, lorentz::kInfinity), strong(rep.p_c, rep.p_c);
  for (std::size_t k = 0; k <= opts.doublings; ++k) {
    double R = std::ldexp(opts.r0, static_cast<int>(k));
    std::size_t cut = 0;
    while (cut < grid.size() && grid[cut] <= R * (1 + 1e-12)) ++cut;
    RadialProfile ball(std::vector<double>(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(cut)),
                       std::vector<double>(kernel.values.begin(), kernel.values.begin() + static_cast<std::ptrdiff_t>(cut)),
                       d);
    rep.radii.push_back(R);
    rep.weak_norms.push_back(profile_norm(ball, weak).value);
    rep.strong_norms.push_back(profile_norm(ball, strong).value);
  }
  rep.weak_stable = rep.strong_growing = true;
  for (std::size_t k = 1; k < rep.radii.size(); ++k) {
    double wg = rep.weak_norms[k] / rep.weak_norms[k - 1];
    double sg = rep.strong_norms[k] / rep.strong_norms[k - 1];
    rep.weak_growth.push_back(wg);
    rep.strong_growth.push_back(sg);
    rep.weak_stable = rep.weak_stable && std::abs(wg - 1.0) <= 0.05;
    rep.strong_growing = rep.strong_growing && sg >= 1.05;
  }
  return rep;
}

DualReport dual_inequality_check(const Multiplier& m, double d, double p, double q,
                                 std::span<const TimeFamily> families, const AOptions& a) {
  check_paper_range(d, p, q);
  lorentz::LorentzExponents e(p, q), e_p(p, p);
  DualReport rep;
  rep.A = compute_A(m, d, p, q, a).value;
  for (const auto& fam : families) {
    double lhs = profile_norm(operators::averaged_dual_operator(m, fam, d), e).value;
    double rhs = profile_norm(fam.b_norm_profile(), e_p).value;
    rep.ratios.push_back(safe_ratio(lhs, rep.A * rhs));
  }
  for (double r : rep.ratios) rep.max_ratio = std::max(rep.max_ratio, r);
  return rep;
}

}  // namespace rml::probe

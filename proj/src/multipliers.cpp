#include "rml/multipliers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rml/errors.hpp"
#include "rml/spline.hpp"

namespace rml::multipliers {

double smooth_step(double x) {
  if (!(x > 0)) return 0.0;
  if (x >= 1) return 1.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double cutoff_chi(double xi, const CutoffWidths& widths) {
  return smooth_step((xi - 0.5) / widths.lower) * smooth_step((2.0 - xi) / widths.upper);
}

namespace {

void check_certificate(double lo, double hi, double sup) {
  if (lo >= hi) return;
  if (lo < 0.5 || hi > 2.0) throw DomainError("multiplier support must lie in [1/2, 2]");
  if (!(sup >= 0) || !std::isfinite(sup)) throw DomainError("multiplier sup bound must be finite and >= 0");
}

}  // namespace

Multiplier::Multiplier(std::string label, std::function<double(double)> eval, double support_lo,
                       double support_hi, double sup_bound, std::vector<hankel::Breakpoint> breakpoints,
                       nlohmann::json params)
    : label_(std::move(label)),
      eval_(std::move(eval)),
      lo_(support_lo),
      hi_(support_hi),
      sup_(sup_bound),
      breakpoints_(std::move(breakpoints)),
      params_(std::move(params)) {
  check_certificate(lo_, hi_, sup_);
}

double Multiplier::operator()(double xi) const {
  if (is_zero() || xi < lo_ || xi > hi_) return 0.0;
  return eval_(xi);
}

Multiplier Multiplier::dilated(double t) const {
  if (!(t > 0)) throw DomainError("dilation must be positive");
  Multiplier out = *this;
  out.label_ = label_ + " (dilated by " + std::to_string(t) + ")";
  out.eval_ = [f = eval_, t](double xi) { return f(xi / t); };
  out.lo_ = lo_ * t;
  out.hi_ = hi_ * t;
  for (auto& bp : out.breakpoints_) bp.position *= t;
  out.params_["dilation"] = t;
  return out;
}

hankel::CompactSource Multiplier::source() const {
  hankel::CompactSource src;
  if (is_zero()) {
    src.lo = src.hi = 0.5;
    src.eval = [](double) { return 0.0; };
    return src;
  }
  src.lo = lo_;
  src.hi = hi_;
  src.breakpoints = breakpoints_;
  src.eval = eval_;
  return src;
}

Multiplier bochner_riesz(const BochnerRieszParams& params) {
  double lambda = params.lambda;
  if (!(lambda > 0) || !std::isfinite(lambda)) throw DomainError("lambda must be > 0");
  CutoffWidths w = params.cutoff;
  if (!(w.lower > 0 && w.lower <= 0.5) || !(w.upper > 0 && w.upper <= 1.0))
    throw DomainError("cutoff widths must lie in (0, 1/2] and (0, 1]");
  auto eval = [lambda, w](double xi) {
    double base = (1.0 - xi) * (1.0 + xi);
    if (!(base > 0)) return 0.0;
    return std::pow(base, lambda) * cutoff_chi(xi, w);
  };
  nlohmann::json p{{"kind", "bochner_riesz"}, {"lambda", lambda},
                   {"cutoff", {{"lower", w.lower}, {"upper", w.upper}}}};
  return Multiplier("bochner_riesz(" + std::to_string(lambda) + ")", eval, 0.5, 1.0, std::pow(0.75, lambda),
                    {{1.0, true}}, p);
}

Multiplier smooth_bump() {
  auto eval = [](double xi) { return smooth_step((xi - 0.5) / 0.1) * smooth_step((2.0 - xi) / 0.2); };
  return Multiplier("bump", eval, 0.5, 2.0, 1.0, {{0.6, false}, {1.8, false}}, {{"kind", "bump"}});
}

Multiplier zero_multiplier() {
  return Multiplier("zero", [](double) { return 0.0; }, 0.5, 0.5, 0.0, {}, {{"kind", "zero"}});
}

Multiplier slab(double lo, double hi) {
  if (!(lo < hi)) throw DomainError("slab needs lo < hi");
  return Multiplier("slab", [](double) { return 1.0; }, lo, hi, 1.0, {},
                    {{"kind", "slab"}, {"lo", lo}, {"hi", hi}});
}

Multiplier sampled(std::string label, std::vector<std::pair<double, double>> samples) {
  if (samples.size() < 2) throw DomainError("sampled multiplier needs at least 2 samples");
  std::sort(samples.begin(), samples.end());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i].first) || !std::isfinite(samples[i].second))
      throw DomainError("sampled multiplier values must be finite");
    if (i > 0 && samples[i].first == samples[i - 1].first)
      throw DomainError("sampled multiplier knots must be distinct");
  }
  double lo = std::max(0.5, samples.front().first);
  double hi = std::min(2.0, samples.back().first);
  if (!(lo < hi)) throw DomainError("sampled multiplier has no knots inside [1/2, 2]");
  double sup = 0.0;
  std::vector<hankel::Breakpoint> bps;
  nlohmann::json raw = nlohmann::json::array();
  for (const auto& [x, v] : samples) {
    sup = std::max(sup, std::abs(v));
    if (x > lo && x < hi) bps.push_back({x, false});
    raw.push_back({x, v});
  }
  auto data = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(samples));
  auto eval = [data](double xi) {
    const auto& s = *data;
    auto it = std::upper_bound(s.begin(), s.end(), xi, [](double x, const auto& e) { return x < e.first; });
    if (it == s.begin()) return s.front().second;
    if (it == s.end()) return s.back().second;
    auto prev = it - 1;
    double u = (xi - prev->first) / (it->first - prev->first);
    return prev->second + u * (it->second - prev->second);
  };
  return Multiplier(std::move(label), eval, lo, hi, sup, std::move(bps), {{"kind", "sampled"}, {"samples", raw}});
}

Multiplier from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DomainError("multiplier definition must be a JSON object");
  std::string kind = j.value("kind", "");
  Multiplier m = [&] {
    if (kind == "bochner_riesz") {
      if (!j.contains("lambda")) throw DomainError("bochner_riesz multiplier needs lambda");
      BochnerRieszParams p{j.at("lambda").get<double>()};
      if (j.contains("cutoff")) {
        p.cutoff.lower = j.at("cutoff").value("lower", p.cutoff.lower);
        p.cutoff.upper = j.at("cutoff").value("upper", p.cutoff.upper);
      }
      return bochner_riesz(p);
    }
    if (kind == "bump") return smooth_bump();
    if (kind == "zero") return zero_multiplier();
    if (kind == "sampled") {
      if (!j.contains("samples")) throw DomainError("sampled multiplier needs samples");
      std::vector<std::pair<double, double>> s;
      for (const auto& e : j.at("samples")) {
        if (!e.is_array() || e.size() != 2) throw DomainError("samples must be [xi, value] pairs");
        s.emplace_back(e[0].get<double>(), e[1].get<double>());
      }
      return sampled(j.value("label", "sampled"), std::move(s));
    }
    throw DomainError("unknown multiplier kind '" + kind + "'");
  }();
  if (j.contains("label")) {
    nlohmann::json params = m.params();
    params["label"] = j.at("label");
    return Multiplier(j.at("label").get<std::string>(), [m](double xi) { return m(xi); }, m.support_lo(),
                      m.support_hi(), m.sup_bound(), m.source().breakpoints, params);
  }
  return m;
}

RadialKernel kernel_of(const Multiplier& m, double d, std::vector<double> grid) {
  auto values = hankel::compact_transform(m.source(), hankel::TransformKind::Hankel, d, grid);
  return {hankel::RadialProfile(std::move(grid), std::move(values), d), m.label()};
}

RadialKernel kernel_of(const Multiplier& m, double d, const KernelGrid& grid) {
  return kernel_of(m, d, hankel::hybrid_grid(grid.points, grid.radius));
}

LineKernel one_dim_kernel(const Multiplier& m, double radius, double step) {
  if (!(radius > 0) || !(step > 0) || step > radius) throw DomainError("line kernel needs 0 < step <= R");
  auto n = static_cast<std::size_t>(std::llround(radius / step));
  std::vector<double> half(n + 1);
  for (std::size_t i = 0; i <= n; ++i) half[i] = radius * static_cast<double>(i) / static_cast<double>(n);
  auto hv = hankel::compact_transform(m.source(), hankel::TransformKind::Cosine, 1.0, half);
  LineKernel k;
  k.label = m.label();
  k.grid.resize(2 * n + 1);
  k.values.resize(2 * n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    k.grid[n + i] = half[i];
    k.grid[n - i] = -half[i];
    k.values[n + i] = hv[i];
    k.values[n - i] = hv[i];
  }
  return k;
}

namespace {

void check_dilation(double t) {
  if (!(t >= 1.0 && t <= 2.0)) throw RangeError("t must lie in [1, 2]");
}

}  // namespace

RadialKernel dilate_kernel(const RadialKernel& k, double t) {
  check_dilation(t);
  if (t == 1.0) return k;
  auto f = hankel::interpolant(k.profile);
  double scale = std::pow(t, k.profile.d);
  std::vector<double> v(k.profile.grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale * f(t * k.profile.grid[i]);
  return {hankel::RadialProfile(k.profile.grid, std::move(v), k.profile.d), k.label};
}

LineKernel dilate_kernel(const LineKernel& k, double t) {
  check_dilation(t);
  if (t == 1.0) return k;
  CubicSpline s(k.grid, k.values);
  double lo = k.grid.front(), hi = k.grid.back();
  LineKernel out{k.grid, std::vector<double>(k.grid.size()), k.label};
  for (std::size_t i = 0; i < k.grid.size(); ++i) {
    double x = t * k.grid[i];
    out.values[i] = (x < lo || x > hi) ? 0.0 : t * s(x);
  }
  return out;
}

std::vector<std::pair<double, double>> local_maxima(std::span<const double> grid, std::span<const double> values,
                                                    double r0, double r1) {
  if (grid.size() != values.size()) throw DomainError("grid and values differ in size");
  std::vector<std::pair<double, double>> peaks;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    if (grid[i] < r0 || grid[i] > r1) continue;
    double a = std::abs(values[i - 1]), b = std::abs(values[i]), c = std::abs(values[i + 1]);
    if (!(b > a && b >= c)) continue;
    double h1 = grid[i] - grid[i - 1], h2 = grid[i + 1] - grid[i];
    double s01 = (b - a) / h1, s12 = (c - b) / h2;
    double curv = (s12 - s01) / (h1 + h2);
    double slope = (s12 * h1 + s01 * h2) / (h1 + h2);
    double x = grid[i], y = b;
    if (curv < 0) {
      double delta = std::clamp(-slope / (2.0 * curv), -h1, h2);
      x += delta;
      y = b + slope * delta + curv * delta * delta;
    }
    peaks.emplace_back(x, y);
  }
  return peaks;
}

double decay_exponent_fit(std::span<const double> grid, std::span<const double> values, double r0, double r1) {
  if (!(r0 >= 1.0 && r1 > 2.0 * r0)) throw DomainError("fit window needs r1 > 2 r0 >= 2");
  auto peaks = local_maxima(grid, values, r0, r1);
  if (peaks.size() < 5)
    throw InsufficientData("decay fit needs at least 5 local maxima in the window, found " +
                           std::to_string(peaks.size()));
  double n = static_cast<double>(peaks.size());
  double sx = 0, sy = 0;
  for (auto [x, y] : peaks) {
    sx += std::log(x);
    sy += std::log(y);
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (auto [x, y] : peaks) {
    double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  return -sxy / sxx;
}

double decay_exponent_fit(const RadialKernel& k, double r0, double r1) {
  return decay_exponent_fit(k.profile.grid, k.profile.values, r0, r1);
}

}  // namespace rml::multipliers

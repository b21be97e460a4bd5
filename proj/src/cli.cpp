#include "rml/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "rml/equivalence_probe.hpp"
#include "rml/errors.hpp"
#include "rml/kernel_decomposition.hpp"
#include "rml/special_functions.hpp"
#include "rml/suites.hpp"

namespace rml::cli {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double as_q(const json& v) {
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return kInf;
    throw DomainError("q must be a number or \"inf\", got \"" + s + "\"");
  }
  return v.get<double>();
}

json q_json(double q) { return std::isinf(q) ? json("inf") : json(q); }

std::vector<double> as_list(const json& v) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(as_q(e));
  return out;
}

std::size_t as_count(const json& v, const char* name, std::size_t min = 1) {
  auto n = v.get<long long>();
  if (n < static_cast<long long>(min))
    throw DomainError(std::string(name) + " must be >= " + std::to_string(min));
  return static_cast<std::size_t>(n);
}

double rel_delta(double a, double b) {
  if (a == b) return 0.0;
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) return kInf;
  return std::abs(b - a) / std::abs(a);
}

// json cannot hold inf/nan; they are written as null
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Assertions {
  json list = json::array();
  bool all = true;
  void add(const std::string& name, bool passed, json detail = json::object()) {
    list.push_back({{"name", name}, {"passed", passed}, {"detail", std::move(detail)}});
    all = all && passed;
  }
};

json finalize(const std::string& kind, const json& config, json results, const Assertions& a) {
  json rep;
  rep["command"] = "verify " + kind;
  rep["config"] = config;
  rep["results"] = std::move(results);
  rep["assertions"] = a.list;
  rep["passed"] = a.all;
  rep["sha256"] = report_hash(rep);
  return rep;
}

json bochner_riesz_json(double lambda) { return {{"kind", "bochner_riesz"}, {"lambda", lambda}}; }

std::vector<double> family_grid(const json& c) {
  return hankel::uniform_grid(as_count(c.at("grid_points"), "grid_points", 2), c.at("radius").get<double>());
}

std::vector<operators::TimeFamily> families_for(const json& c, double d, std::size_t t_points) {
  return suites::random_families(c.at("seed").get<std::uint64_t>(), as_count(c.at("families"), "families"), d,
                                 family_grid(c), operators::uniform_t_grid(t_points));
}

// ---- verify bound ----

json verify_bound(const json& c) {
  double d = c.at("d").get<double>();
  auto m = multipliers::from_json(c.at("multiplier"));
  decomposition::QuadratureOptions opts;
  opts.N = c.at("N").get<double>();
  auto probe_n = as_count(c.at("probe"), "probe");
  if (static_cast<double>(probe_n) > c.at("radius").get<double>())
    throw DomainError("probe grid must lie within the family radius");
  double tol = c.at("tolerance").get<double>();
  auto fams = families_for(c, d, as_count(c.at("t_points"), "t_points", 2));
  auto probe = decomposition::square_probe(probe_n);
  json rows = json::array();
  Assertions a;
  double suite = 0, suite_ref = 0;
  for (std::size_t i = 0; i < fams.size(); ++i) {
    auto base = decomposition::kernel_bound_check(m, fams[i], probe, d, opts);
    auto fine = decomposition::kernel_bound_check(m, fams[i], probe, d, opts.refined());
    double delta = rel_delta(base.max_ratio, fine.max_ratio);
    rows.push_back({{"family", i},
                    {"max_ratio", num(base.max_ratio)},
                    {"refined_max_ratio", num(fine.max_ratio)},
                    {"delta", num(delta)},
                    {"violations", base.violations + fine.violations},
                    {"argmax", {base.argmax.r, base.argmax.s}}});
    std::string tag = "family " + std::to_string(i);
    a.add(tag + ": max ratio finite", std::isfinite(base.max_ratio) && std::isfinite(fine.max_ratio));
    a.add(tag + ": no bound violations", base.violations + fine.violations == 0);
    a.add(tag + ": stable under refinement", delta <= tol, {{"delta", num(delta)}, {"tolerance", tol}});
    suite = std::max(suite, base.max_ratio);
    suite_ref = std::max(suite_ref, fine.max_ratio);
  }
  return finalize("bound", c,
                  {{"families", rows},
                   {"suite_max_ratio", num(suite)},
                   {"suite_max_ratio_refined", num(suite_ref)},
                   {"suite_delta", num(rel_delta(suite, suite_ref))}},
                  a);
}

// ---- verify propositions ----

json ratios_json(const decomposition::PropositionRatios& r) {
  return {{"H", num(r.h)},
          {"S", num(r.s)},
          {"E", num(r.e)},
          {"W_lorentz", num(r.w_lorentz)},
          {"W_l1", num(r.w_l1)},
          {"W_sigma", num(r.w_sigma)}};
}

json verify_propositions(const json& c) {
  auto dims = as_list(c.at("dims"));
  double p = c.at("p").get<double>();
  auto qs = as_list(c.at("qs"));
  if (dims.empty() || qs.empty()) throw DomainError("dims and qs must be nonempty");
  for (double d : dims)
    for (double q : qs) probe::check_paper_range(d, p, q);
  auto m = multipliers::from_json(c.at("multiplier"));
  double tol = c.at("tolerance").get<double>();
  auto tp = as_count(c.at("t_points"), "t_points", 2);
  decomposition::QuadratureOptions opts;
  opts.N = c.at("N").get<double>();
  json rows = json::array();
  Assertions a;
  for (double d : dims) {
    auto base = decomposition::proposition_checks(m, d, p, qs, families_for(c, d, tp), opts);
    auto fine = decomposition::proposition_checks(m, d, p, qs, families_for(c, d, 2 * tp - 1), opts.refined());
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const auto& b = base[k].max;
      const auto& f = fine[k].max;
      json deltas = {{"H", num(rel_delta(b.h, f.h))}, {"S", num(rel_delta(b.s, f.s))}, {"E", num(rel_delta(b.e, f.e))}};
      rows.push_back({{"d", d},
                      {"p", p},
                      {"q", q_json(qs[k])},
                      {"A_pq", num(base[k].A_pq)},
                      {"A_pinf", num(base[k].A_pinf)},
                      {"max", ratios_json(b)},
                      {"refined_max", ratios_json(f)},
                      {"delta", deltas}});
      char tag[64];
      std::snprintf(tag, sizeof tag, "d=%g q=%s", d, std::isinf(qs[k]) ? "inf" : std::to_string(qs[k]).c_str());
      for (auto [name, bv, fv] : {std::tuple{"H", b.h, f.h}, std::tuple{"S", b.s, f.s}, std::tuple{"E", b.e, f.e}}) {
        double delta = rel_delta(bv, fv);
        a.add(std::string(tag) + ": " + name + " ratio finite", std::isfinite(bv) && std::isfinite(fv));
        a.add(std::string(tag) + ": " + name + " ratio stable", delta <= tol, {{"delta", num(delta)}, {"tolerance", tol}});
      }
      bool chain_finite = std::isfinite(b.w_lorentz) && std::isfinite(b.w_l1) && std::isfinite(b.w_sigma);
      a.add(std::string(tag) + ": W-chain ratios finite", chain_finite);
    }
  }
  return finalize("propositions", c, {{"rows", rows}}, a);
}

// ---- verify chain / equivalence ----

probe::ChainOptions chain_options(const json& c, bool refined) {
  probe::ChainOptions o;
  std::size_t f = refined ? 2 : 1;
  o.t_points = as_count(c.at("t_points"), "t_points") * f;
  o.kernel.points = as_count(c.at("kernel_points"), "kernel_points", 2) * f;
  o.kernel.radius = c.at("kernel_radius").get<double>();
  o.a.radius = c.at("a_radius").get<double>();
  o.a.step = c.at("a_step").get<double>() / static_cast<double>(f);
  return o;
}

std::vector<hankel::RadialProfile> suite_for(const json& c, double d) {
  suites::SuiteOptions so;
  so.random_count = c.at("random_profiles").get<std::size_t>();
  so.focus_radii = c.at("focus_radii").get<std::vector<double>>();
  auto s = suites::profile_suite(c.at("seed").get<std::uint64_t>(), d, family_grid(c), so);
  if (s.empty()) throw DomainError("profile suite is empty");
  return s;
}

json chain_json(const probe::ChainReport& r) {
  return {{"A", num(r.A)},
          {"hankel_norm", num(r.hankel_norm)},
          {"T_lower", num(r.T_lower)},
          {"M_lower", num(r.M_lower)},
          {"tail_flag", r.tail_flag},
          {"domination", r.domination},
          {"t_ratios", r.t_ratios},
          {"m_ratios", r.m_ratios}};
}

const json kColumnLabels = {{"A", "exact quadrature"},
                            {"hankel_norm", "exact quadrature"},
                            {"T_lower", "lower bound"},
                            {"M_lower", "lower bound"}};

json verify_chain(const json& c) {
  double d = c.at("d").get<double>(), p = c.at("p").get<double>(), q = as_q(c.at("q"));
  probe::check_paper_range(d, p, q);
  auto m = multipliers::from_json(c.at("multiplier"));
  double tol = c.at("tolerance").get<double>();
  auto suite = suite_for(c, d);
  auto base = probe::chain_check(m, d, p, q, suite, chain_options(c, false));
  auto fine = probe::chain_check(m, d, p, q, suite, chain_options(c, true));
  Assertions a;
  json deltas;
  for (auto [name, bv, fv] : {std::tuple{"A", base.A, fine.A}, std::tuple{"hankel_norm", base.hankel_norm, fine.hankel_norm},
                              std::tuple{"T_lower", base.T_lower, fine.T_lower},
                              std::tuple{"M_lower", base.M_lower, fine.M_lower}}) {
    double delta = rel_delta(bv, fv);
    deltas[name] = num(delta);
    a.add(std::string(name) + " finite", std::isfinite(bv) && std::isfinite(fv));
    a.add(std::string(name) + " stable under refinement", delta <= tol, {{"delta", num(delta)}, {"tolerance", tol}});
  }
  a.add("maximal operator dominates T_m in L^{p'} for every suite member", base.domination && fine.domination);
  json results = {{"base", chain_json(base)},
                  {"refined", chain_json(fine)},
                  {"delta", deltas},
                  {"C1", num(base.hankel_norm > 0 ? base.A / base.hankel_norm : 0.0)},
                  {"labels", kColumnLabels}};
  return finalize("chain", c, results, a);
}

json verify_equivalence(const json& c) {
  double d = c.at("d").get<double>(), p = c.at("p").get<double>(), q = as_q(c.at("q"));
  probe::check_paper_range(d, p, q);
  auto lambdas = c.at("lambdas").get<std::vector<double>>();
  multipliers::CutoffWidths cut;
  cut.lower = c.at("cutoff").value("lower", cut.lower);
  cut.upper = c.at("cutoff").value("upper", cut.upper);
  auto rep = probe::equivalence_scan(lambdas, d, p, q, suite_for(c, d), chain_options(c, false), cut);
  json rows = json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"lambda", r.lambda},
                    {"p", r.p},
                    {"q", q_json(r.q)},
                    {"A", num(r.A)},
                    {"hankel_norm", num(r.hankel_norm)},
                    {"T_lower", num(r.T_lower)},
                    {"M_lower", num(r.M_lower)},
                    {"ratio", num(r.ratio)},
                    {"tail_flag", r.tail_flag},
                    {"vacuous", r.vacuous}});
  double band = c.at("band").get<double>(), rho = c.at("min_correlation").get<double>();
  Assertions a;
  bool any = std::any_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return !r.vacuous; });
  a.add("band width within limit", any && rep.band_width <= band, {{"band_width", num(rep.band_width)}, {"limit", band}});
  a.add("hankel norm rises as lambda decreases", rep.hankel_vs_lambda >= rho, {{"spearman", rep.hankel_vs_lambda}});
  a.add("M_lower rises as lambda decreases", rep.maximal_vs_lambda >= rho, {{"spearman", rep.maximal_vs_lambda}});
  a.add("columns co-move", rep.rank_correlation >= rho, {{"spearman", rep.rank_correlation}});
  json results = {{"rows", rows},
                  {"band_width", num(rep.band_width)},
                  {"rank_correlation", rep.rank_correlation},
                  {"hankel_vs_lambda", rep.hankel_vs_lambda},
                  {"maximal_vs_lambda", rep.maximal_vs_lambda},
                  {"labels", kColumnLabels}};
  return finalize("equivalence", c, results, a);
}

// ---- verify critical ----

json verify_critical(const json& c) {
  probe::CriticalOptions o;
  o.r0 = c.at("r0").get<double>();
  o.doublings = as_count(c.at("doublings"), "doublings");
  o.step = c.at("step").get<double>();
  multipliers::CutoffWidths cut;
  cut.lower = c.at("cutoff").value("lower", cut.lower);
  cut.upper = c.at("cutoff").value("upper", cut.upper);
  auto rep = probe::critical_exponent_scan(c.at("lambda").get<double>(), c.at("d").get<double>(), o, cut);
  Assertions a;
  a.add("weak-type norms stabilize within 5% per doubling", rep.weak_stable, {{"growth", rep.weak_growth}});
  a.add("strong-type norms grow by at least 5% per doubling", rep.strong_growing, {{"growth", rep.strong_growth}});
  json results = {{"p_c", rep.p_c},
                  {"radii", rep.radii},
                  {"weak_norms", rep.weak_norms},
                  {"strong_norms", rep.strong_norms},
                  {"weak_growth", rep.weak_growth},
                  {"strong_growth", rep.strong_growth}};
  return finalize("critical", c, results, a);
}

// ---- verify dual ----

json verify_dual(const json& c) {
  double d = c.at("d").get<double>(), p = c.at("p").get<double>(), q = as_q(c.at("q"));
  probe::check_paper_range(d, p, q);
  auto m = multipliers::from_json(c.at("multiplier"));
  double tol = c.at("tolerance").get<double>();
  auto tp = as_count(c.at("t_points"), "t_points", 2);
  probe::AOptions ao{c.at("a_radius").get<double>(), c.at("a_step").get<double>()};
  auto base_fams = families_for(c, d, tp);
  auto base = probe::dual_inequality_check(m, d, p, q, base_fams, ao);
  auto fine = probe::dual_inequality_check(m, d, p, q, families_for(c, d, 2 * tp - 1), ao);
  // a constant-in-t family two ways
  const auto& g = base_fams.front().at(0);
  auto ts = operators::uniform_t_grid(tp);
  auto avg = operators::averaged_dual_operator(m, operators::TimeFamily::constant(ts, g), d);
  auto cols = operators::apply_scales(m, g, d, ts);
  auto tw = operators::t_weights(ts);
  double diff = 0, scale = 0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    double v = 0;
    for (std::size_t k = 0; k < ts.size(); ++k) v += tw[k] * cols[k].values[i];
    diff = std::max(diff, std::abs(v - avg.values[i]));
    scale = std::max(scale, std::abs(v));
  }
  double consistency = scale > 0 ? diff / scale : diff;
  double delta = rel_delta(base.max_ratio, fine.max_ratio);
  Assertions a;
  a.add("max ratio finite", std::isfinite(base.max_ratio) && std::isfinite(fine.max_ratio));
  a.add("max ratio stable under t-grid refinement", delta <= tol, {{"delta", num(delta)}, {"tolerance", tol}});
  a.add("constant family: averaged operator matches the t-integral of T", consistency <= 1e-6,
        {{"relative_difference", consistency}});
  json results = {{"A", num(base.A)},
                  {"ratios", base.ratios},
                  {"max_ratio", num(base.max_ratio)},
                  {"refined_ratios", fine.ratios},
                  {"refined_max_ratio", num(fine.max_ratio)},
                  {"delta", num(delta)}};
  return finalize("dual", c, results, a);
}

// ---- plain commands ----

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write " + path);
  f << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string svg_plot(const std::vector<double>& x, const std::vector<std::vector<double>>& series) {
  const double W = 640, H = 400, pad = 20;
  double x0 = x.front(), x1 = x.back(), y0 = 0, y1 = 0;
  for (const auto& s : series)
    for (double v : s) {
      y0 = std::min(y0, v);
      y1 = std::max(y1, v);
    }
  if (y1 == y0) y1 = y0 + 1;
  if (x1 == x0) x1 = x0 + 1;
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    os << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << colors[k % 3] << "\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
      double px = pad + (W - 2 * pad) * (x[i] - x0) / (x1 - x0);
      double py = H - pad - (H - 2 * pad) * (series[k][i] - y0) / (y1 - y0);
      os << px << ',' << py << ' ';
    }
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

struct KernelArgs {
  double d = 2, lambda = 1, exponent = 3, radius = 200, fit_from = 10, fit_to = 200;
  std::size_t points = 4096;
  std::string kind = "bochner_riesz", out, svg;
  bool one_dim = false;
};

int cmd_kernel(const KernelArgs& k, std::ostream& out, std::ostream& err) {
  std::vector<double> x, v;
  if (k.kind == "synthetic") {
    if (!(k.exponent > 0)) throw DomainError("exponent must be > 0");
    x = hankel::uniform_grid(k.points, k.radius);
    for (double r : x) v.push_back(std::pow(1 + r, -k.exponent) * std::cos(r));
  } else {
    json mj = k.kind == "bochner_riesz" ? bochner_riesz_json(k.lambda) : json{{"kind", k.kind}};
    auto m = multipliers::from_json(mj);
    if (k.one_dim) {
      auto lk = multipliers::one_dim_kernel(m, k.radius, k.radius / static_cast<double>(k.points));
      std::size_t mid = lk.grid.size() / 2;
      x.assign(lk.grid.begin() + static_cast<std::ptrdiff_t>(mid), lk.grid.end());
      v.assign(lk.values.begin() + static_cast<std::ptrdiff_t>(mid), lk.values.end());
    } else {
      if (!(k.d > 1)) throw UnsupportedDimension("d must exceed 1");
      auto rk = multipliers::kernel_of(m, k.d, multipliers::KernelGrid{k.points, k.radius});
      x = rk.profile.grid;
      v = rk.profile.values;
    }
  }
  std::vector<double> env(x.size(), 0.0);
  try {
    double beta = multipliers::decay_exponent_fit(x, v, k.fit_from, k.fit_to);
    auto peaks = multipliers::local_maxima(x, v, k.fit_from, k.fit_to);
    double logc = 0;
    for (auto [r, h] : peaks) logc += std::log(h) + beta * std::log(r);
    double C = std::exp(logc / static_cast<double>(peaks.size()));
    for (std::size_t i = 0; i < x.size(); ++i) env[i] = x[i] > 0 ? C * std::pow(x[i], -beta) : 0.0;
    err << "decay exponent " << fmt(beta) << "\n";
  } catch (const InsufficientData& e) {
    err << "decay fit unavailable: " << e.what() << "\n";
  }
  std::ostringstream csv;
  csv << "r,kappa,envelope_fit\n";
  for (std::size_t i = 0; i < x.size(); ++i) csv << fmt(x[i]) << ',' << fmt(v[i]) << ',' << fmt(env[i]) << '\n';
  write_text(k.out, csv.str(), out);
  if (!k.svg.empty()) {
    std::vector<double> neg(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) neg[i] = -env[i];
    write_text(k.svg, svg_plot(x, {v, env, neg}), out);
  }
  return kPass;
}

int cmd_bessel(double d, double from, double to, std::size_t points, const std::string& path, std::ostream& out) {
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  if (!(from >= 0) || !(to >= from)) throw DomainError("need 0 <= from <= to");
  if (points == 0 || (points == 1 && to != from)) throw DomainError("points must be >= 1, and 1 only when from = to");
  std::ostringstream csv;
  csv << "x,B_d\n";
  for (std::size_t i = 0; i < points; ++i) {
    double x = points == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(points - 1);
    csv << fmt(x) << ',' << fmt(special::kernel_b(d, x)) << '\n';
  }
  write_text(path, csv.str(), out);
  return kPass;
}

int cmd_norms(double d, double p, const std::string& q, double lambda, const std::string& kind,
              const std::string& path, std::ostream& out) {
  double qv = q == "inf" ? kInf : std::stod(q);
  if (!(d > 1)) throw UnsupportedDimension("d must exceed 1");
  auto m = multipliers::from_json(kind == "bochner_riesz" ? bochner_riesz_json(lambda) : json{{"kind", kind}});
  auto A = probe::compute_A(m, d, p, qv);
  auto H = probe::hankel_norm(m, d, p, qv);
  json rep = {{"d", d},
              {"p", p},
              {"q", q_json(qv)},
              {"multiplier", m.params()},
              {"A", {{"value", num(A.value)}, {"tail_flag", A.tail_flag}}},
              {"hankel_norm", {{"value", num(H.value)}, {"tail_flag", H.tail_flag}}}};
  write_text(path, rep.dump(2) + "\n", out);
  return kPass;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot read config " + path);
  json j = json::parse(f);
  if (j.contains("config") && j.contains("command")) return j.at("config");
  return j;
}

}  // namespace

const std::vector<std::string>& verify_kinds() {
  static const std::vector<std::string> k{"bound", "propositions", "chain", "equivalence", "critical", "dual"};
  return k;
}

json default_config(const std::string& kind) {
  const json suite_grid = {{"seed", 2024}, {"grid_points", 800}, {"radius", 80.0}};
  json c;
  if (kind == "bound") {
    c = {{"d", 2.0}, {"multiplier", bochner_riesz_json(1.0)}, {"N", 10.0}, {"probe", 64},
         {"families", 5}, {"t_points", 17}, {"tolerance", 0.1}};
  } else if (kind == "propositions") {
    c = {{"dims", {2.0, 3.0}}, {"p", 1.2}, {"qs", {1.2, "inf"}}, {"multiplier", bochner_riesz_json(1.0)},
         {"N", 10.0}, {"families", 20}, {"t_points", 17}, {"tolerance", 0.1}};
  } else if (kind == "chain" || kind == "equivalence") {
    c = {{"d", 2.0},
         {"p", 1.2},
         {"q", kind == "chain" ? json(1.2) : json("inf")},
         {"random_profiles", 6},
         {"focus_radii", {10.0, 20.0, 40.0}},
         {"t_points", 64},
         {"kernel_points", 4096},
         {"kernel_radius", 200.0},
         {"a_radius", 200.0},
         {"a_step", 0.05}};
    if (kind == "chain") {
      c["multiplier"] = bochner_riesz_json(1.0);
      c["tolerance"] = 0.1;
    } else {
      c["lambdas"] = {0.5, 0.75, 1.0, 1.5};
      c["cutoff"] = {{"lower", multipliers::CutoffWidths{}.lower}, {"upper", multipliers::CutoffWidths{}.upper}};
      c["band"] = 100.0;
      c["min_correlation"] = 0.9;
    }
  } else if (kind == "critical") {
    return {{"d", 2.0},
            {"lambda", 0.5},
            {"r0", 100.0},
            {"doublings", 4},
            {"step", 0.05},
            {"cutoff", {{"lower", multipliers::CutoffWidths{}.lower}, {"upper", multipliers::CutoffWidths{}.upper}}}};
  } else if (kind == "dual") {
    c = {{"d", 2.0}, {"p", 1.2}, {"q", 1.2}, {"multiplier", bochner_riesz_json(1.0)}, {"families", 20},
         {"t_points", 17}, {"a_radius", 200.0}, {"a_step", 0.05}, {"tolerance", 0.1}};
  } else {
    throw DomainError("unknown verify kind '" + kind + "'");
  }
  c.update(suite_grid);
  return c;
}

json resolve_config(const std::string& kind, const json& overrides) {
  json c = default_config(kind);
  if (overrides.is_null()) return c;
  if (!overrides.is_object()) throw DomainError("config must be a JSON object");
  for (const auto& [key, value] : overrides.items()) {
    if (!c.contains(key)) throw DomainError("unknown config key '" + key + "' for verify " + kind);
    c[key] = value;
  }
  return c;
}

json run_verify(const std::string& kind, const json& config) {
  json c = resolve_config(kind, config);
  if (kind == "bound") return verify_bound(c);
  if (kind == "propositions") return verify_propositions(c);
  if (kind == "chain") return verify_chain(c);
  if (kind == "equivalence") return verify_equivalence(c);
  if (kind == "critical") return verify_critical(c);
  return verify_dual(c);
}

std::string report_hash(const json& report) {
  json body = report;
  body.erase("sha256");
  std::string text = body.dump();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::string hex;
  char buf[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string equivalence_csv(const json& report) {
  std::ostringstream os;
  os << "lambda,p,q,A,hankel_norm,T_lower,M_lower,ratio,tail_flag\n";
  auto cell = [](const json& v) {
    if (v.is_null()) return std::string("nan");
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return std::string(v.get<bool>() ? "1" : "0");
    return fmt(v.get<double>());
  };
  for (const auto& r : report.at("results").at("rows"))
    os << cell(r["lambda"]) << ',' << cell(r["p"]) << ',' << cell(r["q"]) << ',' << cell(r["A"]) << ','
       << cell(r["hankel_norm"]) << ',' << cell(r["T_lower"]) << ',' << cell(r["M_lower"]) << ',' << cell(r["ratio"])
       << ',' << cell(r["tail_flag"]) << '\n';
  return os.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radial multiplier and maximal operator toolkit"};
  app.require_subcommand(1);

  double bd = 2, bfrom = 0, bto = 10;
  std::size_t bpoints = 101;
  std::string bout;
  auto* bessel = app.add_subcommand("bessel", "Tabulate B_d(x) = x^{-(d-2)/2} J_{(d-2)/2}(x) as CSV");
  bessel->add_option("--d", bd, "dimension, > 1")->required();
  bessel->add_option("--from", bfrom);
  bessel->add_option("--to", bto);
  bessel->add_option("--points", bpoints);
  bessel->add_option("--out", bout, "CSV path (default stdout)");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Multiplier kernel, decay fit and envelope as CSV");
  kernel->add_option("--d", ka.d);
  kernel->add_option("--multiplier", ka.kind, "bochner_riesz | bump | zero | synthetic");
  kernel->add_option("--lambda", ka.lambda);
  kernel->add_option("--exponent", ka.exponent, "decay of the synthetic profile (1+r)^{-e} cos r");
  kernel->add_option("--points", ka.points);
  kernel->add_option("--radius", ka.radius);
  kernel->add_option("--fit-from", ka.fit_from);
  kernel->add_option("--fit-to", ka.fit_to);
  kernel->add_flag("--one-dim", ka.one_dim, "1-D inverse Fourier transform instead of H_d");
  kernel->add_option("--out", ka.out);
  kernel->add_option("--svg", ka.svg);

  double nd = 2, np = 1.2, nl = 1;
  std::string nq = "inf", nkind = "bochner_riesz", nout;
  auto* norms = app.add_subcommand("norms", "A(p,q) and the Lorentz norm of H_d m");
  norms->add_option("--d", nd);
  norms->add_option("--p", np);
  norms->add_option("--q", nq, "number or inf");
  norms->add_option("--lambda", nl);
  norms->add_option("--multiplier", nkind);
  norms->add_option("--out", nout);

  auto* verify = app.add_subcommand("verify", "Run a verification and emit a JSON report");
  verify->require_subcommand(1);
  struct VerifyArgs {
    std::string config, out, csv, q;
    std::optional<double> d, p, lambda;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> families;
  };
  std::map<std::string, VerifyArgs> vargs;
  std::map<std::string, CLI::App*> vsubs;
  for (const auto& kind : verify_kinds()) {
    auto& va = vargs[kind];
    auto* s = verify->add_subcommand(kind);
    vsubs[kind] = s;
    s->add_option("--config", va.config, "JSON config or a previous report");
    s->add_option("--out", va.out, "report path (default stdout)");
    s->add_option("--d", va.d);
    s->add_option("--lambda", va.lambda);
    if (kind != "critical") {
      s->add_option("--p", va.p);
      s->add_option("--q", va.q, "number or inf");
      s->add_option("--seed", va.seed);
    }
    if (kind == "bound" || kind == "propositions" || kind == "dual") s->add_option("--families", va.families);
    if (kind == "equivalence") s->add_option("--csv", va.csv, "table as CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e, out, err);
    return rc == 0 ? kPass : kConfigError;
  }

  try {
    if (*bessel) return cmd_bessel(bd, bfrom, bto, bpoints, bout, out);
    if (*kernel) return cmd_kernel(ka, out, err);
    if (*norms) return cmd_norms(nd, np, nq, nl, nkind, nout, out);
    for (const auto& kind : verify_kinds()) {
      if (!*vsubs[kind]) continue;
      const auto& va = vargs[kind];
      json cfg = va.config.empty() ? json::object() : read_json_file(va.config);
      if (va.d) {
        if (kind == "propositions")
          cfg["dims"] = {*va.d};
        else
          cfg["d"] = *va.d;
      }
      if (va.p) cfg["p"] = *va.p;
      if (!va.q.empty()) {
        json q = va.q == "inf" ? json("inf") : json(std::stod(va.q));
        if (kind == "propositions")
          cfg["qs"] = {q};
        else
          cfg["q"] = q;
      }
      if (va.lambda) {
        if (kind == "equivalence")
          cfg["lambdas"] = {*va.lambda};
        else if (kind == "critical")
          cfg["lambda"] = *va.lambda;
        else
          cfg["multiplier"] = bochner_riesz_json(*va.lambda);
      }
      if (va.seed) cfg["seed"] = *va.seed;
      if (va.families) cfg["families"] = *va.families;
      json report = run_verify(kind, cfg);
      write_text(va.out, report.dump(2) + "\n", out);
      if (!va.csv.empty()) write_text(va.csv, equivalence_csv(report), out);
      if (!report.at("passed").get<bool>()) {
        for (const auto& a : report.at("assertions"))
          if (!a.at("passed").get<bool>()) err << "assertion failed: " << a.at("name").get<std::string>() << "\n";
        return kAssertionFailure;
      }
      return kPass;
    }
  } catch (const ResolutionError& e) {
    err << "resolution error: " << e.what() << " (max admissible frequency " << e.max_admissible() << ")\n";
    return kResolutionError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace rml::cli

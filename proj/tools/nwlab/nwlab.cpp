#include "nwlab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "nwidths/approximation.hpp"
#include "nwidths/filters.hpp"
#include "nwidths/kernels.hpp"
#include "nwidths/operators.hpp"

namespace nwlab {

using nwidths::Manifold;
using nwidths::ManifoldKind;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const std::vector<std::pair<Experiment, std::string>>& experiment_table() {
  static const std::vector<std::pair<Experiment, std::string>> table = {
      {Experiment::Weyl, "weyl"},
      {Experiment::Growth, "growth"},
      {Experiment::Partition, "partition"},
      {Experiment::KernelDecay, "kernel-decay"},
      {Experiment::CrossSection, "cross-section"},
      {Experiment::Young, "young"},
      {Experiment::BandNorms, "band-norms"},
      {Experiment::ApproxRate, "approx-rate"},
      {Experiment::Besov, "besov"},
      {Experiment::Nikolskii, "nikolskii"},
      {Experiment::PolySpan, "poly-span"},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& text, const std::string& key) {
  const double v = parse_real(text, key);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 1e9) {
    throw UsageError("--" + key + ": expected an integer, got '" + text + "'");
  }
  return static_cast<int>(v);
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : kInf;
}

Flag upper_flag(std::string name, double value, double tolerance) {
  return Flag{std::move(name), value <= tolerance, value, tolerance};
}

std::vector<double> default_t_list() { return {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}; }

const std::vector<double>& t_list_or_default(const RunConfig& c, std::vector<double>& storage) {
  if (!c.t_list.empty()) return c.t_list;
  storage = default_t_list();
  return storage;
}

nwidths::QuadratureGrid profile_grid(const Manifold& model, int resolution) {
  if (resolution > 0) return nwidths::build_grid(model, resolution);
  switch (model.kind()) {
    case ManifoldKind::Circle:
      return nwidths::build_grid(model, 512);
    case ManifoldKind::Torus2:
      return nwidths::build_grid(model, 128);
    case ManifoldKind::Sphere2:
      return nwidths::grid_for_degree(model, 128);
  }
  return nwidths::build_grid(model, 64);
}

class ReportBuilder {
 public:
  ReportBuilder(const RunConfig& c, std::string anchor) {
    report_.experiment = to_string(c.experiment);
    report_.anchor = std::move(anchor);
    report_.config.emplace_back("model", std::string(nwidths::to_string(c.model)));
  }
  void config(const std::string& k, double v) { report_.config.emplace_back(k, format_number(v)); }
  void config(const std::string& k, const std::string& v) { report_.config.emplace_back(k, v); }
  void columns(std::vector<std::string> cols) { report_.columns = std::move(cols); }
  void row(std::vector<Cell> r) { report_.rows.push_back(std::move(r)); }
  void fit(const std::string& k, double v) { report_.fits.emplace_back(k, v); }
  void flag(Flag f) { report_.flags.push_back(std::move(f)); }
  void note(std::string n) { report_.notes.push_back(std::move(n)); }
  Report take() { return std::move(report_); }

 private:
  Report report_;
};

// ---------------------------------------------------------------- weyl

std::size_t weyl_oracle(const Manifold& model, double omega) {
  switch (model.kind()) {
    case ManifoldKind::Circle:
      return 2 * static_cast<std::size_t>(std::floor(std::sqrt(omega) + 1e-12)) + 1;
    case ManifoldKind::Sphere2: {
      std::size_t k = 0;
      while (static_cast<double>(k + 1) * static_cast<double>(k + 2) <= omega) ++k;
      return (k + 1) * (k + 1);
    }
    case ManifoldKind::Torus2:
      return model.enumerate_eigenpairs(omega).size();
  }
  return 0;
}

Report run_weyl(const RunConfig& c) {
  const Manifold model(c.model);
  const double omega_max = c.omega_max.value_or(std::pow(4.0, 8));
  ReportBuilder b(c, "weyl-law");
  b.config("omega_max", omega_max);
  b.columns({"omega", "count", "closed_form", "ratio"});
  const double s = model.dimension();
  std::size_t mismatches = 0;
  std::vector<double> ratios;
  for (int i = 1; std::pow(4.0, i) <= omega_max * (1.0 + 1e-12); ++i) {
    const double omega = std::pow(4.0, i);
    const std::size_t n = model.weyl_count(omega);
    const std::size_t oracle = weyl_oracle(model, omega);
    const double ratio = static_cast<double>(n) / std::pow(omega, s / 2.0);
    if (n != oracle) ++mismatches;
    if (i >= 2) ratios.push_back(ratio);
    b.row({omega, static_cast<double>(n), static_cast<double>(oracle), ratio});
  }
  b.flag(upper_flag("count_mismatches", static_cast<double>(mismatches), 0.0));
  b.flag(upper_flag("ratio_max_over_min", spread(ratios), c.tol.value_or(4.0)));
  return b.take();
}

// ---------------------------------------------------------------- growth

Report run_growth(const RunConfig& c, std::size_t l_min, std::size_t l_max) {
  const Manifold model(c.model);
  ReportBuilder b(c, "eigenvalue-growth");
  b.config("l_min", static_cast<double>(l_min));
  b.config("l_max", static_cast<double>(l_max));
  b.columns({"l", "lambda"});
  const auto fit = nwidths::eigenvalue_growth_fit(model, l_min, l_max);
  double omega = 4.0;
  while (model.weyl_count(omega) <= l_max) omega *= 2.0;
  const auto pairs = model.enumerate_eigenpairs(omega);
  for (std::size_t l = l_min; l <= l_max; l *= 2) {
    b.row({static_cast<double>(l), pairs[l].lambda});
  }
  const double expected = 2.0 / model.dimension();
  b.fit("slope", fit.slope);
  b.fit("intercept", fit.intercept);
  b.fit("residual", fit.residual);
  b.fit("expected_slope", expected);
  b.flag(upper_flag("slope_error", std::abs(fit.slope - expected), c.tol.value_or(0.05)));
  return b.take();
}

// ---------------------------------------------------------------- partition

Report run_partition(const RunConfig& c) {
  const int J = c.m_max.value_or(8);
  const int samples = c.samples > 0 ? c.samples : 1000;
  ReportBuilder b(c, "dyadic-partition");
  b.config("J", static_cast<double>(J));
  b.config("samples", static_cast<double>(samples));
  b.columns({"J", "unity_deviation", "telescoping_deviation"});
  const auto dev = nwidths::partition_check(J, samples);
  b.row({static_cast<double>(J), dev.unity, dev.telescoping});
  b.flag(upper_flag("max_deviation", dev.max(), c.tol.value_or(1e-12)));
  return b.take();
}

// ---------------------------------------------------------------- kernels

Report run_kernel_decay(const RunConfig& c) {
  const Manifold model(c.model);
  std::vector<double> storage;
  const auto& ts = t_list_or_default(c, storage);
  const auto grid = profile_grid(model, c.resolution);
  ReportBuilder b(c, "kernel-localization");
  b.config("filter", "gaussian");
  b.config("grid_nodes", static_cast<double>(grid.size()));
  b.columns({"t", "truncation_omega", "diagonal", "fitted_constant"});
  const auto filter = nwidths::make_gaussian();
  const double s = model.dimension();
  std::vector<double> constants;
  for (double t : ts) {
    try {
      const double single[] = {t};
      const auto rep = nwidths::localization_profile(model, filter, single, grid);
      const auto& prof = rep.profiles.front();
      const double omega = nwidths::kernel_truncation_omega(model, filter, t);
      b.row({t, omega, std::pow(t, s) * prof.samples.front().second, prof.fitted_constant});
      constants.push_back(prof.fitted_constant);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      b.note("t=" + format_number(t) + ": " + e.what());
      b.flag(Flag{"row_error", false, t, 0.0});
    }
  }
  b.fit("max_over_min", spread(constants));
  b.flag(upper_flag("constant_max_over_min", spread(constants), c.tol.value_or(10.0)));
  return b.take();
}

Report run_cross_section(const RunConfig& c) {
  const Manifold model(c.model);
  std::vector<double> storage;
  const auto& ts = t_list_or_default(c, storage);
  const auto grid = profile_grid(model, c.resolution);
  std::vector<double> alphas = {1.0, 2.0, kInf};
  if (c.alpha) alphas = {*c.alpha};
  ReportBuilder b(c, "kernel-cross-section");
  b.config("filter", "gaussian");
  b.config("grid_nodes", static_cast<double>(grid.size()));
  b.columns({"t", "alpha", "norm", "scaled"});
  const auto filter = nwidths::make_gaussian();
  const double s = model.dimension();
  const auto x0 = nwidths::base_point(model);
  std::map<double, std::vector<double>> scaled;
  for (double t : ts) {
    const nwidths::SpectralKernel kernel(model, filter, t);
    for (double a : alphas) {
      const double norm = nwidths::cross_section_norm(kernel, x0, a, grid);
      const double v = std::pow(t, s * (1.0 - inv(a))) * norm;
      scaled[a].push_back(v);
      b.row({t, a, norm, v});
    }
  }
  for (double a : alphas) {
    b.flag(upper_flag("scaled_max_over_min_alpha_" + format_number(a), spread(scaled[a]),
                      c.tol.value_or(4.0)));
  }
  return b.take();
}

Report run_young(const RunConfig& c) {
  const Manifold model(c.model);
  int res = c.resolution;
  if (res == 0) {
    res = model.kind() == ManifoldKind::Circle ? 128 : (model.kind() == ManifoldKind::Torus2 ? 24 : 16);
  }
  const double t = c.t_list.empty() ? 0.25 : c.t_list.front();
  const int samples = c.samples > 0 ? c.samples : 100;
  const double slack = c.tol.value_or(1e-9);
  std::vector<std::pair<double, double>> pairs = {{2.0, 1.0}, {1.0, 2.0}, {2.0, 2.0}};
  if (c.p && c.alpha) pairs = {{*c.p, *c.alpha}};
  ReportBuilder b(c, "young-inequality");
  b.config("filter", "gaussian");
  b.config("t", t);
  b.config("resolution", static_cast<double>(res));
  b.config("samples", static_cast<double>(samples));
  b.config("seed", static_cast<double>(c.seed));
  b.columns({"p", "alpha", "q", "c", "worst_ratio", "violations"});
  const auto grid = nwidths::make_grid(model, res);
  const nwidths::KernelOperator op(nwidths::SpectralKernel(model, nwidths::make_gaussian(), t), grid);
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& [p, alpha] : pairs) {
    double worst = 0.0;
    double cval = 0.0;
    double q = 0.0;
    int violations = 0;
    for (int i = 0; i < samples; ++i) {
      std::vector<double> v(grid->size());
      for (double& x : v) x = normal(rng);
      const auto chk = nwidths::young_bound_check(op, alpha, p, nwidths::GridFunction(grid, v));
      worst = std::max(worst, chk.lhs / chk.rhs);
      cval = chk.c;
      q = chk.q;
      if (!chk.holds(slack)) ++violations;
    }
    b.row({p, alpha, q, cval, worst, static_cast<double>(violations)});
    b.flag(upper_flag("violations_p_" + format_number(p) + "_alpha_" + format_number(alpha),
                      violations, 0.0));
  }
  return b.take();
}

// ---------------------------------------------------------------- approximation

Report run_band_norms(const RunConfig& c) {
  const Manifold model(c.model);
  nwidths::ExperimentParams params;
  params.p = c.p.value_or(2.0);
  params.q = c.q.value_or(2.0);
  params.r = c.r.value_or(1.0);
  const int j_max = c.m_max.value_or(8);
  const int j_fit = c.m_min.value_or(2);
  ReportBuilder b(c, "band-norm-decay");
  b.config("p", params.p);
  b.config("q", params.q);
  b.config("r", params.r);
  b.config("j_fit_min", static_cast<double>(j_fit));
  b.config("j_max", static_cast<double>(j_max));
  b.columns({"j", "measured", "bound", "ratio"});
  std::vector<double> js;
  std::vector<double> logs;
  std::vector<double> ratios;
  for (int j = 0; j <= j_max; ++j) {
    const auto f = nwidths::band_extremal(model, j, params.p, params.r);
    const auto table = nwidths::band_norm_table(f, params, j);
    const auto& row = table.back();
    b.row({static_cast<double>(j), row.measured, row.bound, row.ratio()});
    ratios.push_back(row.ratio());
    if (j >= j_fit) {
      js.push_back(j);
      logs.push_back(std::log2(row.measured));
    }
  }
  const int s = model.dimension();
  const double expected = s * (-params.r / s + inv(params.p) - inv(params.q));
  const auto fit = nwidths::fit_line(js, logs);
  b.fit("slope_log2_per_j", fit.slope);
  b.fit("expected_slope", expected);
  b.fit("residual", fit.residual);
  b.flag(upper_flag("slope_error", std::abs(fit.slope - expected), c.tol.value_or(0.1)));
  b.flag(upper_flag("ratio_max_over_min", spread(ratios), 20.0));
  return b.take();
}

Report run_approx_rate(const RunConfig& c) {
  const Manifold model(c.model);
  nwidths::ExperimentParams params;
  params.p = c.p.value_or(2.0);
  params.q = c.q.value_or(2.0);
  params.r = c.r.value_or(1.0);
  params.m_min = c.m_min.value_or(2);
  params.m_max = c.m_max.value_or(7);
  params.seed = c.seed;
  if (c.samples > 0) params.random_members = c.samples;
  ReportBuilder b(c, "width-upper-bound");
  b.config("p", params.p);
  b.config("q", params.q);
  b.config("r", params.r);
  b.config("m_min", static_cast<double>(params.m_min));
  b.config("m_max", static_cast<double>(params.m_max));
  b.config("seed", static_cast<double>(params.seed));
  b.config("random_members", static_cast<double>(params.random_members));
  b.columns({"m", "n", "error", "members"});
  const auto res = nwidths::width_rate_experiment(model, params);
  for (const auto& row : res.rows) {
    b.row({static_cast<double>(row.m), static_cast<double>(row.n), row.error,
           static_cast<double>(row.members)});
  }
  b.fit("slope", res.fit.slope);
  b.fit("intercept", res.fit.intercept);
  b.fit("residual", res.fit.residual);
  b.fit("expected_slope", res.expected_slope);
  b.flag(upper_flag("slope_error", std::abs(res.fit.slope - res.expected_slope),
                    c.tol.value_or(0.1)));
  if (params.p != 2.0 || params.q != 2.0) {
    b.note("norms off p = 2 are evaluated on sampling grids; q = inf is a grid maximum");
  }
  return b.take();
}

std::size_t first_index_above(std::span<const nwidths::Eigenpair> basis, double lo) {
  for (const auto& e : basis) {
    if (e.lambda > lo) return e.index;
  }
  throw std::runtime_error("no eigenvalue above the requested bound");
}

Report run_besov(const RunConfig& c, double t_besov) {
  const Manifold model(c.model);
  const double alpha = c.alpha.value_or(1.0);
  const int J = c.m_max.value_or(6);
  ReportBuilder b(c, "besov-via-best-approximation");
  b.config("alpha", alpha);
  b.config("p", 2.0);
  b.config("t", t_besov);
  b.config("j_max", static_cast<double>(J));
  b.columns({"case", "computed", "closed_form", "deviation"});
  const double cutoff = std::pow(4.0, J);

  // Lacunary series sum_j 2^{-alpha j} u_{l_j}, lambda_{l_j} in (4^{j-1}, 4^j].
  nwidths::SpectralCoeffs f(model, cutoff);
  for (int j = 1; j <= J; ++j) {
    f.coeffs()[first_index_above(f.basis(), std::pow(4.0, j - 1))] = std::exp2(-alpha * j);
  }
  const double computed = nwidths::besov_norm(f, alpha, 2.0, t_besov, J);
  // Infinite geometric tails: E(f, 4^i) ~ 2^{-alpha(i+1)} / sqrt(1 - 4^{-alpha}).
  const double g = std::exp2(-alpha) / std::sqrt(1.0 - std::pow(4.0, -alpha));
  const double tail = std::isinf(t_besov) ? g : g * std::pow(J + 1.0, 1.0 / t_besov);
  const double closed = g + tail;
  const double factor = std::max(computed / closed, closed / computed);
  b.row({std::string("lacunary"), computed, closed, factor});
  b.flag(upper_flag("lacunary_factor", factor, 2.0));

  nwidths::SpectralCoeffs f2 = f;
  for (double& v : f2.coeffs()) v *= 2.0;
  const double doubled = nwidths::besov_norm(f2, alpha, 2.0, t_besov, J);
  const double homog = std::abs(doubled / (2.0 * computed) - 1.0);
  b.row({std::string("homogeneity"), doubled, 2.0 * computed, homog});
  b.flag(upper_flag("homogeneity", homog, 1e-12));

  // A single eigenfunction above 4^{J/2}: E(u, 4^j) = 1 exactly when 4^j < lambda.
  const auto l = first_index_above(f.basis(), std::pow(4.0, J / 2));
  const double lambda = f.basis()[l].lambda;
  const auto u = nwidths::SpectralCoeffs::unit(model, cutoff, l);
  const double eig = nwidths::besov_norm(u, alpha, 2.0, t_besov, J);
  double acc = 0.0;
  for (int j = 0; j <= J; ++j) {
    if (std::pow(4.0, j) < lambda) {
      const double term = std::exp2(alpha * j);
      acc = std::isinf(t_besov) ? std::max(acc, term) : acc + std::pow(term, t_besov);
    }
  }
  const double eig_closed = 1.0 + (std::isinf(t_besov) ? acc : std::pow(acc, 1.0 / t_besov));
  const double eig_dev = std::abs(eig - eig_closed);
  b.row({std::string("eigenfunction"), eig, eig_closed, eig_dev});
  b.flag(upper_flag("eigenfunction_deviation", eig_dev, c.tol.value_or(1e-10)));
  return b.take();
}

Report run_nikolskii(const RunConfig& c) {
  const Manifold model(c.model);
  const double p = c.p.value_or(2.0);
  const double q = c.q.value_or(kInf);
  const double omega_max = c.omega_max.value_or(std::pow(4.0, 6));
  std::vector<double> omegas;
  for (int i = 1; std::pow(4.0, i) <= omega_max * (1.0 + 1e-12); ++i) omegas.push_back(std::pow(4.0, i));
  ReportBuilder b(c, "nikolskii-inequality");
  b.config("k", static_cast<double>(c.k));
  b.config("p", p);
  b.config("q", q);
  b.config("omega_max", omega_max);
  b.config("candidate", "dirichlet-kernel frequency band lambda <= omega^2");
  b.columns({"d", "omega", "dimension", "lhs", "rhs_scale", "ratio"});
  // (d, checked) pairs. The sphere reports the rotation group dimension 3
  // next to its own dimension 2.
  std::vector<std::pair<double, bool>> ds;
  if (c.d) {
    ds = {{*c.d, true}};
  } else if (model.kind() == ManifoldKind::Sphere2) {
    ds = {{3.0, false}, {2.0, true}};
  } else {
    ds = {{nwidths::group_dimension(model), true}};
  }
  for (const auto& [d, checked] : ds) {
    const auto res = nwidths::nikolskii_check(model, omegas, c.k, p, q, d);
    for (const auto& row : res.rows) {
      b.row({d, row.omega, static_cast<double>(row.dimension), row.lhs, row.rhs_scale, row.ratio()});
    }
    const std::string tag = "d_" + format_number(d);
    b.fit("max_ratio_" + tag, res.max_ratio);
    b.fit("min_ratio_" + tag, res.min_ratio);
    if (checked) {
      b.flag(upper_flag("ratio_max_over_min_" + tag, res.max_ratio / res.min_ratio,
                        c.tol.value_or(10.0)));
    } else {
      b.note("d = " + format_number(d) + " reported only");
    }
  }
  return b.take();
}

Report run_poly_span(const RunConfig& c) {
  ReportBuilder b(c, "polynomial-span");
  b.config("degree", static_cast<double>(c.degree));
  b.columns({"degree", "omega", "max_relative_residual"});
  double worst = 0.0;
  for (int d = 0; d <= c.degree; ++d) {
    const double r = nwidths::polynomial_span_check(d);
    worst = std::max(worst, r);
    b.row({static_cast<double>(d), static_cast<double>(d) * (d + 1), r});
  }
  b.flag(upper_flag("max_relative_residual", worst, c.tol.value_or(1e-8)));
  return b.take();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

nlohmann::ordered_json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

// ---------------------------------------------------------------- config

std::string to_string(Experiment e) {
  for (const auto& [k, name] : experiment_table()) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment parse_experiment(const std::string& name) {
  for (const auto& [k, n] : experiment_table()) {
    if (n == name) return k;
  }
  throw UsageError("unknown experiment '" + name + "'");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& entry : experiment_table()) v.push_back(entry.second);
    return v;
  }();
  return names;
}

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "inf" || t == "infinity" || t == "Inf") return kInf;
  // Allow simple reciprocals such as 1/32 in lists.
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    return parse_real(t.substr(0, slash), key) / parse_real(t.substr(slash + 1), key);
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("--" + key + ": expected a number, got '" + text + "'");
  }
  if (used != t.size()) {
    throw UsageError("--" + key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<double> parse_real_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_real(item, key));
  }
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config_entries(RunConfig& c, const std::map<std::string, std::string>& entries,
                          const std::set<std::string>& explicit_keys) {
  const std::map<std::string, std::function<void(const std::string&)>> table = {
      {"model", [&](const std::string& v) {
         try {
           c.model = nwidths::parse_manifold_kind(v);
         } catch (const std::exception&) {
           throw UsageError("--model: unknown manifold '" + v + "'");
         }
       }},
      {"p", [&](const std::string& v) { c.p = parse_real(v, "p"); }},
      {"q", [&](const std::string& v) { c.q = parse_real(v, "q"); }},
      {"r", [&](const std::string& v) { c.r = parse_real(v, "r"); }},
      {"alpha", [&](const std::string& v) { c.alpha = parse_real(v, "alpha"); }},
      {"omega-max", [&](const std::string& v) { c.omega_max = parse_real(v, "omega-max"); }},
      {"m-min", [&](const std::string& v) { c.m_min = parse_int(v, "m-min"); }},
      {"m-max", [&](const std::string& v) { c.m_max = parse_int(v, "m-max"); }},
      {"t-list", [&](const std::string& v) { c.t_list = parse_real_list(v, "t-list"); }},
      {"resolution", [&](const std::string& v) { c.resolution = parse_int(v, "resolution"); }},
      {"seed", [&](const std::string& v) {
         const int s = parse_int(v, "seed");
         if (s < 0) throw UsageError("--seed must be nonnegative");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"tol", [&](const std::string& v) { c.tol = parse_real(v, "tol"); }},
      {"l-min", [&](const std::string& v) { c.l_min = parse_int(v, "l-min"); }},
      {"l-max", [&](const std::string& v) { c.l_max = parse_int(v, "l-max"); }},
      {"t-besov", [&](const std::string& v) { c.t_besov = parse_real(v, "t-besov"); }},
      {"k", [&](const std::string& v) { c.k = parse_int(v, "k"); }},
      {"d", [&](const std::string& v) { c.d = parse_real(v, "d"); }},
      {"degree", [&](const std::string& v) { c.degree = parse_int(v, "degree"); }},
      {"samples", [&](const std::string& v) { c.samples = parse_int(v, "samples"); }},
      {"format", [&](const std::string& v) {
         if (v == "csv") {
           c.format = Format::Csv;
         } else if (v == "json") {
           c.format = Format::Json;
         } else {
           throw UsageError("--format must be csv or json");
         }
       }},
      {"out", [&](const std::string& v) { c.out = v; }},
      {"timing", [&](const std::string& v) { c.timing = v == "true" || v == "1"; }},
  };
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) throw UsageError("unknown config key '" + key + "'");
    if (explicit_keys.contains(key)) continue;
    it->second(value);
  }
}

void validate(const RunConfig& c) {
  auto check_exp = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v >= 1.0)) throw UsageError(std::string("--") + name + " must be >= 1");
  };
  check_exp(c.p, "p");
  check_exp(c.q, "q");
  if (c.r && !(*c.r > 0.0 && std::isfinite(*c.r))) throw UsageError("--r must be positive");
  if (c.alpha && !(*c.alpha > 0.0)) throw UsageError("--alpha must be positive");
  if (c.m_min && *c.m_min < 0) throw UsageError("--m-min must be >= 0");
  if (c.m_min && c.m_max && *c.m_min > *c.m_max) throw UsageError("--m-min exceeds --m-max");
  for (double t : c.t_list) {
    if (!(t > 0.0 && std::isfinite(t))) throw UsageError("--t-list entries must be positive");
  }
  if (c.resolution != 0 && c.resolution < 4) throw UsageError("--resolution must be >= 4");
  if (c.samples < 0) throw UsageError("--samples must be >= 0");
  if (c.tol && !(*c.tol >= 0.0)) throw UsageError("--tol must be >= 0");
  const Manifold model(c.model);
  switch (c.experiment) {
    case Experiment::Weyl:
      if (c.omega_max && !(*c.omega_max >= 16.0 && *c.omega_max <= model.max_omega())) {
        throw UsageError("--omega-max must lie in [16, " + format_number(model.max_omega()) + "]");
      }
      break;
    case Experiment::Growth:
      if (c.l_min < 2 || c.l_max < c.l_min + 7) {
        throw UsageError("growth: need 2 <= --l-min and at least 8 indices up to --l-max");
      }
      break;
    case Experiment::Partition:
      if (c.m_max && *c.m_max < 1) throw UsageError("partition: J (--m-max) must be >= 1");
      if (c.samples != 0 && c.samples < 16) throw UsageError("partition: --samples must be >= 16");
      break;
    case Experiment::KernelDecay:
    case Experiment::CrossSection:
    case Experiment::Young:
      for (double t : c.t_list) {
        if (t > 1.0) {
          throw UsageError("Gaussian multiplier has F(0) != 0, so t must lie in (0, 1]");
        }
      }
      if (c.experiment == Experiment::CrossSection) check_exp(c.alpha, "alpha");
      if (c.experiment == Experiment::Young && (c.p.has_value() != c.alpha.has_value())) {
        throw UsageError("young: give both --p and --alpha, or neither");
      }
      if (c.experiment == Experiment::Young && c.p && c.alpha) {
        const double rq = 1.0 / *c.p + 1.0 / *c.alpha - 1.0;
        if (rq < 0.0 || rq > 1.0) throw UsageError("young: need 1/p + 1/alpha >= 1");
      }
      break;
    case Experiment::BandNorms:
      if (c.p.value_or(2.0) > c.q.value_or(2.0)) throw UsageError("band-norms: requires p <= q");
      if (c.m_max && *c.m_max < 2) throw UsageError("band-norms: --m-max must be >= 2");
      if (c.m_max && c.m_min.value_or(2) > *c.m_max - 1) {
        throw UsageError("band-norms: need at least two fitted bands");
      }
      break;
    case Experiment::ApproxRate: {
      const double p = c.p.value_or(2.0);
      const double q = c.q.value_or(2.0);
      const double r = c.r.value_or(1.0);
      const double e = -r / model.dimension() + std::max(0.0, inv(p) - inv(q));
      if (!(e < 0.0)) {
        throw UsageError("approx-rate: basic exponent -r/s + (1/p - 1/q)_+ = " + format_number(e) +
                         " must be negative");
      }
      if (c.m_min && *c.m_min < 1) throw UsageError("approx-rate: --m-min must be >= 1");
      const int m_max = c.m_max.value_or(7);
      if (std::pow(4.0, m_max + 2) > model.max_omega()) {
        throw UsageError("approx-rate: --m-max too large for this model");
      }
      if (m_max - c.m_min.value_or(2) < 1) throw UsageError("approx-rate: need two values of m");
      break;
    }
    case Experiment::Besov:
      if (!(c.t_besov >= 1.0)) throw UsageError("besov: --t-besov must be >= 1");
      if (c.p && *c.p != 2.0) throw UsageError("besov: closed-form checks need --p 2");
      if (c.m_max && (*c.m_max < 2 || *c.m_max > 10)) {
        throw UsageError("besov: j_max (--m-max) must lie in [2, 10]");
      }
      break;
    case Experiment::Nikolskii:
      if (c.p.value_or(2.0) > c.q.value_or(kInf)) throw UsageError("nikolskii: requires p <= q");
      if (c.k < 0) throw UsageError("nikolskii: --k must be >= 0");
      if (c.omega_max && !(*c.omega_max >= 4.0)) throw UsageError("nikolskii: --omega-max must be >= 4");
      if (c.d && !(*c.d > 0.0)) throw UsageError("nikolskii: --d must be positive");
      break;
    case Experiment::PolySpan:
      if (c.model != ManifoldKind::Sphere2) throw UsageError("poly-span: requires --model sphere2");
      if (c.degree < 0 || c.degree > 12) throw UsageError("poly-span: --degree must lie in [0, 12]");
      break;
  }
}

// ---------------------------------------------------------------- report

bool Report::passed() const {
  return std::all_of(flags.begin(), flags.end(), [](const Flag& f) { return f.pass; });
}

std::optional<double> Report::fit(const std::string& name) const {
  for (const auto& [k, v] : fits) {
    if (k == name) return v;
  }
  return std::nullopt;
}

const Flag* Report::flag(const std::string& name) const {
  for (const auto& f : flags) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

Report run(const RunConfig& c) {
  validate(c);
  const auto start = std::chrono::steady_clock::now();
  Report report;
  try {
    switch (c.experiment) {
      case Experiment::Weyl:
        report = run_weyl(c);
        break;
      case Experiment::Growth:
        report = run_growth(c, static_cast<std::size_t>(c.l_min),
                            static_cast<std::size_t>(c.l_max));
        break;
      case Experiment::Partition:
        report = run_partition(c);
        break;
      case Experiment::KernelDecay:
        report = run_kernel_decay(c);
        break;
      case Experiment::CrossSection:
        report = run_cross_section(c);
        break;
      case Experiment::Young:
        report = run_young(c);
        break;
      case Experiment::BandNorms:
        report = run_band_norms(c);
        break;
      case Experiment::ApproxRate:
        report = run_approx_rate(c);
        break;
      case Experiment::Besov:
        report = run_besov(c, c.t_besov);
        break;
      case Experiment::Nikolskii:
        report = run_nikolskii(c);
        break;
      case Experiment::PolySpan:
        report = run_poly_span(c);
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(to_string(c.experiment) + ": " + e.what());
  } catch (const std::exception& e) {
    report.experiment = to_string(c.experiment);
    report.notes.emplace_back(e.what());
    report.flags.push_back(Flag{"experiment_error", false, 1.0, 0.0});
  }
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_csv(const Report& r, std::ostream& os) {
  const char* eol = "\r\n";
  if (!r.experiment.empty()) os << "# experiment=" << r.experiment << eol;
  if (!r.anchor.empty()) os << "# anchor=" << r.anchor << eol;
  for (const auto& [k, v] : r.config) os << "# config." << k << '=' << v << eol;
  for (const auto& [k, v] : r.fits) os << "# fit." << k << '=' << format_number(v) << eol;
  for (const auto& f : r.flags) {
    os << "# flag." << f.name << '=' << (f.pass ? "pass" : "fail")
       << " value=" << format_number(f.value) << " tolerance=" << format_number(f.tolerance) << eol;
  }
  for (const auto& n : r.notes) os << "# note=" << n << eol;
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    os << (i ? "," : "") << csv_field(r.columns[i]);
  }
  os << eol;
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << csv_field(cell_text(row[i]));
    }
    os << eol;
  }
}

std::string to_json_string(const Report& r, bool include_timing) {
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["anchor"] = r.anchor;
  auto& cfg = j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) cfg[k] = v;
  j["columns"] = r.columns;
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size() && i < r.columns.size(); ++i) {
      if (const auto* d = std::get_if<double>(&row[i])) {
        o[r.columns[i]] = number_json(*d);
      } else {
        o[r.columns[i]] = std::get<std::string>(row[i]);
      }
    }
    rows.push_back(std::move(o));
  }
  auto& fits = j["fits"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.fits) fits[k] = number_json(v);
  auto& flags = j["flags"] = nlohmann::ordered_json::array();
  for (const auto& f : r.flags) {
    flags.push_back({{"name", f.name},
                     {"pass", f.pass},
                     {"value", number_json(f.value)},
                     {"tolerance", number_json(f.tolerance)}});
  }
  j["notes"] = r.notes;
  j["passed"] = r.passed();
  if (include_timing) j["duration_seconds"] = r.duration_seconds;
  return j.dump(2) + "\n";
}

void emit_json(const Report& r, std::ostream& os, bool include_timing) {
  os << to_json_string(r, include_timing);
}

void emit(const Report& r, Format format, const std::string& path, bool include_timing) {
  auto write = [&](std::ostream& os) {
    if (format == Format::Csv) {
      emit_csv(r, os);
    } else {
      emit_json(r, os, include_timing);
    }
    os.flush();
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
  };
  if (path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::vector<std::vector<std::string>> records;
  std::string field;
  std::vector<std::string> record;
  bool in_quotes = false;
  bool at_line_start = true;
  bool any = false;
  char ch = 0;
  auto end_record = [&] {
    record.push_back(field);
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    at_line_start = true;
    any = false;
  };
  while (is.get(ch)) {
    if (at_line_start && !in_quotes && ch == '#') {
      std::string line;
      std::getline(is, line);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      table.metadata.push_back(trim(line));
      continue;
    }
    at_line_start = false;
    any = true;
    if (in_quotes) {
      if (ch == '"') {
        if (is.peek() == '"') {
          field += '"';
          is.get();
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      record.push_back(field);
      field.clear();
    } else if (ch == '\r') {
      if (is.peek() == '\n') is.get();
      end_record();
    } else if (ch == '\n') {
      end_record();
    } else {
      field += ch;
    }
  }
  if (any) end_record();
  if (in_quotes) throw std::runtime_error("read_csv: unterminated quoted field");
  if (!records.empty()) {
    table.header = records.front();
    if (table.header.size() == 1 && table.header.front().empty()) table.header.clear();
    table.rows.assign(records.begin() + 1, records.end());
  }
  return table;
}

}  // namespace nwlab

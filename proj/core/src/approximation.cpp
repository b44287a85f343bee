#include "nwidths/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "nwidths/compensated_sum.hpp"

namespace nwidths {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

void check_exponent(double p, const char* what) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must be >= 1");
  }
}

// Grid on which an element of E_band is sampled to take an L_p norm.
QuadratureGrid norm_grid(const Manifold& model, double band, double p) {
  const int degree = std::max(model.max_degree(band), 1);
  const QuadratureGrid analysis = grid_for_degree(model, 2 * degree);
  if (std::isinf(p)) {
    return build_grid(model, 4 * analysis.resolution);
  }
  return grid_for_degree(model, 16 * degree + 32);
}

SpectralCoeffs scale_by_power(const SpectralCoeffs& f, double exponent) {
  SpectralCoeffs out = f;
  auto c = out.coeffs();
  const auto basis = f.basis();
  for (std::size_t l = 0; l < c.size(); ++l) {
    if (c[l] != 0.0) c[l] *= std::pow(basis[l].lambda, exponent);
  }
  return out;
}

double parseval_tail(const SpectralCoeffs& f, double omega) {
  CompensatedSum s;
  const auto basis = f.basis();
  const auto c = f.coeffs();
  for (std::size_t l = 0; l < c.size(); ++l) {
    if (basis[l].lambda > omega) s.add(c[l] * c[l]);
  }
  return std::sqrt(std::max(0.0, s.value()));
}

// min over eigenvalue shells lambda_s <= omega of || f - P_{lambda_s} f ||_p,
// where P is the L2 projection given by coeffs over basis.
double min_shell_residual(const QuadratureGrid& grid, std::span<const double> fvals,
                          std::span<const Eigenpair> basis, std::span<const double> coeffs,
                          double omega, double p) {
  // Candidates are zero and the partial sums ending at each shell with lambda <= omega.
  std::vector<std::size_t> ends;
  for (std::size_t l = 0; l < basis.size() && basis[l].lambda <= omega; ++l) {
    if (l + 1 == basis.size() || basis[l + 1].lambda != basis[l].lambda ||
        basis[l + 1].lambda > omega) {
      ends.push_back(l + 1);
    }
  }
  if (ends.empty()) {
    return quadrature_norm(fvals, grid.weights, p);
  }
  const std::size_t used = ends.back();
  const auto sub = basis.first(used);
  std::vector<double> u(used);
  std::vector<CompensatedSum> acc(ends.size());
  std::vector<double> maxima(ends.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.model.evaluate_basis(grid.nodes[i], sub, u);
    double partial = 0.0;
    std::size_t l = 0;
    for (std::size_t s = 0; s < ends.size(); ++s) {
      for (; l < ends[s]; ++l) partial += coeffs[l] * u[l];
      const double res = fvals[i] - partial;
      if (std::isinf(p)) {
        maxima[s] = std::max(maxima[s], std::abs(res));
      } else {
        acc[s].add(grid.weights[i] * std::pow(std::abs(res), p));
      }
    }
  }
  double best = quadrature_norm(fvals, grid.weights, p);
  for (std::size_t s = 0; s < ends.size(); ++s) {
    const double v = std::isinf(p) ? maxima[s] : std::pow(std::max(0.0, acc[s].value()), 1.0 / p);
    best = std::min(best, v);
  }
  return best;
}

std::size_t closest_shell_start(std::span<const Eigenpair> basis, double target) {
  std::size_t best = 0;
  double gap = kInf;
  for (std::size_t l = 0; l < basis.size(); ++l) {
    if (l > 0 && basis[l].lambda == basis[l - 1].lambda) continue;
    const double g = std::abs(basis[l].lambda - target);
    if (g < gap) {
      gap = g;
      best = l;
    }
  }
  return best;
}

}  // namespace

double ExperimentParams::basic_exponent(int s) const {
  return -r / s + std::max(0.0, inv(p) - inv(q));
}

double lp_norm(const GridFunction& f, double p) {
  check_exponent(p, "lp_norm: p");
  return quadrature_norm(f.values(), f.grid().weights, p);
}

double lp_norm(const SpectralCoeffs& f, double p) {
  check_exponent(p, "lp_norm: p");
  if (p == 2.0) {
    return parseval_tail(f, -1.0);
  }
  const QuadratureGrid grid = norm_grid(f.model(), f.effective_band(), p);
  const auto values = synthesize_at(f, grid.nodes);
  return quadrature_norm(values, grid.weights, p);
}

double sobolev_norm(const SpectralCoeffs& f, double p, double r) {
  check_exponent(p, "sobolev_norm: p");
  if (!(r > 0.0)) {
    throw std::invalid_argument("sobolev_norm: r must be positive");
  }
  return lp_norm(f, p) + lp_norm(scale_by_power(f, r / 2.0), p);
}

BestApprox best_approx(const SpectralCoeffs& f, double omega, double p) {
  check_exponent(p, "best_approx: p");
  if (p == 2.0) {
    return {parseval_tail(f, omega), false};
  }
  const double band = f.effective_band();
  if (omega >= band) {
    return {0.0, false};
  }
  const QuadratureGrid grid = norm_grid(f.model(), band, p);
  const auto fvals = synthesize_at(f, grid.nodes);
  return {min_shell_residual(grid, fvals, f.basis(), f.coeffs(), omega, p), true};
}

BestApprox best_approx(const GridFunction& f, double omega, double p) {
  check_exponent(p, "best_approx: p");
  const SpectralCoeffs c = analyze(f, omega);
  if (p == 2.0) {
    const double total = lp_norm(f, 2.0);
    CompensatedSum s;
    for (double v : c.coeffs()) s.add(v * v);
    return {std::sqrt(std::max(0.0, total * total - s.value())), false};
  }
  return {min_shell_residual(f.grid(), f.values(), c.basis(), c.coeffs(), omega, p), true};
}

double besov_norm(const SpectralCoeffs& f, double alpha, double p, double t, int j_max) {
  if (!(alpha > 0.0)) throw std::invalid_argument("besov_norm: alpha must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("besov_norm: t must be positive");
  if (j_max < 0) throw std::invalid_argument("besov_norm: j_max must be >= 0");
  check_exponent(p, "besov_norm: p");
  double tail = 0.0;
  CompensatedSum sum;
  for (int j = 0; j <= j_max; ++j) {
    const double term = std::exp2(alpha * j) * best_approx(f, std::ldexp(1.0, 2 * j), p).value;
    if (std::isinf(t)) {
      tail = std::max(tail, term);
    } else {
      sum.add(std::pow(term, t));
    }
  }
  if (!std::isinf(t)) tail = std::pow(sum.value(), 1.0 / t);
  return lp_norm(f, p) + tail;
}

std::vector<BandNormRow> band_norm_table(const SpectralCoeffs& f, const ExperimentParams& params,
                                         int j_max) {
  check_exponent(params.p, "band_norm_table: p");
  check_exponent(params.q, "band_norm_table: q");
  if (params.p > params.q) {
    throw std::invalid_argument("band_norm_table: requires p <= q");
  }
  const int s = f.model().dimension();
  const double sob = sobolev_norm(f, params.p, params.r);
  const double exponent = s * (-params.r / s + inv(params.p) - inv(params.q));
  std::vector<BandNormRow> rows;
  for (int j = 0; j <= j_max; ++j) {
    const SpectralCoeffs band = apply_multiplier(f, make_phi_j(j), 1.0);
    BandNormRow row;
    row.j = j;
    row.measured = lp_norm(band, params.q);
    row.bound = std::exp2(j * exponent) * sob;
    rows.push_back(row);
  }
  return rows;
}

SpectralCoeffs band_extremal(const Manifold& model, int j, double p, double r) {
  if (j < 0) throw std::invalid_argument("band_extremal: j must be >= 0");
  const double cutoff = std::ldexp(1.0, 2 * (j + 1));
  SpectralCoeffs f(model, cutoff);
  const std::size_t l = closest_shell_start(f.basis(), std::ldexp(1.0, 2 * j));
  f.coeffs()[l] = 1.0;
  const double norm = sobolev_norm(f, p, r);
  f.coeffs()[l] = 1.0 / norm;
  return f;
}

WidthRateResult width_rate_experiment(const Manifold& model, const ExperimentParams& params) {
  check_exponent(params.p, "width_rate_experiment: p");
  check_exponent(params.q, "width_rate_experiment: q");
  if (!(params.r > 0.0)) throw std::invalid_argument("width_rate_experiment: r must be positive");
  if (params.m_min < 1 || params.m_max < params.m_min) {
    throw std::invalid_argument("width_rate_experiment: need 1 <= m_min <= m_max");
  }
  const int s = model.dimension();
  WidthRateResult result;
  result.expected_slope = params.basic_exponent(s);
  if (!(result.expected_slope < 0.0)) {
    throw std::invalid_argument(
        "width_rate_experiment: basic exponent -r/s + (1/p - 1/q)_+ must be negative");
  }
  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Point x0 = base_point(model);
  constexpr std::size_t kMaxSingles = 128;

  for (int m = params.m_min; m <= params.m_max; ++m) {
    const FilterSpec eta_m = make_eta_m(m);
    const double lo = std::ldexp(1.0, 2 * (m - 1));
    const double hi = std::ldexp(1.0, 2 * (m + 1));
    const double cutoff = std::ldexp(1.0, 2 * (m + 2));
    const auto basis = std::make_shared<const std::vector<Eigenpair>>(
        model.enumerate_eigenpairs(cutoff));
    const std::size_t n = basis->size();

    auto error_of = [&](std::vector<double> coeffs) {
      const SpectralCoeffs f(model, cutoff, basis, std::move(coeffs));
      SpectralCoeffs residual = f;
      auto rc = residual.coeffs();
      for (std::size_t l = 0; l < n; ++l) {
        if (rc[l] != 0.0) rc[l] *= 1.0 - eta_m((*basis)[l].lambda);
      }
      const double num = lp_norm(residual, params.q);
      const double den = sobolev_norm(f, params.p, params.r);
      return den > 0.0 ? num / den : 0.0;
    };

    WidthRateRow row;
    row.m = m;
    row.n = model.weyl_count(std::ldexp(1.0, 2 * m));

    // Single eigenfunctions, one per shell in (4^{m-1}, 4^{m+1}].
    std::vector<std::size_t> starts;
    for (std::size_t l = 0; l < n; ++l) {
      const double lam = (*basis)[l].lambda;
      if (lam > lo && lam <= hi && (l == 0 || (*basis)[l - 1].lambda != lam)) {
        starts.push_back(l);
      }
    }
    const std::size_t stride = std::max<std::size_t>(1, (starts.size() + kMaxSingles - 1) / kMaxSingles);
    for (std::size_t i = 0; i < starts.size(); i += stride) {
      std::vector<double> c(n, 0.0);
      c[starts[i]] = 1.0;
      row.error = std::max(row.error, error_of(std::move(c)));
      ++row.members;
    }

    // Kernel-type extremal concentrated at x0.
    {
      std::vector<double> u(n);
      model.evaluate_basis(x0, *basis, u);
      std::vector<double> c(n, 0.0);
      for (std::size_t l = 0; l < n; ++l) {
        const double lam = (*basis)[l].lambda;
        const double w = 1.0 + std::pow(lam, params.r / 2.0);
        c[l] = (1.0 - eta_m(lam)) * u[l] / (w * w);
      }
      row.error = std::max(row.error, error_of(std::move(c)));
      ++row.members;
    }

    // Random draws in the transition band, weighted toward unit Sobolev norm.
    for (int k = 0; k < params.random_members; ++k) {
      std::vector<double> c(n, 0.0);
      for (std::size_t l = 0; l < n; ++l) {
        const double lam = (*basis)[l].lambda;
        if (lam > lo && lam <= hi) {
          c[l] = normal(rng) / (1.0 + std::pow(lam, params.r / 2.0));
        }
      }
      row.error = std::max(row.error, error_of(std::move(c)));
      ++row.members;
    }
    result.rows.push_back(row);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  const bool drop_first = result.rows.size() >= 4;
  for (std::size_t i = drop_first ? 1 : 0; i < result.rows.size(); ++i) {
    xs.push_back(static_cast<double>(result.rows[i].n));
    ys.push_back(result.rows[i].error);
  }
  if (xs.size() >= 2) {
    result.fit = fit_log_log(xs, ys);
  }
  return result;
}

double group_dimension(const Manifold& model) {
  return model.kind() == ManifoldKind::Sphere2 ? 3.0 : static_cast<double>(model.dimension());
}

namespace {

// L_p norm of the zonal function y -> sum_s coef[s] * shell_product_s(x0, y).
double zonal_lp_norm(const Manifold& model, std::span<const EigenShell> shells,
                     std::span<const double> coef, double p) {
  const Point x0 = base_point(model);
  int degree = 1;
  for (const auto& sh : shells) degree = std::max(degree, model.max_degree(sh.lambda));
  std::vector<Point> nodes;
  std::vector<double> weights;
  switch (model.kind()) {
    case ManifoldKind::Circle: {
      const int n = 8 * (degree + 1);
      for (int i = 0; i < n; ++i) {
        nodes.push_back(circle_point(2.0 * std::numbers::pi * i / n));
        weights.push_back(2.0 * std::numbers::pi / n);
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      std::vector<double> z;
      std::vector<double> w;
      gauss_legendre(4 * (degree + 1), z, w);
      for (std::size_t i = 0; i < z.size(); ++i) {
        nodes.push_back(Point{{std::sqrt(std::max(0.0, 1.0 - z[i] * z[i])), 0.0, z[i]}});
        weights.push_back(2.0 * std::numbers::pi * w[i]);
      }
      break;
    }
    case ManifoldKind::Torus2: {
      const QuadratureGrid grid = grid_for_degree(model, 4 * degree);
      if (grid.size() > 4'000'000) {
        throw std::invalid_argument("nikolskii_check: torus grid for this band is too large");
      }
      nodes = grid.nodes;
      weights = grid.weights;
      break;
    }
  }
  std::vector<double> values(nodes.size());
  std::vector<double> prod(shells.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    model.shell_products(x0, nodes[i], shells, prod);
    CompensatedSum s;
    for (std::size_t k = 0; k < shells.size(); ++k) s.add(coef[k] * prod[k]);
    values[i] = s.value();
  }
  return quadrature_norm(values, weights, p);
}

long long isqrt_floor(double v) {
  auto n = static_cast<long long>(std::sqrt(v));
  while (n > 0 && static_cast<double>(n) * n > v) --n;
  while (static_cast<double>(n + 1) * (n + 1) <= v) ++n;
  return n;
}

// sum over eigenpairs with lambda <= band of lambda^e, divided by |M|. On
// these homogeneous models the sum of u_l(x0)^2 over a shell is mult/|M|.
double lattice_power_sum(const Manifold& model, double band, double e) {
  CompensatedSum s;
  auto term = [&](double lam, double mult) {
    s.add(mult * (lam == 0.0 ? (e == 0.0 ? 1.0 : 0.0) : std::pow(lam, e)));
  };
  switch (model.kind()) {
    case ManifoldKind::Circle: {
      const long long n_max = isqrt_floor(band);
      for (long long n = 0; n <= n_max; ++n) term(static_cast<double>(n * n), n == 0 ? 1.0 : 2.0);
      break;
    }
    case ManifoldKind::Sphere2: {
      for (long long k = 0; static_cast<double>(k) * (k + 1) <= band; ++k) {
        term(static_cast<double>(k) * (k + 1), 2.0 * k + 1.0);
      }
      break;
    }
    case ManifoldKind::Torus2: {
      const long long n_max = isqrt_floor(band);
      for (long long a = -n_max; a <= n_max; ++a) {
        const long long b_max = isqrt_floor(band - static_cast<double>(a * a));
        for (long long b = -b_max; b <= b_max; ++b) {
          term(static_cast<double>(a * a + b * b), 1.0);
        }
      }
      break;
    }
  }
  return s.value() / model.total_measure();
}

// Norm in L_p of sum_{lambda_l <= band} lambda_l^k u_l(x0) u_l. For p = 2 and
// p = inf the norm is a lattice sum (the sup is attained at x0).
double dirichlet_power_norm(const Manifold& model, double band, int k, double p) {
  if (p == 2.0) return std::sqrt(lattice_power_sum(model, band, 2.0 * k));
  if (std::isinf(p)) return lattice_power_sum(model, band, k);
  const auto shells = model.shells(band);
  std::vector<double> coef(shells.size());
  for (std::size_t i = 0; i < shells.size(); ++i) coef[i] = std::pow(shells[i].lambda, k);
  return zonal_lp_norm(model, shells, coef, p);
}

}  // namespace

NikolskiiResult nikolskii_check(const Manifold& model, std::span<const double> omega_list, int k,
                                double p, double q, std::optional<double> d) {
  check_exponent(p, "nikolskii_check: p");
  check_exponent(q, "nikolskii_check: q");
  if (p > q) throw std::invalid_argument("nikolskii_check: requires p <= q");
  if (k < 0) throw std::invalid_argument("nikolskii_check: k must be >= 0");
  if (omega_list.empty()) throw std::invalid_argument("nikolskii_check: empty omega list");
  NikolskiiResult out;
  out.d = d.value_or(group_dimension(model));
  out.min_ratio = kInf;
  const double exponent = 2.0 * k + out.d * (inv(p) - inv(q));
  for (double omega : omega_list) {
    if (!(omega >= 1.0)) throw std::invalid_argument("nikolskii_check: omega must be >= 1");
    const double band = omega * omega;
    NikolskiiRow row;
    row.omega = omega;
    row.dimension = model.weyl_count(band);
    row.lhs = dirichlet_power_norm(model, band, k, q);
    row.rhs_scale = std::pow(omega, exponent) * dirichlet_power_norm(model, band, 0, p);
    out.max_ratio = std::max(out.max_ratio, row.ratio());
    out.min_ratio = std::min(out.min_ratio, row.ratio());
    out.rows.push_back(row);
  }
  return out;
}

double polynomial_span_check(int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial_span_check: degree must be >= 0");
  const Manifold sphere = Manifold::sphere2();
  const double omega = static_cast<double>(degree) * (degree + 1);
  const GridPtr grid = std::make_shared<const QuadratureGrid>(
      grid_for_degree(sphere, 2 * std::max(degree, 1)));
  double worst = 0.0;
  for (int a = 0; a <= degree; ++a) {
    for (int b = 0; a + b <= degree; ++b) {
      for (int c = 0; a + b + c <= degree; ++c) {
        const GridFunction mono = GridFunction::sample(grid, [&](const Point& x) {
          return std::pow(x.c[0], a) * std::pow(x.c[1], b) * std::pow(x.c[2], c);
        });
        const GridFunction proj = synthesize(analyze(mono, omega), grid);
        std::vector<double> diff(mono.size());
        for (std::size_t i = 0; i < diff.size(); ++i) {
          diff[i] = mono.values()[i] - proj.values()[i];
        }
        const double rel = quadrature_norm(diff, grid->weights, 2.0) / lp_norm(mono, 2.0);
        worst = std::max(worst, rel);
      }
    }
  }
  return worst;
}

}  // namespace nwidths

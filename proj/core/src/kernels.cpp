#include "nwidths/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nwidths/compensated_sum.hpp"

namespace nwidths {

namespace {

// Eigenvalue and sup |u_l|^2 bound at degree d of a model.
double degree_lambda(const Manifold& model, long long d) {
  return model.kind() == ManifoldKind::Sphere2 ? static_cast<double>(d * (d + 1))
                                               : static_cast<double>(d * d);
}

double degree_sup_bound(const Manifold& model, long long d) {
  switch (model.kind()) {
    case ManifoldKind::Circle:
      return 1.0 / std::numbers::pi;
    case ManifoldKind::Torus2:
      return 1.0 / (std::numbers::pi * std::numbers::pi);
    case ManifoldKind::Sphere2:
      return (2.0 * static_cast<double>(d) + 1.0) / (4.0 * std::numbers::pi);
  }
  return 1.0;
}

void check_t_range(const FilterSpec& filter, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("kernel scale t must be positive and finite");
  }
  if (filter.value_at_zero() != 0.0 && t > 1.0) {
    throw std::invalid_argument(
        "kernel estimates for a multiplier with F(0) != 0 hold only for 0 < t <= 1; got t = " +
        std::to_string(t));
  }
}

}  // namespace

double kernel_truncation_omega(const Manifold& model, const FilterSpec& filter, double t,
                               double tail_tol) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("kernel scale t must be positive and finite");
  }
  if (!(tail_tol > 0.0)) {
    throw std::invalid_argument("tail_tol must be positive");
  }
  const double t2 = t * t;
  double omega = 0.0;
  if (const auto support = filter.support_upper()) {
    omega = *support / t2;
  } else if (filter.decays()) {
    omega = std::numeric_limits<double>::infinity();
    for (long long d = 1;; ++d) {
      const double lam = degree_lambda(model, d);
      if (lam > model.max_omega()) {
        break;
      }
      if (t2 * lam < 1.0) {
        continue;
      }
      const double count = static_cast<double>(model.weyl_count(lam));
      if (std::abs(filter(t2 * lam)) * degree_sup_bound(model, d) * count < tail_tol) {
        omega = lam;
        break;
      }
    }
  } else {
    throw std::invalid_argument("multiplier " + filter.describe() +
                                " has no compact support and is not declared decaying;"
                                " kernel truncation is unjustified");
  }
  if (omega > model.max_omega()) {
    throw std::invalid_argument("multiplier support at t = " + std::to_string(t) +
                                " exceeds the enumerable spectrum of " +
                                std::string(to_string(model.kind())));
  }
  return omega;
}

SpectralKernel::SpectralKernel(const Manifold& model, const FilterSpec& filter, double t,
                               double tail_tol)
    : SpectralKernel(model, filter, t, kernel_truncation_omega(model, filter, t, tail_tol),
                     0) {}

SpectralKernel SpectralKernel::with_cutoff(const Manifold& model, const FilterSpec& filter,
                                           double t, double omega_max) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("kernel scale t must be positive");
  }
  if (omega_max > model.max_omega()) {
    throw std::invalid_argument("kernel cutoff exceeds the enumerable spectrum");
  }
  return SpectralKernel(model, filter, t, omega_max, 0);
}

SpectralKernel::SpectralKernel(const Manifold& model, const FilterSpec& filter, double t,
                               double omega_max, int)
    : model_(model), t_(t), omega_(omega_max), shells_(model.shells(omega_max)) {
  multipliers_.reserve(shells_.size());
  for (const auto& sh : shells_) {
    multipliers_.push_back(filter(t * t * sh.lambda));
  }
}

double SpectralKernel::operator()(const Point& x, const Point& y) const {
  std::vector<double> products(shells_.size());
  model_.shell_products(x, y, shells_, products);
  CompensatedSum sum;
  for (std::size_t i = 0; i < shells_.size(); ++i) {
    if (multipliers_[i] != 0.0) {
      sum.add(multipliers_[i] * products[i]);
    }
  }
  return sum.value();
}

double kernel_eval(const Manifold& model, const FilterSpec& filter, double t, const Point& x,
                   const Point& y, double tail_tol) {
  model.validate(x);
  model.validate(y);
  return SpectralKernel(model, filter, t, tail_tol)(x, y);
}

double kernel_eval_by_eigenpairs(const Manifold& model, const FilterSpec& filter, double t,
                                 const Point& x, const Point& y, double omega_max) {
  const auto basis = model.enumerate_eigenpairs(omega_max);
  std::vector<double> ux(basis.size());
  std::vector<double> uy(basis.size());
  model.evaluate_basis(x, basis, ux);
  model.evaluate_basis(y, basis, uy);
  CompensatedSum sum;
  for (std::size_t l = 0; l < basis.size(); ++l) {
    sum.add(filter(t * t * basis[l].lambda) * ux[l] * uy[l]);
  }
  return sum.value();
}

Point base_point(const Manifold& model) {
  switch (model.kind()) {
    case ManifoldKind::Circle:
      return circle_point(0.0);
    case ManifoldKind::Torus2:
      return torus_point(0.0, 0.0);
    case ManifoldKind::Sphere2:
      return Point{{0.0, 0.0, 1.0}};
  }
  return {};
}

LocalizationReport localization_profile(const Manifold& model, const FilterSpec& filter,
                                        std::span<const double> t_list,
                                        const QuadratureGrid& pair_grid,
                                        std::span<const double> alphas, double tail_tol) {
  if (t_list.empty()) {
    throw std::invalid_argument("localization_profile: empty t_list");
  }
  if (!(pair_grid.model == model)) {
    throw std::invalid_argument("localization_profile: grid belongs to another model");
  }
  for (double t : t_list) check_t_range(filter, t);
  for (double a : alphas) {
    if (!(a >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  }
  const double s = model.dimension();
  const Point x0 = base_point(model);
  LocalizationReport report;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (double t : t_list) {
    const SpectralKernel kernel(model, filter, t, tail_tol);
    KernelProfile profile;
    profile.t = t;
    profile.samples.reserve(pair_grid.size() + 1);
    profile.samples.emplace_back(0.0, std::abs(kernel(x0, x0)));
    std::vector<double> values(pair_grid.size());
    for (std::size_t i = 0; i < pair_grid.size(); ++i) {
      values[i] = kernel(x0, pair_grid.nodes[i]);
      profile.samples.emplace_back(model.geodesic_distance(x0, pair_grid.nodes[i]),
                                   std::abs(values[i]));
    }
    for (const auto& [d, k] : profile.samples) {
      profile.fitted_constant =
          std::max(profile.fitted_constant, std::pow(t, s) * k * std::pow(1.0 + d / t, s + 1.0));
    }
    for (double a : alphas) {
      if (std::isinf(a)) {
        double m = 0.0;
        for (double v : values) m = std::max(m, std::abs(v));
        profile.alpha_norms[a] = m;
      } else {
        CompensatedSum acc;
        for (std::size_t i = 0; i < values.size(); ++i) {
          acc.add(pair_grid.weights[i] * std::pow(std::abs(values[i]), a));
        }
        profile.alpha_norms[a] = std::pow(acc.value(), 1.0 / a);
      }
    }
    lo = std::min(lo, profile.fitted_constant);
    hi = std::max(hi, profile.fitted_constant);
    report.profiles.push_back(std::move(profile));
  }
  report.max_min_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return report;
}

double cross_section_norm(const SpectralKernel& kernel, const Point& x, double alpha,
                          const QuadratureGrid& grid) {
  if (!(alpha >= 1.0)) {
    throw std::invalid_argument("cross_section_norm: alpha must be >= 1");
  }
  if (!(grid.model == kernel.model())) {
    throw std::invalid_argument("cross_section_norm: grid belongs to another model");
  }
  kernel.model().validate(x);
  if (std::isinf(alpha)) {
    double m = 0.0;
    for (const auto& y : grid.nodes) m = std::max(m, std::abs(kernel(x, y)));
    return m;
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc.add(grid.weights[i] * std::pow(std::abs(kernel(x, grid.nodes[i])), alpha));
  }
  return std::pow(acc.value(), 1.0 / alpha);
}

double cross_section_norm(const Manifold& model, const FilterSpec& filter, double t,
                          const Point& x, double alpha, const QuadratureGrid& grid,
                          double tail_tol) {
  if (!(alpha >= 1.0)) {
    throw std::invalid_argument("cross_section_norm: alpha must be >= 1");
  }
  check_t_range(filter, t);
  return cross_section_norm(SpectralKernel(model, filter, t, tail_tol), x, alpha, grid);
}

IntegralDecay integral_decay_check(const Manifold& model, double t, double M_exp,
                                   const QuadratureGrid& grid, std::size_t max_base_points) {
  const double s = model.dimension();
  if (!(M_exp > s)) {
    throw std::invalid_argument("integral_decay_check: exponent M must exceed dim M = " +
                                std::to_string(model.dimension()));
  }
  if (!(t > 0.0)) {
    throw std::invalid_argument("integral_decay_check: t must be positive");
  }
  if (!(grid.model == model)) {
    throw std::invalid_argument("integral_decay_check: grid belongs to another model");
  }
  const std::size_t n = grid.size();
  const std::size_t count = max_base_points == 0 ? n : std::min(n, max_base_points);
  const std::size_t stride = std::max<std::size_t>(1, n / count);
  IntegralDecay out{0.0, std::numeric_limits<double>::infinity()};
  for (std::size_t b = 0; b < count; ++b) {
    const Point& x = grid.nodes[(b * stride) % n];
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = model.geodesic_distance(x, grid.nodes[i]);
      acc.add(grid.weights[i] * std::pow(1.0 + d / t, -M_exp));
    }
    const double v = acc.value() / std::pow(t, s);
    out.max_value = std::max(out.max_value, v);
    out.min_value = std::min(out.min_value, v);
  }
  return out;
}

}  // namespace nwidths

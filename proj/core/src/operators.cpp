#include "nwidths/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "nwidths/compensated_sum.hpp"

namespace nwidths {

GridPtr make_grid(const Manifold& model, int resolution) {
  return std::make_shared<const QuadratureGrid>(build_grid(model, resolution));
}

GridPtr analysis_grid(const Manifold& model, double omega) {
  return std::make_shared<const QuadratureGrid>(
      grid_for_degree(model, 2 * std::max(model.max_degree(omega), 0)));
}

GridFunction::GridFunction(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) {
    throw std::invalid_argument("GridFunction: null grid");
  }
  if (values_.size() != grid_->size()) {
    throw std::invalid_argument("GridFunction: " + std::to_string(values_.size()) +
                                " values for " + std::to_string(grid_->size()) + " nodes");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("GridFunction: non-finite value");
    }
  }
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<double(const Point&)>& f) {
  std::vector<double> v;
  v.reserve(grid->size());
  for (const auto& x : grid->nodes) v.push_back(f(x));
  return GridFunction(std::move(grid), std::move(v));
}

GridFunction GridFunction::zero(GridPtr grid) {
  const auto n = grid->size();
  return GridFunction(std::move(grid), std::vector<double>(n, 0.0));
}

SpectralCoeffs::SpectralCoeffs(const Manifold& model, double cutoff_omega)
    : model_(model),
      cutoff_(cutoff_omega),
      basis_(std::make_shared<const std::vector<Eigenpair>>(
          model.enumerate_eigenpairs(cutoff_omega))),
      coeffs_(basis_->size(), 0.0) {}

SpectralCoeffs::SpectralCoeffs(const Manifold& model, double cutoff_omega,
                               std::vector<double> coeffs)
    : SpectralCoeffs(model, cutoff_omega) {
  if (coeffs.size() != coeffs_.size()) {
    throw std::invalid_argument("SpectralCoeffs: expected " + std::to_string(coeffs_.size()) +
                                " coefficients, got " + std::to_string(coeffs.size()));
  }
  coeffs_ = std::move(coeffs);
}

SpectralCoeffs::SpectralCoeffs(const Manifold& model, double cutoff_omega,
                               std::shared_ptr<const std::vector<Eigenpair>> basis,
                               std::vector<double> coeffs)
    : model_(model), cutoff_(cutoff_omega), basis_(std::move(basis)), coeffs_(std::move(coeffs)) {
  if (!basis_ || coeffs_.size() != basis_->size()) {
    throw std::invalid_argument("SpectralCoeffs: coefficient count does not match the basis");
  }
  if (!basis_->empty() && basis_->back().lambda > cutoff_omega) {
    throw std::invalid_argument("SpectralCoeffs: basis extends beyond the cutoff");
  }
}

SpectralCoeffs SpectralCoeffs::unit(const Manifold& model, double cutoff_omega, std::size_t l) {
  SpectralCoeffs c(model, cutoff_omega);
  if (l >= c.size()) {
    throw std::invalid_argument("SpectralCoeffs::unit: index beyond cutoff");
  }
  c.coeffs_[l] = 1.0;
  return c;
}

SpectralCoeffs SpectralCoeffs::with_cutoff(double omega) const {
  SpectralCoeffs out(model_, omega);
  const std::size_t n = std::min(out.size(), size());
  std::copy_n(coeffs_.begin(), n, out.coeffs_.begin());
  out.quadrature_exact_ = quadrature_exact_;
  return out;
}

double SpectralCoeffs::effective_band() const {
  double band = 0.0;
  for (std::size_t l = 0; l < coeffs_.size(); ++l) {
    if (coeffs_[l] != 0.0) band = (*basis_)[l].lambda;
  }
  return band;
}

SpectralCoeffs analyze(const GridFunction& f, double omega) {
  const auto& grid = f.grid();
  if (omega > grid.model.max_omega()) {
    throw std::invalid_argument("analyze: omega exceeds the enumerable spectrum");
  }
  SpectralCoeffs out(grid.model, omega);
  const auto basis = out.basis();
  std::vector<CompensatedSum> acc(basis.size());
  std::vector<double> u(basis.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.model.evaluate_basis(grid.nodes[i], basis, u);
    const double wf = grid.weights[i] * f.values()[i];
    for (std::size_t l = 0; l < u.size(); ++l) acc[l].add(wf * u[l]);
  }
  auto coeffs = out.coeffs();
  for (std::size_t l = 0; l < acc.size(); ++l) coeffs[l] = acc[l].value();
  out.set_quadrature_exact(grid.exactness >= 2 * grid.model.max_degree(omega));
  return out;
}

std::vector<double> synthesize_at(const SpectralCoeffs& c, std::span<const Point> points) {
  // Only the leading block with nonzero coefficients needs evaluating.
  std::size_t used = c.size();
  while (used > 0 && c.coeffs()[used - 1] == 0.0) --used;
  const auto basis = c.basis().first(used);
  const auto coeffs = c.coeffs().first(used);
  std::vector<double> out(points.size(), 0.0);
  std::vector<double> u(used);
  for (std::size_t i = 0; i < points.size(); ++i) {
    c.model().evaluate_basis(points[i], basis, u);
    CompensatedSum s;
    for (std::size_t l = 0; l < used; ++l) s.add(coeffs[l] * u[l]);
    out[i] = s.value();
  }
  return out;
}

GridFunction synthesize(const SpectralCoeffs& c, GridPtr grid) {
  if (!(grid->model == c.model())) {
    throw std::invalid_argument("synthesize: grid belongs to another model");
  }
  auto values = synthesize_at(c, grid->nodes);
  return GridFunction(std::move(grid), std::move(values));
}

SpectralCoeffs apply_multiplier(const SpectralCoeffs& f, const FilterSpec& filter, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("apply_multiplier: t must be positive");
  }
  SpectralCoeffs out = f;
  auto coeffs = out.coeffs();
  const auto basis = f.basis();
  for (std::size_t l = 0; l < coeffs.size(); ++l) {
    if (coeffs[l] != 0.0) coeffs[l] *= filter(t * t * basis[l].lambda);
  }
  return out;
}

GridFunction apply_multiplier(const GridFunction& f, const FilterSpec& filter, double t,
                              double tail_tol) {
  const auto& grid = f.grid();
  const SpectralKernel kernel(grid.model, filter, t, tail_tol);
  if (grid.model.max_degree(kernel.truncation_omega()) > grid.exactness) {
    throw std::invalid_argument("apply_multiplier: grid exactness " +
                                std::to_string(grid.exactness) +
                                " does not cover the multiplier's spectral support");
  }
  return KernelOperator(kernel, f.grid_ptr()).apply(f);
}

KernelOperator::KernelOperator(const SpectralKernel& kernel, GridPtr grid)
    : grid_(std::move(grid)), n_(grid_->size()), matrix_(n_ * n_) {
  if (!(grid_->model == kernel.model())) {
    throw std::invalid_argument("KernelOperator: grid belongs to another model");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) {
      const double k = kernel(grid_->nodes[i], grid_->nodes[j]);
      matrix_[i * n_ + j] = k;
      matrix_[j * n_ + i] = k;
    }
  }
}

GridFunction KernelOperator::apply(const GridFunction& f) const {
  if (f.size() != n_) {
    throw std::invalid_argument("KernelOperator::apply: function on a different grid");
  }
  const auto& w = grid_->weights;
  const auto v = f.values();
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    CompensatedSum s;
    const double* row = &matrix_[i * n_];
    for (std::size_t j = 0; j < n_; ++j) s.add(row[j] * w[j] * v[j]);
    out[i] = s.value();
  }
  return GridFunction(grid_, std::move(out));
}

double KernelOperator::sup_row_norm(double alpha) const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  double best = 0.0;
  std::vector<double> row(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    std::copy_n(&matrix_[i * n_], n_, row.begin());
    best = std::max(best, quadrature_norm(row, grid_->weights, alpha));
  }
  return best;
}

double KernelOperator::sup_column_norm(double alpha) const {
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  double best = 0.0;
  std::vector<double> col(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) col[i] = matrix_[i * n_ + j];
    best = std::max(best, quadrature_norm(col, grid_->weights, alpha));
  }
  return best;
}

EtaProjection eta_projection(const SpectralCoeffs& f, int m) {
  const double cutoff = std::ldexp(1.0, 2 * m);
  const SpectralCoeffs filtered = apply_multiplier(f, make_eta_m(m), 1.0);
  SpectralCoeffs range = filtered.with_cutoff(cutoff);
  const std::size_t dim = f.model().weyl_count(cutoff);
  return {std::move(range), dim};
}

double scalar_commutation_check(const SpectralCoeffs& f, int j, double r) {
  if (j < 1) throw std::invalid_argument("scalar_commutation_check: j must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("scalar_commutation_check: r must be positive");
  const FilterSpec phij = make_phi_j(j);
  const FilterSpec psij = make_psi_jr(j, r);
  const double scale = std::exp2(-(j - 1) * r);
  double dev = 0.0;
  const auto basis = f.basis();
  const auto c = f.coeffs();
  for (std::size_t l = 0; l < c.size(); ++l) {
    const double lam = basis[l].lambda;
    const double lhs = phij(lam) * c[l];
    const double rhs = scale * psij(lam) * std::pow(lam, r / 2.0) * c[l];
    dev = std::max(dev, std::abs(lhs - rhs));
  }
  return dev;
}

double young_exponent(double p, double alpha) {
  if (!(p >= 1.0) || !(alpha >= 1.0)) {
    throw std::invalid_argument("young: p and alpha must be >= 1");
  }
  const double inv = (std::isinf(p) ? 0.0 : 1.0 / p) + (std::isinf(alpha) ? 0.0 : 1.0 / alpha) - 1.0;
  if (inv < -1e-15 || inv > 1.0 + 1e-15) {
    throw std::invalid_argument("young: no q in [1, inf] with 1/q + 1 = 1/p + 1/alpha");
  }
  return inv <= 1e-15 ? std::numeric_limits<double>::infinity() : 1.0 / inv;
}

double quadrature_norm(std::span<const double> values, std::span<const double> weights,
                       double p) {
  if (!(p >= 1.0)) {
    throw std::invalid_argument("norm exponent p must be >= 1");
  }
  if (values.size() != weights.size()) {
    throw std::invalid_argument("quadrature_norm: size mismatch");
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
  }
  CompensatedSum s;
  if (p == 2.0) {
    for (std::size_t i = 0; i < values.size(); ++i) s.add(weights[i] * values[i] * values[i]);
    return std::sqrt(std::max(0.0, s.value()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.add(weights[i] * std::pow(std::abs(values[i]), p));
  }
  return std::pow(std::max(0.0, s.value()), 1.0 / p);
}

YoungCheck young_bound_check(const KernelOperator& op, double alpha, double p,
                             const GridFunction& f) {
  YoungCheck out;
  out.q = young_exponent(p, alpha);
  out.c = std::max(op.sup_row_norm(alpha), op.sup_column_norm(alpha));
  const GridFunction kf = op.apply(f);
  out.lhs = quadrature_norm(kf.values(), op.grid().weights, out.q);
  out.rhs = out.c * quadrature_norm(f.values(), op.grid().weights, p);
  return out;
}

YoungCheck young_bound_check(const Manifold& model, const FilterSpec& filter, double t,
                             double alpha, double p, const GridFunction& f) {
  young_exponent(p, alpha);
  if (!(f.grid().model == model)) {
    throw std::invalid_argument("young_bound_check: function lives on another model");
  }
  const KernelOperator op(SpectralKernel(model, filter, t), f.grid_ptr());
  return young_bound_check(op, alpha, p, f);
}

}  // namespace nwidths

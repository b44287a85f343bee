#pragma once

// Grid and spectral representations of functions, and the spectral
// multipliers F(t^2 L) acting on them.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nwidths/filters.hpp"
#include "nwidths/kernels.hpp"
#include "nwidths/manifolds.hpp"

namespace nwidths {

using GridPtr = std::shared_ptr<const QuadratureGrid>;

GridPtr make_grid(const Manifold& model, int resolution);

/// Grid that integrates products of two members of E_omega exactly.
GridPtr analysis_grid(const Manifold& model, double omega);

/// Samples of a function on the nodes of a quadrature grid.
class GridFunction {
 public:
  GridFunction(GridPtr grid, std::vector<double> values);

  static GridFunction sample(GridPtr grid, const std::function<double(const Point&)>& f);
  static GridFunction zero(GridPtr grid);

  [[nodiscard]] const QuadratureGrid& grid() const { return *grid_; }
  [[nodiscard]] const GridPtr& grid_ptr() const { return grid_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Coefficients in the eigenbasis of all eigenpairs with lambda <= cutoff.
class SpectralCoeffs {
 public:
  /// All-zero element of E_cutoff.
  SpectralCoeffs(const Manifold& model, double cutoff_omega);
  SpectralCoeffs(const Manifold& model, double cutoff_omega, std::vector<double> coeffs);
  /// Reuses an enumeration already computed for this cutoff.
  SpectralCoeffs(const Manifold& model, double cutoff_omega,
                 std::shared_ptr<const std::vector<Eigenpair>> basis, std::vector<double> coeffs);

  /// The l-th eigenfunction as an element of E_cutoff.
  static SpectralCoeffs unit(const Manifold& model, double cutoff_omega, std::size_t l);

  [[nodiscard]] const Manifold& model() const { return model_; }
  [[nodiscard]] double cutoff_omega() const { return cutoff_; }
  [[nodiscard]] std::span<const Eigenpair> basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const std::vector<Eigenpair>>& basis_ptr() const {
    return basis_;
  }
  [[nodiscard]] std::span<const double> coeffs() const { return coeffs_; }
  [[nodiscard]] std::span<double> coeffs() { return coeffs_; }
  [[nodiscard]] std::size_t size() const { return coeffs_.size(); }

  /// False when produced by analyze() on a grid too coarse to integrate
  /// f * u_l exactly for band-limited f.
  [[nodiscard]] bool quadrature_exact() const { return quadrature_exact_; }
  void set_quadrature_exact(bool v) { quadrature_exact_ = v; }

  /// Same coefficients re-indexed into E_omega (truncating or zero-padding).
  [[nodiscard]] SpectralCoeffs with_cutoff(double omega) const;

  /// Largest eigenvalue carrying a nonzero coefficient (0 if none).
  [[nodiscard]] double effective_band() const;

 private:
  Manifold model_;
  double cutoff_;
  std::shared_ptr<const std::vector<Eigenpair>> basis_;
  std::vector<double> coeffs_;
  bool quadrature_exact_ = true;
};

/// coeffs[l] = sum over nodes of weight * f * u_l.
SpectralCoeffs analyze(const GridFunction& f, double omega);

/// Pointwise sum_l coeffs[l] u_l(node).
GridFunction synthesize(const SpectralCoeffs& c, GridPtr grid);

std::vector<double> synthesize_at(const SpectralCoeffs& c, std::span<const Point> points);

/// coeffs[l] -> F(t^2 lambda_l) coeffs[l].
SpectralCoeffs apply_multiplier(const SpectralCoeffs& f, const FilterSpec& filter, double t);

/// (F(t^2 L) f)(x_i) = sum_j w_j K_t(x_i, x_j) f(x_j). The grid must resolve
/// the kernel's truncation degree.
GridFunction apply_multiplier(const GridFunction& f, const FilterSpec& filter, double t,
                              double tail_tol = kDefaultTailTol);

/// Kernel of F(t^2 L) tabulated on a grid, as an integral operator.
class KernelOperator {
 public:
  KernelOperator(const SpectralKernel& kernel, GridPtr grid);

  [[nodiscard]] GridFunction apply(const GridFunction& f) const;

  /// sup over x of (sum_y w_y |K(x, y)|^alpha)^(1/alpha); grid max for inf.
  [[nodiscard]] double sup_row_norm(double alpha) const;
  /// sup over y of (sum_x w_x |K(x, y)|^alpha)^(1/alpha).
  [[nodiscard]] double sup_column_norm(double alpha) const;

  [[nodiscard]] const QuadratureGrid& grid() const { return *grid_; }

 private:
  GridPtr grid_;
  std::size_t n_;
  std::vector<double> matrix_;
};

/// Range of eta_m(L): eta_m(L) f as an element of E_{4^m}, with its dimension.
struct EtaProjection {
  SpectralCoeffs range;
  std::size_t dimension;
};

EtaProjection eta_projection(const SpectralCoeffs& f, int m);

/// max_l |phi_j(lambda_l) c_l - 2^{-(j-1) r} psi_j(lambda_l) lambda_l^{r/2} c_l|.
double scalar_commutation_check(const SpectralCoeffs& f, int j, double r);

/// Exponent q with 1/q + 1 = 1/p + 1/alpha; throws unless q lies in [1, inf].
double young_exponent(double p, double alpha);

/// (sum w |v|^p)^(1/p), or max |v| for p = inf.
double quadrature_norm(std::span<const double> values, std::span<const double> weights,
                       double p);

struct YoungCheck {
  double lhs = 0.0;  ///< ||K f||_q
  double rhs = 0.0;  ///< c ||f||_p
  double q = 0.0;
  double c = 0.0;    ///< max of the row and column alpha-norms
  [[nodiscard]] bool holds(double slack) const { return lhs <= rhs * (1.0 + slack) + slack; }
};

YoungCheck young_bound_check(const Manifold& model, const FilterSpec& filter, double t,
                             double alpha, double p, const GridFunction& f);

/// Same, with a pretabulated kernel operator (f must live on its grid).
YoungCheck young_bound_check(const KernelOperator& op, double alpha, double p,
                             const GridFunction& f);

}  // namespace nwidths

#pragma once

// Kernels K_t(x, y) = sum_l F(t^2 lambda_l) u_l(x) u_l(y) of spectral
// multipliers F(t^2 L), and their localization diagnostics.

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "nwidths/filters.hpp"
#include "nwidths/manifolds.hpp"

namespace nwidths {

inline constexpr double kDefaultTailTol = 1e-13;

/// Largest eigenvalue kept when summing the kernel of F(t^2 L).
///
/// Compactly supported F: support_upper / t^2. Decaying F: the first degree
/// d with t^2 lambda_d >= 1 and |F(t^2 lambda_d)| * B_d * N_{lambda_d} below
/// tail_tol, where B_d bounds sup |u_l|^2 on that degree. Throws for F that
/// neither has compact support nor decays, and when the cutoff exceeds the
/// enumerable spectrum.
double kernel_truncation_omega(const Manifold& model, const FilterSpec& filter,
                               double t, double tail_tol = kDefaultTailTol);

/// The kernel of F(t^2 L), summed shell by shell with compensated addition.
class SpectralKernel {
 public:
  SpectralKernel(const Manifold& model, const FilterSpec& filter, double t,
                 double tail_tol = kDefaultTailTol);

  /// Kernel truncated at an explicit eigenvalue cutoff.
  static SpectralKernel with_cutoff(const Manifold& model, const FilterSpec& filter,
                                    double t, double omega_max);

  [[nodiscard]] double operator()(const Point& x, const Point& y) const;

  [[nodiscard]] const Manifold& model() const { return model_; }
  [[nodiscard]] double t() const { return t_; }
  [[nodiscard]] double truncation_omega() const { return omega_; }
  [[nodiscard]] std::span<const EigenShell> shells() const { return shells_; }
  /// F(t^2 lambda) for each shell.
  [[nodiscard]] std::span<const double> multipliers() const { return multipliers_; }

 private:
  SpectralKernel(const Manifold& model, const FilterSpec& filter, double t,
                 double omega_max, int);

  Manifold model_;
  double t_;
  double omega_;
  std::vector<EigenShell> shells_;
  std::vector<double> multipliers_;
};

double kernel_eval(const Manifold& model, const FilterSpec& filter, double t,
                   const Point& x, const Point& y, double tail_tol = kDefaultTailTol);

/// Direct sum over individually evaluated eigenfunctions with lambda <=
/// omega_max; independent of the shell formulas used by SpectralKernel.
double kernel_eval_by_eigenpairs(const Manifold& model, const FilterSpec& filter,
                                 double t, const Point& x, const Point& y,
                                 double omega_max);

/// Fixed base point used for profiles: angle 0, the origin of the torus, or
/// the north pole.
Point base_point(const Manifold& model);

struct KernelProfile {
  double t = 0.0;
  /// (d(x0, y), |K_t(x0, y)|) for the base point x0 and every grid node y,
  /// preceded by the diagonal pair.
  std::vector<std::pair<double, double>> samples;
  /// max over samples of t^s |K_t| (1 + d/t)^(s+1).
  double fitted_constant = 0.0;
  /// alpha -> (int |K_t(x0, y)|^alpha dy)^(1/alpha); alpha = inf is the grid max.
  std::map<double, double> alpha_norms;
};

struct LocalizationReport {
  std::vector<KernelProfile> profiles;
  /// max / min of fitted constants across t.
  double max_min_ratio = 0.0;
};

/// Requires t in (0, 1] unless F(0) = 0.
LocalizationReport localization_profile(const Manifold& model, const FilterSpec& filter,
                                        std::span<const double> t_list,
                                        const QuadratureGrid& pair_grid,
                                        std::span<const double> alphas = {},
                                        double tail_tol = kDefaultTailTol);

/// (int |K_t(x, y)|^alpha dy)^(1/alpha) by quadrature, or the grid max for
/// alpha = inf. Requires alpha >= 1.
double cross_section_norm(const Manifold& model, const FilterSpec& filter, double t,
                          const Point& x, double alpha, const QuadratureGrid& grid,
                          double tail_tol = kDefaultTailTol);

/// Same, reusing an already built kernel.
double cross_section_norm(const SpectralKernel& kernel, const Point& x, double alpha,
                          const QuadratureGrid& grid);

struct IntegralDecay {
  double max_value = 0.0;
  double min_value = 0.0;
};

/// t^-s int [1 + d(x, y)/t]^-M dy over base points x taken from the grid
/// (every node when max_base_points is 0, otherwise an even stride).
/// Requires M > s.
IntegralDecay integral_decay_check(const Manifold& model, double t, double M_exp,
                                   const QuadratureGrid& grid,
                                   std::size_t max_base_points = 16);

}  // namespace nwidths

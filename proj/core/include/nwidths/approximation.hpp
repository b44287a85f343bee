#pragma once

// Norms, best approximation by band-limited functions, and the rate
// experiments built on the eta_m(L) approximation method.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nwidths/operators.hpp"
#include "nwidths/rate_fit.hpp"

namespace nwidths {

struct ExperimentParams {
  double p = 2.0;
  double q = 2.0;
  double r = 1.0;
  double alpha = 1.0;     ///< Besov smoothness
  double t_besov = 2.0;   ///< Besov fine index, may be inf
  int m_min = 2;
  int m_max = 7;
  std::uint64_t seed = 1;
  int random_members = 8;  ///< randomized draws per m in the width family

  /// -r/s + (1/p - 1/q)_+
  [[nodiscard]] double basic_exponent(int s) const;
};

/// Quadrature norm on the function's own grid (grid max for p = inf).
double lp_norm(const GridFunction& f, double p);

/// p = 2 by Parseval. Other finite p by quadrature of |f|^p on a grid of
/// about eight times the analysis resolution (|f|^p is not a polynomial, so
/// this is an approximation). p = inf is the max over a grid of four times
/// the analysis resolution, which can only under-estimate the true sup.
double lp_norm(const SpectralCoeffs& f, double p);

/// ||f||_p + ||L^{r/2} f||_p.
double sobolev_norm(const SpectralCoeffs& f, double p, double r);

struct BestApprox {
  double value = 0.0;
  /// True when value is an upper bound (p != 2) rather than the exact
  /// distance to E_omega.
  bool surrogate = false;
};

/// Distance from f to E_omega in L_p. For p = 2 this is the Parseval tail.
/// For p != 2 it is the smallest L_p error of the L2 projections onto
/// E_lambda over eigenvalue shells lambda <= omega.
BestApprox best_approx(const SpectralCoeffs& f, double omega, double p);
BestApprox best_approx(const GridFunction& f, double omega, double p);

/// ||f||_p + (sum_{j=0}^{j_max} [2^{alpha j} E(f, 4^j, p)]^t)^{1/t}; sup for
/// t = inf.
double besov_norm(const SpectralCoeffs& f, double alpha, double p, double t, int j_max);

struct BandNormRow {
  int j = 0;
  double measured = 0.0;  ///< ||phi_j(L) f||_q
  double bound = 0.0;     ///< 2^{js(-r/s + 1/p - 1/q)} ||f||_{W_p^r}
  [[nodiscard]] double ratio() const { return bound > 0.0 ? measured / bound : 0.0; }
};

/// Rows for j = 0..j_max. Requires p <= q.
std::vector<BandNormRow> band_norm_table(const SpectralCoeffs& f, const ExperimentParams& params,
                                         int j_max);

/// The eigenfunction whose eigenvalue is closest to the peak 4^j of phi_j,
/// scaled to unit W_p^r norm, inside E_{4^{j+1}}.
SpectralCoeffs band_extremal(const Manifold& model, int j, double p, double r);

struct WidthRateRow {
  int m = 0;
  std::size_t n = 0;        ///< dim E_{4^m}
  double error = 0.0;       ///< worst ||f - eta_m(L) f||_q / ||f||_{W_p^r}
  std::size_t members = 0;  ///< family size evaluated
};

struct WidthRateResult {
  std::vector<WidthRateRow> rows;
  RateFit fit;                  ///< log error against log n, smallest m dropped
  double expected_slope = 0.0;  ///< the basic exponent
};

/// Throws if the basic exponent is nonnegative or m_min < 1.
WidthRateResult width_rate_experiment(const Manifold& model, const ExperimentParams& params);

struct NikolskiiRow {
  double omega = 0.0;
  std::size_t dimension = 0;  ///< dim of the band containing the candidate
  double lhs = 0.0;           ///< ||L^k phi||_q
  double rhs_scale = 0.0;     ///< omega^{2k + d/p - d/q} ||phi||_p
  [[nodiscard]] double ratio() const { return lhs / rhs_scale; }
};

struct NikolskiiResult {
  double d = 0.0;
  std::vector<NikolskiiRow> rows;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

/// The group dimension used by default: s for the circle and torus, 3 for
/// the sphere (SO(3) acting on S^2).
double group_dimension(const Manifold& model);

/// Dirichlet-type candidates phi = sum_{lambda_l <= omega^2} u_l(x0) u_l,
/// i.e. omega is a frequency bound. Requires p <= q.
NikolskiiResult nikolskii_check(const Manifold& model, std::span<const double> omega_list, int k,
                                double p, double q, std::optional<double> d = std::nullopt);

/// Max relative L2 residual of projecting each monomial x^a y^b z^c with
/// a + b + c <= degree, restricted to the sphere, onto E_{degree(degree+1)}.
double polynomial_span_check(int degree);

}  // namespace nwidths

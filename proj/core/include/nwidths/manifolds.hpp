#pragma once

// Model manifolds with closed-form Laplace-Beltrami spectra: the circle,
// the flat 2-torus and the round 2-sphere.

#include <array>
#include <compare>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nwidths/rate_fit.hpp"

namespace nwidths {

enum class ManifoldKind { Circle, Torus2, Sphere2 };

std::string_view to_string(ManifoldKind kind);
ManifoldKind parse_manifold_kind(std::string_view name);

/// A point on a model manifold.
///
/// Circle: c[0] is the angle. Torus2: c[0], c[1] are the two angles.
/// Sphere2: c is a unit vector in R^3.
struct Point {
  std::array<double, 3> c{};
};

Point circle_point(double theta);
Point torus_point(double theta1, double theta2);
/// Polar angle theta measured from the north pole, azimuth phi.
Point sphere_point(double theta, double phi);

/// Structural label of an eigenfunction.
///
/// Circle: a is the signed frequency (+n for cos(n x), -n for sin(n x), 0 for
/// the constant), b = 0.
/// Torus2: a, b are signed circle frequencies of the two factors.
/// Sphere2: a is the degree k, b the order m in [-k, k] (m < 0 selects the
/// sine-type harmonic).
struct EigenLabel {
  int a = 0;
  int b = 0;
  friend auto operator<=>(const EigenLabel&, const EigenLabel&) = default;
};

struct Eigenpair {
  std::size_t index = 0;
  double lambda = 0.0;
  EigenLabel label;
  ManifoldKind kind = ManifoldKind::Circle;

  /// Value of the L2-normalized real eigenfunction at x.
  [[nodiscard]] double evaluate(const Point& x) const;
};

/// Eigenvalues sharing one closed-form value; the kernel sums group by shell.
struct EigenShell {
  double lambda = 0.0;
  std::size_t multiplicity = 0;
  /// Circle: n. Sphere2: degree k. Torus2: the integer eigenvalue itself.
  int key = 0;
};

class Manifold {
 public:
  explicit Manifold(ManifoldKind kind) : kind_(kind) {}

  static Manifold circle() { return Manifold(ManifoldKind::Circle); }
  static Manifold torus2() { return Manifold(ManifoldKind::Torus2); }
  static Manifold sphere2() { return Manifold(ManifoldKind::Sphere2); }

  [[nodiscard]] ManifoldKind kind() const { return kind_; }
  [[nodiscard]] int dimension() const;
  [[nodiscard]] double total_measure() const;
  [[nodiscard]] double diameter() const;

  /// Largest omega accepted by enumerate_eigenpairs (roughly four million
  /// eigenpairs on every model).
  [[nodiscard]] double max_omega() const;

  /// All eigenpairs with lambda <= omega, sorted by (lambda, label order).
  [[nodiscard]] std::vector<Eigenpair> enumerate_eigenpairs(double omega) const;

  /// Number of eigenpairs with lambda <= omega, counted without enumeration.
  [[nodiscard]] std::size_t weyl_count(double omega) const;

  /// Distinct eigenvalues <= omega in increasing order.
  [[nodiscard]] std::vector<EigenShell> shells(double omega) const;

  /// Sum over each shell of u_l(x) u_l(y), written to out[i] for shells[i].
  /// Shells must come from shells() on this model.
  void shell_products(const Point& x, const Point& y,
                      std::span<const EigenShell> shells,
                      std::span<double> out) const;

  /// Upper bound on sum over the shell of sup |u_l|^2.
  [[nodiscard]] double shell_sup_bound(const EigenShell& shell) const;

  /// Largest "degree" (circle frequency, sphere degree, torus max |n_i|)
  /// present among eigenpairs with lambda <= omega.
  [[nodiscard]] int max_degree(double omega) const;

  /// Evaluates each listed eigenfunction at x into out (same length).
  void evaluate_basis(const Point& x, std::span<const Eigenpair> basis,
                      std::span<double> out) const;

  [[nodiscard]] double geodesic_distance(const Point& x, const Point& y) const;

  /// Throws std::invalid_argument if x is not a valid point of this model.
  void validate(const Point& x) const;

  friend bool operator==(const Manifold&, const Manifold&) = default;

 private:
  ManifoldKind kind_;
};

/// Quadrature rule on a model manifold.
struct QuadratureGrid {
  Manifold model{ManifoldKind::Circle};
  int resolution = 0;
  /// Largest degree D such that products of eigenfunctions with degrees
  /// summing to at most D integrate exactly.
  int exactness = 0;
  std::vector<Point> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/// Circle: resolution equispaced nodes. Torus2: product of two circle grids.
/// Sphere2: resolution Gauss-Legendre nodes in cos(theta) times
/// 2*resolution equispaced azimuths.
QuadratureGrid build_grid(const Manifold& model, int resolution);

/// Smallest grid whose exactness is at least the given degree.
QuadratureGrid grid_for_degree(const Manifold& model, int degree);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

/// Log-log least-squares fit of lambda_l against l for l in [l_min, l_max].
/// Requires 2 <= l_min, at least 8 indices, and nonconstant eigenvalues.
RateFit eigenvalue_growth_fit(const Manifold& model, std::size_t l_min,
                              std::size_t l_max);

}  // namespace nwidths

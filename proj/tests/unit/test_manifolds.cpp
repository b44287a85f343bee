#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "nwidths/manifolds.hpp"

using namespace nwidths;

namespace {

constexpr double kPi = std::numbers::pi;

// Legendre polynomial by the Bonnet recurrence.
double legendre(int k, double x) {
  double p0 = 1.0;
  double p1 = x;
  if (k == 0) return p0;
  for (int n = 1; n < k; ++n) {
    const double p2 = ((2.0 * n + 1.0) * x * p1 - n * p0) / (n + 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

Point random_point(const Manifold& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> z(-1.0, 1.0);
  switch (m.kind()) {
    case ManifoldKind::Circle:
      return circle_point(ang(rng));
    case ManifoldKind::Torus2:
      return torus_point(ang(rng), ang(rng));
    case ManifoldKind::Sphere2:
      return sphere_point(std::acos(z(rng)), ang(rng));
  }
  return {};
}

std::vector<Manifold> all_models() {
  return {Manifold::circle(), Manifold::torus2(), Manifold::sphere2()};
}

double gram_error(const QuadratureGrid& grid, const std::vector<Eigenpair>& basis) {
  std::vector<std::vector<double>> vals(grid.size(), std::vector<double>(basis.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.model.evaluate_basis(grid.nodes[i], basis, vals[i]);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < basis.size(); ++a) {
    for (std::size_t b = a; b < basis.size(); ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights[i] * vals[i][a] * vals[i][b];
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("model constants") {
  CHECK(Manifold::circle().dimension() == 1);
  CHECK(Manifold::torus2().dimension() == 2);
  CHECK(Manifold::sphere2().dimension() == 2);
  CHECK(Manifold::circle().total_measure() == doctest::Approx(2 * kPi).epsilon(1e-15));
  CHECK(Manifold::torus2().total_measure() == doctest::Approx(4 * kPi * kPi).epsilon(1e-15));
  CHECK(Manifold::sphere2().total_measure() == doctest::Approx(4 * kPi).epsilon(1e-15));
  CHECK(parse_manifold_kind("sphere") == ManifoldKind::Sphere2);
  CHECK_THROWS_AS(parse_manifold_kind("klein"), std::invalid_argument);
}

TEST_CASE("enumeration counts") {
  const auto circle = Manifold::circle().enumerate_eigenpairs(10.0);
  REQUIRE(circle.size() == 7);
  CHECK(circle[0].label == EigenLabel{0, 0});
  CHECK(circle[1].label == EigenLabel{1, 0});
  CHECK(circle[2].label == EigenLabel{-1, 0});
  CHECK(circle[6].lambda == 9.0);

  CHECK(Manifold::sphere2().enumerate_eigenpairs(0.0).size() == 1);
  const auto sphere = Manifold::sphere2().enumerate_eigenpairs(6.0);
  REQUIRE(sphere.size() == 9);
  int per_degree[3] = {0, 0, 0};
  for (const auto& e : sphere) ++per_degree[e.label.a];
  CHECK(per_degree[0] == 1);
  CHECK(per_degree[1] == 3);
  CHECK(per_degree[2] == 5);

  CHECK_THROWS_AS(Manifold::circle().enumerate_eigenpairs(std::nan("")), std::invalid_argument);
}

TEST_CASE("enumeration is sorted, deterministic and indexed") {
  std::mt19937_64 rng(1);
  for (const auto& m : all_models()) {
    const auto a = m.enumerate_eigenpairs(200.0);
    const auto b = m.enumerate_eigenpairs(200.0);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].lambda == 0.0);
    CHECK(a[0].evaluate(random_point(m, rng)) ==
          doctest::Approx(1.0 / std::sqrt(m.total_measure())).epsilon(1e-14));
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].index == i);
      CHECK(a[i].label == b[i].label);
      if (i > 0) CHECK(a[i - 1].lambda <= a[i].lambda);
    }
  }
}

TEST_CASE("eigenvalue formulas per label") {
  for (const auto& e : Manifold::circle().enumerate_eigenpairs(400.0)) {
    CHECK(e.lambda == double(e.label.a) * e.label.a);
  }
  for (const auto& e : Manifold::torus2().enumerate_eigenpairs(400.0)) {
    CHECK(e.lambda == double(e.label.a) * e.label.a + double(e.label.b) * e.label.b);
  }
  for (const auto& e : Manifold::sphere2().enumerate_eigenpairs(400.0)) {
    CHECK(e.lambda == double(e.label.a) * (e.label.a + 1));
    CHECK(std::abs(e.label.b) <= e.label.a);
  }
}

TEST_CASE("weyl counts") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> om(0.0, 3000.0);
  for (const auto& m : all_models()) {
    CHECK(m.weyl_count(0.0) == 1);
    for (int i = 0; i < 20; ++i) {
      const double w = std::floor(om(rng));
      CHECK(m.weyl_count(w) == m.enumerate_eigenpairs(w).size());
    }
  }
  CHECK(Manifold::circle().weyl_count(10.0) == 7);
  for (int k = 0; k <= 300; ++k) {
    CHECK(Manifold::sphere2().weyl_count(double(k) * (k + 1)) == std::size_t(k + 1) * (k + 1));
  }
  // Weyl ratio bounded over dyadic omega.
  for (const auto& m : all_models()) {
    double lo = 1e300;
    double hi = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const double w = std::pow(4.0, i);
      const double r = m.weyl_count(w) / std::pow(w, m.dimension() / 2.0);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    CHECK(hi / lo <= 4.0);
  }
}

TEST_CASE("eigenvalue growth fit") {
  CHECK(eigenvalue_growth_fit(Manifold::circle(), 32, 2048).slope == doctest::Approx(2.0).epsilon(0.025));
  CHECK(eigenvalue_growth_fit(Manifold::sphere2(), 32, 2048).slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(eigenvalue_growth_fit(Manifold::torus2(), 32, 2048).slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(eigenvalue_growth_fit(Manifold::circle(), 32, 36), std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_growth_fit(Manifold::circle(), 1, 100), std::invalid_argument);
  const double xs[] = {1.0, 1.0, 1.0};
  const double ys[] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(fit_line(xs, ys), std::invalid_argument);
}

TEST_CASE("line fit recovers exact data") {
  const double xs[] = {1.0, 2.0, 4.0, 8.0};
  double ys[4];
  for (int i = 0; i < 4; ++i) ys[i] = 3.0 * std::pow(xs[i], -1.5);
  const auto fit = fit_log_log(xs, ys);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.residual < 1e-12);
}

TEST_CASE("geodesic distance") {
  const auto c = Manifold::circle();
  CHECK(c.geodesic_distance(circle_point(0.0), circle_point(kPi)) == doctest::Approx(kPi));
  CHECK(c.geodesic_distance(circle_point(0.1), circle_point(2 * kPi - 0.1)) == doctest::Approx(0.2));
  const auto s = Manifold::sphere2();
  const Point n = sphere_point(0.0, 0.0);
  const Point south = sphere_point(kPi, 0.0);
  CHECK(s.geodesic_distance(n, n) == 0.0);
  CHECK(s.geodesic_distance(n, south) == doctest::Approx(kPi).epsilon(1e-15));
  const auto t = Manifold::torus2();
  CHECK(t.geodesic_distance(torus_point(0, 0), torus_point(0.3, 2 * kPi - 0.4)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(s.validate(Point{{1.0, 1.0, 0.0}}), std::invalid_argument);

  std::mt19937_64 rng(3);
  for (const auto& m : all_models()) {
    for (int i = 0; i < 200; ++i) {
      const Point x = random_point(m, rng);
      const Point y = random_point(m, rng);
      const Point z = random_point(m, rng);
      const double dxy = m.geodesic_distance(x, y);
      CHECK(dxy == doctest::Approx(m.geodesic_distance(y, x)).epsilon(1e-15));
      CHECK(dxy <= m.diameter() + 1e-12);
      CHECK(m.geodesic_distance(x, z) <= dxy + m.geodesic_distance(y, z) + 1e-12);
    }
  }
}

TEST_CASE("circle eigenfunctions are the normalized trigonometric basis") {
  const auto basis = Manifold::circle().enumerate_eigenpairs(25.0);
  const double x = 0.7;
  for (const auto& e : basis) {
    const int n = std::abs(e.label.a);
    double expected = 1.0 / std::sqrt(2 * kPi);
    if (e.label.a > 0) expected = std::cos(n * x) / std::sqrt(kPi);
    if (e.label.a < 0) expected = std::sin(n * x) / std::sqrt(kPi);
    CHECK(e.evaluate(circle_point(x)) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("sphere harmonics obey the addition theorem") {
  const auto s = Manifold::sphere2();
  const auto basis = s.enumerate_eigenpairs(60.0 * 61.0);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Point x = random_point(s, rng);
    const Point y = random_point(s, rng);
    const double cosg = x.c[0] * y.c[0] + x.c[1] * y.c[1] + x.c[2] * y.c[2];
    std::vector<double> ux(basis.size());
    std::vector<double> uy(basis.size());
    s.evaluate_basis(x, basis, ux);
    s.evaluate_basis(y, basis, uy);
    std::vector<double> per_degree(61, 0.0);
    for (std::size_t l = 0; l < basis.size(); ++l) per_degree[basis[l].label.a] += ux[l] * uy[l];
    for (int k = 0; k <= 60; ++k) {
      CHECK(per_degree[k] ==
            doctest::Approx((2 * k + 1) / (4 * kPi) * legendre(k, cosg)).epsilon(1e-10).scale(1.0));
    }
  }
  // Degree one spans the coordinate functions.
  const Point p = sphere_point(1.1, 0.4);
  double sum = 0.0;
  for (const auto& e : basis) {
    if (e.label.a == 1) sum += e.evaluate(p) * e.evaluate(p);
  }
  CHECK(sum == doctest::Approx(3.0 / (4 * kPi)).epsilon(1e-14));
  const auto y10 = basis[2];
  REQUIRE(y10.label == EigenLabel{1, 0});
  CHECK(std::abs(y10.evaluate(p)) == doctest::Approx(std::sqrt(3 / (4 * kPi)) * std::abs(p.c[2])));
}

TEST_CASE("shell products match eigenpair sums") {
  std::mt19937_64 rng(5);
  for (const auto& m : all_models()) {
    const double omega = 150.0;
    const auto basis = m.enumerate_eigenpairs(omega);
    const auto shells = m.shells(omega);
    const Point x = random_point(m, rng);
    const Point y = random_point(m, rng);
    std::vector<double> out(shells.size());
    m.shell_products(x, y, shells, out);
    std::size_t l = 0;
    for (std::size_t i = 0; i < shells.size(); ++i) {
      double direct = 0.0;
      std::size_t count = 0;
      for (; l < basis.size() && basis[l].lambda == shells[i].lambda; ++l, ++count) {
        direct += basis[l].evaluate(x) * basis[l].evaluate(y);
      }
      CHECK(count == shells[i].multiplicity);
      CHECK(out[i] == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
      CHECK(std::abs(out[i]) <= m.shell_sup_bound(shells[i]) + 1e-12);
    }
  }
}

TEST_CASE("quadrature grids") {
  CHECK_THROWS_AS(build_grid(Manifold::circle(), 3), std::invalid_argument);
  const auto g = build_grid(Manifold::circle(), 16);
  double total = 0.0;
  for (double w : g.weights) total += w;
  CHECK(total == doctest::Approx(2 * kPi).epsilon(1e-14));
  CHECK(g.exactness == 15);
  for (int n = 1; n < 16; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.weights[i] * std::cos(n * g.nodes[i].c[0]);
    CHECK(std::abs(s) < 1e-13);
  }
  for (const auto& m : all_models()) {
    const auto grid = grid_for_degree(m, 10);
    CHECK(grid.exactness >= 10);
    double sum = 0.0;
    for (double w : grid.weights) {
      CHECK(w > 0.0);
      sum += w;
    }
    CHECK(std::abs(sum / m.total_measure() - 1.0) <= 1e-12);
    const double omega = m.kind() == ManifoldKind::Sphere2 ? 30.0 : 25.0;
    CHECK(gram_error(grid, m.enumerate_eigenpairs(omega)) <= 1e-10);
  }
}

TEST_CASE("gauss-legendre integrates polynomials") {
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(12, x, w);
  for (int d = 0; d <= 23; ++d) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], d);
    const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-14).scale(1.0));
  }
}

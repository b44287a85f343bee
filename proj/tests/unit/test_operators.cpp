#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "nwidths/operators.hpp"

using namespace nwidths;

namespace {

std::vector<double> random_coeffs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> c(n);
  for (double& v : c) v = g(rng);
  return c;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

const std::vector<Manifold>& models() {
  static const std::vector<Manifold> m = {Manifold::circle(), Manifold::torus2(), Manifold::sphere2()};
  return m;
}

}  // namespace

TEST_CASE("analyze recovers eigenfunctions and constants") {
  for (const auto& m : models()) {
    const double omega = 30.0;
    const auto grid = analysis_grid(m, omega);
    const auto basis = m.enumerate_eigenpairs(omega);
    const auto f = GridFunction::sample(grid, [&](const Point& x) { return basis[3].evaluate(x); });
    const auto c = analyze(f, omega);
    CHECK(c.quadrature_exact());
    for (std::size_t l = 0; l < c.size(); ++l) {
      CHECK(std::abs(c.coeffs()[l] - (l == 3 ? 1.0 : 0.0)) <= 1e-10);
    }
    const auto k = analyze(GridFunction::sample(grid, [](const Point&) { return 2.5; }), omega);
    CHECK(k.coeffs()[0] == doctest::Approx(2.5 * std::sqrt(m.total_measure())).epsilon(1e-12));
  }
}

TEST_CASE("analyze and synthesize round trip") {
  for (const auto& m : models()) {
    const double omega = 100.0;
    const auto grid = analysis_grid(m, omega);
    const SpectralCoeffs c(m, omega, random_coeffs(m.weyl_count(omega), 9));
    const auto back = analyze(synthesize(c, grid), omega);
    CHECK(max_abs_diff(back.coeffs(), c.coeffs()) <= 1e-10);
  }
  const auto coarse = make_grid(Manifold::circle(), 8);
  const auto f = GridFunction::zero(coarse);
  CHECK_FALSE(analyze(f, 100.0).quadrature_exact());
  CHECK_THROWS_AS(analyze(f, 1e300), std::invalid_argument);
}

TEST_CASE("grid functions validate their values") {
  const auto g = make_grid(Manifold::circle(), 8);
  CHECK_THROWS_AS(GridFunction(g, std::vector<double>(7, 0.0)), std::invalid_argument);
  std::vector<double> bad(8, 0.0);
  bad[2] = std::nan("");
  CHECK_THROWS_AS(GridFunction(g, bad), std::invalid_argument);
}

TEST_CASE("eta_m projector") {
  const auto m = Manifold::sphere2();
  const int level = 3;
  const double cutoff = std::pow(4.0, level + 1);
  const auto basis = m.enumerate_eigenpairs(cutoff);
  const auto em = make_eta_m(level);
  for (const auto& e : basis) {
    const auto u = SpectralCoeffs::unit(m, cutoff, e.index);
    const auto out = apply_multiplier(u, em, 1.0);
    if (e.lambda <= std::pow(4.0, level - 1)) {
      CHECK(max_abs_diff(out.coeffs(), u.coeffs()) == 0.0);
    }
    if (e.lambda > std::pow(4.0, level)) {
      CHECK(out.coeffs()[e.index] == 0.0);
    }
  }
  const SpectralCoeffs f(m, cutoff, random_coeffs(basis.size(), 4));
  const auto p = eta_projection(f, level);
  CHECK(p.dimension == m.weyl_count(std::pow(4.0, level)));
  CHECK(p.range.cutoff_omega() == std::pow(4.0, level));
  // Twice applied equals the squared multiplier, exactly on coefficients.
  const auto twice = apply_multiplier(apply_multiplier(f, em, 1.0), em, 1.0);
  const auto squared = apply_multiplier(
      f, make_custom([em](double x) { return em(x) * em(x); }, em.support_upper(), false), 1.0);
  CHECK(max_abs_diff(twice.coeffs(), squared.coeffs()) <= 1e-12);
}

TEST_CASE("multiplier linearity") {
  const auto m = Manifold::torus2();
  const double omega = 60.0;
  const auto n = m.weyl_count(omega);
  const auto a = random_coeffs(n, 1);
  const auto b = random_coeffs(n, 2);
  std::vector<double> mix(n);
  for (std::size_t i = 0; i < n; ++i) mix[i] = 2.0 * a[i] - 3.0 * b[i];
  const auto F = make_gaussian();
  const auto fa = apply_multiplier(SpectralCoeffs(m, omega, a), F, 0.3);
  const auto fb = apply_multiplier(SpectralCoeffs(m, omega, b), F, 0.3);
  const auto fm = apply_multiplier(SpectralCoeffs(m, omega, mix), F, 0.3);
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(std::abs(fm.coeffs()[i] - (2.0 * fa.coeffs()[i] - 3.0 * fb.coeffs()[i])) <= 1e-12);
  }
}

TEST_CASE("kernel quadrature agrees with coefficient multiplication") {
  for (const auto& m : models()) {
    const double t = 1.0;
    const auto F = make_gaussian();
    const double omega = kernel_truncation_omega(m, F, t);
    const auto grid = make_grid(m, grid_for_degree(m, 2 * m.max_degree(omega)).resolution);
    const double band = 20.0;
    const SpectralCoeffs c(m, band, random_coeffs(m.weyl_count(band), 6));
    const auto f = synthesize(c, grid);
    const auto via_kernel = apply_multiplier(f, F, t);
    const auto via_coeffs = synthesize(apply_multiplier(c, F, t), grid);
    CHECK(max_abs_diff(via_kernel.values(), via_coeffs.values()) <= 1e-8);
    // Single eigenfunction: e^{-lambda} u_l.
    const auto l = m.weyl_count(2.0);
    const auto u = synthesize(SpectralCoeffs::unit(m, band, l), grid);
    const KernelOperator op(SpectralKernel(m, F, t), grid);
    const auto ku = op.apply(u);
    const double lam = c.basis()[l].lambda;
    for (std::size_t i = 0; i < grid->size(); i += 7) {
      CHECK(std::abs(ku.values()[i] - std::exp(-lam) * u.values()[i]) <= 1e-8);
    }
  }
  const auto coarse = make_grid(Manifold::circle(), 8);
  CHECK_THROWS_AS(apply_multiplier(GridFunction::zero(coarse), make_gaussian(), 0.1),
                  std::invalid_argument);
}

TEST_CASE("scalar commutation identity") {
  const auto m = Manifold::circle();
  const double cutoff = std::pow(4.0, 7);
  const int j = 3;
  for (const auto& e : m.enumerate_eigenpairs(cutoff)) {
    if (e.lambda >= std::pow(4.0, j - 1) && e.lambda <= std::pow(4.0, j + 1)) {
      CHECK(scalar_commutation_check(SpectralCoeffs::unit(m, cutoff, e.index), j, 1.5) <= 1e-12);
    }
  }
  SpectralCoeffs outside(m, cutoff);
  outside.coeffs()[1] = 1.0;
  outside.coeffs().back() = 1.0;
  CHECK(scalar_commutation_check(outside, j, 2.0) == 0.0);
  const SpectralCoeffs f(m, cutoff, random_coeffs(m.weyl_count(cutoff), 8));
  for (int jj = 1; jj <= 6; ++jj) CHECK(scalar_commutation_check(f, jj, 1.0) <= 1e-10);
}

TEST_CASE("young exponent and norms") {
  CHECK(young_exponent(2.0, 1.0) == doctest::Approx(2.0));
  CHECK(young_exponent(1.0, 2.0) == doctest::Approx(2.0));
  CHECK(std::isinf(young_exponent(2.0, 2.0)));
  CHECK_THROWS_AS(young_exponent(INFINITY, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(young_exponent(0.5, 1.0), std::invalid_argument);
  const double v[] = {3.0, -4.0};
  const double w[] = {1.0, 1.0};
  CHECK(quadrature_norm(v, w, 2.0) == doctest::Approx(5.0));
  CHECK(quadrature_norm(v, w, 1.0) == doctest::Approx(7.0));
  CHECK(quadrature_norm(v, w, INFINITY) == 4.0);
}

TEST_CASE("young bound") {
  const auto m = Manifold::circle();
  const auto grid = make_grid(m, 128);
  const auto F = make_gaussian();
  const double t = 1.0;
  const auto u = synthesize(SpectralCoeffs::unit(m, 16.0, 5), grid);
  const double lam = m.enumerate_eigenpairs(16.0)[5].lambda;
  const auto chk = young_bound_check(m, F, t, 1.0, 2.0, u);
  CHECK(chk.q == doctest::Approx(2.0));
  CHECK(chk.lhs == doctest::Approx(std::exp(-t * t * lam)).epsilon(1e-10));
  CHECK(chk.holds(1e-9));
  const auto zero = young_bound_check(m, F, t, 2.0, 1.0, GridFunction::zero(grid));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK_THROWS_AS(young_bound_check(m, F, t, 2.0, INFINITY, u), std::invalid_argument);

  const KernelOperator op(SpectralKernel(m, F, 0.25), grid);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> vals(grid->size());
    for (double& x : vals) x = g(rng);
    const GridFunction f(grid, vals);
    CHECK(young_bound_check(op, 2.0, 1.0, f).holds(1e-9));
    CHECK(young_bound_check(op, 1.0, 2.0, f).holds(1e-9));
    CHECK(young_bound_check(op, 2.0, 2.0, f).holds(1e-9));
  }
  // On the symmetric kernel the row and column norms coincide.
  CHECK(op.sup_row_norm(1.0) == doctest::Approx(op.sup_column_norm(1.0)).epsilon(1e-12));
}

TEST_CASE("coefficient containers") {
  const auto m = Manifold::circle();
  SpectralCoeffs f(m, 10.0);
  CHECK(f.size() == 7);
  CHECK(f.effective_band() == 0.0);
  f.coeffs()[3] = 1.0;
  CHECK(f.effective_band() == 4.0);
  const auto wider = f.with_cutoff(100.0);
  CHECK(wider.size() == 21);
  CHECK(wider.coeffs()[3] == 1.0);
  const auto narrower = f.with_cutoff(1.0);
  CHECK(narrower.size() == 3);
  CHECK_THROWS_AS(SpectralCoeffs(m, 10.0, std::vector<double>(3, 0.0)), std::invalid_argument);
  const auto pts = std::vector<Point>{circle_point(0.0), circle_point(1.0)};
  const auto vals = synthesize_at(f, pts);
  CHECK(vals[0] == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)));
  CHECK(vals[1] == doctest::Approx(std::cos(2.0) / std::sqrt(std::numbers::pi)));
}

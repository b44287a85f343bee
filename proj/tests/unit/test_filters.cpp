#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "nwidths/filters.hpp"

using namespace nwidths;

namespace {

// Independent transcription of the smooth step from its definition.
double oracle_step(double u) {
  auto b = [](double v) { return v > 0.0 ? std::exp(-1.0 / v) : 0.0; };
  return b(u) / (b(u) + b(1.0 - u));
}

double oracle_eta(double x) { return oracle_step((4.0 - x) / 3.0); }

}  // namespace

TEST_CASE("eta values") {
  const auto e = make_eta();
  CHECK(e(0.5) == 1.0);
  CHECK(e(1.0) == 1.0);
  CHECK(e(5.0) == 0.0);
  CHECK(e(4.0) == 0.0);
  CHECK(e(2.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (double x = 0.0; x <= 6.0; x += 0.01) {
    CHECK(e(x) == doctest::Approx(oracle_eta(x)).epsilon(1e-14).scale(1.0));
    CHECK(e(x) >= 0.0);
    CHECK(e(x) <= 1.0);
  }
  double prev = 1.0;
  for (double x = 1.0; x <= 4.0; x += 0.001) {
    CHECK(eta(x) <= prev + 1e-16);
    prev = eta(x);
  }
}

TEST_CASE("smooth step symmetry") {
  for (double u = -0.5; u <= 1.5; u += 0.03125) {
    CHECK(smooth_step(u) + smooth_step(1.0 - u) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("phi and its dilations") {
  const auto p = make_phi();
  for (double x : {0.0, 0.5, 1.0, 16.0, 20.0}) CHECK(p(x) == 0.0);
  CHECK(p(4.0) == doctest::Approx(oracle_eta(1.0) - oracle_eta(4.0)));
  CHECK(make_phi_j(2)(4.0) == 0.0);
  const double ref = phi(2.0);
  for (int j = 1; j <= 8; ++j) {
    CHECK(make_phi_j(j)(2.0 * std::pow(4.0, j - 1)) == doctest::Approx(ref).epsilon(1e-15));
  }
  CHECK(make_phi_j(0)(0.3) == eta(0.3));
  for (int j = 1; j <= 6; ++j) {
    const auto f = make_phi_j(j);
    const double lo = std::pow(4.0, j - 1);
    CHECK(f(lo * 0.999) == 0.0);
    CHECK(f(lo * 16.0 * 1.001) == 0.0);
    for (double x = 0.0; x < 5 * lo * 16; x += lo / 7) {
      CHECK(f(x) >= -1.0);
      CHECK(f(x) <= 1.0);
    }
  }
}

TEST_CASE("eta_m support") {
  for (int m = 1; m <= 6; ++m) {
    const auto f = make_eta_m(m);
    CHECK(f(std::pow(4.0, m - 1)) == 1.0);
    CHECK(f(std::pow(4.0, m)) == 0.0);
    CHECK(f.support_upper().value() == doctest::Approx(std::pow(4.0, m)));
  }
  CHECK_THROWS_AS(make_eta_m(0), std::invalid_argument);
}

TEST_CASE("psi") {
  const auto f = make_psi_jr(1, 2.0);
  CHECK(f(4.0) == doctest::Approx(phi(4.0) / 4.0).epsilon(1e-15));
  CHECK(f(0.0) == 0.0);
  CHECK(make_psi_jr(3, 1.5)(0.0) == 0.0);
  CHECK_THROWS_AS(make_psi_jr(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_psi_jr(1, 0.0), std::invalid_argument);
  // Scalar identity phi_j(x) = 2^{-(j-1) r} psi_j(x) x^{r/2}.
  for (double r : {0.5, 1.0, 2.0, 3.7}) {
    for (int j = 1; j <= 7; ++j) {
      const auto ph = make_phi_j(j);
      const auto ps = make_psi_jr(j, r);
      const double lo = std::pow(4.0, j - 1);
      for (double x = lo; x <= 16.0 * lo; x += lo / 13.0) {
        const double lhs = ph(x);
        const double rhs = std::exp2(-(j - 1) * r) * ps(x) * std::pow(x, r / 2.0);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("partition of unity") {
  for (int J : {1, 3, 5, 8}) {
    double sum = 0.0;
    for (int j = 0; j < J; ++j) sum += make_phi_j(j)(1.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    sum = 0.0;
    for (int j = 0; j < J; ++j) sum += make_phi_j(j)(0.0);
    CHECK(sum == 1.0);
  }
  double far = 0.0;
  for (int j = 0; j < 3; ++j) far += make_phi_j(j)(std::pow(4.0, 4));
  CHECK(far == 0.0);
  // Telescoping sum equals eta_J pointwise.
  for (int J = 1; J <= 9; ++J) {
    const auto em = make_eta_m(J);
    for (double x = 0.0; x < std::pow(4.0, J + 1); x = x * 1.07 + 0.01) {
      double s = 0.0;
      for (int j = 0; j < J; ++j) s += make_phi_j(j)(x);
      CHECK(std::abs(s - em(x)) <= 1e-14);
    }
  }
  const auto dev = partition_check(8, 1000);
  CHECK(dev.max() <= 1e-12);
  CHECK(partition_check(5, 16).max() <= 1e-12);
  CHECK_THROWS_AS(partition_check(0, 100), std::invalid_argument);
  CHECK_THROWS_AS(partition_check(4, 15), std::invalid_argument);
}

TEST_CASE("gaussian and custom multipliers") {
  const auto g = make_gaussian();
  CHECK(g(0.0) == 1.0);
  CHECK(g(2.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(g.decays());
  CHECK_FALSE(g.support_upper().has_value());
  const auto c = make_custom([](double x) { return 1.0 / (1.0 + x); }, std::nullopt, false, "slow");
  CHECK_FALSE(c.decays());
  CHECK(c.describe().find("slow") != std::string::npos);
  const auto cs = make_custom([](double x) { return x < 2.0 ? 1.0 : 0.0; }, 2.0, false);
  CHECK(cs.decays());
  CHECK(eval_filter(cs, 1.0) == 1.0);
}

TEST_CASE("rejects invalid arguments") {
  CHECK_THROWS_AS(eval_filter(make_eta(), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_phi()(std::nan("")), std::invalid_argument);
  CHECK_THROWS_AS(make_phi_j(-1), std::invalid_argument);
}

#pragma once

// Smooth dyadic cutoffs on [0, inf): eta, phi, phi_j, psi_j and eta_m, plus
// the Gaussian and user-supplied multipliers.

#include <functional>
#include <optional>
#include <string>

namespace nwidths {

enum class FilterKind { Eta, EtaM, Phi, PhiJ, PsiJR, Gaussian, Custom };

/// Standard smooth step built from b(x) = exp(-1/x): 0 for u <= 0, 1 for
/// u >= 1, sigma(u) + sigma(1 - u) = 1.
double smooth_step(double u);

/// eta(x) = smooth_step((4 - x) / 3): 1 on [0, 1], 0 on [4, inf).
double eta(double x);

/// phi(x) = eta(x / 4) - eta(x), supported in [1, 16].
double phi(double x);

class FilterSpec {
 public:
  using Function = std::function<double(double)>;

  [[nodiscard]] FilterKind kind() const { return kind_; }
  [[nodiscard]] int j() const { return j_; }
  [[nodiscard]] int m() const { return m_; }
  [[nodiscard]] double r() const { return r_; }

  /// Throws std::invalid_argument for negative or non-finite x.
  [[nodiscard]] double operator()(double x) const;

  [[nodiscard]] double value_at_zero() const { return (*this)(0.0); }

  /// Right end of the support when it is compact.
  [[nodiscard]] std::optional<double> support_upper() const;

  /// Compactly supported or declared to decay faster than any polynomial.
  [[nodiscard]] bool decays() const;

  [[nodiscard]] std::string describe() const;

  friend FilterSpec make_eta();
  friend FilterSpec make_eta_m(int m);
  friend FilterSpec make_phi();
  friend FilterSpec make_phi_j(int j);
  friend FilterSpec make_psi_jr(int j, double r);
  friend FilterSpec make_gaussian();
  friend FilterSpec make_custom(Function f, std::optional<double> support_upper,
                                bool schwartz, std::string name);

 private:
  FilterKind kind_ = FilterKind::Eta;
  int j_ = 0;
  int m_ = 1;
  double r_ = 0.0;
  Function custom_;
  std::optional<double> custom_support_;
  bool custom_schwartz_ = false;
  std::string custom_name_;
};

FilterSpec make_eta();
/// eta_m(x) = eta(x / 4^(m-1)), m >= 1; supported in [0, 4^m].
FilterSpec make_eta_m(int m);
FilterSpec make_phi();
/// phi_j(x) = phi(x / 4^(j-1)) for j >= 1 and phi_0 = eta.
FilterSpec make_phi_j(int j);
/// psi_j(x) = psi(x / 4^(j-1)) with psi(x) = phi(x) / x^(r/2); j >= 1, r > 0.
FilterSpec make_psi_jr(int j, double r);
/// F(x) = exp(-x).
FilterSpec make_gaussian();
/// A user multiplier. Either support_upper is set or schwartz is true for the
/// filter to be usable in kernel sums.
FilterSpec make_custom(FilterSpec::Function f, std::optional<double> support_upper,
                       bool schwartz, std::string name = "custom");

/// Evaluates f at x; rejects negative x.
double eval_filter(const FilterSpec& f, double x);

struct PartitionDeviation {
  /// max |sum_{j<J} phi_j(x) - 1| over log-spaced x in [0, 4^(J-1)].
  double unity = 0.0;
  /// max |sum_{j<J} phi_j(x) - eta_J(x)| over log-spaced x in [0, 4^(J+2)].
  double telescoping = 0.0;

  [[nodiscard]] double max() const { return unity > telescoping ? unity : telescoping; }
};

/// Requires J >= 1 and sample_count >= 16. x = 0 is always sampled.
PartitionDeviation partition_check(int J, int sample_count);

}  // namespace nwidths

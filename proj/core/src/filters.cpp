#include "nwidths/filters.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace nwidths {

namespace {

double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double pow4(int e) { return std::ldexp(1.0, 2 * e); }

double psi(double x, double r) {
  const double p = phi(x);
  return p == 0.0 ? 0.0 : p / std::pow(x, r / 2.0);
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = bump(u);
  const double b = bump(1.0 - u);
  return a / (a + b);
}

double eta(double x) { return smooth_step((4.0 - x) / 3.0); }

double phi(double x) { return eta(x / 4.0) - eta(x); }

double FilterSpec::operator()(double x) const {
  if (!(x >= 0.0)) {
    throw std::invalid_argument("filter argument must be a nonnegative number");
  }
  switch (kind_) {
    case FilterKind::Eta:
      return eta(x);
    case FilterKind::EtaM:
      return eta(x / pow4(m_ - 1));
    case FilterKind::Phi:
      return phi(x);
    case FilterKind::PhiJ:
      return j_ == 0 ? eta(x) : phi(x / pow4(j_ - 1));
    case FilterKind::PsiJR:
      return psi(x / pow4(j_ - 1), r_);
    case FilterKind::Gaussian:
      return std::exp(-x);
    case FilterKind::Custom:
      return custom_(x);
  }
  return 0.0;
}

std::optional<double> FilterSpec::support_upper() const {
  switch (kind_) {
    case FilterKind::Eta:
      return 4.0;
    case FilterKind::EtaM:
      return pow4(m_);
    case FilterKind::Phi:
      return 16.0;
    case FilterKind::PhiJ:
      return j_ == 0 ? 4.0 : 16.0 * pow4(j_ - 1);
    case FilterKind::PsiJR:
      return 16.0 * pow4(j_ - 1);
    case FilterKind::Gaussian:
      return std::nullopt;
    case FilterKind::Custom:
      return custom_support_;
  }
  return std::nullopt;
}

bool FilterSpec::decays() const {
  return support_upper().has_value() || kind_ == FilterKind::Gaussian ||
         (kind_ == FilterKind::Custom && custom_schwartz_);
}

std::string FilterSpec::describe() const {
  switch (kind_) {
    case FilterKind::Eta:
      return "eta";
    case FilterKind::EtaM:
      return "eta_m(m=" + std::to_string(m_) + ")";
    case FilterKind::Phi:
      return "phi";
    case FilterKind::PhiJ:
      return "phi_j(j=" + std::to_string(j_) + ")";
    case FilterKind::PsiJR: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "psi_j(j=%d,r=%g)", j_, r_);
      return buf;
    }
    case FilterKind::Gaussian:
      return "gaussian";
    case FilterKind::Custom:
      return custom_name_;
  }
  return "?";
}

FilterSpec make_eta() { return FilterSpec{}; }

FilterSpec make_eta_m(int m) {
  if (m < 1) {
    throw std::invalid_argument("make_eta_m: m must be >= 1");
  }
  FilterSpec f;
  f.kind_ = FilterKind::EtaM;
  f.m_ = m;
  return f;
}

FilterSpec make_phi() {
  FilterSpec f;
  f.kind_ = FilterKind::Phi;
  return f;
}

FilterSpec make_phi_j(int j) {
  if (j < 0) {
    throw std::invalid_argument("make_phi_j: j must be >= 0");
  }
  FilterSpec f;
  f.kind_ = FilterKind::PhiJ;
  f.j_ = j;
  return f;
}

FilterSpec make_psi_jr(int j, double r) {
  if (j < 1) {
    throw std::invalid_argument("make_psi_jr: j must be >= 1");
  }
  if (!(r > 0.0)) {
    throw std::invalid_argument("make_psi_jr: r must be positive");
  }
  FilterSpec f;
  f.kind_ = FilterKind::PsiJR;
  f.j_ = j;
  f.r_ = r;
  return f;
}

FilterSpec make_gaussian() {
  FilterSpec f;
  f.kind_ = FilterKind::Gaussian;
  return f;
}

FilterSpec make_custom(FilterSpec::Function fn, std::optional<double> support_upper,
                       bool schwartz, std::string name) {
  if (!fn) {
    throw std::invalid_argument("make_custom: empty function");
  }
  FilterSpec f;
  f.kind_ = FilterKind::Custom;
  f.custom_ = std::move(fn);
  f.custom_support_ = support_upper;
  f.custom_schwartz_ = schwartz;
  f.custom_name_ = std::move(name);
  return f;
}

double eval_filter(const FilterSpec& f, double x) { return f(x); }

PartitionDeviation partition_check(int J, int sample_count) {
  if (J < 1) {
    throw std::invalid_argument("partition_check: J must be >= 1");
  }
  if (sample_count < 16) {
    throw std::invalid_argument("partition_check: sample_count must be >= 16");
  }
  std::vector<FilterSpec> parts;
  for (int j = 0; j < J; ++j) parts.push_back(make_phi_j(j));
  const FilterSpec eta_J = make_eta_m(J);
  auto partial_sum = [&](double x) {
    double s = 0.0;
    for (const auto& p : parts) s += p(x);
    return s;
  };
  // Log-spaced samples on [lo, hi] plus the origin.
  auto samples = [&](double hi) {
    std::vector<double> xs{0.0};
    const double lo = 1e-3;
    const double step = std::log(hi / lo) / (sample_count - 2);
    for (int i = 0; i < sample_count - 1; ++i) {
      xs.push_back(std::min(hi, lo * std::exp(step * i)));
    }
    return xs;
  };
  PartitionDeviation dev;
  for (double x : samples(pow4(J - 1))) {
    dev.unity = std::max(dev.unity, std::abs(partial_sum(x) - 1.0));
  }
  for (double x : samples(pow4(J + 2))) {
    dev.telescoping = std::max(dev.telescoping, std::abs(partial_sum(x) - eta_J(x)));
  }
  return dev;
}

}  // namespace nwidths

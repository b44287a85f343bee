#include "nwidths/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nwidths {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kUnitTolerance = 1e-9;

// floor(sqrt(v)) for v >= 0, exact for integers up to 2^52.
long long isqrt_floor(double v) {
  if (v < 0.0) {
    return -1;
  }
  auto r = static_cast<long long>(std::floor(std::sqrt(v)));
  while (static_cast<double>((r + 1) * (r + 1)) <= v) {
    ++r;
  }
  while (r > 0 && static_cast<double>(r * r) > v) {
    --r;
  }
  return r;
}

// Largest k with k(k+1) <= v.
long long sphere_degree_floor(double v) {
  if (v < 0.0) {
    return -1;
  }
  auto k = static_cast<long long>(std::floor((std::sqrt(1.0 + 4.0 * v) - 1.0) / 2.0));
  while (static_cast<double>((k + 1) * (k + 2)) <= v) {
    ++k;
  }
  while (k > 0 && static_cast<double>(k * (k + 1)) > v) {
    --k;
  }
  return k;
}

// Position of a signed circle frequency in the circle enumeration order.
int circle_index(int a) { return a == 0 ? 0 : (a > 0 ? 2 * a - 1 : -2 * a); }

double circle_value(int a, double theta) {
  if (a == 0) {
    return 1.0 / std::sqrt(kTwoPi);
  }
  const double n = std::abs(a);
  return (a > 0 ? std::cos(n * theta) : std::sin(n * theta)) / std::sqrt(kPi);
}

std::size_t tri_index(int k, int m) {
  return static_cast<std::size_t>(k) * static_cast<std::size_t>(k + 1) / 2 +
         static_cast<std::size_t>(m);
}

// Fully normalized associated Legendre functions Pbar_k^m(z) for 0 <= m <= k
// <= max_k, scaled so that 2*pi*int_{-1}^{1} Pbar^2 dz = 1.
void normalized_legendre_table(int max_k, double z, double s,
                               std::vector<double>& table) {
  table.assign(tri_index(max_k, max_k) + 1, 0.0);
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= max_k; ++m) {
    if (m > 0) {
      pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    }
    table[tri_index(m, m)] = pmm;
    if (m == max_k) {
      break;
    }
    double prev = pmm;
    double cur = std::sqrt(2.0 * m + 3.0) * z * pmm;
    table[tri_index(m + 1, m)] = cur;
    double inv_prev_a = 1.0 / std::sqrt(2.0 * m + 3.0);
    for (int k = m + 2; k <= max_k; ++k) {
      const double kk = static_cast<double>(k) * k;
      const double a = std::sqrt((4.0 * kk - 1.0) / (kk - static_cast<double>(m) * m));
      const double next = a * (z * cur - prev * inv_prev_a);
      table[tri_index(k, m)] = next;
      prev = cur;
      cur = next;
      inv_prev_a = 1.0 / a;
    }
  }
}

// Pbar_k^m(z) for a single (k, m) by the same recurrence.
double normalized_legendre(int k, int m, double z, double s) {
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int i = 1; i <= m; ++i) {
    pmm *= std::sqrt((2.0 * i + 1.0) / (2.0 * i)) * s;
  }
  if (k == m) {
    return pmm;
  }
  double prev = pmm;
  double cur = std::sqrt(2.0 * m + 3.0) * z * pmm;
  double inv_prev_a = 1.0 / std::sqrt(2.0 * m + 3.0);
  for (int j = m + 2; j <= k; ++j) {
    const double jj = static_cast<double>(j) * j;
    const double a = std::sqrt((4.0 * jj - 1.0) / (jj - static_cast<double>(m) * m));
    const double next = a * (z * cur - prev * inv_prev_a);
    prev = cur;
    cur = next;
    inv_prev_a = 1.0 / a;
  }
  return cur;
}

struct SphereCoords {
  double z;
  double s;
  double phi;
};

SphereCoords sphere_coords(const Point& x) {
  const double z = std::clamp(x.c[2], -1.0, 1.0);
  const double rho = std::hypot(x.c[0], x.c[1]);
  const double phi = rho > 0.0 ? std::atan2(x.c[1], x.c[0]) : 0.0;
  return {z, rho, phi};
}

double sphere_harmonic(int k, int m, const Point& x) {
  const auto [z, s, phi] = sphere_coords(x);
  const int am = std::abs(m);
  const double p = normalized_legendre(k, am, z, s);
  if (m == 0) {
    return p;
  }
  const double trig = m > 0 ? std::cos(am * phi) : std::sin(am * phi);
  return std::numbers::sqrt2 * p * trig;
}

double circle_distance(double a, double b) {
  const double d = std::abs(std::remainder(a - b, kTwoPi));
  return std::min(d, kTwoPi - d);
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::Circle:
      return "circle";
    case ManifoldKind::Torus2:
      return "torus2";
    case ManifoldKind::Sphere2:
      return "sphere2";
  }
  return "unknown";
}

ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "circle") return ManifoldKind::Circle;
  if (name == "torus2" || name == "torus") return ManifoldKind::Torus2;
  if (name == "sphere2" || name == "sphere") return ManifoldKind::Sphere2;
  throw std::invalid_argument("unknown manifold '" + std::string(name) +
                              "' (expected circle, torus2 or sphere2)");
}

Point circle_point(double theta) { return Point{{theta, 0.0, 0.0}}; }

Point torus_point(double theta1, double theta2) {
  return Point{{theta1, theta2, 0.0}};
}

Point sphere_point(double theta, double phi) {
  const double st = std::sin(theta);
  return Point{{st * std::cos(phi), st * std::sin(phi), std::cos(theta)}};
}

double Eigenpair::evaluate(const Point& x) const {
  switch (kind) {
    case ManifoldKind::Circle:
      return circle_value(label.a, x.c[0]);
    case ManifoldKind::Torus2:
      return circle_value(label.a, x.c[0]) * circle_value(label.b, x.c[1]);
    case ManifoldKind::Sphere2:
      return sphere_harmonic(label.a, label.b, x);
  }
  return 0.0;
}

int Manifold::dimension() const { return kind_ == ManifoldKind::Circle ? 1 : 2; }

double Manifold::total_measure() const {
  switch (kind_) {
    case ManifoldKind::Circle:
      return kTwoPi;
    case ManifoldKind::Torus2:
      return kTwoPi * kTwoPi;
    case ManifoldKind::Sphere2:
      return 4.0 * kPi;
  }
  return 0.0;
}

double Manifold::diameter() const {
  return kind_ == ManifoldKind::Torus2 ? kPi * std::numbers::sqrt2 : kPi;
}

double Manifold::max_omega() const {
  switch (kind_) {
    case ManifoldKind::Circle:
      return 4.0e12;
    case ManifoldKind::Torus2:
      return 1.2e6;
    case ManifoldKind::Sphere2:
      return 4.0e6;
  }
  return 0.0;
}

std::vector<Eigenpair> Manifold::enumerate_eigenpairs(double omega) const {
  if (!std::isfinite(omega)) {
    throw std::invalid_argument("enumerate_eigenpairs: omega must be finite");
  }
  if (omega > max_omega()) {
    throw std::invalid_argument("enumerate_eigenpairs: omega " +
                                std::to_string(omega) +
                                " exceeds the enumerable range " +
                                std::to_string(max_omega()));
  }
  std::vector<Eigenpair> out;
  if (omega < 0.0) {
    return out;
  }
  out.reserve(weyl_count(omega));
  switch (kind_) {
    case ManifoldKind::Circle: {
      const long long nmax = isqrt_floor(omega);
      out.push_back({0, 0.0, {0, 0}, kind_});
      for (long long n = 1; n <= nmax; ++n) {
        const double lam = static_cast<double>(n * n);
        out.push_back({0, lam, {static_cast<int>(n), 0}, kind_});
        out.push_back({0, lam, {static_cast<int>(-n), 0}, kind_});
      }
      break;
    }
    case ManifoldKind::Torus2: {
      const long long nmax = isqrt_floor(omega);
      for (long long a = -nmax; a <= nmax; ++a) {
        const long long bmax = isqrt_floor(omega - static_cast<double>(a * a));
        for (long long b = -bmax; b <= bmax; ++b) {
          out.push_back({0, static_cast<double>(a * a + b * b),
                         {static_cast<int>(a), static_cast<int>(b)}, kind_});
        }
      }
      std::sort(out.begin(), out.end(), [](const Eigenpair& l, const Eigenpair& r) {
        if (l.lambda != r.lambda) return l.lambda < r.lambda;
        const int la = circle_index(l.label.a);
        const int ra = circle_index(r.label.a);
        if (la != ra) return la < ra;
        return circle_index(l.label.b) < circle_index(r.label.b);
      });
      break;
    }
    case ManifoldKind::Sphere2: {
      const long long kmax = sphere_degree_floor(omega);
      for (long long k = 0; k <= kmax; ++k) {
        const double lam = static_cast<double>(k * (k + 1));
        for (long long m = -k; m <= k; ++m) {
          out.push_back({0, lam, {static_cast<int>(k), static_cast<int>(m)}, kind_});
        }
      }
      break;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].index = i;
  }
  return out;
}

std::size_t Manifold::weyl_count(double omega) const {
  if (omega < 0.0) {
    return 0;
  }
  switch (kind_) {
    case ManifoldKind::Circle:
      return static_cast<std::size_t>(2 * isqrt_floor(omega) + 1);
    case ManifoldKind::Torus2: {
      const long long nmax = isqrt_floor(omega);
      std::size_t count = 0;
      for (long long a = -nmax; a <= nmax; ++a) {
        count += static_cast<std::size_t>(
            2 * isqrt_floor(omega - static_cast<double>(a * a)) + 1);
      }
      return count;
    }
    case ManifoldKind::Sphere2: {
      const auto k = static_cast<std::size_t>(sphere_degree_floor(omega));
      return (k + 1) * (k + 1);
    }
  }
  return 0;
}

std::vector<EigenShell> Manifold::shells(double omega) const {
  std::vector<EigenShell> out;
  if (omega < 0.0) {
    return out;
  }
  switch (kind_) {
    case ManifoldKind::Circle: {
      const long long nmax = isqrt_floor(omega);
      for (long long n = 0; n <= nmax; ++n) {
        out.push_back({static_cast<double>(n * n), n == 0 ? 1u : 2u,
                       static_cast<int>(n)});
      }
      break;
    }
    case ManifoldKind::Torus2: {
      const auto lmax = static_cast<long long>(std::floor(omega));
      std::vector<std::size_t> counts(static_cast<std::size_t>(lmax) + 1, 0);
      const long long nmax = isqrt_floor(omega);
      for (long long a = -nmax; a <= nmax; ++a) {
        const long long bmax = isqrt_floor(omega - static_cast<double>(a * a));
        for (long long b = -bmax; b <= bmax; ++b) {
          ++counts[static_cast<std::size_t>(a * a + b * b)];
        }
      }
      for (std::size_t lam = 0; lam < counts.size(); ++lam) {
        if (counts[lam] > 0) {
          out.push_back({static_cast<double>(lam), counts[lam], static_cast<int>(lam)});
        }
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      const long long kmax = sphere_degree_floor(omega);
      for (long long k = 0; k <= kmax; ++k) {
        out.push_back({static_cast<double>(k * (k + 1)),
                       static_cast<std::size_t>(2 * k + 1), static_cast<int>(k)});
      }
      break;
    }
  }
  return out;
}

void Manifold::shell_products(const Point& x, const Point& y,
                              std::span<const EigenShell> shells,
                              std::span<double> out) const {
  if (out.size() != shells.size()) {
    throw std::invalid_argument("shell_products: output size mismatch");
  }
  if (shells.empty()) {
    return;
  }
  switch (kind_) {
    case ManifoldKind::Circle: {
      const double delta = x.c[0] - y.c[0];
      for (std::size_t i = 0; i < shells.size(); ++i) {
        const int n = shells[i].key;
        out[i] = n == 0 ? 1.0 / kTwoPi : std::cos(n * delta) / kPi;
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      const double z = std::clamp(
          x.c[0] * y.c[0] + x.c[1] * y.c[1] + x.c[2] * y.c[2], -1.0, 1.0);
      int kmax = 0;
      for (const auto& sh : shells) kmax = std::max(kmax, sh.key);
      std::vector<double> p(static_cast<std::size_t>(kmax) + 1);
      p[0] = 1.0;
      if (kmax >= 1) p[1] = z;
      for (int k = 2; k <= kmax; ++k) {
        p[k] = ((2.0 * k - 1.0) * z * p[k - 1] - (k - 1.0) * p[k - 2]) / k;
      }
      for (std::size_t i = 0; i < shells.size(); ++i) {
        const int k = shells[i].key;
        out[i] = (2.0 * k + 1.0) / (4.0 * kPi) * p[static_cast<std::size_t>(k)];
      }
      break;
    }
    case ManifoldKind::Torus2: {
      int lmax = 0;
      for (const auto& sh : shells) lmax = std::max(lmax, sh.key);
      std::vector<int> slot(static_cast<std::size_t>(lmax) + 1, -1);
      for (std::size_t i = 0; i < shells.size(); ++i) {
        slot[static_cast<std::size_t>(shells[i].key)] = static_cast<int>(i);
      }
      const long long nmax = isqrt_floor(lmax);
      const double d1 = x.c[0] - y.c[0];
      const double d2 = x.c[1] - y.c[1];
      std::vector<double> c1(static_cast<std::size_t>(nmax) + 1);
      std::vector<double> c2(static_cast<std::size_t>(nmax) + 1);
      for (long long n = 0; n <= nmax; ++n) {
        c1[n] = std::cos(n * d1);
        c2[n] = std::cos(n * d2);
      }
      std::fill(out.begin(), out.end(), 0.0);
      // Sum of cos(n . delta) over signed lattice points; the sin*sin terms
      // cancel in pairs (b, -b).
      for (long long a = -nmax; a <= nmax; ++a) {
        const long long bmax = isqrt_floor(static_cast<double>(lmax - a * a));
        for (long long b = -bmax; b <= bmax; ++b) {
          const int s = slot[static_cast<std::size_t>(a * a + b * b)];
          if (s >= 0) {
            out[static_cast<std::size_t>(s)] += c1[std::abs(a)] * c2[std::abs(b)];
          }
        }
      }
      const double norm = 1.0 / (kTwoPi * kTwoPi);
      for (double& v : out) v *= norm;
      break;
    }
  }
}

double Manifold::shell_sup_bound(const EigenShell& shell) const {
  switch (kind_) {
    case ManifoldKind::Circle:
      return shell.key == 0 ? 1.0 / kTwoPi : 2.0 / kPi;
    case ManifoldKind::Torus2:
      return static_cast<double>(shell.multiplicity) / (kPi * kPi);
    case ManifoldKind::Sphere2:
      return (2.0 * shell.key + 1.0) / (4.0 * kPi);
  }
  return 0.0;
}

int Manifold::max_degree(double omega) const {
  if (omega < 0.0) {
    return -1;
  }
  if (kind_ == ManifoldKind::Sphere2) {
    return static_cast<int>(sphere_degree_floor(omega));
  }
  return static_cast<int>(isqrt_floor(omega));
}

void Manifold::evaluate_basis(const Point& x, std::span<const Eigenpair> basis,
                              std::span<double> out) const {
  if (out.size() != basis.size()) {
    throw std::invalid_argument("evaluate_basis: output size mismatch");
  }
  if (basis.empty()) {
    return;
  }
  switch (kind_) {
    case ManifoldKind::Circle: {
      for (std::size_t i = 0; i < basis.size(); ++i) {
        out[i] = circle_value(basis[i].label.a, x.c[0]);
      }
      break;
    }
    case ManifoldKind::Torus2: {
      int nmax = 0;
      for (const auto& e : basis) {
        nmax = std::max({nmax, std::abs(e.label.a), std::abs(e.label.b)});
      }
      const auto width = static_cast<std::size_t>(2 * nmax + 1);
      std::vector<double> v1(width);
      std::vector<double> v2(width);
      for (int a = -nmax; a <= nmax; ++a) {
        v1[static_cast<std::size_t>(a + nmax)] = circle_value(a, x.c[0]);
        v2[static_cast<std::size_t>(a + nmax)] = circle_value(a, x.c[1]);
      }
      for (std::size_t i = 0; i < basis.size(); ++i) {
        out[i] = v1[static_cast<std::size_t>(basis[i].label.a + nmax)] *
                 v2[static_cast<std::size_t>(basis[i].label.b + nmax)];
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      int kmax = 0;
      for (const auto& e : basis) kmax = std::max(kmax, e.label.a);
      const auto [z, s, phi] = sphere_coords(x);
      std::vector<double> table;
      normalized_legendre_table(kmax, z, s, table);
      std::vector<double> cm(static_cast<std::size_t>(kmax) + 1);
      std::vector<double> sm(static_cast<std::size_t>(kmax) + 1);
      for (int m = 0; m <= kmax; ++m) {
        cm[m] = std::numbers::sqrt2 * std::cos(m * phi);
        sm[m] = std::numbers::sqrt2 * std::sin(m * phi);
      }
      for (std::size_t i = 0; i < basis.size(); ++i) {
        const int k = basis[i].label.a;
        const int m = basis[i].label.b;
        const double p = table[tri_index(k, std::abs(m))];
        out[i] = m == 0 ? p : p * (m > 0 ? cm[m] : sm[-m]);
      }
      break;
    }
  }
}

void Manifold::validate(const Point& x) const {
  for (double v : x.c) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("point has non-finite coordinates");
    }
  }
  if (kind_ == ManifoldKind::Sphere2) {
    const double norm = std::sqrt(x.c[0] * x.c[0] + x.c[1] * x.c[1] + x.c[2] * x.c[2]);
    if (std::abs(norm - 1.0) > kUnitTolerance) {
      throw std::invalid_argument("point is not on the unit sphere (norm " +
                                  std::to_string(norm) + ")");
    }
  }
}

double Manifold::geodesic_distance(const Point& x, const Point& y) const {
  validate(x);
  validate(y);
  switch (kind_) {
    case ManifoldKind::Circle:
      return circle_distance(x.c[0], y.c[0]);
    case ManifoldKind::Torus2:
      return std::hypot(circle_distance(x.c[0], y.c[0]),
                        circle_distance(x.c[1], y.c[1]));
    case ManifoldKind::Sphere2: {
      // atan2 form of arccos(<x, y>), accurate near 0 and pi.
      const double cx = x.c[1] * y.c[2] - x.c[2] * y.c[1];
      const double cy = x.c[2] * y.c[0] - x.c[0] * y.c[2];
      const double cz = x.c[0] * y.c[1] - x.c[1] * y.c[0];
      const double dot = x.c[0] * y.c[0] + x.c[1] * y.c[1] + x.c[2] * y.c[2];
      return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), dot);
    }
  }
  return 0.0;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: n must be positive");
  }
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p0 = 1.0;
        p1 = z;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) {
        break;
      }
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -z;
    nodes[static_cast<std::size_t>(n - 1 - i)] = z;
    weights[static_cast<std::size_t>(i)] = w;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) {
    nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  }
}

QuadratureGrid build_grid(const Manifold& model, int resolution) {
  if (resolution < 4) {
    throw std::invalid_argument("build_grid: resolution must be at least 4, got " +
                                std::to_string(resolution));
  }
  QuadratureGrid grid;
  grid.model = model;
  grid.resolution = resolution;
  const double h = kTwoPi / resolution;
  switch (model.kind()) {
    case ManifoldKind::Circle: {
      grid.exactness = resolution - 1;
      for (int i = 0; i < resolution; ++i) {
        grid.nodes.push_back(circle_point(h * i));
        grid.weights.push_back(h);
      }
      break;
    }
    case ManifoldKind::Torus2: {
      grid.exactness = resolution - 1;
      for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
          grid.nodes.push_back(torus_point(h * i, h * j));
          grid.weights.push_back(h * h);
        }
      }
      break;
    }
    case ManifoldKind::Sphere2: {
      grid.exactness = 2 * resolution - 1;
      std::vector<double> z;
      std::vector<double> w;
      gauss_legendre(resolution, z, w);
      const int naz = 2 * resolution;
      const double dphi = kTwoPi / naz;
      for (int i = 0; i < resolution; ++i) {
        const double s = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
        for (int j = 0; j < naz; ++j) {
          const double phi = dphi * j;
          grid.nodes.push_back(Point{{s * std::cos(phi), s * std::sin(phi), z[i]}});
          grid.weights.push_back(w[i] * dphi);
        }
      }
      break;
    }
  }
  return grid;
}

QuadratureGrid grid_for_degree(const Manifold& model, int degree) {
  degree = std::max(degree, 0);
  int resolution = model.kind() == ManifoldKind::Sphere2 ? (degree + 2) / 2 : degree + 1;
  return build_grid(model, std::max(resolution, 4));
}

RateFit eigenvalue_growth_fit(const Manifold& model, std::size_t l_min,
                              std::size_t l_max) {
  if (l_min < 2 || l_max <= l_min) {
    throw std::invalid_argument("eigenvalue_growth_fit: need 2 <= l_min < l_max");
  }
  if (l_max - l_min + 1 < 8) {
    throw std::invalid_argument("eigenvalue_growth_fit: range has fewer than 8 points");
  }
  double omega = 4.0;
  while (model.weyl_count(omega) <= l_max) {
    omega *= 2.0;
    if (omega > model.max_omega()) {
      throw std::invalid_argument("eigenvalue_growth_fit: l_max beyond enumerable range");
    }
  }
  const auto pairs = model.enumerate_eigenpairs(omega);
  std::vector<double> ls;
  std::vector<double> lams;
  for (std::size_t l = l_min; l <= l_max; ++l) {
    ls.push_back(static_cast<double>(l));
    lams.push_back(pairs[l].lambda);
  }
  if (lams.front() == lams.back()) {
    throw std::invalid_argument(
        "eigenvalue_growth_fit: eigenvalues constant over the range, slope undefined");
  }
  return fit_log_log(ls, lams);
}

}  // namespace nwidths

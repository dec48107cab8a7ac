#include "psido/group.hpp"

#include <cmath>
#include <numbers>

#include "psido/errors.hpp"

namespace psido {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Relative slack on lambda^2 so that a cutoff placed exactly on <xi> keeps xi
// despite rounding in sqrt/square.
constexpr double cutoff_slack = 1e-12;

const TorusPoint& as_torus(const GroupPoint& x) {
  if (const auto* t = std::get_if<TorusPoint>(&x)) return *t;
  throw TypeMismatchError("expected a torus point");
}

const Su2Point& as_su2(const GroupPoint& x) {
  if (const auto* s = std::get_if<Su2Point>(&x)) return *s;
  throw TypeMismatchError("expected an SU(2) point");
}

void check_dual(const GroupDescriptor& g, const DualPoint& xi) {
  if (g.is_torus()) {
    if (static_cast<int>(xi.index.size()) != g.dimension() || xi.dim != 1)
      throw TypeMismatchError("dual point does not belong to " + g.name());
  } else {
    if (xi.index.size() != 1 || xi.index[0] < 0 || xi.dim != xi.index[0] + 1)
      throw TypeMismatchError("dual point does not belong to su2");
  }
}

}  // namespace

GroupDescriptor GroupDescriptor::torus(int n) {
  if (n < 1) throw ParameterError("torus dimension must be >= 1");
  return {GroupKind::torus, n};
}

GroupDescriptor GroupDescriptor::su2() { return {GroupKind::su2, 3}; }

std::string GroupDescriptor::name() const {
  return is_torus() ? "torus(" + std::to_string(dimension_) + ")" : "su2";
}

double DualPoint::bracket() const { return std::sqrt(1.0 + eigenvalue); }

DualPoint torus_dual(std::vector<int> k) {
  double norm2 = 0.0;
  for (int kj : k) norm2 += static_cast<double>(kj) * kj;
  return {std::move(k), 1, norm2};
}

DualPoint su2_dual(int two_l) {
  if (two_l < 0) throw ParameterError("spin must be non-negative");
  const double ev = static_cast<double>(two_l) * (two_l + 2) / 4.0;
  return {{two_l}, two_l + 1, ev};
}

DualPoint trivial_dual(const GroupDescriptor& g) {
  return g.is_torus() ? torus_dual(std::vector<int>(g.dimension(), 0)) : su2_dual(0);
}

double band_degree(const GroupDescriptor& g, const DualPoint& xi) {
  if (!g.is_torus()) return xi.index[0] / 2.0;
  int m = 0;
  for (int kj : xi.index) m = std::max(m, std::abs(kj));
  return m;
}

Su2Point Su2Point::from_euler(double alpha, double beta, double gamma) {
  const double c = std::cos(beta / 2.0);
  const double s = std::sin(beta / 2.0);
  return {std::polar(c, -(alpha + gamma) / 2.0), std::polar(s, (alpha - gamma) / 2.0)};
}

std::array<double, 3> Su2Point::euler() const {
  const double beta = 2.0 * std::atan2(std::abs(b), std::abs(a));
  const double phase_a = std::abs(a) > 0.0 ? std::arg(a) : 0.0;
  const double phase_b = std::abs(b) > 0.0 ? std::arg(b) : 0.0;
  return {phase_b - phase_a, beta, -phase_a - phase_b};
}

Eigen::Matrix2cd Su2Point::matrix() const {
  Eigen::Matrix2cd u;
  u << a, -std::conj(b), b, std::conj(a);
  return u;
}

GroupPoint identity_point(const GroupDescriptor& g) {
  if (g.is_torus()) return TorusPoint{std::vector<double>(g.dimension(), 0.0)};
  return Su2Point{};
}

void check_point(const GroupDescriptor& g, const GroupPoint& x) {
  if (g.is_torus()) {
    if (static_cast<int>(as_torus(x).angles.size()) != g.dimension())
      throw TypeMismatchError("torus point has wrong dimension");
  } else {
    as_su2(x);
  }
}

GroupPoint multiply(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y) {
  check_point(g, x);
  check_point(g, y);
  if (g.is_torus()) {
    const auto& tx = as_torus(x).angles;
    const auto& ty = as_torus(y).angles;
    TorusPoint out{std::vector<double>(tx.size())};
    for (std::size_t j = 0; j < tx.size(); ++j) out.angles[j] = std::fmod(tx[j] + ty[j], two_pi);
    return out;
  }
  const Eigen::Matrix2cd u = as_su2(x).matrix() * as_su2(y).matrix();
  return Su2Point{u(0, 0), u(1, 0)};
}

GroupPoint inverse(const GroupDescriptor& g, const GroupPoint& x) {
  check_point(g, x);
  if (g.is_torus()) {
    TorusPoint out = as_torus(x);
    for (double& a : out.angles) a = std::fmod(two_pi - a, two_pi);
    return out;
  }
  const auto& s = as_su2(x);
  return Su2Point{std::conj(s.a), -s.b};
}

std::vector<double> coordinates(const GroupPoint& x) {
  if (const auto* t = std::get_if<TorusPoint>(&x)) return t->angles;
  const auto e = std::get<Su2Point>(x).euler();
  return {e[0], e[1], e[2]};
}

std::vector<DualPoint> enumerate_dual(const GroupDescriptor& g, double lambda) {
  if (!(lambda >= 1.0)) throw EmptyWindowError("cutoff lambda must be >= 1");
  const double limit = lambda * lambda * (1.0 + cutoff_slack);
  std::vector<DualPoint> out;
  if (!g.is_torus()) {
    for (int two_l = 0;; ++two_l) {
      DualPoint xi = su2_dual(two_l);
      if (1.0 + xi.eigenvalue > limit) break;
      out.push_back(std::move(xi));
    }
    return out;
  }
  const int n = g.dimension();
  const int kmax = static_cast<int>(std::floor(std::sqrt(std::max(0.0, limit - 1.0))));
  std::vector<int> k(n, -kmax);
  // Odometer over the cube [-kmax, kmax]^n; last coordinate fastest gives
  // lexicographic order.
  while (true) {
    long long norm2 = 0;
    for (int kj : k) norm2 += static_cast<long long>(kj) * kj;
    if (1.0 + static_cast<double>(norm2) <= limit) out.push_back(torus_dual(k));
    int j = n - 1;
    while (j >= 0 && k[j] == kmax) k[j--] = -kmax;
    if (j < 0) break;
    ++k[j];
  }
  return out;
}

CMatrix rep_matrix(const GroupDescriptor& g, const DualPoint& xi, const GroupPoint& x) {
  check_dual(g, xi);
  check_point(g, x);
  if (g.is_torus()) {
    const auto& angles = as_torus(x).angles;
    double phase = 0.0;
    for (std::size_t j = 0; j < angles.size(); ++j) phase += xi.index[j] * angles[j];
    CMatrix m(1, 1);
    m(0, 0) = std::polar(1.0, phase);
    return m;
  }
  const auto e = as_su2(x).euler();
  return wigner_matrix(xi.index[0], e[0], e[1], e[2]);
}

double laplace_eigenvalue(const GroupDescriptor& g, const DualPoint& xi) {
  check_dual(g, xi);
  if (g.is_torus()) {
    double s = 0.0;
    for (int kj : xi.index) s += static_cast<double>(kj) * kj;
    return s;
  }
  const double l = xi.index[0] / 2.0;
  return l * (l + 1.0);
}

namespace {

// P_count(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int count, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= count; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (count == 1) p0 = 1.0;
  return {p1, count * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre gauss_legendre(int count) {
  if (count < 1) throw ParameterError("Gauss-Legendre needs at least one node");
  GaussLegendre gl{std::vector<double>(count), std::vector<double>(count)};
  for (int i = 0; i < count; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(count, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(count, x).second;
    gl.nodes[i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

int resolution_for_degree(double degree) {
  return std::max(2, static_cast<int>(std::ceil(degree - 1e-9)) + 1);
}

QuadratureGrid haar_quadrature(const GroupDescriptor& g, int resolution) {
  if (resolution < 2) throw ConfigError("quadrature resolution must be >= 2");
  QuadratureGrid grid;
  grid.group = g;
  grid.resolution = resolution;
  if (g.is_torus()) {
    const int n = g.dimension();
    std::size_t count = 1;
    for (int j = 0; j < n; ++j) count *= static_cast<std::size_t>(resolution);
    const double w = 1.0 / static_cast<double>(count);
    grid.nodes.reserve(count);
    std::vector<int> idx(n, 0);
    for (std::size_t c = 0; c < count; ++c) {
      TorusPoint p{std::vector<double>(n)};
      for (int j = 0; j < n; ++j) p.angles[j] = two_pi * idx[j] / resolution;
      grid.nodes.emplace_back(std::move(p));
      for (int j = n - 1; j >= 0; --j) {
        if (++idx[j] < resolution) break;
        idx[j] = 0;
      }
    }
    grid.weights.assign(count, w);
    return grid;
  }
  const int n_alpha = resolution;
  const int n_beta = (resolution + 1) / 2;
  const int n_gamma = 2 * resolution;
  const GaussLegendre gl = gauss_legendre(n_beta);
  for (int ia = 0; ia < n_alpha; ++ia) {
    const double alpha = two_pi * ia / n_alpha;
    for (int ib = 0; ib < n_beta; ++ib) {
      const double beta = std::acos(gl.nodes[ib]);
      for (int ig = 0; ig < n_gamma; ++ig) {
        const double gamma = 2.0 * two_pi * ig / n_gamma;
        grid.nodes.emplace_back(Su2Point::from_euler(alpha, beta, gamma));
        grid.weights.push_back(gl.weights[ib] / (2.0 * n_alpha * n_gamma));
      }
    }
  }
  return grid;
}

}  // namespace psido

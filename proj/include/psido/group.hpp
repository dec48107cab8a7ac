#pragma once

#include <array>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace psido {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

enum class GroupKind { torus, su2 };

// One of the two concrete compact groups: the n-torus [0,2pi)^n or SU(2).
//
// Laplace normalisation: torus characters are e^{ik.x}, so lambda_k = |k|^2;
// SU(2) uses the Casimir value lambda_l = l(l+1). Both are fixed constants,
// so <xi> = (1 + lambda)^{1/2} is reproducible across runs.
class GroupDescriptor {
 public:
  static GroupDescriptor torus(int n);
  static GroupDescriptor su2();

  GroupKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  bool is_torus() const noexcept { return kind_ == GroupKind::torus; }

  // "torus(n)" or "su2"
  std::string name() const;

  bool operator==(const GroupDescriptor&) const = default;

 private:
  GroupDescriptor(GroupKind kind, int dimension) : kind_(kind), dimension_(dimension) {}

  GroupKind kind_;
  int dimension_;
};

// A class [xi] of the unitary dual. For the torus the index is k in Z^n;
// for SU(2) it is the single integer 2l (so half-integer spins stay exact).
struct DualPoint {
  std::vector<int> index;
  int dim = 1;
  double eigenvalue = 0.0;

  double bracket() const;

  // Lexicographic on the index, the canonical basis order.
  auto operator<=>(const DualPoint& other) const { return index <=> other.index; }
  bool operator==(const DualPoint& other) const { return index == other.index; }
};

DualPoint torus_dual(std::vector<int> k);
DualPoint su2_dual(int two_l);
DualPoint trivial_dual(const GroupDescriptor& g);

// Band degree used by the quadrature exactness rules: max |k_j| on the
// torus, the spin l on SU(2).
double band_degree(const GroupDescriptor& g, const DualPoint& xi);

struct TorusPoint {
  std::vector<double> angles;
};

// SU(2) element [[a, -conj(b)], [b, conj(a)]] with |a|^2 + |b|^2 = 1.
struct Su2Point {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  // U = exp(-i alpha sz/2) exp(-i beta sy/2) exp(-i gamma sz/2)
  static Su2Point from_euler(double alpha, double beta, double gamma);
  std::array<double, 3> euler() const;
  Eigen::Matrix2cd matrix() const;
};

using GroupPoint = std::variant<TorusPoint, Su2Point>;

GroupPoint identity_point(const GroupDescriptor& g);
GroupPoint multiply(const GroupDescriptor& g, const GroupPoint& x, const GroupPoint& y);
GroupPoint inverse(const GroupDescriptor& g, const GroupPoint& x);
void check_point(const GroupDescriptor& g, const GroupPoint& x);
// Coordinates for reports: torus angles, or SU(2) Euler angles.
std::vector<double> coordinates(const GroupPoint& x);

// All dual points with <xi> <= lambda, in canonical order.
std::vector<DualPoint> enumerate_dual(const GroupDescriptor& g, double lambda);

// Unitary representation matrix xi(x).
CMatrix rep_matrix(const GroupDescriptor& g, const DualPoint& xi, const GroupPoint& x);

double laplace_eigenvalue(const GroupDescriptor& g, const DualPoint& xi);

// Wigner matrix D^l(alpha, beta, gamma) in the |l,m> basis, m = -l..l.
CMatrix wigner_matrix(int two_l, double alpha, double beta, double gamma);

struct QuadratureGrid {
  GroupDescriptor group = GroupDescriptor::torus(1);
  std::vector<GroupPoint> nodes;
  std::vector<double> weights;
  int resolution = 0;

  // Products of matrix entries whose band degrees add up to at most this
  // value integrate exactly.
  double band_limit() const { return resolution - 1; }
  std::size_t size() const { return nodes.size(); }
};

// Torus: R^n uniform nodes. SU(2): R uniform alpha in [0,2pi), Gauss-Legendre
// in cos(beta) with ceil(R/2) nodes, 2R uniform gamma in [0,4pi).
QuadratureGrid haar_quadrature(const GroupDescriptor& g, int resolution);

// Smallest resolution whose band limit covers `degree`.
int resolution_for_degree(double degree);

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int count);

}  // namespace psido

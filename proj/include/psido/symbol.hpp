#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psido/group.hpp"
#include "psido/window.hpp"

namespace psido {

// Finite expansion f(x) = sum_t c_t xi_t(x)_{ij}: a trigonometric polynomial
// on the torus, a Wigner polynomial on SU(2).
struct BandLimitedTerm {
  DualPoint rep;
  int row = 0;
  int col = 0;
  cplx coefficient{1.0, 0.0};
};

class BandLimitedFunction {
 public:
  explicit BandLimitedFunction(GroupDescriptor group, std::vector<BandLimitedTerm> terms = {});

  static BandLimitedFunction constant(const GroupDescriptor& g, cplx value);
  // Single torus character c e^{ik.x}.
  static BandLimitedFunction character(const GroupDescriptor& g, std::vector<int> k, cplx c = 1.0);

  const GroupDescriptor& group() const noexcept { return group_; }
  const std::vector<BandLimitedTerm>& terms() const noexcept { return terms_; }

  cplx operator()(const GroupPoint& x) const;
  double degree() const;

  // (1 + L)^{power/2} applied in x: every term scaled by <eta>^power.
  BandLimitedFunction bessel_lifted(double power) const;

 private:
  GroupDescriptor group_;
  std::vector<BandLimitedTerm> terms_;
};

class MatrixSymbol;

// sigma(x, xi) = coefficient(x) * base(xi), base invariant.
struct SeparableTerm {
  BandLimitedFunction coefficient;
  std::shared_ptr<const MatrixSymbol> base;
};

// A global symbol sigma(x, [xi]) given as a rule. Scalar symbols (sigma = s I)
// carry a scalar rule so that norms never materialise large identity blocks.
class MatrixSymbol {
 public:
  using MatrixRule = std::function<CMatrix(const GroupPoint&, const DualPoint&)>;
  using ScalarRule = std::function<cplx(const GroupPoint&, const DualPoint&)>;

  static MatrixSymbol from_matrix_rule(GroupDescriptor g, MatrixRule rule, bool invariant,
                                       std::string label);
  static MatrixSymbol from_scalar_rule(GroupDescriptor g, ScalarRule rule, bool invariant,
                                       std::string label);

  const GroupDescriptor& group() const noexcept { return group_; }
  const std::string& label() const noexcept { return label_; }
  bool invariant() const noexcept { return invariant_; }
  bool scalar() const noexcept { return static_cast<bool>(scalar_rule_); }

  CMatrix operator()(const GroupPoint& x, const DualPoint& xi) const;
  // Requires scalar().
  cplx scalar_value(const GroupPoint& x, const DualPoint& xi) const;

  // Singular values of sigma(x, xi) with their multiplicity inside the matrix
  // (a scalar symbol yields one value of multiplicity d).
  std::vector<std::pair<double, int>> singular_values(const GroupPoint& x,
                                                      const DualPoint& xi) const;

  std::optional<double> declared_order() const noexcept { return declared_order_; }
  std::optional<std::pair<double, double>> declared_rho_delta() const noexcept {
    return rho_delta_;
  }
  // Band degree of the x-dependence: 0 for invariant symbols, nullopt if an
  // x-dependent rule never declared one.
  std::optional<double> x_degree() const noexcept { return x_degree_; }
  const std::vector<SeparableTerm>& expansion() const noexcept { return expansion_; }

  MatrixSymbol with_order(double m, std::optional<std::pair<double, double>> rho_delta = {}) const;
  MatrixSymbol with_x_degree(double degree) const;
  MatrixSymbol with_label(std::string label) const;

 private:
  friend MatrixSymbol builtin_coefficient(const BandLimitedFunction& c, const MatrixSymbol& base);
  friend MatrixSymbol symbol_sum(const MatrixSymbol& a, const MatrixSymbol& b);

  MatrixSymbol(GroupDescriptor g) : group_(g) {}

  GroupDescriptor group_;
  MatrixRule matrix_rule_;
  ScalarRule scalar_rule_;
  bool invariant_ = true;
  std::optional<double> declared_order_;
  std::optional<std::pair<double, double>> rho_delta_;
  std::optional<double> x_degree_{0.0};
  std::vector<SeparableTerm> expansion_;
  std::string label_;
};

// <xi>^m I, the Bessel potential (1 + L)^{m/2}.
MatrixSymbol builtin_bessel(const GroupDescriptor& g, double m);

// <xi>^{-kappa} on D = {2^k e_1 : k >= 1}, zero elsewhere on Z^n.
MatrixSymbol builtin_dyadic_atypical(int n, double kappa);
bool in_dyadic_set(const DualPoint& xi);

MatrixSymbol builtin_multiplier(const GroupDescriptor& g,
                                std::function<CMatrix(const DualPoint&)> f, std::string label);
MatrixSymbol builtin_scalar_multiplier(const GroupDescriptor& g,
                                       std::function<cplx(const DualPoint&)> f, std::string label);
MatrixSymbol builtin_identity(const GroupDescriptor& g);
MatrixSymbol builtin_zero(const GroupDescriptor& g);

MatrixSymbol builtin_coefficient(const BandLimitedFunction& c, const MatrixSymbol& base);
MatrixSymbol symbol_sum(const MatrixSymbol& a, const MatrixSymbol& b);

// Forward difference Delta^alpha in the Z^n index, x held fixed.
MatrixSymbol difference_op_torus(const MatrixSymbol& s, const std::vector<int>& alpha);

struct OrderFit {
  double exponent = 0.0;
  double residual = 0.0;  // RMS of the log-log residuals
  std::size_t points = 0;
};

// Least-squares exponent e in ||Delta^alpha sigma(x, xi)||_op <~ <xi>^e over
// the window, max over the sample points. Exact zeros are skipped, so a
// symbol supported on a thin set is fitted on its support.
OrderFit estimate_symbol_order(const MatrixSymbol& s, const std::vector<int>& alpha,
                               const TruncationWindow& window,
                               const std::vector<GroupPoint>& samples = {});

// Per-matrix Schatten (quasi-)norm ||M||_{S_p} = Tr[|M|^p]^{1/p}.
double matrix_schatten_norm(const CMatrix& m, double p);

// (sum_xi d_xi ||sigma(x, xi)||_{S_p}^p)^{1/p}
double symbol_schatten_dual_norm(const MatrixSymbol& s, const GroupPoint& x, double p,
                                 const TruncationWindow& window);
// (sum_xi d_xi^{p(2/p - 1/2)} ||sigma(x, xi)||_HS^p)^{1/p}
double symbol_lp_dual_norm(const MatrixSymbol& s, const GroupPoint& x, double p,
                           const TruncationWindow& window);

enum class NormKind { schatten_dual, lp_dual, mixed_schatten, mixed_lp, regularity };

struct SymbolNormReport {
  NormKind kind = NormKind::schatten_dual;
  double p1 = 0.0;
  double p2 = 0.0;
  double lambda = 0.0;
  int grid_resolution = 0;
  double value = 0.0;
  std::vector<std::pair<double, double>> per_shell;  // (cutoff, partial value)
};

std::string to_string(NormKind kind);

// (int_G ||sigma(x, .)||_{S_p2(G^)}^{p1} dx)^{1/p1}. Invariant symbols are
// evaluated once, the x-integrand being constant.
SymbolNormReport symbol_mixed_norm(const MatrixSymbol& s, double p1, double p2,
                                   const TruncationWindow& window, const QuadratureGrid& grid);
// Same with the l^p(G^) inner norm: ||sigma||_{L^p1(G, l^p2(G^))}.
SymbolNormReport symbol_mixed_lp_norm(const MatrixSymbol& s, double p1, double p2,
                                      const TruncationWindow& window, const QuadratureGrid& grid);

// Shell cutoffs used in per_shell reports: powers of two below lambda, then lambda.
std::vector<double> shell_cutoffs(double lambda);

}  // namespace psido

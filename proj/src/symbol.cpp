#include "psido/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "psido/errors.hpp"

namespace psido {

// ---------------------------------------------------------------------------
// BandLimitedFunction

BandLimitedFunction::BandLimitedFunction(GroupDescriptor group, std::vector<BandLimitedTerm> terms)
    : group_(group), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.row < 0 || t.col < 0 || t.row >= t.rep.dim || t.col >= t.rep.dim)
      throw ShapeError("band-limited term index outside representation");
    if (group_.is_torus() != (t.rep.index.size() == static_cast<std::size_t>(group_.dimension()) &&
                              t.rep.dim == 1))
      throw TypeMismatchError("band-limited term does not match group " + group_.name());
  }
}

BandLimitedFunction BandLimitedFunction::constant(const GroupDescriptor& g, cplx value) {
  return BandLimitedFunction(g, {{trivial_dual(g), 0, 0, value}});
}

BandLimitedFunction BandLimitedFunction::character(const GroupDescriptor& g, std::vector<int> k,
                                                   cplx c) {
  if (!g.is_torus()) throw UnsupportedGroupError("characters are torus functions");
  return BandLimitedFunction(g, {{torus_dual(std::move(k)), 0, 0, c}});
}

cplx BandLimitedFunction::operator()(const GroupPoint& x) const {
  cplx sum = 0.0;
  for (const auto& t : terms_) sum += t.coefficient * rep_matrix(group_, t.rep, x)(t.row, t.col);
  return sum;
}

double BandLimitedFunction::degree() const {
  double d = 0.0;
  for (const auto& t : terms_) d = std::max(d, band_degree(group_, t.rep));
  return d;
}

BandLimitedFunction BandLimitedFunction::bessel_lifted(double power) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= std::pow(t.rep.bracket(), power);
  return BandLimitedFunction(group_, std::move(terms));
}

// ---------------------------------------------------------------------------
// MatrixSymbol

MatrixSymbol MatrixSymbol::from_matrix_rule(GroupDescriptor g, MatrixRule rule, bool invariant,
                                            std::string label) {
  MatrixSymbol s(g);
  s.matrix_rule_ = std::move(rule);
  s.invariant_ = invariant;
  s.x_degree_ = invariant ? std::optional<double>(0.0) : std::nullopt;
  s.label_ = std::move(label);
  return s;
}

MatrixSymbol MatrixSymbol::from_scalar_rule(GroupDescriptor g, ScalarRule rule, bool invariant,
                                            std::string label) {
  MatrixSymbol s(g);
  s.scalar_rule_ = std::move(rule);
  s.invariant_ = invariant;
  s.x_degree_ = invariant ? std::optional<double>(0.0) : std::nullopt;
  s.label_ = std::move(label);
  return s;
}

CMatrix MatrixSymbol::operator()(const GroupPoint& x, const DualPoint& xi) const {
  if (scalar_rule_) return scalar_rule_(x, xi) * CMatrix::Identity(xi.dim, xi.dim);
  CMatrix m = matrix_rule_(x, xi);
  if (m.rows() != xi.dim || m.cols() != xi.dim)
    throw ShapeError("symbol '" + label_ + "' returned a " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + " matrix for a dual point of dimension " +
                     std::to_string(xi.dim));
  return m;
}

cplx MatrixSymbol::scalar_value(const GroupPoint& x, const DualPoint& xi) const {
  if (!scalar_rule_) throw ContractError("symbol '" + label_ + "' is not scalar");
  return scalar_rule_(x, xi);
}

std::vector<std::pair<double, int>> MatrixSymbol::singular_values(const GroupPoint& x,
                                                                  const DualPoint& xi) const {
  if (scalar_rule_) return {{std::abs(scalar_rule_(x, xi)), xi.dim}};
  const CMatrix m = (*this)(x, xi);
  if (m.rows() == 1) return {{std::abs(m(0, 0)), 1}};
  Eigen::JacobiSVD<CMatrix> svd(m);
  std::vector<std::pair<double, int>> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    out.emplace_back(svd.singularValues()(i), 1);
  return out;
}

MatrixSymbol MatrixSymbol::with_order(double m,
                                      std::optional<std::pair<double, double>> rho_delta) const {
  MatrixSymbol s = *this;
  s.declared_order_ = m;
  s.rho_delta_ = rho_delta;
  return s;
}

MatrixSymbol MatrixSymbol::with_x_degree(double degree) const {
  MatrixSymbol s = *this;
  s.x_degree_ = degree;
  return s;
}

MatrixSymbol MatrixSymbol::with_label(std::string label) const {
  MatrixSymbol s = *this;
  s.label_ = std::move(label);
  return s;
}

// ---------------------------------------------------------------------------
// Builtins

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Terms of a symbol as a separable expansion; invariant symbols are one term
// with the constant coefficient 1.
std::vector<SeparableTerm> as_expansion(const MatrixSymbol& s) {
  if (s.invariant())
    return {{BandLimitedFunction::constant(s.group(), 1.0), std::make_shared<const MatrixSymbol>(s)}};
  return s.expansion();
}

}  // namespace

MatrixSymbol builtin_bessel(const GroupDescriptor& g, double m) {
  return MatrixSymbol::from_scalar_rule(
             g, [m](const GroupPoint&, const DualPoint& xi) { return cplx(std::pow(1.0 + xi.eigenvalue, m / 2.0)); },
             true, "bessel{" + format_number(m) + "}")
      .with_order(m, std::make_pair(1.0, 0.0));
}

bool in_dyadic_set(const DualPoint& xi) {
  if (xi.index.empty()) return false;
  const int k1 = xi.index[0];
  if (k1 < 2 || (k1 & (k1 - 1)) != 0) return false;
  return std::all_of(xi.index.begin() + 1, xi.index.end(), [](int k) { return k == 0; });
}

MatrixSymbol builtin_dyadic_atypical(int n, double kappa) {
  if (!(kappa > 0.0)) throw ParameterError("dyadic symbol needs kappa > 0");
  return MatrixSymbol::from_scalar_rule(
             GroupDescriptor::torus(n),
             [kappa](const GroupPoint&, const DualPoint& xi) {
               return in_dyadic_set(xi) ? cplx(std::pow(1.0 + xi.eigenvalue, -kappa / 2.0)) : cplx(0.0);
             },
             true, "dyadic{" + std::to_string(n) + "," + format_number(kappa) + "}")
      .with_order(-kappa, std::make_pair(0.0, 0.0));
}

MatrixSymbol builtin_multiplier(const GroupDescriptor& g, std::function<CMatrix(const DualPoint&)> f,
                                std::string label) {
  return MatrixSymbol::from_matrix_rule(
      g, [f = std::move(f)](const GroupPoint&, const DualPoint& xi) { return f(xi); }, true,
      "multiplier:" + label);
}

MatrixSymbol builtin_scalar_multiplier(const GroupDescriptor& g, std::function<cplx(const DualPoint&)> f,
                                       std::string label) {
  return MatrixSymbol::from_scalar_rule(
      g, [f = std::move(f)](const GroupPoint&, const DualPoint& xi) { return f(xi); }, true,
      "multiplier:" + label);
}

MatrixSymbol builtin_identity(const GroupDescriptor& g) {
  return builtin_scalar_multiplier(g, [](const DualPoint&) { return cplx(1.0); }, "identity")
      .with_order(0.0, std::make_pair(1.0, 0.0));
}

MatrixSymbol builtin_zero(const GroupDescriptor& g) {
  return builtin_scalar_multiplier(g, [](const DualPoint&) { return cplx(0.0); }, "zero")
      .with_order(0.0);
}

MatrixSymbol builtin_coefficient(const BandLimitedFunction& c, const MatrixSymbol& base) {
  if (!(c.group() == base.group())) throw TypeMismatchError("coefficient and base live on different groups");
  if (!base.invariant()) throw ContractError("coefficient base symbol must be invariant");
  const auto base_ptr = std::make_shared<const MatrixSymbol>(base);
  MatrixSymbol s(base.group());
  if (base.scalar()) {
    s.scalar_rule_ = [c, base_ptr](const GroupPoint& x, const DualPoint& xi) {
      return c(x) * base_ptr->scalar_value(x, xi);
    };
  } else {
    s.matrix_rule_ = [c, base_ptr](const GroupPoint& x, const DualPoint& xi) -> CMatrix {
      return c(x) * (*base_ptr)(x, xi);
    };
  }
  s.invariant_ = false;
  s.x_degree_ = c.degree();
  s.declared_order_ = base.declared_order();
  s.rho_delta_ = base.declared_rho_delta();
  s.expansion_ = {{c, base_ptr}};
  s.label_ = "coeff:" + base.label();
  return s;
}

MatrixSymbol symbol_sum(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (!(a.group() == b.group())) throw TypeMismatchError("cannot add symbols on different groups");
  MatrixSymbol s(a.group());
  const auto pa = std::make_shared<const MatrixSymbol>(a);
  const auto pb = std::make_shared<const MatrixSymbol>(b);
  if (a.scalar() && b.scalar()) {
    s.scalar_rule_ = [pa, pb](const GroupPoint& x, const DualPoint& xi) {
      return pa->scalar_value(x, xi) + pb->scalar_value(x, xi);
    };
  } else {
    s.matrix_rule_ = [pa, pb](const GroupPoint& x, const DualPoint& xi) -> CMatrix {
      return (*pa)(x, xi) + (*pb)(x, xi);
    };
  }
  s.invariant_ = a.invariant() && b.invariant();
  if (a.x_degree() && b.x_degree()) s.x_degree_ = std::max(*a.x_degree(), *b.x_degree());
  else s.x_degree_.reset();
  if (!s.invariant_) {
    const bool a_ok = a.invariant() || !a.expansion().empty();
    const bool b_ok = b.invariant() || !b.expansion().empty();
    if (a_ok && b_ok) {
      s.expansion_ = as_expansion(a);
      const auto tail = as_expansion(b);
      s.expansion_.insert(s.expansion_.end(), tail.begin(), tail.end());
    }
  }
  if (a.declared_order() && b.declared_order())
    s.declared_order_ = std::max(*a.declared_order(), *b.declared_order());
  s.label_ = a.label() + "+" + b.label();
  return s;
}

MatrixSymbol difference_op_torus(const MatrixSymbol& s, const std::vector<int>& alpha) {
  const auto& g = s.group();
  if (!g.is_torus()) throw UnsupportedGroupError("difference operators are only realised on the torus");
  if (static_cast<int>(alpha.size()) != g.dimension())
    throw ParameterError("multi-index length does not match torus dimension");
  if (std::any_of(alpha.begin(), alpha.end(), [](int a) { return a < 0; }))
    throw ParameterError("multi-index entries must be non-negative");

  // Expand prod_j (E_j - 1)^{alpha_j} into (shift, signed binomial weight).
  std::vector<std::pair<std::vector<int>, double>> stencil{{std::vector<int>(alpha.size(), 0), 1.0}};
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    std::vector<std::pair<std::vector<int>, double>> next;
    double binom = 1.0;
    for (int b = 0; b <= alpha[j]; ++b) {
      const double sign = ((alpha[j] - b) % 2 == 0) ? 1.0 : -1.0;
      for (const auto& [shift, w] : stencil) {
        auto sh = shift;
        sh[j] += b;
        next.emplace_back(std::move(sh), w * sign * binom);
      }
      binom = binom * (alpha[j] - b) / (b + 1);
    }
    stencil = std::move(next);
  }

  std::string label = "Delta^(";
  for (std::size_t j = 0; j < alpha.size(); ++j) label += (j ? "," : "") + std::to_string(alpha[j]);
  label += ")" + s.label();

  const auto base = std::make_shared<const MatrixSymbol>(s);
  auto shifted = [stencil](const DualPoint& xi, auto&& eval) {
    using R = decltype(eval(xi));
    R acc{};
    bool first = true;
    for (const auto& [shift, w] : stencil) {
      auto k = xi.index;
      for (std::size_t j = 0; j < k.size(); ++j) k[j] += shift[j];
      R v = eval(torus_dual(std::move(k)));
      if (first) {
        acc = w * v;
        first = false;
      } else {
        acc += w * v;
      }
    }
    return acc;
  };

  MatrixSymbol out = s.scalar()
      ? MatrixSymbol::from_scalar_rule(
            g,
            [base, shifted](const GroupPoint& x, const DualPoint& xi) -> cplx {
              return shifted(xi, [&](const DualPoint& eta) { return base->scalar_value(x, eta); });
            },
            s.invariant(), label)
      : MatrixSymbol::from_matrix_rule(
            g,
            [base, shifted](const GroupPoint& x, const DualPoint& xi) -> CMatrix {
              return shifted(xi, [&](const DualPoint& eta) -> CMatrix { return (*base)(x, eta); });
            },
            s.invariant(), label);
  if (s.x_degree()) out = out.with_x_degree(*s.x_degree());
  return out;
}

// ---------------------------------------------------------------------------
// Order estimation

OrderFit estimate_symbol_order(const MatrixSymbol& s, const std::vector<int>& alpha,
                               const TruncationWindow& window, const std::vector<GroupPoint>& samples) {
  if (window.size() == 0) throw EmptyWindowError("order estimate needs a non-empty window");
  const bool nonzero_alpha = std::any_of(alpha.begin(), alpha.end(), [](int a) { return a != 0; });
  const MatrixSymbol target = nonzero_alpha ? difference_op_torus(s, alpha) : s;

  std::vector<GroupPoint> points = samples;
  if (points.empty() || s.invariant()) points = {identity_point(s.group())};

  std::vector<double> norms;
  std::vector<double> logs;
  norms.reserve(window.size());
  for (const auto& xi : window.duals()) {
    double v = 0.0;
    for (const auto& x : points) {
      for (const auto& [sv, mult] : target.singular_values(x, xi)) v = std::max(v, sv);
    }
    norms.push_back(v);
  }
  const double peak = *std::max_element(norms.begin(), norms.end());
  if (!(peak > 0.0)) throw UndefinedFitError("symbol vanishes on the whole window");

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (norms[i] > peak * 1e-13) {
      xs.push_back(std::log(window.duals()[i].bracket()));
      ys.push_back(std::log(norms[i]));
    }
  }
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= static_cast<double>(xs.size());
  ybar /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
  }
  if (!(sxx > 1e-300)) throw UndefinedFitError("fewer than two distinct brackets in the support");
  OrderFit fit;
  fit.exponent = sxy / sxx;
  fit.points = xs.size();
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (ybar + fit.exponent * (xs[i] - xbar));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(xs.size()));
  return fit;
}

// ---------------------------------------------------------------------------
// Norms

double matrix_schatten_norm(const CMatrix& m, double p) {
  if (!(p > 0.0)) throw ParameterError("Schatten exponent must be > 0");
  Eigen::JacobiSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (std::isinf(p)) return sv.size() ? sv.maxCoeff() : 0.0;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) sum += std::pow(sv(i), p);
  return std::pow(sum, 1.0 / p);
}

namespace {

void check_exponent(double p) {
  if (!(p > 0.0)) throw ParameterError("norm exponent must be > 0");
}

// d_xi ||sigma(x, xi)||_{S_p}^p
double schatten_term(const MatrixSymbol& s, const GroupPoint& x, const DualPoint& xi, double p) {
  double sum = 0.0;
  for (const auto& [sv, mult] : s.singular_values(x, xi)) sum += mult * std::pow(sv, p);
  return xi.dim * sum;
}

// d_xi^{p(2/p - 1/2)} ||sigma(x, xi)||_HS^p
double lp_term(const MatrixSymbol& s, const GroupPoint& x, const DualPoint& xi, double p) {
  double hs2 = 0.0;
  if (s.scalar()) {
    hs2 = xi.dim * std::norm(s.scalar_value(x, xi));
  } else {
    hs2 = s(x, xi).squaredNorm();
  }
  return std::pow(static_cast<double>(xi.dim), p * (2.0 / p - 0.5)) * std::pow(hs2, p / 2.0);
}

template <typename Term>
double dual_norm(const MatrixSymbol& s, const GroupPoint& x, double p, const TruncationWindow& window,
                 Term term) {
  check_exponent(p);
  if (window.size() == 0) throw EmptyWindowError("empty window");
  double sum = 0.0;
  for (const auto& xi : window.duals()) sum += term(s, x, xi, p);
  return std::pow(sum, 1.0 / p);
}

template <typename Term>
SymbolNormReport mixed_norm(const MatrixSymbol& s, double p1, double p2, const TruncationWindow& window,
                            const QuadratureGrid& grid, NormKind kind, Term term) {
  check_exponent(p1);
  check_exponent(p2);
  if (window.size() == 0) throw EmptyWindowError("empty window");
  if (grid.size() == 0) throw ConfigError("empty quadrature grid");
  if (!(grid.group == s.group())) throw TypeMismatchError("grid and symbol live on different groups");

  const auto cutoffs = shell_cutoffs(window.lambda());
  const std::vector<GroupPoint> single{identity_point(s.group())};
  const auto& nodes = s.invariant() ? single : grid.nodes;

  // accum[c] = sum over nodes of w * (partial inner sum at cutoff c)^{p1/p2}
  std::vector<double> accum(cutoffs.size(), 0.0);
  std::vector<double> inner(cutoffs.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    std::fill(inner.begin(), inner.end(), 0.0);
    for (const auto& xi : window.duals()) {
      const double t = term(s, nodes[n], xi, p2);
      const double b = xi.bracket();
      for (std::size_t c = 0; c < cutoffs.size(); ++c)
        if (b <= cutoffs[c] * (1.0 + 1e-12)) inner[c] += t;
    }
    const double w = s.invariant() ? 1.0 : grid.weights[n];
    for (std::size_t c = 0; c < cutoffs.size(); ++c) accum[c] += w * std::pow(inner[c], p1 / p2);
  }

  SymbolNormReport report;
  report.kind = kind;
  report.p1 = p1;
  report.p2 = p2;
  report.lambda = window.lambda();
  report.grid_resolution = grid.resolution;
  for (std::size_t c = 0; c < cutoffs.size(); ++c) {
    const double v = s.invariant() ? std::pow(inner[c], 1.0 / p2) : std::pow(accum[c], 1.0 / p1);
    report.per_shell.emplace_back(cutoffs[c], v);
  }
  report.value = report.per_shell.back().second;
  return report;
}

}  // namespace

double symbol_schatten_dual_norm(const MatrixSymbol& s, const GroupPoint& x, double p,
                                 const TruncationWindow& window) {
  return dual_norm(s, x, p, window, schatten_term);
}

double symbol_lp_dual_norm(const MatrixSymbol& s, const GroupPoint& x, double p,
                           const TruncationWindow& window) {
  return dual_norm(s, x, p, window, lp_term);
}

SymbolNormReport symbol_mixed_norm(const MatrixSymbol& s, double p1, double p2,
                                   const TruncationWindow& window, const QuadratureGrid& grid) {
  return mixed_norm(s, p1, p2, window, grid, NormKind::mixed_schatten, schatten_term);
}

SymbolNormReport symbol_mixed_lp_norm(const MatrixSymbol& s, double p1, double p2,
                                      const TruncationWindow& window, const QuadratureGrid& grid) {
  return mixed_norm(s, p1, p2, window, grid, NormKind::mixed_lp, lp_term);
}

std::vector<double> shell_cutoffs(double lambda) {
  std::vector<double> out;
  for (double c = 1.0; c < lambda; c *= 2.0) out.push_back(c);
  out.push_back(lambda);
  return out;
}

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::schatten_dual: return "schatten_dual";
    case NormKind::lp_dual: return "lp_dual";
    case NormKind::mixed_schatten: return "mixed";
    case NormKind::mixed_lp: return "mixed_lp";
    case NormKind::regularity: return "regularity";
  }
  return "unknown";
}

}  // namespace psido

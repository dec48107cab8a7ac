#include "psido/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "psido/errors.hpp"
#include "psido/quantizer.hpp"

namespace psido {

namespace {

using nlohmann::json;

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void check_r(double r) {
  if (!(r > 0.0) || std::isinf(r)) throw ParameterError("Schatten exponent must be finite and > 0");
}

// d_xi sum_j s_j^r over the singular values of sigma(x, xi).
double schatten_power(const MatrixSymbol& s, const GroupPoint& x, const DualPoint& xi, double r) {
  double sum = 0.0;
  for (const auto& [sv, mult] : s.singular_values(x, xi))
    if (sv > 0.0) sum += mult * std::pow(sv, r);
  return xi.dim * sum;
}

QuadratureGrid default_x_grid(const MatrixSymbol& s) {
  const double deg = s.x_degree().value_or(4.0);
  return haar_quadrature(s.group(), resolution_for_degree(std::max(2.0, 2.0 * deg)));
}

CriterionVerdict from_bool(bool ok) { return ok ? CriterionVerdict::satisfied : CriterionVerdict::violated; }

// x-lifted symbol (1 + L_x)^{N/2} sigma from the declared expansion.
MatrixSymbol lift_in_x(const MatrixSymbol& s, double N) {
  if (s.invariant()) return s;
  if (s.expansion().empty())
    throw ContractError("regularity criterion needs a declared band-limited x-expansion");
  std::optional<MatrixSymbol> out;
  for (const auto& term : s.expansion()) {
    MatrixSymbol t = builtin_coefficient(term.coefficient.bessel_lifted(N), *term.base);
    out = out ? symbol_sum(*out, t) : t;
  }
  return out->with_label("lift{" + std::to_string(N) + "}:" + s.label());
}

}  // namespace

std::string to_string(CriterionVerdict v) {
  switch (v) {
    case CriterionVerdict::satisfied: return "satisfied";
    case CriterionVerdict::violated: return "violated";
    case CriterionVerdict::inconclusive: break;
  }
  return "inconclusive";
}

json CriterionOutcome::to_json() const {
  return {{"criterion_id", id},
          {"inputs", inputs},
          {"lhs", opt(lhs)},
          {"rhs", opt(rhs)},
          {"verdict", to_string(verdict)},
          {"evidence", evidence}};
}

bool order_threshold(double m, int n, double r) {
  if (n < 1) throw ParameterError("dimension must be positive");
  if (!(r > 0.0)) throw ParameterError("Schatten exponent must be > 0");
  return m < -static_cast<double>(n) / r;
}

// ---------------------------------------------------------------------------
// Conditions (3) and (4)

SchattenReport condition3_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const VerdictThresholds& thresholds) {
  check_r(r);
  if (s.invariant()) {
    // ||  |sigma|^{r/2} ||_HS^2 = sum_j s_j^r
    const GroupPoint origin = identity_point(s.group());
    auto partials = dual_series_partials(s.group(), ladder,
                                         [&](const DualPoint& xi) { return schatten_power(s, origin, xi, r); });
    return make_report(r, std::move(partials), "condition3:invariant_symbol", thresholds);
  }
  Partials partials;
  for (double lam : ladder) {
    const TruncationWindow window(s.group(), lam);
    const OperatorMatrix a = assemble_matrix(s, window);
    Eigen::BDCSVD<CMatrix> svd(a.entries, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd powered = svd.singularValues().array().pow(r / 2.0).matrix();
    OperatorMatrix root{window, svd.matrixV() * powered.cast<cplx>().asDiagonal() * svd.matrixV().adjoint(),
                        "|A|^{r/2}"};
    const QuadratureGrid grid =
        haar_quadrature(s.group(), resolution_for_degree(2.0 * window.degree()));
    partials.emplace_back(lam, extracted_symbol_hs_mass(root, grid));
  }
  return make_report(r, std::move(partials), "condition3:extracted_symbol", thresholds);
}

SchattenReport condition4_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const QuadratureGrid& grid, const VerdictThresholds& thresholds) {
  check_r(r);
  if (s.invariant()) {
    const GroupPoint origin = identity_point(s.group());
    auto partials = dual_series_partials(s.group(), ladder,
                                         [&](const DualPoint& xi) { return schatten_power(s, origin, xi, r); });
    return make_report(r, std::move(partials), "condition4:invariant_symbol", thresholds);
  }
  if (!(grid.group == s.group())) throw TypeMismatchError("grid and symbol live on different groups");
  auto partials = dual_series_partials(s.group(), ladder, [&](const DualPoint& xi) {
    double sum = 0.0;
    for (std::size_t n = 0; n < grid.size(); ++n) sum += grid.weights[n] * schatten_power(s, grid.nodes[n], xi, r);
    return sum;
  });
  auto rep = make_report(r, std::move(partials), "condition4:quadrature", thresholds);
  rep.source += "(R=" + std::to_string(grid.resolution) + ")";
  return rep;
}

SchattenReport condition4_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const VerdictThresholds& thresholds) {
  return condition4_sum(s, r, ladder, s.invariant() ? haar_quadrature(s.group(), 2) : default_x_grid(s),
                        thresholds);
}

// ---------------------------------------------------------------------------
// Russo bound

CriterionOutcome russo_check(const MatrixSymbol& s, double p, const TruncationWindow& window) {
  if (!(p > 1.0 && p < 2.0)) throw ParameterError("Russo check needs 1 < p < 2");
  const double pp = p / (p - 1.0);
  const OperatorMatrix a = assemble_matrix(s, window);
  const double lhs = schatten_norm(singular_values(a), pp);
  const QuadratureGrid grid = s.invariant() ? haar_quadrature(s.group(), 2) : assembly_grid(s, window);
  const double rhs = symbol_mixed_lp_norm(s, p, p, window, grid).value;

  const double scale = std::max(1.0, a.entries.cwiseAbs().maxCoeff());
  const double asym = (a.entries - a.entries.adjoint()).cwiseAbs().maxCoeff();
  const bool self_adjoint = asym <= 1e-12 * scale;

  CriterionOutcome out;
  out.id = "russo";
  out.inputs = {{"symbol", s.label()}, {"group", s.group().name()}, {"p", p}, {"p_dual", pp},
                {"lambda", window.lambda()}, {"grid_resolution", grid.resolution}};
  out.lhs = lhs;
  out.rhs = rhs;
  out.evidence = {{"self_adjoint", self_adjoint},
                  {"asymmetry", asym},
                  {"ratio", rhs > 0.0 ? json(lhs / rhs) : json(nullptr)},
                  {"constant", 1.0},
                  {"slack", 1e-9}};
  out.verdict = self_adjoint ? from_bool(lhs <= rhs + 1e-9) : CriterionVerdict::inconclusive;
  return out;
}

CriterionOutcome russo_random_suite(int trials, double p, double lambda, std::uint64_t seed) {
  if (trials < 1) throw ParameterError("need at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  CriterionOutcome out;
  out.id = "russo_random_suite";
  out.inputs = {{"trials", trials}, {"p", p}, {"lambda", lambda}, {"seed", seed}, {"envelope", "<k>^-2"}};
  json runs = json::array();
  int violated = 0, undecided = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto g = GroupDescriptor::torus(t % 2 == 0 ? 1 : 2);
    const TruncationWindow window(g, lambda);
    auto table = std::make_shared<std::map<std::vector<int>, double>>();
    for (const auto& xi : window.duals()) (*table)[xi.index] = unit(rng) / (1.0 + xi.eigenvalue);
    const auto s = builtin_scalar_multiplier(
        g,
        [table](const DualPoint& xi) {
          const auto it = table->find(xi.index);
          return cplx(it == table->end() ? 0.0 : it->second);
        },
        "random" + std::to_string(t));
    const auto one = russo_check(s, p, window);
    if (one.verdict == CriterionVerdict::violated) ++violated;
    if (one.verdict == CriterionVerdict::inconclusive) ++undecided;
    if (*one.rhs > 0.0) worst = std::max(worst, *one.lhs / *one.rhs);
    runs.push_back({{"trial", t}, {"group", g.name()}, {"lhs", *one.lhs}, {"rhs", *one.rhs},
                    {"verdict", to_string(one.verdict)}});
  }
  out.lhs = worst;
  out.rhs = 1.0;
  out.evidence = {{"worst_ratio", worst}, {"violations", violated}, {"inconclusive", undecided}, {"trials", runs}};
  out.verdict = violated ? CriterionVerdict::violated
                         : (undecided ? CriterionVerdict::inconclusive : CriterionVerdict::satisfied);
  return out;
}

// ---------------------------------------------------------------------------
// Regularity criterion

CriterionOutcome regularity_criterion(const MatrixSymbol& s, double N, double p, const std::vector<double>& ladder,
                                      const VerdictThresholds& thresholds) {
  const int n = s.group().dimension();
  if (!(N > n)) throw ParameterError("regularity criterion needs N > dim G");
  if (!(p >= 1.0) || std::isinf(p)) throw ParameterError("regularity criterion needs finite p >= 1");
  const MatrixSymbol lifted = lift_in_x(s, N);
  const QuadratureGrid grid = s.invariant()
      ? haar_quadrature(s.group(), 2)
      : haar_quadrature(s.group(), resolution_for_degree(4.0 * lifted.x_degree().value_or(0.0) + 2.0));

  Partials values;
  for (double lam : ladder) {
    const TruncationWindow window(s.group(), lam);
    values.emplace_back(lam, symbol_mixed_norm(lifted, 1.0, p, window, grid).value);
  }
  const SchattenReport value_report = make_report(p, values, "regularity_value", thresholds);
  const SchattenReport op_report = operator_schatten_ladder(s, p, ladder, thresholds);

  CriterionOutcome out;
  out.id = "regularity";
  out.inputs = {{"symbol", s.label()}, {"group", s.group().name()}, {"N", N}, {"p", p}, {"ladder", ladder},
                {"grid_resolution", grid.resolution}};
  out.lhs = op_report.partials.back().second;
  out.rhs = value_report.partials.back().second;
  const bool hypothesis = value_report.fit.verdict == Verdict::convergent;
  const bool conclusion = op_report.fit.verdict == Verdict::convergent;
  std::string note;
  if (!hypothesis) {
    out.verdict = CriterionVerdict::inconclusive;
    note = "hypothesis not established on the ladder";
  } else if (op_report.fit.verdict == Verdict::divergent) {
    out.verdict = CriterionVerdict::violated;
    note = "finite regularity value but divergent Schatten partials";
  } else if (conclusion) {
    out.verdict = CriterionVerdict::satisfied;
    note = "finite regularity value and convergent Schatten partials";
  } else {
    out.verdict = CriterionVerdict::inconclusive;
    note = "Schatten partials undecided";
  }
  out.evidence = {{"value", value_report.to_json()}, {"operator", op_report.to_json()}, {"note", note}};
  return out;
}

// ---------------------------------------------------------------------------
// Co-sphere average

cplx cosphere_average(const PrincipalSymbol& principal, int n, int sphere_resolution, int x_resolution) {
  if (n < 1 || n > 3) throw UnsupportedGroupError("co-sphere average is implemented for tori of dimension 1..3");
  if (sphere_resolution < 2) throw ParameterError("sphere resolution must be >= 2");

  std::vector<std::vector<double>> dirs;
  std::vector<double> dir_w;
  if (n == 1) {
    dirs = {{-1.0}, {1.0}};
    dir_w = {0.5, 0.5};
  } else if (n == 2) {
    const double h = 1.0 / sphere_resolution;
    for (int j = 0; j < sphere_resolution; ++j) {
      const double t = 2.0 * std::numbers::pi * j / sphere_resolution;
      dirs.push_back({std::cos(t), std::sin(t)});
      dir_w.push_back(h);
    }
  } else {
    const auto gl = gauss_legendre((sphere_resolution + 1) / 2);
    for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
      const double c = gl.nodes[a];
      const double st = std::sqrt(std::max(0.0, 1.0 - c * c));
      for (int j = 0; j < sphere_resolution; ++j) {
        const double ph = 2.0 * std::numbers::pi * j / sphere_resolution;
        dirs.push_back({st * std::cos(ph), st * std::sin(ph), c});
        dir_w.push_back(0.5 * gl.weights[a] / sphere_resolution);
      }
    }
  }

  const QuadratureGrid grid = haar_quadrature(GroupDescriptor::torus(n), x_resolution);
  cplx total = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cplx inner = 0.0;
    for (std::size_t j = 0; j < dirs.size(); ++j) inner += dir_w[j] * principal(grid.nodes[k], dirs[j]);
    total += grid.weights[k] * inner;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Ellipticity

EllipticResult elliptic_flag(const MatrixSymbol& s, const TruncationWindow& window, double tolerance) {
  if (!s.declared_order()) throw ContractError("elliptic_flag needs a declared order");
  if (!(s.group() == window.group())) throw TypeMismatchError("symbol and window live on different groups");
  const double m = *s.declared_order();
  std::vector<GroupPoint> points{identity_point(s.group())};
  if (!s.invariant()) points = default_x_grid(s).nodes;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& x : points) {
    for (const auto& xi : window.duals()) {
      double smin = std::numeric_limits<double>::infinity();
      for (const auto& [sv, mult] : s.singular_values(x, xi)) smin = std::min(smin, sv);
      margin = std::min(margin, smin * std::pow(xi.bracket(), -m));
    }
  }
  return {margin > tolerance, margin};
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<CriterionOutcome> theorem_consistency(const GroupDescriptor& g, const std::vector<double>& rs,
                                                  const std::vector<double>& ladder, double offset,
                                                  const VerdictThresholds& thresholds) {
  const int n = g.dimension();
  std::vector<CriterionOutcome> out;
  for (double r : rs) {
    for (double sign : {-1.0, 1.0}) {
      const double m = -static_cast<double>(n) / r + sign * offset;
      const auto s = builtin_bessel(g, m);
      const auto c3 = condition3_sum(s, r, ladder, thresholds);
      const auto c4 = condition4_sum(s, r, ladder, thresholds);
      const auto lem = lemma_series(g, -m * r, ladder, thresholds);
      const bool expected = order_threshold(m, n, r);
      const Verdict want = expected ? Verdict::convergent : Verdict::divergent;

      CriterionOutcome o;
      o.id = "theorem_consistency";
      o.inputs = {{"group", g.name()}, {"n", n}, {"m", m}, {"r", r}, {"ladder", ladder}};
      o.evidence = {{"order_threshold", expected},
                    {"condition3", c3.to_json()},
                    {"condition4", c4.to_json()},
                    {"lemma_series", lem.to_json()}};
      const std::vector<Verdict> got{c3.fit.verdict, c4.fit.verdict, lem.fit.verdict};
      if (std::any_of(got.begin(), got.end(), [](Verdict v) { return v == Verdict::inconclusive; }))
        o.verdict = CriterionVerdict::inconclusive;
      else
        o.verdict = from_bool(std::all_of(got.begin(), got.end(), [&](Verdict v) { return v == want; }));
      out.push_back(std::move(o));
    }
  }
  return out;
}

std::vector<CriterionOutcome> atypical_reproduction(int n, double kappa, const std::vector<double>& rs,
                                                    const std::vector<double>& ladder, int kmax,
                                                    const VerdictThresholds& thresholds) {
  const auto s = builtin_dyadic_atypical(n, kappa);
  const auto g = s.group();
  const json base = {{"symbol", s.label()}, {"n", n}, {"kappa", kappa}};
  std::vector<CriterionOutcome> out;

  for (double r : rs) {
    const auto rep = condition4_sum(s, r, ladder, thresholds);
    CriterionOutcome o;
    o.id = "atypical_condition4";
    o.inputs = base;
    o.inputs["r"] = r;
    o.inputs["ladder"] = ladder;
    o.lhs = rep.partials.back().second;
    o.evidence = rep.to_json();
    o.verdict = rep.fit.verdict == Verdict::inconclusive ? CriterionVerdict::inconclusive
                                                         : from_bool(rep.fit.verdict == Verdict::convergent);
    out.push_back(std::move(o));
  }

  const TruncationWindow window(g, ladder.back());
  {
    const auto e = elliptic_flag(s, window);
    CriterionOutcome o;
    o.id = "atypical_non_elliptic";
    o.inputs = base;
    o.inputs["lambda"] = window.lambda();
    o.lhs = e.margin;
    o.rhs = 0.0;
    o.evidence = {{"elliptic", e.elliptic}, {"margin", e.margin}};
    o.verdict = from_bool(!e.elliptic && e.margin == 0.0);
    out.push_back(std::move(o));
  }
  {
    const auto fit = estimate_symbol_order(s, std::vector<int>(static_cast<std::size_t>(n), 0), window);
    CriterionOutcome o;
    o.id = "atypical_order";
    o.inputs = base;
    o.inputs["lambda"] = window.lambda();
    o.lhs = fit.exponent;
    o.rhs = -kappa;
    o.evidence = {{"fit_residual", fit.residual}, {"points", fit.points}, {"tolerance", 0.05}};
    o.verdict = from_bool(std::abs(fit.exponent + kappa) <= 0.05);
    out.push_back(std::move(o));
  }
  {
    std::vector<int> e1(static_cast<std::size_t>(n), 0);
    e1[0] = 1;
    const auto diff = difference_op_torus(s, e1);
    const GroupPoint origin = identity_point(g);
    double worst = 0.0;
    json rows = json::array();
    for (int k = 1; k <= kmax; ++k) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      idx[0] = 1 << k;
      const auto xi = torus_dual(idx);
      const double got = std::abs(diff.scalar_value(origin, xi));
      const double want = std::pow(xi.bracket(), -kappa);
      worst = std::max(worst, std::abs(got - want));
      rows.push_back({{"k", k}, {"difference", got}, {"bracket_power", want}});
    }
    CriterionOutcome o;
    o.id = "atypical_sharp_difference";
    o.inputs = base;
    o.inputs["kmax"] = kmax;
    o.lhs = worst;
    o.rhs = 1e-15;
    o.evidence = {{"rows", rows}};
    o.verdict = from_bool(worst <= 1e-15);
    out.push_back(std::move(o));
  }
  return out;
}

CriterionOutcome hausdorff_young_suite(const GroupDescriptor& g, int count, const std::vector<double>& ps,
                                       std::uint64_t seed, double lambda, double slack) {
  if (count < 1) throw ParameterError("need at least one function");
  for (double p : ps)
    if (!(p >= 1.0 && p <= 2.0)) throw ParameterError("Hausdorff-Young needs 1 <= p <= 2");
  const TruncationWindow window(g, lambda);
  // Fine grid: |f|^p is not a polynomial, so resolve well past 2 * degree.
  const QuadratureGrid grid = haar_quadrature(g, resolution_for_degree(8.0 * window.degree()));
  const FourierEngine engine(window, grid);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  int violations = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < count; ++t) {
    FourierCoefficients coeffs{window, {}};
    for (const auto& xi : window.duals()) {
      CMatrix block(xi.dim, xi.dim);
      for (int i = 0; i < xi.dim; ++i)
        for (int j = 0; j < xi.dim; ++j) block(i, j) = cplx(normal(rng), normal(rng));
      coeffs.blocks.push_back(std::move(block));
    }
    const auto f = engine.inverse(coeffs);
    const auto fhat = engine.forward(f);
    for (double p : ps) {
      const double pp = p == 1.0 ? std::numeric_limits<double>::infinity() : p / (p - 1.0);
      const double gap = dual_lp_norm(fhat, pp) - lp_norm(f, grid, p);
      worst_gap = std::max(worst_gap, gap);
      if (gap > slack) ++violations;
    }
  }
  CriterionOutcome out;
  out.id = "hausdorff_young";
  out.inputs = {{"group", g.name()}, {"count", count}, {"p", ps}, {"seed", seed}, {"lambda", lambda},
                {"grid_resolution", grid.resolution}, {"slack", slack}};
  out.lhs = worst_gap;
  out.rhs = slack;
  out.evidence = {{"violations", violations}, {"worst_gap", worst_gap}};
  out.verdict = from_bool(violations == 0);
  return out;
}

CriterionOutcome schatten_membership_claim(const MatrixSymbol& s, double r, bool claimed_member,
                                           const std::vector<double>& ladder, const VerdictThresholds& thresholds) {
  const auto rep = condition4_sum(s, r, ladder, thresholds);
  CriterionOutcome o;
  o.id = "schatten_membership";
  o.inputs = {{"symbol", s.label()}, {"group", s.group().name()}, {"r", r}, {"claimed_member", claimed_member},
              {"ladder", ladder}};
  o.lhs = rep.partials.back().second;
  o.evidence = rep.to_json();
  if (rep.fit.verdict == Verdict::inconclusive)
    o.verdict = CriterionVerdict::inconclusive;
  else
    o.verdict = from_bool((rep.fit.verdict == Verdict::convergent) == claimed_member);
  return o;
}

}  // namespace psido

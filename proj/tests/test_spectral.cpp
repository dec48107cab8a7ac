#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "psido/errors.hpp"
#include "psido/quantizer.hpp"
#include "psido/spectral.hpp"

using namespace psido;

namespace {

const auto T1 = GroupDescriptor::torus(1);
const auto T2 = GroupDescriptor::torus(2);
const auto S3 = GroupDescriptor::su2();

SingularSpectrum from_values(std::vector<double> v) {
  SingularSpectrum s;
  s.values = std::move(v);
  s.multiplicity.assign(s.values.size(), 1);
  return s;
}

bool multiset_close(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

Partials bracket_partials(double power, const std::vector<double>& ladder) {
  return dual_series_partials(T1, ladder, [power](const DualPoint& xi) { return std::pow(xi.bracket(), power); });
}

}  // namespace

TEST_CASE("singular_values examples") {
  const auto id = singular_values(assemble_matrix(builtin_identity(T1), TruncationWindow(T1, 2.5)));
  CHECK(id.count() == 5);
  for (double v : id.expanded()) CHECK(std::abs(v - 1.0) < 1e-14);
  CHECK(id.source == SpectrumSource::matrix_svd);

  const auto b = singular_values(assemble_matrix(builtin_bessel(T1, -2.0), TruncationWindow(T1, 2.5)));
  const std::vector<double> want{1.0, 0.5, 0.5, 0.2, 0.2};
  const auto got = b.expanded();
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(got[i] - want[i]) < 1e-15);

  // Truncated shift on five modes: rank 4 partial isometry.
  const auto shift = builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, 0.0));
  const auto s = singular_values(assemble_matrix(shift, TruncationWindow(T1, 2.5))).expanded();
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s[static_cast<std::size_t>(i)] - 1.0) < 1e-12);
  CHECK(s[4] < 1e-12);

  OperatorMatrix bad{TruncationWindow(T1, 1.0), CMatrix::Constant(1, 1, cplx(std::nan(""), 0.0)), "nan"};
  CHECK_THROWS_AS(singular_values(bad), NumericError);
}

TEST_CASE("invariant_singular_values examples") {
  const auto sp = invariant_singular_values(builtin_bessel(S3, -1.0), TruncationWindow(S3, 2.0));
  CHECK(sp.count() == 14);
  const auto e = sp.expanded();
  std::vector<double> want{1.0};
  for (int i = 0; i < 4; ++i) want.push_back(1.0 / std::sqrt(1.75));
  for (int i = 0; i < 9; ++i) want.push_back(1.0 / std::sqrt(3.0));
  CHECK(multiset_close(e, want, 1e-15));
  CHECK(std::is_sorted(e.rbegin(), e.rend()));

  const auto dy = invariant_singular_values(builtin_dyadic_atypical(1, 0.5), TruncationWindow(T1, 40.0)).expanded();
  CHECK(dy.size() == 79);
  std::vector<double> nonzero;
  for (double v : dy)
    if (v > 0.0) nonzero.push_back(v);
  REQUIRE(nonzero.size() == 5);  // 2, 4, 8, 16, 32
  for (int k = 1; k <= 5; ++k)
    CHECK(nonzero[static_cast<std::size_t>(k - 1)] == std::pow(1.0 + std::pow(4.0, k), -0.25));

  const auto z = invariant_singular_values(builtin_zero(S3), TruncationWindow(S3, 3.0));
  for (double v : z.values) CHECK(v == 0.0);

  const auto xdep = builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, -1.0));
  CHECK_THROWS_AS(invariant_singular_values(xdep, TruncationWindow(T1, 3.0)), ContractError);
}

TEST_CASE("invariant spectrum equals the SVD of the assembled matrix") {
  for (const auto& g : {T1, T2, S3}) {
    for (double lam : {3.0, 8.0}) {
      if (!g.is_torus() && lam > 5.0) continue;
      const TruncationWindow w(g, lam);
      std::vector<MatrixSymbol> symbols{builtin_bessel(g, -1.0), builtin_bessel(g, 0.7)};
      if (g.is_torus()) symbols.push_back(builtin_dyadic_atypical(g.dimension(), 0.5));
      for (const auto& s : symbols) {
        const auto a = invariant_singular_values(s, w).expanded();
        const auto b = singular_values(assemble_matrix(s, w, assembly_grid(s, w), AssemblyRoute::quadrature)).expanded();
        CHECK(multiset_close(a, b, 1e-9));
      }
    }
  }
}

TEST_CASE("Schatten norms") {
  const auto ones = from_values({1, 1, 1, 1, 1});
  CHECK(schatten_partial(ones, 1.0) == 5.0);
  const auto b = from_values({1.0, 0.5, 0.5, 0.2, 0.2});
  CHECK(std::abs(schatten_partial(b, 2.0) - 1.58) < 1e-15);
  CHECK(std::abs(schatten_norm(b, 2.0) - 1.2569805089976536) < 1e-15);
  CHECK(schatten_norm(b, std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(schatten_partial(b, 0.0), ParameterError);
  CHECK_THROWS_AS(schatten_norm(b, -1.0), ParameterError);

  // Runs count with their multiplicity.
  SingularSpectrum runs;
  runs.values = {0.5, 0.25};
  runs.multiplicity = {4, 9};
  CHECK(schatten_partial(runs, 1.0) == 4 * 0.5 + 9 * 0.25);
}

TEST_CASE("Schatten monotonicity and the S2 Frobenius identity") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> n01;
  for (int t = 0; t < 10; ++t) {
    CMatrix m(12, 12);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(n01(rng), n01(rng));
    const auto spec = singular_values(OperatorMatrix{TruncationWindow(T1, 6.5), m, "random"});
    CHECK(std::abs(schatten_norm(spec, 2.0) - m.norm()) <= 1e-10 * m.norm());
    const std::vector<double> rs{0.5, 1.0, 1.5, 2.0, 3.0, 7.0, std::numeric_limits<double>::infinity()};
    for (std::size_t i = 1; i < rs.size(); ++i)
      CHECK(schatten_norm(spec, rs[i]) <= schatten_norm(spec, rs[i - 1]) * (1.0 + 1e-12));
  }
}

TEST_CASE("ideal inequality for random matrices") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> n01;
  const TruncationWindow w(T2, 3.0);  // 21 basis elements, only the size matters
  auto random = [&] {
    CMatrix m(20, 20);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = cplx(n01(rng), n01(rng));
    return m;
  };
  for (int t = 0; t < 20; ++t) {
    const CMatrix a = random(), b = random();
    const auto sa = singular_values(OperatorMatrix{w, a, "a"});
    const auto sb = singular_values(OperatorMatrix{w, b, "b"});
    const auto sab = singular_values(OperatorMatrix{w, a * b, "ab"});
    const double op = schatten_norm(sb, std::numeric_limits<double>::infinity());
    for (double r : {1.0, 2.0}) CHECK(schatten_norm(sab, r) <= schatten_norm(sa, r) * op * (1.0 + 1e-9));
  }
}

TEST_CASE("tail_exponent on brute-force shell sums") {
  const auto ladder = dyadic_ladder(4, 256);
  CHECK(ladder == std::vector<double>{4, 8, 16, 32, 64, 128, 256});

  const auto conv = tail_exponent(bracket_partials(-2.0, ladder));
  REQUIRE(conv.exponent.has_value());
  CHECK(std::abs(*conv.exponent + 1.0) < 0.05);
  CHECK(conv.verdict == Verdict::convergent);
  CHECK(conv.rule == "shell_exponent");
  REQUIRE(conv.extrapolated.has_value());
  CHECK(std::abs(*conv.extrapolated - 3.1533480949371623) < 1e-3);

  const auto div = tail_exponent(bracket_partials(-1.0, ladder));
  REQUIRE(div.exponent.has_value());
  CHECK(std::abs(*div.exponent) < 0.25);
  CHECK(div.verdict == Verdict::divergent);
  CHECK(div.rule == "log_growth");

  // Geometric partial sums, ratio 2^{-kappa r}.
  for (double q : {0.7071067811865476, 0.5, 0.25}) {
    Partials geo;
    double sum = 0.0, term = 1.0;
    for (double lam : ladder) {
      sum += term;
      term *= q;
      geo.emplace_back(lam, sum);
    }
    const auto fit = tail_exponent(geo);
    CHECK(std::abs(*fit.exponent - std::log2(q)) < 1e-12);
    CHECK(fit.residual < 1e-12);
    CHECK(fit.verdict == Verdict::convergent);
    CHECK(std::abs(*fit.extrapolated - 1.0 / (1.0 - q)) < 1e-12);
  }
}

TEST_CASE("tail_exponent edge cases") {
  CHECK_THROWS_AS(tail_exponent({{4, 1}, {8, 2}, {16, 3}}), InsufficientDataError);
  CHECK_THROWS_AS(tail_exponent({{4, 1}, {8, 2}, {12, 3}, {24, 4}}), InsufficientDataError);
  CHECK_THROWS_AS(tail_exponent({{4, 1}, {8, 2}, {16, 1}, {32, 4}}), NumericError);

  const auto zero = tail_exponent({{4, 0}, {8, 0}, {16, 0}, {32, 0}});
  CHECK(zero.verdict == Verdict::convergent);
  CHECK(zero.rule == "no_growth");

  // Finite support: later shells are empty.
  const auto finite = tail_exponent({{4, 1}, {8, 3}, {16, 3}, {32, 3}, {64, 3}});
  CHECK(finite.verdict == Verdict::convergent);

  // Linear growth of the partial sums: shells doubling.
  const auto lin = tail_exponent({{4, 4}, {8, 8}, {16, 16}, {32, 32}, {64, 64}});
  CHECK(std::abs(*lin.exponent - 1.0) < 1e-12);
  CHECK(lin.verdict == Verdict::divergent);
  CHECK_FALSE(lin.extrapolated.has_value());

  CHECK_THROWS_AS(VerdictThresholds::from_json({{"convergent", 0.5}}), ConfigError);
}

TEST_CASE("tail_exponent is scale equivariant") {
  const auto ladder = dyadic_ladder(4, 128);
  for (double power : {-2.0, -1.0, -1.5}) {
    const auto base = bracket_partials(power, ladder);
    const auto f0 = tail_exponent(base);
    for (double c : {1e-6, 3.0, 1e8}) {
      Partials scaled = base;
      for (auto& p : scaled) p.second *= c;
      const auto f1 = tail_exponent(scaled);
      CHECK(std::abs(*f1.exponent - *f0.exponent) < 1e-12);
      CHECK(f1.verdict == f0.verdict);
      CHECK(f1.rule == f0.rule);
    }
  }
}

TEST_CASE("thresholds round trip through JSON") {
  VerdictThresholds t;
  t.convergent = -0.3;
  t.log_growth_ratio = 0.6;
  const auto back = VerdictThresholds::from_json(t.to_json());
  CHECK(back.convergent == -0.3);
  CHECK(back.divergent == 0.25);
  CHECK(back.log_growth_ratio == 0.6);
  CHECK(VerdictThresholds::from_json(nlohmann::json::object()).slow_decay == -0.1);
}

TEST_CASE("lemma series verdicts flip at s = n") {
  const auto ladder = dyadic_ladder(4, 256);
  CHECK(lemma_series(T1, 2.0, ladder).fit.verdict == Verdict::convergent);
  CHECK(lemma_series(T1, 1.0, ladder).fit.verdict == Verdict::divergent);
  CHECK(lemma_series(S3, 3.5, ladder).fit.verdict == Verdict::convergent);
  CHECK(lemma_series(S3, 3.0, ladder).fit.verdict == Verdict::divergent);
  CHECK(lemma_series(T2, 2.5, dyadic_ladder(4, 128)).fit.verdict == Verdict::convergent);
  CHECK(lemma_series(T2, 2.0, dyadic_ladder(4, 128)).fit.verdict == Verdict::divergent);

  // Brute-force check of the first partial on SU(2).
  double sum = 0.0;
  for (int two_l = 0; two_l < 40; ++two_l) {
    const double l = two_l / 2.0, br = std::sqrt(1.0 + l * (l + 1.0));
    if (br <= 4.0 * (1.0 + 1e-12)) sum += (two_l + 1.0) * (two_l + 1.0) * std::pow(br, -3.5);
  }
  CHECK(std::abs(lemma_series(S3, 3.5, ladder).partials.front().second - sum) < 1e-12);
}

TEST_CASE("Schatten ladders of operators and reports") {
  const auto ladder = dyadic_ladder(4, 64);
  const auto rep = operator_schatten_ladder(builtin_bessel(T1, -2.0), 1.0, ladder);
  CHECK(rep.source == "invariant_per_dual");
  const auto oracle = bracket_partials(-2.0, ladder);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    CHECK(rep.partials[i].first == ladder[i]);
    CHECK(std::abs(rep.partials[i].second - oracle[i].second) < 1e-12);
    if (i) CHECK(rep.partials[i].second >= rep.partials[i - 1].second);
  }
  // |e^{ix}| = 1: the x-dependent route sees the same singular values minus truncation.
  const auto shifted = builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, -2.0));
  const auto rs = operator_schatten_ladder(shifted, 2.0, dyadic_ladder(4, 32));
  CHECK(rs.source == "matrix_svd");
  CHECK(rs.fit.verdict == Verdict::convergent);

  const auto j = rep.to_json();
  for (const char* key : {"r", "ladder", "partials", "exponent", "verdict", "extrapolated_value", "config_thresholds"})
    CHECK(j.contains(key));
  CHECK(j["verdict"] == "convergent");
  CHECK(j["ladder"].size() == ladder.size());
}

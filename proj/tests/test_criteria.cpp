#include <cmath>
#include <numbers>

#include "doctest.h"

#include "psido/criteria.hpp"
#include "psido/errors.hpp"

using namespace psido;

namespace {

const auto T1 = GroupDescriptor::torus(1);
const auto T2 = GroupDescriptor::torus(2);
const auto S3 = GroupDescriptor::su2();

double bracket_sum(double power, int kmax) {
  double s = 0.0;
  for (int k = -kmax; k <= kmax; ++k) s += std::pow(1.0 + k * k, power / 2.0);
  return s;
}

MatrixSymbol shifted(double m) {
  return builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, m));
}

}  // namespace

TEST_CASE("order_threshold examples") {
  CHECK(order_threshold(-2.0, 1, 1.0));
  CHECK_FALSE(order_threshold(-1.0, 2, 2.0));
  CHECK_FALSE(order_threshold(-0.9, 2, 2.0));
  CHECK(order_threshold(-3.5, 3, 1.0));
  CHECK_THROWS_AS(order_threshold(-1.0, 0, 1.0), ParameterError);
}

TEST_CASE("condition (3) reduces to the lemma series for Bessel symbols") {
  const auto ladder = dyadic_ladder(4, 128);
  for (const auto& g : {T1, S3}) {
    for (double m : {-2.0, -0.5}) {
      for (double r : {1.0, 2.0}) {
        const auto c3 = condition3_sum(builtin_bessel(g, m), r, ladder);
        const auto lem = lemma_series(g, -m * r, ladder);
        for (std::size_t i = 0; i < ladder.size(); ++i)
          CHECK(std::abs(c3.partials[i].second - lem.partials[i].second) <= 1e-12 * lem.partials[i].second);
        CHECK(c3.fit.verdict == lem.fit.verdict);
      }
    }
  }
  const auto dy = condition3_sum(builtin_dyadic_atypical(1, 1.0), 1.0, dyadic_ladder(4, 1024));
  CHECK(dy.fit.verdict == Verdict::convergent);
  const auto z = condition3_sum(builtin_zero(T1), 1.0, ladder);
  CHECK(z.partials.back().second == 0.0);
  CHECK(z.fit.verdict == Verdict::convergent);
  CHECK_THROWS_AS(condition3_sum(builtin_zero(T1), 0.0, ladder), ParameterError);
}

TEST_CASE("condition (3) through extraction equals the S_r partials") {
  // sum d int || sigma_{|A|^{r/2}} ||_HS^2 = || |A|^{r/2} ||_HS^2 = sum s^r.
  const std::vector<double> ladder{4, 8, 16, 32};
  for (double r : {1.0, 2.0}) {
    const auto c3 = condition3_sum(shifted(-1.0), r, ladder);
    const auto ops = operator_schatten_ladder(shifted(-1.0), r, ladder);
    CHECK(c3.source == "condition3:extracted_symbol");
    for (std::size_t i = 0; i < ladder.size(); ++i)
      CHECK(std::abs(c3.partials[i].second - ops.partials[i].second) <= 1e-8 * ops.partials[i].second);
  }
}

TEST_CASE("condition (4) examples") {
  const auto ladder = dyadic_ladder(4, 256);
  for (double m : {-1.0, -0.25}) {
    const auto c4 = condition4_sum(builtin_bessel(T1, m), 2.0, ladder);
    const auto mod = condition4_sum(shifted(m), 2.0, ladder);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const int kmax = static_cast<int>(std::floor(std::sqrt(ladder[i] * ladder[i] - 1.0) + 1e-9));
      CHECK(std::abs(c4.partials[i].second - bracket_sum(2.0 * m, kmax)) <= 1e-12 * c4.partials[i].second);
      CHECK(std::abs(mod.partials[i].second - c4.partials[i].second) <= 1e-12 * c4.partials[i].second);
    }
    CHECK(c4.fit.verdict == (2.0 * m < -1.0 ? Verdict::convergent : Verdict::divergent));
    CHECK(mod.fit.verdict == c4.fit.verdict);
  }
  for (double r : {0.25, 0.5, 1.0, 3.0})
    CHECK(condition4_sum(builtin_dyadic_atypical(1, 0.5), r, dyadic_ladder(4, 1024)).fit.verdict ==
          Verdict::convergent);
  CHECK_THROWS_AS(condition4_sum(shifted(-1.0), 1.0, ladder, haar_quadrature(S3, 4)), TypeMismatchError);
}

TEST_CASE("Russo check examples") {
  const TruncationWindow w(T1, 8.0);
  const auto out = russo_check(builtin_bessel(T1, -1.0), 1.5, w);
  const double lhs = std::cbrt(bracket_sum(-3.0, 7));
  const double rhs = std::pow(bracket_sum(-1.5, 7), 2.0 / 3.0);
  CHECK(std::abs(lhs - 1.2614731484953936) < 1e-14);
  CHECK(std::abs(rhs - 2.433110586901798) < 1e-14);
  CHECK(std::abs(*out.lhs - lhs) < 1e-12);
  CHECK(std::abs(*out.rhs - rhs) < 1e-12);
  CHECK(out.verdict == CriterionVerdict::satisfied);

  const auto zero = russo_check(builtin_zero(T1), 1.5, w);
  CHECK(*zero.lhs == 0.0);
  CHECK(*zero.rhs == 0.0);
  CHECK(zero.verdict == CriterionVerdict::satisfied);

  // The shift is not self-adjoint: only the ratio is logged.
  const auto sh = russo_check(shifted(0.0), 1.5, w);
  CHECK(sh.verdict == CriterionVerdict::inconclusive);
  CHECK(sh.evidence["self_adjoint"] == false);

  CHECK_THROWS_AS(russo_check(builtin_zero(T1), 2.0, w), ParameterError);
  CHECK_THROWS_AS(russo_check(builtin_zero(T1), 1.0, w), ParameterError);
}

TEST_CASE("Russo random suite is seeded and never violated") {
  const auto a = russo_random_suite(6, 1.5, 6.0, 99);
  const auto b = russo_random_suite(6, 1.5, 6.0, 99);
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.verdict == CriterionVerdict::satisfied);
  CHECK(a.evidence["violations"] == 0);
  CHECK(*a.lhs <= 1.0);
}

TEST_CASE("regularity criterion") {
  const auto ladder = dyadic_ladder(4, 64);
  // Single x-mode eta = 1 with <1>^2 = 2.
  for (double m : {-2.0, -3.0}) {
    const auto out = regularity_criterion(shifted(m), 2.0, 1.0, ladder);
    CHECK(std::abs(*out.rhs - 2.0 * bracket_sum(m, 63)) <= 1e-12 * *out.rhs);
    CHECK(out.verdict == CriterionVerdict::satisfied);
  }
  const auto inv = regularity_criterion(builtin_bessel(T1, -2.0), 2.0, 1.0, ladder);
  CHECK(std::abs(*inv.rhs - bracket_sum(-2.0, 63)) <= 1e-12 * *inv.rhs);
  CHECK(std::abs(*inv.lhs - *inv.rhs) <= 1e-12 * *inv.rhs);

  const auto dy = regularity_criterion(builtin_dyadic_atypical(1, 0.5), 2.0, 1.0, dyadic_ladder(4, 1024));
  CHECK(dy.verdict == CriterionVerdict::satisfied);

  // Divergent hypothesis never produces a violation.
  const auto weak = regularity_criterion(shifted(-0.5), 2.0, 1.0, ladder);
  CHECK(weak.verdict == CriterionVerdict::inconclusive);

  CHECK_THROWS_AS(regularity_criterion(shifted(-2.0), 1.0, 1.0, ladder), ParameterError);
  CHECK_THROWS_AS(regularity_criterion(builtin_bessel(S3, -4.0), 3.0, 1.0, ladder), ParameterError);
}

TEST_CASE("co-sphere average") {
  const PrincipalSymbol one = [](const GroupPoint&, const std::vector<double>&) { return cplx(1.0); };
  const PrincipalSymbol odd = [](const GroupPoint&, const std::vector<double>& e) { return cplx(e[0]); };
  const PrincipalSymbol sq = [](const GroupPoint&, const std::vector<double>& e) { return cplx(e[0] * e[0]); };
  CHECK(cosphere_average(one, 2) == cplx(1.0));
  CHECK(std::abs(cosphere_average(odd, 2)) <= 1e-10);
  CHECK(std::abs(cosphere_average(sq, 2) - 0.5) <= 1e-8);
  for (int n : {1, 3}) CHECK(std::abs(cosphere_average(one, n) - 1.0) <= 1e-14);
  CHECK(std::abs(cosphere_average(sq, 3) - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(cosphere_average(sq, 1) - 1.0) <= 1e-15);

  // x-dependent principal symbol: mean of cos(x1) vanishes.
  const PrincipalSymbol xdep = [](const GroupPoint& x, const std::vector<double>& e) {
    return cplx(2.0 + std::cos(std::get<TorusPoint>(x).angles[0]) * e[1]);
  };
  CHECK(std::abs(cosphere_average(xdep, 2) - 2.0) <= 1e-12);

  // Linearity and symmetrisation of even symbols.
  const PrincipalSymbol even = [](const GroupPoint& x, const std::vector<double>& e) {
    return cplx(e[0] * e[1] + std::sin(std::get<TorusPoint>(x).angles[1]) * e[1] * e[1], 0.3 * e[0] * e[0]);
  };
  const PrincipalSymbol flipped = [&](const GroupPoint& x, const std::vector<double>& e) {
    return 0.5 * (even(x, e) + even(x, {-e[0], -e[1]}));
  };
  const PrincipalSymbol combo = [&](const GroupPoint& x, const std::vector<double>& e) {
    return 2.0 * even(x, e) - cplx(0.0, 3.0) * sq(x, e);
  };
  CHECK(std::abs(cosphere_average(flipped, 2) - cosphere_average(even, 2)) <= 1e-10);
  CHECK(std::abs(cosphere_average(combo, 2) - (2.0 * cosphere_average(even, 2) - cplx(0.0, 3.0) * cosphere_average(sq, 2))) <=
        1e-10);

  CHECK_THROWS_AS(cosphere_average(one, 4), UnsupportedGroupError);
}

TEST_CASE("elliptic flag") {
  const TruncationWindow w(T1, 40.0);
  for (double m : {-2.0, 0.5}) {
    const auto e = elliptic_flag(builtin_bessel(T1, m), w);
    CHECK(e.elliptic);
    CHECK(std::abs(e.margin - 1.0) < 1e-12);
  }
  const auto s = elliptic_flag(builtin_bessel(S3, -1.0), TruncationWindow(S3, 5.0));
  CHECK(s.elliptic);
  const auto d = elliptic_flag(builtin_dyadic_atypical(1, 0.5), w);
  CHECK_FALSE(d.elliptic);
  CHECK(d.margin == 0.0);
  CHECK_FALSE(elliptic_flag(builtin_zero(T1), w).elliptic);
  const auto undeclared = builtin_scalar_multiplier(T1, [](const DualPoint&) { return cplx(1.0); }, "plain");
  CHECK_THROWS_AS(elliptic_flag(undeclared, w), ContractError);
}

TEST_CASE("theorem consistency sweep agrees off the boundary") {
  const auto ladder = dyadic_ladder(4, 256);
  for (const auto& g : {T1, T2, S3}) {
    const auto lad = g == T2 ? dyadic_ladder(4, 128) : ladder;
    for (const auto& o : theorem_consistency(g, {0.5, 1.0, 2.0, 3.0}, lad)) {
      INFO(o.to_json().dump());
      CHECK(o.verdict != CriterionVerdict::violated);
    }
  }
}

TEST_CASE("atypical reproduction") {
  const auto out = atypical_reproduction(1, 0.5, {0.5, 1.0, 2.0}, dyadic_ladder(4, 1024));
  REQUIRE(out.size() == 6);
  for (const auto& o : out) {
    INFO(o.id);
    CHECK(o.verdict == CriterionVerdict::satisfied);
  }
  CHECK(out[3].id == "atypical_non_elliptic");
  CHECK(*out[3].lhs == 0.0);
  CHECK(out[5].id == "atypical_sharp_difference");
  CHECK(*out[5].lhs <= 1e-15);
}

TEST_CASE("Hausdorff-Young suite") {
  for (const auto& g : {T1, T2, S3}) {
    const auto o = hausdorff_young_suite(g, 5, {1.0, 4.0 / 3.0, 2.0}, 7);
    CHECK(o.verdict == CriterionVerdict::satisfied);
    // p = 2 is Plancherel: the gap is round-off.
    CHECK(*o.lhs <= 1e-9);
  }
  CHECK_THROWS_AS(hausdorff_young_suite(T1, 1, {3.0}, 1), ParameterError);
}

TEST_CASE("Schatten membership claims") {
  const auto ladder = dyadic_ladder(4, 256);
  CHECK(schatten_membership_claim(builtin_bessel(T1, -2.0), 1.0, true, ladder).verdict == CriterionVerdict::satisfied);
  CHECK(schatten_membership_claim(builtin_bessel(T1, -1.0), 1.0, true, ladder).verdict == CriterionVerdict::violated);
  CHECK(schatten_membership_claim(builtin_bessel(T1, -1.0), 1.0, false, ladder).verdict == CriterionVerdict::satisfied);
}

TEST_CASE("criterion outcomes serialise with their provenance") {
  const auto o = russo_check(builtin_bessel(T1, -1.0), 1.5, TruncationWindow(T1, 4.0));
  const auto j = o.to_json();
  CHECK(j["criterion_id"] == "russo");
  CHECK(j["verdict"] == "satisfied");
  CHECK(j["inputs"]["p"] == 1.5);
  CHECK(j["lhs"].is_number());
}

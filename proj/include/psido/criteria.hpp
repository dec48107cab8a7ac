#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "psido/spectral.hpp"
#include "psido/symbol.hpp"

namespace psido {

enum class CriterionVerdict { satisfied, violated, inconclusive };
std::string to_string(CriterionVerdict v);

struct CriterionOutcome {
  std::string id;
  nlohmann::json inputs = nlohmann::json::object();
  std::optional<double> lhs;
  std::optional<double> rhs;
  CriterionVerdict verdict = CriterionVerdict::inconclusive;
  nlohmann::json evidence = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// m < -n/r
bool order_threshold(double m, int n, double r);

// sum_xi d_xi int ||sigma_{|A|^{r/2}}(x, xi)||_HS^2 dx along the ladder.
// Invariant symbols use |sigma(xi)|^{r/2}; otherwise |A|^{r/2} is formed from
// the SVD of each finite section and its symbol re-extracted.
SchattenReport condition3_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const VerdictThresholds& thresholds = {});

// int_G sum_xi d_xi ||sigma(x, xi)||_{S_r}^r dx along the ladder; the grid is
// only used for x-dependent symbols.
SchattenReport condition4_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const QuadratureGrid& grid, const VerdictThresholds& thresholds = {});
SchattenReport condition4_sum(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                              const VerdictThresholds& thresholds = {});

// ||A||_{S_p'} <= ||sigma||_{L^p(G, l^p(G^))} with constant 1, checked when the
// finite section is self-adjoint; otherwise the ratio is logged.
CriterionOutcome russo_check(const MatrixSymbol& s, double p, const TruncationWindow& window);

// Seeded family of real invariant torus symbols u_k <k>^{-2}, u_k uniform in
// [-1, 1]; one outcome summarising every trial.
CriterionOutcome russo_random_suite(int trials, double p, double lambda, std::uint64_t seed);

// int_G ||(1 + L_x)^{N/2} sigma(x, .)||_{S_p(G^)} dx on the ladder against the
// Schatten partials of the finite sections.
CriterionOutcome regularity_criterion(const MatrixSymbol& s, double N, double p,
                                      const std::vector<double>& ladder,
                                      const VerdictThresholds& thresholds = {});

using PrincipalSymbol = std::function<cplx(const GroupPoint&, const std::vector<double>&)>;

// Average of a degree-0 principal symbol over the co-sphere bundle of the
// n-torus (n <= 3) with total mass 1. Power-of-two resolutions keep the
// weights exact binary fractions.
cplx cosphere_average(const PrincipalSymbol& principal, int n, int sphere_resolution = 64,
                      int x_resolution = 8);

struct EllipticResult {
  bool elliptic = false;
  double margin = 0.0;
};

// inf over the window (and grid nodes for x-dependent symbols) of the smallest
// singular value of sigma(x, xi) <xi>^{-m}, m the declared order.
EllipticResult elliptic_flag(const MatrixSymbol& s, const TruncationWindow& window,
                             double tolerance = 1e-12);

// Bessel family <xi>^m for m = -n/r +- offset and every r: condition (3),
// condition (4), the lemma series and the order threshold must agree.
std::vector<CriterionOutcome> theorem_consistency(const GroupDescriptor& g, const std::vector<double>& rs,
                                                  const std::vector<double>& ladder, double offset = 0.3,
                                                  const VerdictThresholds& thresholds = {});

// Dyadic symbol: condition (4) convergent for every r, not elliptic, fitted
// order -kappa on its support and the sharp difference equality for k = 1..kmax.
std::vector<CriterionOutcome> atypical_reproduction(int n, double kappa, const std::vector<double>& rs,
                                                    const std::vector<double>& ladder, int kmax = 10,
                                                    const VerdictThresholds& thresholds = {});

// ||f^||_{l^p'(G^)} <= ||f||_{L^p(G)} for seeded random band-limited f.
CriterionOutcome hausdorff_young_suite(const GroupDescriptor& g, int count, const std::vector<double>& ps,
                                       std::uint64_t seed, double lambda = 3.0, double slack = 1e-9);

// Compares a claimed Schatten membership with the condition (4) verdict.
CriterionOutcome schatten_membership_claim(const MatrixSymbol& s, double r, bool claimed_member,
                                           const std::vector<double>& ladder,
                                           const VerdictThresholds& thresholds = {});

}  // namespace psido

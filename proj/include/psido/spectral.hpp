#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "psido/group.hpp"
#include "psido/quantizer.hpp"
#include "psido/symbol.hpp"
#include "psido/window.hpp"

namespace psido {

enum class SpectrumSource { matrix_svd, invariant_per_dual };

// Singular values as runs (value, multiplicity), sorted nonincreasing. The
// matrix route has multiplicity 1 everywhere; the invariant route keeps the
// d_xi-fold repetition implicit so large SU(2) windows stay cheap.
struct SingularSpectrum {
  std::vector<double> values;
  std::vector<std::size_t> multiplicity;
  SpectrumSource source = SpectrumSource::matrix_svd;
  GroupDescriptor group = GroupDescriptor::torus(1);
  double lambda = 0.0;

  std::size_t count() const;
  std::vector<double> expanded() const;
};

std::string to_string(SpectrumSource source);

SingularSpectrum singular_values(const OperatorMatrix& a);
SingularSpectrum invariant_singular_values(const MatrixSymbol& s, const TruncationWindow& window);

// sum s^r over the spectrum; r > 0.
double schatten_partial(const SingularSpectrum& spec, double r);
// (sum s^r)^{1/r}; r = infinity gives the largest singular value.
double schatten_norm(const SingularSpectrum& spec, double r);

enum class Verdict { convergent, divergent, inconclusive };
std::string to_string(Verdict v);

struct VerdictThresholds {
  double convergent = -0.25;        // shell exponent at or below: convergent
  double divergent = 0.25;          // shell exponent at or above: divergent
  double slow_decay = -0.1;         // borderline exponent still counted as decay
  double geometric_residual = 0.05; // max RMS residual for a clean geometric fit
  double log_growth_ratio = 0.75;   // late/early shell mass ratio meaning no decay

  nlohmann::json to_json() const;
  static VerdictThresholds from_json(const nlohmann::json& j);
};

struct TailFit {
  std::optional<double> exponent;  // slope of log2(shell increment) per rung
  double residual = 0.0;
  std::optional<double> growth_ratio;
  Verdict verdict = Verdict::inconclusive;
  std::string rule;  // which branch of the decision produced the verdict
  std::optional<double> extrapolated;
};

using Partials = std::vector<std::pair<double, double>>;  // (lambda, partial value)

// Verdict from partial sums on a dyadic ladder (at least 4 rungs, ratio 2).
TailFit tail_exponent(const Partials& partials, const VerdictThresholds& thresholds = {});

struct SchattenReport {
  double r = 0.0;
  Partials partials;
  TailFit fit;
  VerdictThresholds thresholds;
  std::string source;

  std::vector<double> ladder() const;
  nlohmann::json to_json() const;
};

SchattenReport make_report(double r, Partials partials, std::string source,
                           const VerdictThresholds& thresholds = {});

// Partial sums of sum_xi term(xi) over the windows of a ladder, summed in
// canonical dual order. The ladder must be strictly increasing.
Partials dual_series_partials(const GroupDescriptor& g, const std::vector<double>& ladder,
                              const std::function<double(const DualPoint&)>& term);

// sum_xi d_xi^2 <xi>^{-s}
SchattenReport lemma_series(const GroupDescriptor& g, double s, const std::vector<double>& ladder,
                            const VerdictThresholds& thresholds = {});

// sum s_n(A_lambda)^r of the finite sections along the ladder. Invariant
// symbols use per-dual singular values, others assemble and run an SVD.
SchattenReport operator_schatten_ladder(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                                        const VerdictThresholds& thresholds = {});

// Dyadic ladder start, 2 start, ..., last (inclusive).
std::vector<double> dyadic_ladder(double start, double last);

}  // namespace psido

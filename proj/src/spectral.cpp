#include "psido/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "psido/errors.hpp"

namespace psido {

namespace {

using nlohmann::json;

void check_r(double r) {
  if (!(r > 0.0)) throw ParameterError("Schatten exponent must be > 0");
}

// Same cutoff rule as enumerate_dual.
bool inside(const DualPoint& xi, double lambda) { return 1.0 + xi.eigenvalue <= lambda * lambda * (1.0 + 1e-12); }

void sort_runs(SingularSpectrum& spec) {
  std::vector<std::size_t> order(spec.values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return spec.values[a] > spec.values[b]; });
  std::vector<double> v;
  std::vector<std::size_t> m;
  v.reserve(order.size());
  m.reserve(order.size());
  for (auto i : order) {
    v.push_back(spec.values[i]);
    m.push_back(spec.multiplicity[i]);
  }
  spec.values = std::move(v);
  spec.multiplicity = std::move(m);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::size_t SingularSpectrum::count() const {
  return std::accumulate(multiplicity.begin(), multiplicity.end(), std::size_t{0});
}

std::vector<double> SingularSpectrum::expanded() const {
  std::vector<double> out;
  out.reserve(count());
  for (std::size_t i = 0; i < values.size(); ++i) out.insert(out.end(), multiplicity[i], values[i]);
  return out;
}

std::string to_string(SpectrumSource source) {
  return source == SpectrumSource::matrix_svd ? "matrix_svd" : "invariant_per_dual";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "convergent";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: break;
  }
  return "inconclusive";
}

SingularSpectrum singular_values(const OperatorMatrix& a) {
  if (!a.entries.allFinite()) throw NumericError("operator matrix has non-finite entries");
  SingularSpectrum spec;
  spec.source = SpectrumSource::matrix_svd;
  spec.group = a.window.group();
  spec.lambda = a.window.lambda();
  if (a.entries.size() == 0) return spec;
  Eigen::BDCSVD<CMatrix> svd(a.entries);
  const auto& sv = svd.singularValues();
  spec.values.assign(sv.data(), sv.data() + sv.size());
  spec.multiplicity.assign(spec.values.size(), 1);
  sort_runs(spec);
  return spec;
}

SingularSpectrum invariant_singular_values(const MatrixSymbol& s, const TruncationWindow& window) {
  if (!s.invariant()) throw ContractError("invariant_singular_values needs an invariant symbol");
  SingularSpectrum spec;
  spec.source = SpectrumSource::invariant_per_dual;
  spec.group = window.group();
  spec.lambda = window.lambda();
  const GroupPoint origin = identity_point(window.group());
  for (const auto& xi : window.duals()) {
    // Op(sigma) acts as sigma(xi) on each of the d_xi rows of the block.
    for (const auto& [sv, mult] : s.singular_values(origin, xi)) {
      spec.values.push_back(sv);
      spec.multiplicity.push_back(static_cast<std::size_t>(mult) * static_cast<std::size_t>(xi.dim));
    }
  }
  sort_runs(spec);
  return spec;
}

double schatten_partial(const SingularSpectrum& spec, double r) {
  check_r(r);
  if (std::isinf(r)) throw ParameterError("schatten_partial needs a finite exponent");
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.values.size(); ++i)
    if (spec.values[i] > 0.0) sum += static_cast<double>(spec.multiplicity[i]) * std::pow(spec.values[i], r);
  return sum;
}

double schatten_norm(const SingularSpectrum& spec, double r) {
  check_r(r);
  if (std::isinf(r)) return spec.values.empty() ? 0.0 : spec.values.front();
  return std::pow(schatten_partial(spec, r), 1.0 / r);
}

json VerdictThresholds::to_json() const {
  return {{"convergent", convergent},
          {"divergent", divergent},
          {"slow_decay", slow_decay},
          {"geometric_residual", geometric_residual},
          {"log_growth_ratio", log_growth_ratio}};
}

VerdictThresholds VerdictThresholds::from_json(const json& j) {
  VerdictThresholds t;
  t.convergent = j.value("convergent", t.convergent);
  t.divergent = j.value("divergent", t.divergent);
  t.slow_decay = j.value("slow_decay", t.slow_decay);
  t.geometric_residual = j.value("geometric_residual", t.geometric_residual);
  t.log_growth_ratio = j.value("log_growth_ratio", t.log_growth_ratio);
  if (!(t.convergent < t.divergent)) throw ConfigError("verdict thresholds must satisfy convergent < divergent");
  return t;
}

TailFit tail_exponent(const Partials& partials, const VerdictThresholds& t) {
  if (partials.size() < 4) throw InsufficientDataError("tail fit needs at least 4 ladder rungs");
  for (std::size_t k = 1; k < partials.size(); ++k) {
    const double ratio = partials[k].first / partials[k - 1].first;
    if (std::abs(ratio - 2.0) > 1e-9) throw InsufficientDataError("tail fit needs a dyadic ladder (ratio 2)");
  }

  const double scale = std::abs(partials.back().second);
  std::vector<double> inc;
  for (std::size_t k = 1; k < partials.size(); ++k) {
    double d = partials[k].second - partials[k - 1].second;
    if (d < 0.0 && -d > 1e-12 * scale) throw NumericError("partial sums decrease along the ladder");
    if (d <= 1e-14 * scale) d = 0.0;
    inc.push_back(d);
  }

  TailFit fit;
  const std::size_t m = inc.size();
  if (std::all_of(inc.begin(), inc.end(), [](double d) { return d == 0.0; })) {
    fit.verdict = Verdict::convergent;
    fit.rule = "no_growth";
    fit.extrapolated = partials.back().second;
    return fit;
  }

  // Least squares of log2 increment against rung index, zero shells skipped.
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < m; ++k) {
    if (inc[k] > 0.0) {
      xs.push_back(static_cast<double>(k));
      ys.push_back(std::log2(inc[k]));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    const double xbar = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - xbar) * (xs[i] - xbar);
      sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    const double e = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - (ybar + e * (xs[i] - xbar));
      rss += r * r;
    }
    fit.exponent = e;
    fit.residual = std::sqrt(rss / n);
  }

  // Late-half against early-half shell mass.
  const std::size_t half = m / 2;
  double early = 0.0, late = 0.0;
  for (std::size_t k = 0; k < half; ++k) early += inc[k];
  for (std::size_t k = m - half; k < m; ++k) late += inc[k];
  if (early > 0.0) fit.growth_ratio = late / early;

  const bool stopped = inc[m - 1] == 0.0 && inc[m - 2] == 0.0;
  if (stopped) {
    fit.verdict = Verdict::convergent;
    fit.rule = "no_growth";
  } else if (!fit.exponent) {
    fit.verdict = Verdict::inconclusive;
    fit.rule = "too_few_shells";
  } else if (*fit.exponent <= t.convergent) {
    fit.verdict = Verdict::convergent;
    fit.rule = "shell_exponent";
  } else if (*fit.exponent >= t.divergent) {
    fit.verdict = Verdict::divergent;
    fit.rule = "shell_exponent";
  } else if (!fit.growth_ratio || *fit.growth_ratio >= t.log_growth_ratio) {
    fit.verdict = Verdict::divergent;
    fit.rule = "log_growth";
  } else if (fit.residual <= t.geometric_residual && *fit.exponent <= t.slow_decay) {
    fit.verdict = Verdict::convergent;
    fit.rule = "slow_geometric";
  } else {
    fit.verdict = Verdict::inconclusive;
    fit.rule = "borderline";
  }

  if (fit.verdict == Verdict::convergent) {
    if (stopped || !fit.exponent) {
      fit.extrapolated = partials.back().second;
    } else {
      const double q = std::exp2(*fit.exponent);
      fit.extrapolated = partials.back().second + inc[m - 1] * q / (1.0 - q);
    }
  }
  return fit;
}

std::vector<double> SchattenReport::ladder() const {
  std::vector<double> out;
  out.reserve(partials.size());
  for (const auto& p : partials) out.push_back(p.first);
  return out;
}

json SchattenReport::to_json() const {
  json parts = json::array();
  for (const auto& [lam, v] : partials) parts.push_back({lam, v});
  return {{"r", std::isinf(r) ? json("inf") : json(r)},
          {"ladder", ladder()},
          {"partials", parts},
          {"exponent", optional_number(fit.exponent)},
          {"fit_residual", fit.residual},
          {"growth_ratio", optional_number(fit.growth_ratio)},
          {"verdict", to_string(fit.verdict)},
          {"verdict_rule", fit.rule},
          {"extrapolated_value", optional_number(fit.extrapolated)},
          {"config_thresholds", thresholds.to_json()},
          {"source", source}};
}

SchattenReport make_report(double r, Partials partials, std::string source, const VerdictThresholds& thresholds) {
  SchattenReport rep;
  rep.r = r;
  rep.fit = tail_exponent(partials, thresholds);
  rep.partials = std::move(partials);
  rep.thresholds = thresholds;
  rep.source = std::move(source);
  return rep;
}

Partials dual_series_partials(const GroupDescriptor& g, const std::vector<double>& ladder,
                              const std::function<double(const DualPoint&)>& term) {
  if (ladder.empty()) throw ConfigError("empty ladder");
  for (std::size_t k = 1; k < ladder.size(); ++k)
    if (!(ladder[k] > ladder[k - 1])) throw ConfigError("ladder must be strictly increasing");
  const auto duals = enumerate_dual(g, ladder.back());
  std::vector<double> terms;
  terms.reserve(duals.size());
  for (const auto& xi : duals) terms.push_back(term(xi));

  Partials out;
  out.reserve(ladder.size());
  for (double lam : ladder) {
    double sum = 0.0;
    for (std::size_t i = 0; i < duals.size(); ++i)
      if (inside(duals[i], lam)) sum += terms[i];
    out.emplace_back(lam, sum);
  }
  return out;
}

SchattenReport lemma_series(const GroupDescriptor& g, double s, const std::vector<double>& ladder,
                            const VerdictThresholds& thresholds) {
  auto partials = dual_series_partials(g, ladder, [s](const DualPoint& xi) {
    return static_cast<double>(xi.dim) * xi.dim * std::pow(xi.bracket(), -s);
  });
  return make_report(1.0, std::move(partials), "lemma_series", thresholds);
}

SchattenReport operator_schatten_ladder(const MatrixSymbol& s, double r, const std::vector<double>& ladder,
                                        const VerdictThresholds& thresholds) {
  check_r(r);
  if (s.invariant()) {
    const GroupPoint origin = identity_point(s.group());
    auto partials = dual_series_partials(s.group(), ladder, [&](const DualPoint& xi) {
      double sum = 0.0;
      for (const auto& [sv, mult] : s.singular_values(origin, xi))
        if (sv > 0.0) sum += mult * std::pow(sv, r);
      return xi.dim * sum;
    });
    return make_report(r, std::move(partials), to_string(SpectrumSource::invariant_per_dual), thresholds);
  }
  Partials partials;
  for (double lam : ladder) {
    const TruncationWindow window(s.group(), lam);
    partials.emplace_back(lam, schatten_partial(singular_values(assemble_matrix(s, window)), r));
  }
  return make_report(r, std::move(partials), to_string(SpectrumSource::matrix_svd), thresholds);
}

std::vector<double> dyadic_ladder(double start, double last) {
  if (!(start >= 1.0) || last < start) throw ConfigError("dyadic ladder needs 1 <= start <= last");
  std::vector<double> out;
  for (double v = start; v <= last * (1.0 + 1e-12); v *= 2.0) out.push_back(v);
  return out;
}

}  // namespace psido

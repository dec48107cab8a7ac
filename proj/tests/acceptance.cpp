// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "psido/commands.hpp"
#include "psido/criteria.hpp"
#include "psido/errors.hpp"

using namespace psido;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Result()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = budget_s <= 0.0 || dt <= budget_s;
  const bool ok = r.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %2d %-28s %7.3fs%s  %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), dt,
              in_time ? "" : " (over budget)", r.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const auto T1 = GroupDescriptor::torus(1);
const auto T2 = GroupDescriptor::torus(2);
const auto S3 = GroupDescriptor::su2();

}  // namespace

int main() {
  run(1, "bessel_trace_torus1", 1.0, [] {
    const auto p = dual_series_partials(T1, {2000.0}, [](const DualPoint& xi) { return 1.0 / (1.0 + xi.eigenvalue); });
    const double oracle = 3.1533480949371623;  // pi coth pi
    const double err = std::abs(p.back().second - oracle);
    return Result{err <= 2e-3, fmt("partial=%.10f oracle=%.10f err=%.3e", p.back().second, oracle, err)};
  });

  run(2, "plancherel_hs_equivalence", 5.0, [] {
    const auto s = builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, -1.0));
    const TruncationWindow w(T1, 16.0);
    const auto a = assemble_matrix(s, w);
    const double hs = schatten_partial(singular_values(a), 2.0);
    const double mass =
        extracted_symbol_hs_mass(a, haar_quadrature(T1, resolution_for_degree(2.0 * w.degree())));
    const double rel = std::abs(hs - mass) / hs;
    return Result{rel <= 1e-8, fmt("svd=%.15g symbol=%.15g rel=%.2e", hs, mass, rel)};
  });

  run(3, "threshold_detection", 60.0, [] {
    const auto ladder = dyadic_ladder(4, 512);
    struct Case {
      GroupDescriptor g;
      double m, r;
      Verdict want;
    };
    const Case cases[] = {{T2, -1.3, 2.0, Verdict::convergent},
                          {T2, -0.7, 2.0, Verdict::divergent},
                          {S3, -3.5, 1.0, Verdict::convergent},
                          {S3, -2.5, 1.0, Verdict::divergent}};
    int wrong = 0;
    std::string detail;
    for (const auto& c : cases) {
      const auto s = builtin_bessel(c.g, c.m);
      const auto c4 = condition4_sum(s, c.r, ladder);
      const auto ops = operator_schatten_ladder(s, c.r, ladder);
      const bool threshold = order_threshold(c.m, c.g.dimension(), c.r);
      if (c4.fit.verdict != c.want || ops.fit.verdict != c.want ||
          threshold != (c.want == Verdict::convergent))
        ++wrong;
      detail += c.g.name() + fmt(" m=%g e=%.3f ", c.m, c4.fit.exponent.value_or(NAN)) + to_string(c4.fit.verdict) + "; ";
    }
    return Result{wrong == 0, fmt("misclassified=%g ", wrong) + detail};
  });

  run(4, "atypical_reproduction", 5.0, [] {
    const auto out = atypical_reproduction(1, 0.5, {0.5, 1.0, 2.0}, dyadic_ladder(4, 1024), 10);
    bool ok = out.size() == 6;
    std::string detail;
    for (const auto& o : out) {
      ok = ok && o.verdict == CriterionVerdict::satisfied;
      detail += o.id + "=" + to_string(o.verdict) + " ";
    }
    const auto& sharp = out.back();
    return Result{ok, detail + fmt("max|diff-bracket|=%.1e margin=%g", *sharp.lhs, *out[3].lhs)};
  });

  run(5, "invariant_spectrum_oracle_su2", 30.0, [] {
    const auto s = builtin_bessel(S3, -1.0);
    const TruncationWindow w(S3, 4.0);
    auto got = singular_values(assemble_matrix(s, w, assembly_grid(s, w), AssemblyRoute::quadrature)).expanded();
    std::vector<double> want;
    for (const auto& xi : w.duals())
      for (int k = 0; k < xi.dim * xi.dim; ++k) want.push_back(1.0 / std::sqrt(1.0 + xi.eigenvalue));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    double err = got.size() == want.size() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(got.size(), want.size()); ++i) err = std::max(err, std::abs(got[i] - want[i]));
    return Result{err <= 1e-9, fmt("dim=%g max_err=%.2e", static_cast<double>(got.size()), err)};
  });

  run(6, "russo_random_suite", 10.0, [] {
    const auto o = russo_random_suite(20, 1.5, 8.0, 20240611);
    return Result{o.verdict == CriterionVerdict::satisfied,
                  fmt("violations=%g worst_ratio=%.4f", o.evidence["violations"].get<double>(), *o.lhs)};
  });

  run(7, "regularity_consistency", 10.0, [] {
    bool ok = true;
    std::string detail;
    for (double m : {-2.0, -3.0}) {
      const auto s = builtin_coefficient(BandLimitedFunction::character(T1, {1}), builtin_bessel(T1, m));
      const auto o = regularity_criterion(s, 2.0, 1.0, dyadic_ladder(4, 256));
      ok = ok && o.verdict == CriterionVerdict::satisfied && std::isfinite(*o.rhs);
      detail += fmt("m=%g value=%.6f S1=%.6f ", m, *o.rhs, *o.lhs) + to_string(o.verdict) + " ";
    }
    return Result{ok, detail};
  });

  run(8, "cosphere_average", 1.0, [] {
    const cplx one = cosphere_average([](const GroupPoint&, const std::vector<double>&) { return cplx(1.0); }, 2);
    const cplx odd = cosphere_average(
        [](const GroupPoint&, const std::vector<double>& e) { return cplx(e[0] / std::hypot(e[0], e[1])); }, 2);
    const cplx sq = cosphere_average([](const GroupPoint&, const std::vector<double>& e) { return cplx(e[0] * e[0]); }, 2);
    const bool ok = one == cplx(1.0) && std::abs(odd) <= 1e-10 && std::abs(sq - 0.5) <= 1e-8;
    return Result{ok, fmt("one=%.17g |odd|=%.1e eta1^2=%.17g", one.real(), std::abs(odd), sq.real())};
  });

  run(9, "hausdorff_young", 20.0, [] {
    bool ok = true;
    std::string detail;
    for (const auto& g : {T1, T2, S3}) {
      const auto o = hausdorff_young_suite(g, 50, {1.0, 4.0 / 3.0, 2.0}, 20240611);
      ok = ok && o.verdict == CriterionVerdict::satisfied;
      detail += g.name() + fmt(" violations=%g worst_gap=%.2e ", o.evidence["violations"].get<double>(), *o.lhs);
    }
    return Result{ok, detail};
  });

  run(10, "verify_determinism", 0.0, [] {
    const auto base = std::filesystem::temp_directory_path() / "psido_acceptance";
    std::filesystem::remove_all(base);
    auto config = load_config(PSIDO_REFERENCE_CONFIG);
    std::vector<std::string> outputs;
    int code = 0;
    for (const char* run_dir : {"a", "b"}) {
      config.output = base / run_dir;
      const auto r = cmd_verify(config);
      code = std::max(code, r.exit_code);
      outputs.push_back(slurp(config.output / "criteria.json"));
    }
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    return Result{same && code == exit_pass,
                  fmt("bytes=%g identical=%g exit=%g", static_cast<double>(outputs[0].size()), same, code)};
  });

  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

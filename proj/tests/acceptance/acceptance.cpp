#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "ltlab/runner.hpp"

using namespace ltlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

const ScenarioResult* scenario(const RunManifest& m, const std::string& name) {
  for (const auto& s : m.scenarios) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<const BoundReport*> reports(const RunManifest& m, const std::string& name, const std::string& tag) {
  std::vector<const BoundReport*> out;
  if (const ScenarioResult* s = scenario(m, name)) {
    for (const auto& r : s->reports) {
      if (r.tag == tag) out.push_back(&r);
    }
  }
  return out;
}

double extra(const BoundReport& r, const std::string& key) {
  auto it = r.extras.find(key);
  return it == r.extras.end() ? std::nan("") : it->second;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome constants(const RunManifest& m) {
  const auto exact = reports(m, "constants", "classical-constant");
  const auto printed = reports(m, "constants", "classical-constant-printed");
  if (exact.size() != 3 || printed.size() != 1) return {false, "missing constant reports"};
  double worst = 0.0;
  for (const auto* r : exact) worst = std::max(worst, std::abs(r->lhs - r->rhs) / r->rhs);
  const double dev = std::abs(printed[0]->lhs - 0.013509);
  return {worst <= 1e-14 && dev <= 5e-7, fmt("max rel err %.2e (<= 1e-14), |2L_{1,3} - 0.013509| = %.2e (<= 5e-7)", worst, dev)};
}

Outcome delta_limit(const RunManifest& m) {
  const auto rs = reports(m, "rank-one-delta", "sharp-half");
  if (rs.size() != 3) return {false, "expected three widths"};
  double max_ratio = 0.0, narrow = 0.0;
  for (const auto* r : rs) {
    max_ratio = std::max(max_ratio, r->ratio);
    if (extra(*r, "width") == 1e-3) narrow = r->ratio;
  }
  return {max_ratio <= 1.0 + 1e-3 && narrow >= 0.499,
          fmt("max ratio %.6f (<= 1.001), ratio at width 1e-3 %.6f (>= 0.499)", max_ratio, narrow)};
}

Outcome birman_schwinger(const RunManifest& m) {
  const auto rs = reports(m, "poschl-teller-2", "birman-schwinger");
  if (rs.size() != 1) return {false, "missing report"};
  const double l1 = extra(*rs[0], "lambda_1"), l2 = extra(*rs[0], "lambda_2");
  auto in = [](double x) { return x >= 0.999 && x <= 1.001; };
  return {in(l1) && in(l2), fmt("lambda_1(K_4) = %.9f, lambda_2(K_1) = %.9f (in [0.999, 1.001])", l1, l2)};
}

Outcome kyfan(const RunManifest& m) {
  const auto mono = reports(m, "kyfan-2x2", "kyfan-monotonicity");
  const auto tr = reports(m, "kyfan-2x2", "kyfan-trace");
  if (mono.size() != 1 || tr.size() != 1) return {false, "missing reports"};
  const double trace = extra(*mono[0], "trace");
  const double worst = mono[0]->lhs;
  const double spread = extra(*tr[0], "relative_spread");
  const bool shape = extra(*mono[0], "eps_count") == 12 && extra(*mono[0], "n_max") == 10;
  return {shape && worst <= 1e-9 * trace && spread <= 1e-12,
          fmt("worst increase %.2e (<= 1e-9 trace = %.2e), trace spread %.1e (<= 1e-12)", worst, 1e-9 * trace, spread)};
}

Outcome trace_identities(const RunManifest& m) {
  const double analytic[3] = {-1.0, 1.0, -1.0};
  const char* tags[3] = {"trace-identity-0", "trace-identity-2", "trace-identity-4"};
  double pt = 0.0, random = 0.0;
  bool pass = true;
  for (int i = 0; i < 3; ++i) {
    const auto a = reports(m, "poschl-teller-1", tags[i]);
    const auto b = reports(m, "random-2x2", tags[i]);
    if (a.size() != 1 || b.size() != 1) return {false, std::string("missing ") + tags[i]};
    pt = std::max({pt, std::abs(a[0]->lhs - analytic[i]), std::abs(a[0]->rhs - analytic[i])});
    random = std::max(random, std::abs(b[0]->residual));
    pass = pass && a[0]->pass && b[0]->pass;
  }
  return {pass && pt <= 1e-3 && random <= 5e-3,
          fmt("Poschl-Teller nu=1 max residual %.2e (<= 1e-3), random 2x2 max residual %.2e (<= 5e-3)", pt, random)};
}

Outcome unitarity_positivity(const RunManifest& m) {
  double unit = 0.0, logdet = INFINITY, integral = INFINITY;
  int covered = 0;
  for (const auto& s : m.scenarios) {
    for (const auto& r : s.reports) {
      if (r.tag == "unitarity") unit = std::max(unit, r.lhs), ++covered;
      if (r.tag == "logdet-positivity") logdet = std::min(logdet, r.lhs);
      if (r.tag == "integral-positivity") integral = std::min(integral, r.lhs);
    }
  }
  return {covered >= 5 && unit <= 1e-7 && logdet >= -1e-10 && integral >= -1e-9,
          fmt("over the corpus: max unitarity defect %.2e (<= 1e-7), min log|det A| %.2e (>= -1e-10), min I_j %.2e (>= -1e-9)",
              unit, logdet, integral)};
}

Outcome lifting(const RunManifest& m) {
  const auto rs = reports(m, "lifting", "lifting-identity");
  double worst = 0.0;
  for (const auto* r : rs) worst = std::max(worst, std::abs(r->lhs - r->rhs) / std::abs(r->rhs));
  return {rs.size() == 20 && worst <= 1e-8, fmt("%.0f pairs, max rel err %.2e (<= 1e-8)", double(rs.size()), worst)};
}

Outcome remainder(const RunManifest& m) {
  const auto nonneg = reports(m, "gaussian-weyl", "remainder-nonnegative");
  const auto cap = reports(m, "gaussian-weyl", "remainder-cap");
  const auto slope = reports(m, "gaussian-weyl", "remainder-slope");
  if (nonneg.size() != 1 || cap.size() != 1 || slope.size() != 1) return {false, "missing reports"};
  return {nonneg[0]->pass && cap[0]->pass && slope[0]->lhs <= 1.6,
          fmt("min R %.3e (>= 0), worst R / cap %.3f (<= 1), top-decade slope %.3f (<= 1.6)", nonneg[0]->lhs,
              cap[0]->ratio, slope[0]->lhs)};
}

Outcome two_dimensional(const RunManifest& m) {
  const auto plain = reports(m, "gaussian-2d", "lt-2d");
  const auto magnetic = reports(m, "gaussian-2d", "lt-2d-magnetic");
  const auto gauge = reports(m, "gaussian-2d", "gauge-invariance");
  if (plain.size() != 3 || magnetic.size() != 1 || gauge.empty()) return {false, "missing reports"};
  bool pass = true;
  std::string ratios;
  for (const auto* r : plain) {
    pass = pass && r->pass && r->ratio <= 1.0 + r->tolerance;
    ratios += fmt("%.3f ", r->ratio);
  }
  const auto* mr = magnetic[0];
  pass = pass && mr->pass && mr->spec.factor == 1.0 && mr->spec.gamma == 1.5;
  double shift = 0.0;
  for (const auto* r : gauge) shift = std::max(shift, r->lhs);
  pass = pass && shift <= 1e-8;
  return {pass, "ratios at gamma 3/4, 1, 3/2: " + ratios + fmt("magnetic %.3f, max gauge shift %.2e (<= 1e-8)", mr->ratio, shift)};
}

Outcome fractional(const RunManifest& m) {
  const auto c0 = reports(m, "stable-densities", "stable-c0");
  const auto cross = reports(m, "fractional-gaussian", "fractional-crosscheck");
  const auto moments = reports(m, "fractional-gaussian", "fractional-moment");
  if (c0.size() != 1 || cross.size() != 1) return {false, "missing reports"};
  const double c0_err = std::abs(c0[0]->lhs - std::numbers::pi);
  const double agree = std::abs(cross[0]->ratio - 1.0);
  bool beta4 = false;
  for (const auto* r : moments) {
    if (extra(*r, "beta") == 4.0) beta4 = r->pass;
  }
  return {c0_err <= 1e-6 && agree <= 1e-3 && beta4,
          fmt("|c0 - pi| = %.2e (<= 1e-6), beta=2 vs sharp rel diff %.2e (<= 1e-3), ", c0_err, agree) +
              "beta=4 audit " + (beta4 ? "passes" : "fails")};
}

}  // namespace

int main() {
  const Config config = load_config(LTLAB_SUITE);
  auto t0 = std::chrono::steady_clock::now();
  const RunManifest first = run(config, {1});
  const double t_first = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const RunManifest second = run(config, {2});

  for (const auto& s : first.scenarios) {
    if (!s.error.empty()) std::printf("scenario %s errored: %s\n", s.name.c_str(), s.error.c_str());
  }

  const std::pair<const char*, Outcome (*)(const RunManifest&)> criteria[] = {
      {"classical constants", constants},
      {"sharp gamma=1/2 bound and delta sharpness", delta_limit},
      {"Birman-Schwinger principle", birman_schwinger},
      {"Ky-Fan monotonicity", kyfan},
      {"trace identities", trace_identities},
      {"unitarity and positivity", unitarity_positivity},
      {"lifting identity", lifting},
      {"remainder theorem", remainder},
      {"2D audits", two_dimensional},
      {"fractional cross-check", fractional},
  };

  int failed = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    const Outcome o = check(first);
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", ++index, name, o.detail.c_str());
  }

  const std::string a = strip_timing(to_json(first)).dump();
  const std::string b = strip_timing(to_json(second)).dump();
  const bool same = a == b;
  failed += !same;
  std::printf("[%s] %2d determinism: rerun with 2 jobs %s (%zu bytes without timing)\n", same ? "PASS" : "FAIL", ++index,
              same ? "is bit-identical" : "differs", a.size());

  std::printf("suite: %s in %.1f s per run, %d of %d criteria failed\n", first.pass ? "all reports pass" : "FAILING reports",
              t_first, failed, index);
  return failed == 0 ? 0 : 1;
}

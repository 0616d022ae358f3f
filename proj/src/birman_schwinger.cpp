#include "ltlab/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ltlab/hermitian.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

namespace {

const BoundSpec kBsSpec{std::numeric_limits<double>::quiet_NaN(), 1, Side::upper, 1.0,
                        "Birman-Schwinger principle: 1 = lambda_j(K_{E_j})", "operator kernels"};

}  // namespace

double BSOperator::weighted_trace() const {
  // the diagonal of the symmetric form is w_i tr W_i^2 whatever eps is
  return trace() / scale;
}

KernelSource kernel_source(const MatrixFunctionSplit& split) {
  const SampledPotential& vm = split.negative;
  KernelSource src;
  src.dim = vm.dim();
  src.potential_fingerprint = vm.fingerprint();
  const Interval s = vm.support();
  const double slack = 1e-9 * vm.step();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < vm.size(); ++i) {
    const double x = vm.x(i);
    if (x >= s.lo - slack && x <= s.hi + slack) idx.push_back(i);
  }
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    src.points.push_back(vm.x(i));
    double w = vm.step();
    if (idx.size() == 1) {
      w = vm.step();
    } else if (k == 0 || k + 1 == idx.size()) {
      w *= 0.5;
    }
    src.weights.push_back(w);
    src.roots.push_back(psd_sqrt(vm[i]));
  }
  return src;
}

KernelSource kernel_source(const SampledPotential& v) { return kernel_source(split_parts(v)); }

BSOperator build_L(const KernelSource& src, double epsilon) {
  if (!(epsilon >= 0.0)) throw InvalidArgument("build_L: epsilon must be >= 0");
  const int n = src.dim;
  const int count = static_cast<int>(src.points.size());
  BSOperator op;
  op.epsilon = epsilon;
  op.dim = n;
  op.points = src.points;
  op.weights = src.weights;
  op.potential_fingerprint = src.potential_fingerprint;
  Matrix t(n, count * n);
  for (int i = 0; i < count; ++i) t.block(0, i * n, n, n) = std::sqrt(src.weights[i]) * src.roots[i];
  op.matrix = t.adjoint() * t;
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count; ++j) {
      const double k = std::exp(-epsilon * std::abs(src.points[i] - src.points[j]));
      op.matrix.block(i * n, j * n, n, n) *= k;
    }
  }
  op.matrix = 0.5 * (op.matrix + op.matrix.adjoint()).eval();
  return op;
}

BSOperator build_L(const MatrixFunctionSplit& split, double epsilon) {
  return build_L(kernel_source(split), epsilon);
}

BSOperator build_K(const KernelSource& src, double energy) {
  if (!(energy > 0.0)) throw InvalidArgument("build_K: energy must be positive");
  BSOperator op = build_L(src, std::sqrt(energy));
  op.scale = 1.0 / (2.0 * std::sqrt(energy));
  op.matrix *= op.scale;
  return op;
}

BSOperator build_K(const MatrixFunctionSplit& split, double energy) { return build_K(kernel_source(split), energy); }

std::vector<double> bs_eigenvalues(const BSOperator& op) {
  const RealVector ev = hermitian_eigenvalues(op.matrix);
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<double> kyfan_partial_sums(const BSOperator& op, int n_max) {
  return descending_partial_sums(op.matrix, n_max);
}

std::string KyFanProfile::to_csv() const {
  std::ostringstream os;
  os << "epsilon";
  const std::size_t cols = partial_sums.empty() ? 0 : partial_sums.front().size();
  for (std::size_t n = 1; n <= cols; ++n) os << ",n" << n;
  os << ",trace\n";
  for (std::size_t r = 0; r < epsilons.size(); ++r) {
    os << format_double(epsilons[r]);
    for (double s : partial_sums[r]) os << ',' << format_double(s);
    os << ',' << format_double(traces[r]) << '\n';
  }
  return os.str();
}

std::vector<double> default_epsilon_grid(int count) {
  if (count < 2) throw InvalidArgument("epsilon grid needs at least 2 values");
  std::vector<double> eps{0.0};
  const int m = count - 1;
  for (int i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / (m - 1);
    eps.push_back(std::pow(10.0, -3.0 + 5.0 * t));
  }
  return eps;
}

MonotonicityResult monotonicity_audit(const KernelSource& src, const std::vector<double>& epsilons, int n_max) {
  if (epsilons.empty() || epsilons.front() != 0.0) throw InvalidArgument("monotonicity_audit: eps grid must start at 0");
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) {
    throw InvalidArgument("monotonicity_audit: eps grid must be ascending");
  }
  MonotonicityResult out;
  out.profile.epsilons = epsilons;
  double weighted = 0.0;
  for (double eps : epsilons) {
    const BSOperator op = build_L(src, eps);
    const int size = static_cast<int>(op.matrix.rows());
    const int cols = std::min(n_max, size);
    out.profile.partial_sums.push_back(size > 0 ? kyfan_partial_sums(op, cols) : std::vector<double>{});
    out.profile.traces.push_back(op.trace());
    weighted = op.weighted_trace();
  }
  double worst = -std::numeric_limits<double>::infinity();
  int worst_n = 0;
  double worst_lo = 0.0, worst_hi = 0.0;
  const auto& rows = out.profile.partial_sums;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    for (std::size_t n = 0; n < rows[k].size(); ++n) {
      const double gap = rows[k + 1][n] - rows[k][n];
      if (gap > worst) {
        worst = gap;
        worst_n = static_cast<int>(n + 1);
        worst_lo = epsilons[k];
        worst_hi = epsilons[k + 1];
      }
    }
  }
  if (!std::isfinite(worst)) worst = 0.0;
  const double trace = std::abs(out.profile.traces.front());
  BoundSpec mono{std::numeric_limits<double>::quiet_NaN(), 1, Side::upper, 1.0,
                 "Ky-Fan partial sums of L_eps are non-increasing in eps", "operator kernels"};
  out.monotone = make_report("kyfan-monotonicity", mono, worst, 0.0, 0.0, 1e-9 * trace);
  out.monotone.extras["worst_n"] = worst_n;
  out.monotone.extras["worst_eps_lo"] = worst_lo;
  out.monotone.extras["worst_eps_hi"] = worst_hi;
  out.monotone.extras["trace"] = trace;
  out.monotone.extras["n_max"] = rows.empty() ? 0 : static_cast<double>(rows.front().size());
  out.monotone.extras["eps_count"] = static_cast<double>(epsilons.size());

  const auto [lo, hi] = std::minmax_element(out.profile.traces.begin(), out.profile.traces.end());
  BoundSpec tr{std::numeric_limits<double>::quiet_NaN(), 1, Side::identity, 1.0,
               "trace of L_eps is independent of eps", "operator kernels"};
  out.trace = make_report("kyfan-trace", tr, *hi, *lo, 1e-12, 0.0);
  out.trace.extras["weighted_trace"] = weighted;
  out.trace.extras["relative_spread"] = trace > 0.0 ? (*hi - *lo) / trace : 0.0;
  return out;
}

namespace {

void require_nonpositive(const SampledPotential& v, const char* who) {
  for (const Matrix& m : v.values()) {
    if (hermitian_eigenvalues(m).maxCoeff() > kSupportThreshold) {
      throw InvalidArgument(std::string(who) + ": potential has a nonzero positive part");
    }
  }
}

/// j-th largest eigenvalue of K_{E_j} (j = 0, 1, ...), on one kernel source.
std::vector<double> bs_levels(const KernelSource& src, const std::vector<double>& energies) {
  std::vector<double> out;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    const auto ev = bs_eigenvalues(build_K(src, energies[j]));
    out.push_back(j < ev.size() ? ev[j] : 0.0);
  }
  return out;
}

}  // namespace

BoundReport birman_schwinger_audit(const SampledPotential& v, const NegativeSpectrum& spec, double tolerance) {
  require_nonpositive(v, "birman_schwinger_audit");
  if (spec.empty()) return vacuous_report("birman-schwinger", kBsSpec, "empty negative spectrum");
  const std::vector<double> coarse = bs_levels(kernel_source(v), spec.energies);
  std::vector<double> lambda = coarse;
  double refinement = 0.0;
  std::string provenance = "kernel step " + format_double(v.step());
  if (v.profile()) {
    const std::vector<double> fine = bs_levels(kernel_source(v.resampled(0.5 * v.step())), spec.energies);
    for (std::size_t j = 0; j < lambda.size(); ++j) {
      lambda[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
      refinement = std::max(refinement, std::abs(fine[j] - coarse[j]) / 3.0);
    }
    provenance += " and " + format_double(0.5 * v.step()) + " (Richardson)";
  }
  double worst = 0.0;
  BoundReport r;
  for (double l : lambda) worst = std::max(worst, std::abs(l - 1.0));
  r = make_report("birman-schwinger", kBsSpec, worst, 0.0, 0.0, tolerance, provenance);
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    r.extras["lambda_" + std::to_string(j + 1)] = lambda[j];
    r.extras["E_" + std::to_string(j + 1)] = spec.energies[j];
  }
  r.extras["richardson_error"] = refinement;
  r.extras["spectrum_error"] = spec.max_error();
  return r;
}

BoundReport sum_rule_audit(const SampledPotential& v, const NegativeSpectrum& spec, double tolerance) {
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::identity, 1.0,
              "sum rule 2 sum_j sqrt(E_j) = sum_j lambda_j(L_sqrt(E_j))", "operator kernels"};
  require_nonpositive(v, "sum_rule_audit");
  if (spec.empty()) return vacuous_report("bs-sum-rule", s, "empty negative spectrum");
  auto levels = [&](const KernelSource& src) {
    double sum = 0.0;
    for (std::size_t j = 0; j < spec.size(); ++j) {
      const auto ev = bs_eigenvalues(build_L(src, std::sqrt(spec.energies[j])));
      if (j < ev.size()) sum += ev[j];
    }
    return sum;
  };
  double value = levels(kernel_source(v));
  double refinement = 0.0;
  if (v.profile()) {
    const double fine = levels(kernel_source(v.resampled(0.5 * v.step())));
    refinement = std::abs(fine - value) / 3.0;
    value = (4.0 * fine - value) / 3.0;
  }
  double target = 0.0;
  for (double e : spec.energies) target += 2.0 * std::sqrt(e);
  BoundReport r = make_report("bs-sum-rule", s, value, target, tolerance, 0.0);
  r.extras["richardson_error"] = refinement;
  return r;
}

double cauchy_kernel_transform(double epsilon, double u) {
  if (!(epsilon > 0.0)) throw InvalidArgument("cauchy kernel: epsilon must be positive");
  const double t = std::abs(u);
  if (t == 0.0) return 1.0;  // normalisation of the density: (2/pi) arctan(inf)
  const auto g = [epsilon](double p) { return epsilon / (p * p + epsilon * epsilon); };
  const auto dg = [epsilon](double p) {
    const double q = p * p + epsilon * epsilon;
    return -2.0 * epsilon * p / (q * q);
  };
  // two integrations by parts leave a remainder bounded by |g'(P)| / t^2
  const double target = 1e-13;
  double cutoff = std::cbrt(2.0 * epsilon / (target * t * t));
  cutoff = std::max({cutoff, 20.0 * epsilon, 4.0 * std::numbers::pi / t});
  const double period = std::numbers::pi / t;
  const int panels = static_cast<int>(std::ceil(cutoff / period));
  cutoff = panels * period;
  double body = 0.0;
  for (int k = 0; k < panels; ++k) {
    body += quad::gauss_kronrod([&](double p) { return std::cos(p * t) * g(p); }, k * period, (k + 1) * period, 1e-15,
                                1e-13)
                .value;
  }
  const double tail = -std::sin(cutoff * t) * g(cutoff) / t - std::cos(cutoff * t) * dg(cutoff) / (t * t);
  return (2.0 / std::numbers::pi) * (body + tail);
}

BoundReport cauchy_kernel_identity_check(double epsilon, const std::vector<double>& us, double tolerance) {
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::upper, 1.0,
              "Cauchy density transforms to exp(-eps|u|)", "operator kernels"};
  double worst = 0.0;
  double worst_u = 0.0;
  for (double u : us) {
    const double exact = std::exp(-epsilon * std::abs(u));
    const double err = std::abs(cauchy_kernel_transform(epsilon, u) - exact) / exact;
    if (err > worst) {
      worst = err;
      worst_u = u;
    }
  }
  BoundReport r = make_report("cauchy-kernel", s, worst, 0.0, 0.0, tolerance);
  r.extras["epsilon"] = epsilon;
  r.extras["worst_u"] = worst_u;
  r.note = "p-integral cut at P with two-term integration-by-parts tail, remainder <= |g'(P)|/u^2 <= 1e-13";
  return r;
}

}  // namespace ltlab

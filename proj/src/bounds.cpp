#include "ltlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ltlab/hermitian.hpp"
#include "ltlab/parallel.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::string kKernelTopic = "operator kernels";
const std::string kLiftTopic = "moment bounds and lifting";
const std::string kTraceTopic = "scattering and trace identities";
const std::string kWeylTopic = "semiclassical limit";

void require_nonpositive(const SampledPotential& v, const char* who) {
  for (const Matrix& m : v.values()) {
    if (hermitian_eigenvalues(m).maxCoeff() > kSupportThreshold) {
      throw InvalidArgument(std::string(who) + ": potential has a nonzero positive part");
    }
  }
}

std::string spectrum_provenance(const NegativeSpectrum& spec) {
  return "box [" + format_double(spec.grid.center - spec.grid.half_length) + ", " +
         format_double(spec.grid.center + spec.grid.half_length) + "], M=" + std::to_string(spec.grid.points) +
         ", Richardson level " + std::to_string(spec.extrapolation_level);
}

}  // namespace

double classical_constant(double gamma, int d) {
  if (!(gamma >= 0.0) || d < 1) throw InvalidArgument("classical_constant: need gamma >= 0 and d >= 1");
  const double half_d = 0.5 * d;
  return std::exp(std::lgamma(gamma + 1.0) - std::lgamma(gamma + half_d + 1.0) - d * std::numbers::ln2 -
                  half_d * std::log(std::numbers::pi));
}

bool admissible(double gamma, int d) {
  if (d == 1) return gamma >= 0.5;
  if (d == 2) return gamma > 0.0;
  return d >= 3 && gamma >= 0.0;
}

double lt_factor(double gamma, int d) {
  if (!admissible(gamma, d) || gamma < 0.5) {
    throw InvalidArgument("lt_factor: no audited constant for gamma=" + format_double(gamma) + ", d=" +
                          std::to_string(d));
  }
  if (gamma >= 1.5) return 1.0;
  if (d == 1 || gamma >= 1.0) return 2.0;
  return 4.0;
}

BoundReport product_identity_check(double gamma, int d) {
  if (!(gamma >= 0.5) || d < 2) throw InvalidArgument("product_identity_check: need gamma >= 1/2 and d >= 2");
  const double lhs = classical_constant(gamma, 1) * classical_constant(gamma + 0.5, d - 1);
  const double rhs = classical_constant(gamma, d);
  BoundSpec s{gamma, d, Side::identity, 1.0, "L^cl_{g,1} L^cl_{g+1/2,d-1} = L^cl_{g,d}", kLiftTopic};
  return make_report("product-identity", s, lhs, rhs, 1e-13, 0.0);
}

double trace_power_error(const SampledPotential& v, Part part, double p) {
  if (!v.profile() || !v.is_smooth()) return 0.0;  // piecewise integrals are exact on their pieces
  const double fine = trace_power_integral(v, part, p);
  const double coarse = trace_power_integral(v.resampled(2.0 * v.step()), part, p);
  return std::abs(fine - coarse) / 15.0;
}

BoundReport sharp_half_audit(const SampledPotential& v, const NegativeSpectrum& spec) {
  require_nonpositive(v, "sharp_half_audit");
  const double lhs = riesz_mean(spec, 0.5);
  const double rhs = 0.5 * trace_power_integral(v, Part::minus, 1.0);
  const double budget = riesz_mean_error(spec, 0.5) + 0.5 * trace_power_error(v, Part::minus, 1.0);
  BoundSpec s{0.5, 1, Side::upper, 2.0, "sharp bound sum E^{1/2} <= (1/2) int tr V-", kKernelTopic};
  BoundReport r = make_report("sharp-half", s, lhs, rhs, 0.0, budget, spectrum_provenance(spec));
  r.extras["bound_states"] = static_cast<double>(spec.size());
  return r;
}

BoundReport lifted_moment_audit(const SampledPotential& v, const NegativeSpectrum& spec, double gamma) {
  if (!(gamma >= 0.5)) throw InvalidArgument("lifted_moment_audit: gamma must be >= 1/2");
  require_nonpositive(v, "lifted_moment_audit");
  const double factor = lt_factor(gamma, 1);
  const double lcl = classical_constant(gamma, 1);
  const double lhs = riesz_mean(spec, gamma);
  const double rhs = factor * lcl * trace_power_integral(v, Part::minus, gamma + 0.5);
  const double budget = riesz_mean_error(spec, gamma) + factor * lcl * trace_power_error(v, Part::minus, gamma + 0.5);
  BoundSpec s{gamma, 1, Side::upper, factor,
              factor == 1.0 ? "sum E^g <= L^cl_{g,1} int tr V-^{g+1/2} (g >= 3/2)"
                            : "sum E^g <= 2 L^cl_{g,1} int tr V-^{g+1/2} (1/2 <= g < 3/2)",
              kLiftTopic};
  return make_report("lifted-moment", s, lhs, rhs, 0.0, budget, spectrum_provenance(spec));
}

double lifting_integral(double gamma, double s) {
  if (!(gamma > 0.5)) throw InvalidArgument("lifting identity needs gamma > 1/2");
  if (s >= 0.0) return 0.0;
  const double a = gamma - 0.5;
  const double inv_c = std::exp(std::lgamma(a) + std::lgamma(1.5) - std::lgamma(a + 1.5));  // B(a, 3/2)
  // t = |s| tau, tau = u^{1/a}: t^{a-1} dt turns into |s|^a du / a and the
  // endpoint singularity at t = 0 disappears
  const auto f = [a](double u) { return std::sqrt(-std::expm1(std::log(u) / a)); };
  const double integral = quad::tanh_sinh(f, 0.0, 1.0, 1e-14).value / a;
  return std::pow(-s, gamma) * integral / inv_c;
}

BoundReport lifting_identity_check(double gamma, double s, double tolerance) {
  const double lhs = lifting_integral(gamma, s);
  const double rhs = s < 0.0 ? std::pow(-s, gamma) : 0.0;
  BoundSpec spec{gamma, 1, Side::identity, 1.0, "s_-^g = C_g int t^{g-3/2} (s+t)_-^{1/2} dt", kLiftTopic};
  BoundReport r = make_report("lifting-identity", spec, lhs, rhs, tolerance, 0.0);
  r.extras["s"] = s;
  return r;
}

std::vector<BoundReport> lower_bound_audit(const SampledPotential& v, const NegativeSpectrum& spec) {
  const double l = classical_constant(0.5, 1);
  const double minus = trace_power_integral(v, Part::minus, 1.0);
  const double plus = trace_power_integral(v, Part::plus, 1.0);
  const double err = trace_power_error(v, Part::minus, 1.0) + trace_power_error(v, Part::plus, 1.0);
  const double sum = riesz_mean(spec, 0.5);
  const double serr = riesz_mean_error(spec, 0.5);
  const std::string prov = spectrum_provenance(spec);
  BoundSpec lo{0.5, 1, Side::lower, 1.0, "lower bound L^cl_{1/2,1} int (tr V- - tr V+) <= sum E^{1/2}", kTraceTopic};
  BoundSpec hi{0.5, 1, Side::upper, 2.0, "upper side sum E^{1/2} <= 2 L^cl_{1/2,1} int tr V-", kTraceTopic};
  return {make_report("lower-bound", lo, sum, l * (minus - plus), 0.0, serr + l * err, prov),
          make_report("two-sided-upper", hi, sum, 2.0 * l * minus, 0.0, serr + 2.0 * l * err, prov)};
}

std::vector<BoundReport> holder_chain_audit(const SampledPotential& v, const ScatteringData& data,
                                            const NegativeSpectrum& spec) {
  if (data.potential_fingerprint != v.fingerprint() || spec.potential_fingerprint != v.fingerprint()) {
    throw InvalidArgument("holder_chain_audit: inputs come from different potentials");
  }
  const double lh = classical_constant(0.5, 1);
  const double l5 = classical_constant(2.5, 1);
  const double pm = trace_power_integral(v, Part::minus, 1.0) + trace_power_integral(v, Part::plus, 1.0);
  const double p3 = trace_power_integral(v, Part::plus, 3.0);
  const std::string prov = "k in [" + format_double(data.k_min) + ", " + format_double(data.k_max) + "]";
  std::vector<BoundReport> out;
  BoundSpec b1{0.5, 1, Side::upper, 1.0, "I_0 <= L^cl_{1/2,1} int (tr V+ + tr V-)", kTraceTopic};
  out.push_back(make_report("holder-I0", b1, data.I[0], lh * pm, 0.0, data.error[0], prov));
  BoundSpec b2{2.5, 1, Side::upper, 1.0, "5 I_4 <= L^cl_{5/2,1} int tr V+^3 + (1/2) L^cl_{5/2,1} int tr V'^2",
               kTraceTopic};
  if (v.is_smooth()) {
    const double dv = derivative_square_integral(v);
    out.push_back(make_report("holder-I4", b2, 5.0 * data.I[2], l5 * p3 + 0.5 * l5 * dv, 0.0, 5.0 * data.error[2], prov));
  } else {
    BoundReport r = vacuous_report("holder-I4", b2, "potential has jumps: I_4 and int tr V'^2 diverge");
    r.inconclusive = true;
    out.push_back(r);
  }
  BoundSpec b3{1.5, 1, Side::upper, 1.0, "I_2 <= I_0^{1/2} I_4^{1/2}", kTraceTopic};
  if (std::isfinite(data.I[2])) {
    const double i0 = std::max(data.I[0], 0.0);
    const double i4 = std::max(data.I[2], 0.0);
    const double rhs = std::sqrt(i0 * i4);
    // first-order propagation of the integral errors through the square root
    double budget = data.error[1];
    if (rhs > 0.0) budget += 0.5 * rhs * (data.error[0] / std::max(i0, 1e-300) + data.error[2] / std::max(i4, 1e-300));
    else budget += std::sqrt(data.error[0] * data.error[2]) + std::sqrt(data.error[0] * i4) + std::sqrt(i0 * data.error[2]);
    out.push_back(make_report("holder-I2", b3, data.I[1], rhs, 0.0, budget, prov));
  } else {
    BoundReport r = vacuous_report("holder-I2", b3, "I_4 diverges for potentials with jumps");
    r.inconclusive = true;
    out.push_back(r);
  }
  return out;
}

NegativeSpectrum scaled_spectrum(const SampledPotential& v, double alpha, const SweepOptions& o) {
  if (!(alpha > 0.0)) throw InvalidArgument("scaled_spectrum: alpha must be positive");
  const SampledPotential va = scaled(v, alpha);
  double step = o.base_step / std::sqrt(alpha);
  if (va.profile()) step = std::min(step, va.profile()->feature_width() / 16.0);
  const Grid1D grid = auto_grid(va, step, o.edge_threshold, o.cap);
  return refined_negative_spectrum(va, grid, o.levels, o.edge_threshold);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw InvalidArgument("log_spaced: need n >= 2 and 0 < lo < hi");
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(i + 1 == n ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  }
  return out;
}

namespace {

std::vector<NegativeSpectrum> sweep_spectra(const SampledPotential& v, const std::vector<double>& alphas,
                                            const SweepOptions& o) {
  std::vector<NegativeSpectrum> out(alphas.size());
  parallel_for(alphas.size(), o.threads, [&](std::size_t i) { out[i] = scaled_spectrum(v, alphas[i], o); });
  return out;
}

}  // namespace

RemainderSweep remainder_sweep(const SampledPotential& v, const std::vector<double>& alphas, const SweepOptions& o,
                               double slope_limit) {
  require_nonpositive(v, "remainder_sweep");
  if (alphas.size() < 6) throw InvalidArgument("remainder_sweep: need at least 6 alpha values");
  if (!std::is_sorted(alphas.begin(), alphas.end())) throw InvalidArgument("remainder_sweep: alphas must ascend");
  const double m1 = trace_power_integral(v, Part::minus, 1.0);
  const double m2 = trace_power_integral(v, Part::minus, 2.0);
  const double m2err = trace_power_error(v, Part::minus, 2.0);
  const double dv = derivative_square_integral(v);
  const double l = classical_constant(1.5, 1);
  RemainderSweep out;
  out.alphas = alphas;
  const auto spectra = sweep_spectra(v, alphas, o);
  BoundSpec lower{1.5, 1, Side::lower, 1.0, "remainder R(alpha) >= 0", kWeylTopic};
  BoundSpec upper{1.5, 1, Side::upper, 1.0,
                  "remainder R(alpha) <= (3 alpha^{3/2}/16) (int tr V-)^{1/2} (int tr V'^2)^{1/2}", kWeylTopic};
  double worst_low = std::numeric_limits<double>::infinity(), worst_low_budget = 0.0, worst_low_alpha = 0.0;
  double worst_ratio = -std::numeric_limits<double>::infinity();
  std::size_t worst_up = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double a = alphas[i];
    const double riesz = riesz_mean(spectra[i], 1.5);
    const double r = a * a * l * m2 - riesz;
    const double cap = 3.0 * std::pow(a, 1.5) / 16.0 * std::sqrt(m1) * std::sqrt(dv);
    const double budget = riesz_mean_error(spectra[i], 1.5) + a * a * l * m2err;
    out.riesz.push_back(riesz);
    out.remainder.push_back(r);
    out.cap.push_back(cap);
    out.budget.push_back(budget);
    if (r + budget < worst_low + worst_low_budget) {
      worst_low = r;
      worst_low_budget = budget;
      worst_low_alpha = a;
    }
    const double ratio = (r - budget) / cap;
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_up = i;
    }
  }
  BoundReport lo = make_report("remainder-nonnegative", lower, worst_low, 0.0, 0.0, worst_low_budget);
  lo.extras["alpha"] = worst_low_alpha;
  lo.note = "worst alpha of the sweep";
  BoundReport hi = make_report("remainder-cap", upper, out.remainder[worst_up], out.cap[worst_up], 0.0,
                               out.budget[worst_up]);
  hi.extras["alpha"] = alphas[worst_up];
  hi.note = "alpha with the largest R / cap";

  // slope over the top decade
  std::vector<double> xs, ys;
  const double top = alphas.back();
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i] >= top / 10.0 * (1.0 - 1e-12) && out.remainder[i] > 0.0) {
      xs.push_back(std::log(alphas[i]));
      ys.push_back(std::log(out.remainder[i]));
    }
  }
  BoundSpec slope_spec{1.5, 1, Side::upper, 1.0, "remainder is O(alpha^{3/2}): top-decade log-log slope", kWeylTopic};
  BoundReport sl;
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    out.slope = sxy / sxx;
    sl = make_report("remainder-slope", slope_spec, out.slope, slope_limit, 0.0, 0.0);
    sl.extras["points"] = static_cast<double>(xs.size());
  } else {
    sl = vacuous_report("remainder-slope", slope_spec, "fewer than two positive remainders in the top decade");
    sl.inconclusive = true;
  }
  out.reports = {lo, hi, sl};
  for (auto& r : out.reports) {
    r.provenance = "base step " + format_double(o.base_step) + "/sqrt(alpha), Richardson level " +
                   std::to_string(o.levels) + ", " + std::to_string(alphas.size()) + " alphas in [" +
                   format_double(alphas.front()) + ", " + format_double(alphas.back()) + "]";
  }
  return out;
}

std::string RemainderSweep::to_csv() const {
  std::ostringstream os;
  os << "alpha,remainder,cap,budget,riesz_3_2\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    os << format_double(alphas[i]) << ',' << format_double(remainder[i]) << ',' << format_double(cap[i]) << ','
       << format_double(budget[i]) << ',' << format_double(riesz[i]) << '\n';
  }
  return os.str();
}

WeylSweep weyl_ratio_sweep(const SampledPotential& v, double gamma, const std::vector<double>& alphas,
                           const SweepOptions& o, double limit_tolerance) {
  require_nonpositive(v, "weyl_ratio_sweep");
  if (!(gamma >= 0.5)) throw InvalidArgument("weyl_ratio_sweep: gamma must be >= 1/2");
  const double l = classical_constant(gamma, 1);
  const double m = trace_power_integral(v, Part::minus, gamma + 0.5);
  WeylSweep out;
  out.gamma = gamma;
  out.alphas = alphas;
  const auto spectra = sweep_spectra(v, alphas, o);
  double worst = 0.0, worst_budget = 0.0, worst_alpha = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double denom = std::pow(alphas[i], gamma + 0.5) * l * m;
    const double ratio = denom > 0.0 ? riesz_mean(spectra[i], gamma) / denom : 0.0;
    out.ratios.push_back(ratio);
    if (ratio >= worst) {
      worst = ratio;
      worst_budget = denom > 0.0 ? riesz_mean_error(spectra[i], gamma) / denom : 0.0;
      worst_alpha = alphas[i];
    }
  }
  const double factor = lt_factor(gamma, 1);
  BoundSpec cap{gamma, 1, Side::upper, factor, "Riesz mean over its Weyl term stays below the audited factor",
                kWeylTopic};
  BoundReport c = make_report("weyl-cap", cap, worst, factor, 0.0, worst_budget);
  c.extras["alpha"] = worst_alpha;
  out.reports.push_back(c);
  if (limit_tolerance > 0.0 && !alphas.empty()) {
    BoundSpec lim{gamma, 1, Side::identity, 1.0, "Weyl asymptotics: ratio tends to 1", kWeylTopic};
    BoundReport r = make_report("weyl-limit", lim, out.ratios.back(), 1.0, limit_tolerance, 0.0);
    r.extras["alpha"] = alphas.back();
    out.reports.push_back(r);
  }
  return out;
}

std::string WeylSweep::to_csv() const {
  std::ostringstream os;
  os << "alpha,ratio\n";
  for (std::size_t i = 0; i < alphas.size(); ++i) os << format_double(alphas[i]) << ',' << format_double(ratios[i]) << '\n';
  return os.str();
}

DeltaSweep delta_limit_sweep(double c, const std::vector<double>& widths, int dim, double sharpness_floor,
                             unsigned threads) {
  if (widths.empty()) throw InvalidArgument("delta_limit_sweep: no widths");
  DeltaSweep out;
  out.widths = widths;
  std::vector<BoundReport> audits(widths.size());
  std::vector<double> ratios(widths.size()), energies(widths.size());
  parallel_for(widths.size(), threads, [&](std::size_t i) {
    FamilySpec f;
    f.tag = FamilyTag::rank_one_narrow;
    f.integral = c;
    f.width = widths[i];
    f.dim = dim;
    const SampledPotential v = build_family(f);
    const NegativeSpectrum spec = refined_negative_spectrum(v, auto_grid(v, widths[i] / 16.0, 1e-8, 30.0), 1);
    audits[i] = sharp_half_audit(v, spec);
    audits[i].extras["width"] = widths[i];
    ratios[i] = audits[i].ratio;
    energies[i] = spec.empty() ? 0.0 : spec.energies.front();
  });
  out.ratios = ratios;
  out.energies = energies;
  out.reports = audits;
  const auto narrow = static_cast<std::size_t>(std::min_element(widths.begin(), widths.end()) - widths.begin());
  BoundSpec s{0.5, 1, Side::lower, 2.0, "rank-one narrow wells approach equality in the sharp bound", kKernelTopic};
  BoundReport r = make_report("delta-sharpness", s, ratios[narrow], sharpness_floor, 0.0, audits[narrow].budget /
                                                                                              std::max(audits[narrow].rhs, 1e-300));
  r.extras["width"] = widths[narrow];
  r.extras["E_1"] = energies[narrow];
  r.extras["delta_limit_E"] = c * c / 4.0;
  out.reports.push_back(r);
  return out;
}

}  // namespace ltlab

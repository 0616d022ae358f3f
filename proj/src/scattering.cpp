#include "ltlab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "ltlab/hermitian.hpp"
#include "ltlab/parallel.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

namespace {

constexpr Complex kI(0.0, 1.0);

/// Generator of the first-order system (F, F')' = M (F, F').
Matrix generator(const Matrix& v, double k) {
  const int n = static_cast<int>(v.rows());
  Matrix m = Matrix::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n).setIdentity();
  m.bottomLeftCorner(n, n) = v;
  m.bottomLeftCorner(n, n).diagonal().array() -= k * k;
  return m;
}

/// exp(t M) for constant V in closed form, channel by channel in the
/// eigenbasis of V; the generic matrix exponential loses ~|k|^2 t eps here.
Matrix constant_propagator(const Matrix& v, double k, double t) {
  const int n = static_cast<int>(v.rows());
  const EigenPairs e = hermitian_eigenpairs(0.5 * (v + v.adjoint()));
  Vector c(n), s(n), sp(n);  // cos-like, sin-like / q, q^2 * sin-like / q
  for (int j = 0; j < n; ++j) {
    const double q2 = k * k - e.values(j);
    if (q2 > 0.0) {
      const double q = std::sqrt(q2);
      c(j) = std::cos(q * t);
      s(j) = std::sin(q * t) / q;
      sp(j) = -q * std::sin(q * t);
    } else if (q2 < 0.0) {
      const double q = std::sqrt(-q2);
      c(j) = std::cosh(q * t);
      s(j) = std::sinh(q * t) / q;
      sp(j) = q * std::sinh(q * t);
    } else {
      c(j) = 1.0;
      s(j) = t;
      sp(j) = 0.0;
    }
  }
  const Matrix& u = e.vectors;
  Matrix p(2 * n, 2 * n);
  p.topLeftCorner(n, n) = u * c.asDiagonal() * u.adjoint();
  p.topRightCorner(n, n) = u * s.asDiagonal() * u.adjoint();
  p.bottomLeftCorner(n, n) = u * sp.asDiagonal() * u.adjoint();
  p.bottomRightCorner(n, n) = p.topLeftCorner(n, n);
  return p;
}

}  // namespace

double log_abs_det(const Matrix& a) {
  Eigen::PartialPivLU<Matrix> lu(a);
  const Matrix& u = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) s += std::log(std::abs(u(i, i)));
  return s;
}

JostSolution jost_solve(const SampledPotential& v, double k, const JostOptions& options) {
  if (!std::isfinite(k) || std::abs(k) < kJostMinMomentum) {
    throw InvalidArgument("jost_solve: |k| must be >= " + format_double(kJostMinMomentum));
  }
  const int n = v.dim();
  JostSolution out;
  out.k = k;
  const Interval s = v.support();
  if (s.length() <= 0.0) {
    out.A = Matrix::Identity(n, n);
    out.B = Matrix::Zero(n, n);
    return out;
  }
  const double max_step = options.max_step > 0.0 ? options.max_step : 0.5 * v.step();
  const double step = std::min(max_step, 1.0 / (8.0 * std::abs(k)));

  std::vector<double> cuts{s.lo};
  for (double b : v.breakpoints()) {
    if (b > s.lo && b < s.hi) cuts.push_back(b);
  }
  cuts.push_back(s.hi);
  const bool constant_pieces = v.profile() && v.profile()->piecewise_constant();

  Matrix y(2 * n, n);
  const Complex phase_hi = std::exp(kI * (k * s.hi));
  y.topRows(n) = phase_hi * Matrix::Identity(n, n);
  y.bottomRows(n) = (kI * k * phase_hi) * Matrix::Identity(n, n);

  constexpr double c1 = 0.5 - 0.28867513459481288225;  // Gauss nodes 1/2 -+ sqrt(3)/6
  constexpr double c2 = 0.5 + 0.28867513459481288225;
  constexpr double comm = 0.14433756729740644113;  // sqrt(3)/12
  for (std::size_t seg = cuts.size() - 1; seg > 0; --seg) {
    const double a = cuts[seg - 1];
    const double b = cuts[seg];
    if (b <= a) continue;
    if (constant_pieces) {
      y = constant_propagator(v.cell_mean(a, b), k, a - b) * y;
      ++out.steps;
      continue;
    }
    const int nsteps = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
    const double h = -(b - a) / nsteps;
    for (int i = 0; i < nsteps; ++i) {
      const double x0 = b + i * h;
      const Matrix m1 = generator(v.at(x0 + c1 * h), k);
      const Matrix m2 = generator(v.at(x0 + c2 * h), k);
      const Matrix omega = (0.5 * h) * (m1 + m2) + (comm * h * h) * (m2 * m1 - m1 * m2);
      y = omega.exp() * y;
    }
    out.steps += nsteps;
  }
  const Matrix f = y.topRows(n);
  const Matrix fp = y.bottomRows(n);
  const double x0 = s.lo;
  const Complex ik = kI * k;
  out.A = (std::exp(-kI * (k * x0)) / (2.0 * ik)) * (ik * f + fp);
  out.B = (std::exp(kI * (k * x0)) / (2.0 * ik)) * (ik * f - fp);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ScatteringSample solve_pair(const SampledPotential& v, double k, const JostOptions& jo) {
  ScatteringSample s;
  s.k = k;
  JostSolution p = jost_solve(v, k, jo);
  JostSolution m = jost_solve(v, -k, jo);
  s.A = std::move(p.A);
  s.B = std::move(p.B);
  s.A_neg = std::move(m.A);
  s.B_neg = std::move(m.B);
  s.logdet_pos = log_abs_det(s.A);
  s.logdet_neg = log_abs_det(s.A_neg);
  const int n = static_cast<int>(s.A.rows());
  const Matrix r = s.A * s.A.adjoint() - Matrix::Identity(n, n) - s.B_neg * s.B_neg.adjoint();
  s.unitarity = max_entry_norm(r);
  return s;
}

std::vector<ScatteringSample> solve_many(const SampledPotential& v, const std::vector<double>& ks,
                                         const JostOptions& jo, unsigned threads) {
  std::vector<ScatteringSample> out(ks.size());
  parallel_for(ks.size(), threads, [&](std::size_t i) { out[i] = solve_pair(v, ks[i], jo); });
  return out;
}

/// Simpson value and |S_h - S_2h| / 15 (intervals must be a multiple of 4).
std::pair<double, double> simpson_with_error(const std::vector<double>& f, double h) {
  const double fine = quad::simpson(f, h);
  std::vector<double> half;
  for (std::size_t i = 0; i < f.size(); i += 2) half.push_back(f[i]);
  const double coarse = quad::simpson(half, 2.0 * h);
  return {fine, std::abs(fine - coarse) / 15.0};
}

/// int_0^m k^j (a + b ln k + c k) dk
double gap_integral(const std::array<double, 3>& coef, double m, int j) {
  const double p = j + 1.0;
  const double mp = std::pow(m, p);
  return coef[0] * mp / p + coef[1] * mp * (std::log(m) / p - 1.0 / (p * p)) + coef[2] * mp * m / (p + 1.0);
}

std::array<double, 3> fit_gap(const std::array<double, 3>& ks, const std::array<double, 3>& ls) {
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    m(i, 0) = 1.0;
    m(i, 1) = std::log(ks[i]);
    m(i, 2) = ks[i];
    rhs(i) = ls[i];
  }
  const Eigen::Vector3d c = m.fullPivLu().solve(rhs);
  return {c(0), c(1), c(2)};
}

}  // namespace

ScatteringData compute_scattering(const SampledPotential& v, const ScatteringOptions& o) {
  if (o.log_intervals < 4 || o.log_intervals % 4 != 0) {
    throw InvalidArgument("compute_scattering: log_intervals must be a positive multiple of 4");
  }
  if (!(o.k_min >= kJostMinMomentum) || !(o.k_mid > 8.0 * o.k_min)) {
    throw InvalidArgument("compute_scattering: need k_min >= 1e-3 and k_mid > 8 k_min");
  }
  ScatteringData d;
  d.k_min = o.k_min;
  d.smooth = v.is_smooth();
  d.potential_fingerprint = v.fingerprint();
  const double len = v.support().length();
  const unsigned threads = std::max(1u, o.threads);

  // logarithmic zone
  std::vector<double> ks;
  const double u0 = std::log(o.k_min);
  const double du = (std::log(o.k_mid) - u0) / o.log_intervals;
  for (int i = 0; i <= o.log_intervals; ++i) ks.push_back(i == o.log_intervals ? o.k_mid : std::exp(u0 + i * du));
  d.samples = solve_many(v, ks, o.jost, threads);
  d.log_zone_end = d.samples.size() - 1;

  // uniform zone, extended in chunks until ln|det A| has decayed
  const double dk = o.dk > 0.0 ? o.dk : std::min(0.05, len > 0.0 ? std::numbers::pi / (32.0 * len) : 0.05);
  double cap = o.k_cap;
  if (cap <= 0.0) cap = (v.profile() && v.profile()->piecewise_constant()) ? 4000.0 : 200.0;
  constexpr int kChunk = 64;
  int run = 0;
  bool decayed = len <= 0.0;
  double k_last = o.k_mid;
  while (!decayed) {
    std::vector<double> chunk;
    for (int i = 1; i <= kChunk; ++i) chunk.push_back(k_last + i * dk);
    auto solved = solve_many(v, chunk, o.jost, threads);
    for (auto& s : solved) {
      run = std::abs(s.logdet()) < o.decay_threshold ? run + 1 : 0;
      if (run >= o.decay_run) decayed = true;
      d.samples.push_back(std::move(s));
    }
    k_last = chunk.back();
    if (k_last >= cap) break;
  }
  if (len <= 0.0) {
    // V = 0: one extra interval keeps the uniform zone well formed
    std::vector<double> chunk;
    for (int i = 1; i <= 4; ++i) chunk.push_back(o.k_mid + i * dk);
    for (auto& s : solve_many(v, chunk, o.jost, threads)) d.samples.push_back(std::move(s));
    k_last = chunk.back();
  }
  d.decay_verified = decayed;
  d.k_max = k_last;

  d.max_unitarity = 0.0;
  d.min_logdet = std::numeric_limits<double>::infinity();
  for (const auto& s : d.samples) {
    d.max_unitarity = std::max(d.max_unitarity, s.unitarity);
    d.min_logdet = std::min({d.min_logdet, s.logdet_pos, s.logdet_neg});
  }

  // gap [0, k_min]: fit a + b ln k + c k at k_min {1, 2, 4}, cross-checked with {2, 4, 8}
  const auto extra = solve_many(v, {2.0 * o.k_min, 4.0 * o.k_min, 8.0 * o.k_min}, o.jost, threads);
  const double l1 = d.samples.front().logdet();
  const std::array<double, 3> ka{o.k_min, 2.0 * o.k_min, 4.0 * o.k_min};
  const std::array<double, 3> kb{2.0 * o.k_min, 4.0 * o.k_min, 8.0 * o.k_min};
  d.gap_model = fit_gap(ka, {l1, extra[0].logdet(), extra[1].logdet()});
  const auto alt = fit_gap(kb, {extra[0].logdet(), extra[1].logdet(), extra[2].logdet()});

  double tail_scale = 0.0;
  for (std::size_t i = d.samples.size() - std::min<std::size_t>(d.samples.size(), o.decay_run); i < d.samples.size(); ++i) {
    tail_scale = std::max(tail_scale, std::abs(d.samples[i].logdet()));
  }
  const double power = d.smooth ? 12.0 : 4.0;

  const int js[3] = {0, 2, 4};
  for (int idx = 0; idx < 3; ++idx) {
    const int j = js[idx];
    std::vector<double> f1, f2;
    for (std::size_t i = 0; i <= d.log_zone_end; ++i) {
      const double k = d.samples[i].k;
      f1.push_back(std::pow(k, j + 1) * d.samples[i].logdet());
    }
    for (std::size_t i = d.log_zone_end; i < d.samples.size(); ++i) {
      const double k = d.samples[i].k;
      f2.push_back(std::pow(k, j) * d.samples[i].logdet());
    }
    const auto [z1, e1] = simpson_with_error(f1, du);
    const auto [z2, e2] = simpson_with_error(f2, dk);
    const double g = gap_integral(d.gap_model, o.k_min, j);
    const double g_alt = gap_integral(alt, o.k_min, j);
    if (std::abs(g - g_alt) > 0.1 * std::abs(g) && std::abs(g) > 1e-12) d.gap_flagged = true;
    const double tail = (power - j - 1.0) > 0.0 ? tail_scale * std::pow(d.k_max, j + 1) / (power - j - 1.0)
                                                 : std::numeric_limits<double>::infinity();
    d.gap[idx] = g / std::numbers::pi;
    d.tail[idx] = tail / std::numbers::pi;
    d.I[idx] = (g + z1 + z2) / std::numbers::pi;
    d.error[idx] = (e1 + e2 + std::abs(g - g_alt) + tail) / std::numbers::pi;
    if (!d.smooth && j == 4) {
      d.I[idx] = std::numeric_limits<double>::quiet_NaN();
      d.error[idx] = std::numeric_limits<double>::infinity();
    }
  }
  if (!d.decay_verified && d.tail[0] > 1e-6) {
    throw NumericalError("compute_scattering: ln|det A| has not decayed below " + format_double(o.decay_threshold) +
                         " by k = " + format_double(d.k_max) + " (tail bound " + format_double(d.tail[0]) + ")");
  }
  return d;
}

std::array<double, 3> spectral_integrals(const ScatteringData& data) { return data.I; }

std::string ScatteringData::to_csv() const {
  std::ostringstream os;
  os << "k,logdet,logdet_pos,logdet_neg,unitarity\n";
  for (const auto& s : samples) {
    os << format_double(s.k) << ',' << format_double(s.logdet()) << ',' << format_double(s.logdet_pos) << ','
       << format_double(s.logdet_neg) << ',' << format_double(s.unitarity) << '\n';
  }
  return os.str();
}

nlohmann::json ScatteringData::summary() const {
  auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
  nlohmann::json j;
  for (int i = 0; i < 3; ++i) {
    const std::string key = "I" + std::to_string(2 * i);
    j[key] = {{"value", num(I[i])}, {"error", num(error[i])}, {"gap", num(gap[i])}, {"tail", num(tail[i])}};
  }
  j["k_min"] = k_min;
  j["k_max"] = k_max;
  j["samples"] = samples.size();
  j["decay_verified"] = decay_verified;
  j["gap_flagged"] = gap_flagged;
  j["gap_model"] = gap_model;
  j["max_unitarity_residual"] = max_unitarity;
  j["min_logdet"] = min_logdet;
  j["potential"] = potential_fingerprint;
  return j;
}

BoundReport unitarity_audit(const ScatteringData& data, double tolerance) {
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::upper, 1.0,
              "unitarity A(k)A*(k) = 1 + B(-k)B*(-k)", "scattering and trace identities"};
  BoundReport r = make_report("unitarity", s, data.max_unitarity, 0.0, 0.0, tolerance);
  r.extras["k_samples"] = static_cast<double>(data.samples.size());
  r.extras["k_max"] = data.k_max;
  r.note = "B(-k) from a direct solve at -k";
  return r;
}

BoundReport determinant_positivity_audit(const ScatteringData& data) {
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::lower, 1.0, "|det A(k)| >= 1",
              "scattering and trace identities"};
  return make_report("logdet-positivity", s, data.min_logdet, 0.0, 0.0, 1e-10);
}

BoundReport integral_positivity_audit(const ScatteringData& data) {
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::lower, 1.0, "I_0, I_2, I_4 >= 0",
              "scattering and trace identities"};
  double worst = std::numeric_limits<double>::infinity();
  for (double x : data.I) {
    if (std::isfinite(x)) worst = std::min(worst, x);
  }
  if (!std::isfinite(worst)) worst = 0.0;
  BoundReport r = make_report("integral-positivity", s, worst, 0.0, 0.0, 1e-9);
  r.extras["I0"] = data.I[0];
  r.extras["I2"] = data.I[1];
  r.extras["I4"] = data.I[2];
  return r;
}

std::vector<BoundReport> trace_identity_audit(const SampledPotential& v, const NegativeSpectrum& spec,
                                              const ScatteringData& data, double tolerance) {
  const std::string fp = v.fingerprint();
  if (spec.potential_fingerprint != fp || data.potential_fingerprint != fp) {
    throw InvalidArgument("trace_identity_audit: spectrum, scattering data and potential have different provenance");
  }
  if (!v.is_smooth()) throw InvalidArgument("trace_identity_audit: the trace identities need a C^2 potential");
  const double t1 = trace_moment_integral(v, 1);
  const double t2 = trace_moment_integral(v, 2);
  const double t3 = trace_moment_integral(v, 3);
  const double dv = derivative_square_integral(v);
  // quadrature error of the potential integrals from the doubled step
  std::array<double, 4> qerr{};
  if (v.profile()) {
    const SampledPotential c = v.resampled(2.0 * v.step());
    qerr = {std::abs(trace_moment_integral(c, 1) - t1) / 15.0, std::abs(trace_moment_integral(c, 2) - t2) / 15.0,
            std::abs(trace_moment_integral(c, 3) - t3) / 15.0, std::abs(derivative_square_integral(c) - dv) / 15.0};
  }
  const std::string topic = "scattering and trace identities";
  const std::string prov = "spectrum M=" + std::to_string(spec.grid.points) + " L=" +
                           format_double(spec.grid.half_length) + "; k in [" + format_double(data.k_min) + ", " +
                           format_double(data.k_max) + "], " + std::to_string(data.samples.size()) + " samples";
  std::vector<BoundReport> out;
  auto add = [&](const char* tag, double gamma, const char* ref, double lhs, double rhs, double budget) {
    BoundSpec s{gamma, 1, Side::identity, 1.0, ref, topic};
    BoundReport r = make_report(tag, s, lhs, rhs, 0.0, tolerance, prov);
    r.extras["error_budget"] = budget;
    if (budget > tolerance) r.note = "estimated error budget exceeds the tolerance";
    out.push_back(std::move(r));
  };
  add("trace-identity-0", 0.5, "first trace identity: (1/4) int tr V = I_0 - sum E^{1/2}", 0.25 * t1,
      data.I[0] - riesz_mean(spec, 0.5), 0.25 * qerr[0] + data.error[0] + riesz_mean_error(spec, 0.5));
  add("trace-identity-2", 1.5, "second trace identity: (3/16) int tr V^2 = 3 I_2 + sum E^{3/2}", 3.0 / 16.0 * t2,
      3.0 * data.I[1] + riesz_mean(spec, 1.5),
      3.0 / 16.0 * qerr[1] + 3.0 * data.error[1] + riesz_mean_error(spec, 1.5));
  add("trace-identity-4", 2.5,
      "third trace identity: (5/32) int tr V^3 + (5/64) int tr V'^2 = 5 I_4 - sum E^{5/2}",
      5.0 / 32.0 * t3 + 5.0 / 64.0 * dv, 5.0 * data.I[2] - riesz_mean(spec, 2.5),
      5.0 / 32.0 * qerr[2] + 5.0 / 64.0 * qerr[3] + 5.0 * data.error[2] + riesz_mean_error(spec, 2.5));
  out[0].extras["I0"] = data.I[0];
  out[1].extras["I2"] = data.I[1];
  out[2].extras["I4"] = data.I[2];
  return out;
}

}  // namespace ltlab

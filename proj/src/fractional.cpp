#include "ltlab/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ltlab/hermitian.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

namespace {

constexpr double kPi = std::numbers::pi;

void check_stable(double alpha, double c1) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("stable density: alpha must lie in (0, 2)");
  if (!(c1 > 0.0)) throw InvalidArgument("stable density: c1 must be positive");
}

double tail_coefficient(double alpha, double c1) {
  return std::tgamma(1.0 + alpha) * std::sin(0.5 * kPi * alpha) * c1 / kPi;
}

// Terms of Phi(p) ~ (1/pi) sum_k (-1)^{k+1} c1^k Gamma(1 + k alpha) sin(pi k alpha / 2) / (k! p^{1 + k alpha}).
double series_coefficient(double alpha, double c1, int k) {
  const double sign = k % 2 == 1 ? 1.0 : -1.0;
  return sign * std::pow(c1, k) * std::tgamma(1.0 + k * alpha) * std::sin(0.5 * kPi * k * alpha) /
         (std::tgamma(k + 1.0) * kPi);
}

}  // namespace

double ComparisonDensity::tail_coefficient() const { return ltlab::tail_coefficient(alpha, c1); }

double stable_density_value(double alpha, double c1, double p) {
  check_stable(alpha, c1);
  p = std::abs(p);
  if (p < 1.0) {
    const double cutoff = std::pow(40.0 / c1, 1.0 / alpha);
    const auto f = [=](double x) { return std::exp(-c1 * std::pow(x, alpha)) * std::cos(p * x); };
    const double piece = p > 0.0 ? std::min(kPi / p, cutoff) : cutoff;
    double s = 0.0;
    for (double a = 0.0; a < cutoff; a += piece) {
      s += quad::gauss_kronrod(f, a, std::min(a + piece, cutoff), 1e-16, 1e-13).value;
    }
    return s / kPi;
  }
  // x = t e^{i phi}: alpha phi < pi/2 keeps exp(-c1 x^alpha) decaying on the ray
  const double phi = alpha <= 1.0 ? 0.5 * kPi : 0.4 * kPi / alpha;
  const std::complex<double> ray = std::polar(1.0, phi);
  const std::complex<double> stable = std::polar(c1, alpha * phi);
  const double decay_lin = p * std::sin(phi);
  const double decay_pow = stable.real();
  double end = 1.0 / p;
  while (decay_lin * end + decay_pow * std::pow(end, alpha) < 46.0) end *= 2.0;
  const auto g = [=](double t) {
    const std::complex<double> z = -stable * std::pow(t, alpha) + std::complex<double>(0.0, p) * ray * t;
    return (ray * std::exp(z)).real();
  };
  return quad::gauss_kronrod(g, 0.0, end, 1e-300, 1e-13, 20000).value / kPi;
}

ComparisonDensity stable_density(double alpha, double c1, std::vector<double> p) {
  check_stable(alpha, c1);
  ComparisonDensity d;
  d.alpha = alpha;
  d.c1 = c1;
  d.p = std::move(p);
  d.phi.reserve(d.p.size());
  for (double x : d.p) d.phi.push_back(stable_density_value(alpha, c1, x));
  return d;
}

double density_mass(double alpha, double c1) {
  check_stable(alpha, c1);
  constexpr double cutoff = 1e4;
  double s = 0.0;
  // panels on a geometric ladder keep the adaptive rule on the scale of each decade
  double a = 0.0;
  for (double b : {1.0, 10.0, 100.0, 1000.0, cutoff}) {
    s += quad::gauss_kronrod([=](double p) { return stable_density_value(alpha, c1, p); }, a, b, 1e-14, 1e-11).value;
    a = b;
  }
  double tail = 0.0;
  for (int k = 1; k <= 3; ++k) tail += series_coefficient(alpha, c1, k) * std::pow(cutoff, -k * alpha) / (k * alpha);
  return 2.0 * (s + tail);
}

C0Certificate c0_search(double beta, ComparisonDensity& density, int grid_points, double cutoff) {
  const double alpha = density.alpha;
  const double c1 = density.c1;
  check_stable(alpha, c1);
  if (!(beta >= alpha + 1.0 - 1e-12)) {
    throw InvalidArgument("c0_search: need alpha + 1 <= beta, otherwise the tail ratio is unbounded");
  }
  if (grid_points < 20) throw InvalidArgument("c0_search: need at least 20 grid points");
  if (!(cutoff > 10.0)) throw InvalidArgument("c0_search: cutoff must exceed 10");
  const auto ratio = [&](double p) { return 1.0 / ((1.0 + std::pow(p, beta)) * stable_density_value(alpha, c1, p)); };

  std::vector<double> grid;
  const int linear = 2 * grid_points / 3;
  for (int i = 0; i < linear; ++i) grid.push_back(10.0 * i / linear);
  const int logs = grid_points - linear;
  for (int i = 0; i < logs; ++i) grid.push_back(10.0 * std::pow(cutoff / 10.0, static_cast<double>(i) / (logs - 1)));

  C0Certificate c;
  c.cutoff = cutoff;
  c.grid_points = grid_points;
  std::size_t best = 0;
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = ratio(grid[i]);
    if (values[i] > values[best]) best = i;
  }
  c.grid_sup = values[best];
  c.argmax = grid[best];
  if (best > 0 && best + 1 < grid.size()) {
    double a = grid[best - 1], b = grid[best + 1];
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = ratio(x1), f2 = ratio(x2);
    for (int it = 0; it < 80 && b - a > 1e-12 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = ratio(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = ratio(x1);
      }
    }
    const double xm = f1 > f2 ? x1 : x2;
    const double fm = std::max(f1, f2);
    if (fm > c.grid_sup) {
      c.grid_sup = fm;
      c.argmax = xm;
    }
  }

  const double a_tail = tail_coefficient(alpha, c1);
  for (int k = 0; k < 4; ++k) {
    const double p = cutoff * std::pow(2.0, k);
    c.tail_deviation =
        std::max(c.tail_deviation, std::abs(stable_density_value(alpha, c1, p) * std::pow(p, 1.0 + alpha) / a_tail - 1.0));
  }
  if (c.tail_deviation >= 0.5) throw NumericalError("c0_search: the density has not reached its tail at the cutoff");
  // p >= P: (1 + p^beta)^{-1} / Phi <= p^{1 + alpha - beta} / (A (1 - rho)) <= P^{1 + alpha - beta} / (A (1 - rho))
  c.tail_bound = std::pow(cutoff, 1.0 + alpha - beta) / (a_tail * (1.0 - c.tail_deviation));
  c.c0 = std::max(c.grid_sup, c.tail_bound);
  density.beta = beta;
  density.c0 = c.c0;
  return c;
}

NegativeSpectrum fractional_spectrum(const SampledPotential& v, double beta, double half_length, int points,
                                     double edge_threshold) {
  if (v.dim() != 1) throw InvalidArgument("fractional_spectrum: scalar potentials only");
  if (!(beta > 1.0)) throw InvalidArgument("fractional_spectrum: beta must exceed 1");
  if (points < 16 || points % 2 != 0) throw InvalidArgument("fractional_spectrum: need an even N >= 16");
  const Interval s = v.support();
  const double center = 0.5 * (s.lo + s.hi);
  if (0.5 * s.length() >= half_length) throw InvalidArgument("fractional_spectrum: support does not fit in the box");
  const int n = points;
  const double h = 2.0 * half_length / n;
  // circulant kinetic term t[d] = (1/N) sum_m |k_m|^beta cos(2 pi m d / N)
  std::vector<double> t(n, 0.0);
  for (int d = 0; d < n; ++d) {
    double acc = 0.0;
    for (int m = -n / 2; m < n / 2; ++m) {
      const double k = kPi * m / half_length;
      acc += std::pow(std::abs(k), beta) * std::cos(2.0 * kPi * m * d / n);
    }
    t[d] = acc / n;
  }
  RealMatrix hmat(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = 0; l < n; ++l) hmat(j, l) = t[((j - l) % n + n) % n];
    const double x = center - half_length + j * h;
    if (s.contains(x)) hmat(j, j) += v.at(x)(0, 0).real();
  }
  const RealVector ev = hermitian_eigenvalues(RealMatrix(0.5 * (hmat + hmat.transpose())));
  NegativeSpectrum out;
  out.grid = Grid1D{center, half_length, n};
  out.edge_threshold = edge_threshold;
  out.method = "fourier";
  out.potential_fingerprint = v.fingerprint();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -edge_threshold) out.energies.push_back(-ev(i));
  }
  std::sort(out.energies.begin(), out.energies.end(), std::greater<>());
  out.errors.assign(out.energies.size(), 0.0);
  return out;
}

BoundReport fractional_moment_audit(const SampledPotential& v, double beta, double c0, const FractionalOptions& o) {
  if (v.dim() != 1) throw InvalidArgument("fractional_moment_audit: scalar potentials only");
  if (!(c0 > 0.0)) throw InvalidArgument("fractional_moment_audit: c0 must be positive");
  for (const Matrix& m : v.values()) {
    if (m(0, 0).real() > kSupportThreshold) throw InvalidArgument("fractional_moment_audit: V must be nonpositive");
  }
  const double radius = 0.5 * v.support().length();
  const double half = o.half_length > 0.0 ? o.half_length : radius + 24.0;
  int n = static_cast<int>(std::ceil(2.0 * half / o.max_step));
  n += n % 2;
  const NegativeSpectrum small = fractional_spectrum(v, beta, half, n, o.edge_threshold);
  const NegativeSpectrum large = fractional_spectrum(v, beta, 2.0 * half, 2 * n, o.edge_threshold);
  const double q = (beta - 1.0) / beta;
  const double lhs = riesz_mean(large, q);
  const double drift = std::abs(lhs - riesz_mean(small, q));
  const double rhs = c0 / (2.0 * kPi) * trace_power_integral(v, Part::minus, 1.0);
  BoundSpec s{q, 1, Side::upper, 1.0, "sum E^{(b-1)/b} <= (c0 / 2 pi) int V- for |p|^b + V", "fractional operators"};
  BoundReport r = make_report("fractional-moment", s, lhs, rhs, 0.0, drift,
                              "periodic box half-length " + format_double(2.0 * half) + ", N=" +
                                  std::to_string(2 * n) + ", drift from half-length " + format_double(half));
  r.extras["beta"] = beta;
  r.extras["c0"] = c0;
  r.extras["bound_states"] = static_cast<double>(large.size());
  if (small.size() != large.size()) r.note = "bound-state count changed with the box";
  return r;
}

BoundReport majorization_check(const ComparisonDensity& d) {
  if (!std::isfinite(d.c0) || !std::isfinite(d.beta)) throw InvalidArgument("majorization_check: run c0_search first");
  double worst = -std::numeric_limits<double>::infinity();
  double at = 0.0;
  for (std::size_t i = 0; i < d.p.size(); ++i) {
    const double gap = 1.0 / (1.0 + std::pow(std::abs(d.p[i]), d.beta)) - d.c0 * d.phi[i];
    if (gap > worst) {
      worst = gap;
      at = d.p[i];
    }
  }
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 1, Side::upper, 1.0,
              "(1 + |p|^b)^{-1} <= c0 Phi(p) pointwise", "fractional operators"};
  BoundReport r = make_report("majorization", s, worst, 0.0, 0.0, 1e-9);
  r.extras["p"] = at;
  r.extras["beta"] = d.beta;
  r.extras["alpha"] = d.alpha;
  r.extras["c0"] = d.c0;
  return r;
}

}  // namespace ltlab

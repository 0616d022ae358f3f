#include "ltlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "ltlab/common.hpp"

namespace ltlab::quad {

double trapezoid(std::span<const double> f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

double simpson(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 3) return trapezoid(f, h);
  const std::size_t odd = (n % 2 == 1) ? n : n - 1;
  double s = f[0] + f[odd - 1];
  for (std::size_t i = 1; i + 1 < odd; ++i) s += (i % 2 == 1 ? 4.0 : 2.0) * f[i];
  s *= h / 3.0;
  if (odd != n) s += 0.5 * h * (f[n - 2] + f[n - 1]);
  return s;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  const double fc = f(c);
  double gauss = fc * kWg[3];
  double kron = fc * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kron * hl;
  const double err = std::abs((kron - gauss) * hl);
  return {a, b, value, err};
}

}  // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, double abs_tol, double rel_tol,
                     int max_intervals) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  int evals = 15;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) &&
         static_cast<int>(heap.size()) < max_intervals) {
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (m <= s.a || m >= s.b) {  // interval exhausted at machine resolution
      heap.push({s.a, s.b, s.value, 0.0});
      err -= s.error;
      continue;
    }
    Segment l = kronrod15(f, s.a, m);
    Segment r = kronrod15(f, m, s.b);
    evals += 30;
    total += l.value + r.value - s.value;
    err += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
  }
  // re-sum to shed the accumulated cancellation in the running totals
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err, evals};
}

Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol, int max_levels) {
  const double c = 0.5 * (a + b);
  const double d = 0.5 * (b - a);
  constexpr double half_pi = std::numbers::pi / 2.0;
  constexpr double t_max = 3.2;
  int evals = 0;

  // contribution of abscissa t (t > 0 pairs with -t)
  auto pair_sum = [&](double t) {
    const double u = half_pi * std::sinh(t);
    const double e = std::exp(-2.0 * u);
    const double one_minus_x = 2.0 * e / (1.0 + e);  // 1 - tanh(u), no cancellation
    const double cu = std::cosh(u);
    const double w = half_pi * std::cosh(t) / (cu * cu);
    const double off = d * one_minus_x;
    if (off == 0.0 || w == 0.0) return 0.0;
    double s = 0.0;
    const double xr = b - off;
    const double xl = a + off;
    if (xr > a && xr < b) s += f(xr);
    if (xl > a && xl < b) s += f(xl);
    evals += 2;
    return w * s;
  };

  double h = 1.0;
  double sum = half_pi * f(c);
  ++evals;
  for (double t = h; t <= t_max; t += h) sum += pair_sum(t);
  double estimate = d * h * sum;
  double error = std::abs(estimate);
  for (int level = 1; level <= max_levels; ++level) {
    h *= 0.5;
    for (double t = h; t <= t_max; t += 2.0 * h) sum += pair_sum(t);
    const double next = d * h * sum;
    error = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && error <= rel_tol * std::abs(estimate)) break;
  }
  return {estimate, error, evals};
}

const Rule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  return cache.emplace(n, std::move(r)).first->second;
}

double composite_gauss(const Integrand& f, double a, double b, int panels, int n) {
  const Rule& rule = gauss_legendre(n);
  const double w = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.weights[i] * f(c + 0.5 * w * rule.nodes[i]);
    total += 0.5 * w * s;
  }
  return total;
}

}  // namespace ltlab::quad

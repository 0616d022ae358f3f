#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ltlab::quad {

/// Composite Simpson rule on equally spaced samples. An even sample count
/// integrates the last interval with the trapezoid rule.
double simpson(std::span<const double> f, double h);

double trapezoid(std::span<const double> f, double h);

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (7/15) integration on [a, b].
Result gauss_kronrod(const Integrand& f, double a, double b, double abs_tol = 1e-13,
                     double rel_tol = 1e-12, int max_intervals = 4000);

/// Double-exponential (tanh-sinh) rule on [a, b]; copes with integrable
/// endpoint singularities. The integrand is never evaluated at a or b.
Result tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                 int max_levels = 12);

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, computed once and cached.
const Rule& gauss_legendre(int n);

/// Composite n-point Gauss-Legendre over `panels` equal panels of [a, b].
double composite_gauss(const Integrand& f, double a, double b, int panels, int n = 5);

}  // namespace ltlab::quad

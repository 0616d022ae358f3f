#pragma once

#include <string>
#include <vector>

#include "ltlab/potentials.hpp"
#include "ltlab/report.hpp"
#include "ltlab/spectral1d.hpp"

namespace ltlab {

/// Nystrom discretisation of W(x) e^{-eps |x - y|} W(y), W = sqrt(V-), on the
/// sample points inside supp V with trapezoid weights w_i, in the symmetric
/// form sqrt(w_i) W_i e^{-eps|x_i - x_j|} W_j sqrt(w_j). `scale` is 1 for L_eps
/// and 1 / (2 sqrt(E)) for K_E.
struct BSOperator {
  double epsilon = 0.0;
  double scale = 1.0;
  int dim = 1;
  std::vector<double> points;
  std::vector<double> weights;
  Matrix matrix;
  std::string potential_fingerprint;

  double trace() const { return matrix.trace().real(); }
  /// sum_i w_i tr W(x_i)^2, the eps-independent trace of L_eps.
  double weighted_trace() const;
};

/// Square roots of V-(x_i) at the support points, shared by every kernel built
/// from the same potential.
struct KernelSource {
  std::vector<double> points;
  std::vector<double> weights;
  std::vector<Matrix> roots;
  int dim = 1;
  std::string potential_fingerprint;
};

KernelSource kernel_source(const MatrixFunctionSplit& split);
KernelSource kernel_source(const SampledPotential& v);

BSOperator build_L(const KernelSource& src, double epsilon);
BSOperator build_L(const MatrixFunctionSplit& split, double epsilon);
BSOperator build_K(const KernelSource& src, double energy);
BSOperator build_K(const MatrixFunctionSplit& split, double energy);

/// Descending eigenvalues of the operator (computed once).
std::vector<double> bs_eigenvalues(const BSOperator& op);

/// Entry n-1 is the sum of the n largest eigenvalues.
std::vector<double> kyfan_partial_sums(const BSOperator& op, int n_max);

struct KyFanProfile {
  std::vector<double> epsilons;
  std::vector<std::vector<double>> partial_sums;  // [eps][n-1]
  std::vector<double> traces;                     // full trace for each eps

  std::string to_csv() const;
};

struct MonotonicityResult {
  KyFanProfile profile;
  BoundReport monotone;  // worst increase of a partial sum between consecutive eps
  BoundReport trace;     // relative spread of the full trace over eps
};

/// Default eps grid: 0 followed by `count - 1` log-spaced values in [1e-3, 1e2].
std::vector<double> default_epsilon_grid(int count = 12);

MonotonicityResult monotonicity_audit(const KernelSource& src, const std::vector<double>& epsilons, int n_max);

/// max_j |lambda_j(K_{E_j}) - 1| for the given spectrum, Richardson-refined
/// over the sample grid h and h/2 when the potential has an analytic profile.
BoundReport birman_schwinger_audit(const SampledPotential& v, const NegativeSpectrum& spec, double tolerance = 1e-3);

/// 2 sum_j sqrt(E_j) against sum_j lambda_j(L_{sqrt(E_j)}).
BoundReport sum_rule_audit(const SampledPotential& v, const NegativeSpectrum& spec, double tolerance = 1e-3);

/// (1/pi) int e^{-ipu} eps / (p^2 + eps^2) dp against e^{-eps|u|}.
double cauchy_kernel_transform(double epsilon, double u);
BoundReport cauchy_kernel_identity_check(double epsilon, const std::vector<double>& us, double tolerance = 1e-6);

}  // namespace ltlab

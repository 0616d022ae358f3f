#pragma once

#include <array>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltlab/potentials.hpp"
#include "ltlab/report.hpp"
#include "ltlab/spectral1d.hpp"

namespace ltlab {

/// Smallest |k| at which the plane-wave matching is used.
inline constexpr double kJostMinMomentum = 1e-3;

struct JostOptions {
  /// Upper bound on the integration step; 0 means half the sample step.
  double max_step = 0.0;
};

/// Coefficients of F(x, k) = e^{-ikx} B(k) + e^{ikx} A(k) left of supp V, where
/// F is the Jost solution equal to e^{ikx} 1 right of supp V.
struct JostSolution {
  double k = 0.0;
  Matrix A;
  Matrix B;
  int steps = 0;
};

/// Integrates -F'' + V F = k^2 F from x_max down to x_min with the fourth-order
/// Magnus method (step <= min(max_step, 1 / (8|k|)), exact exponentials), which
/// preserves the matrix Wronskian and hence unitarity to rounding.
JostSolution jost_solve(const SampledPotential& v, double k, const JostOptions& options = {});

/// ln|det A| from the LU factors with partial pivoting.
double log_abs_det(const Matrix& a);

struct ScatteringOptions {
  double k_min = kJostMinMomentum;
  /// Boundary between the logarithmic and uniform k zones.
  double k_mid = 0.5;
  /// Simpson intervals (multiple of 4) over [ln k_min, ln k_mid].
  int log_intervals = 96;
  /// Uniform k spacing above k_mid; 0 picks min(0.05, pi / (32 * support length)).
  double dk = 0.0;
  double decay_threshold = 1e-12;
  int decay_run = 5;
  /// Largest k tried before giving up on decay; 0 picks a family-dependent cap.
  double k_cap = 0.0;
  JostOptions jost;
  unsigned threads = 1;
};

struct ScatteringSample {
  double k = 0.0;
  Matrix A, B;          // at +k
  Matrix A_neg, B_neg;  // at -k
  double logdet_pos = 0.0;
  double logdet_neg = 0.0;
  /// max-entry norm of A(k)A*(k) - 1 - B(-k)B*(-k)
  double unitarity = 0.0;

  double logdet() const { return 0.5 * (logdet_pos + logdet_neg); }
};

struct ScatteringData {
  std::vector<ScatteringSample> samples;  // ascending k > 0
  std::size_t log_zone_end = 0;           // samples [0, log_zone_end] form the log zone
  std::array<double, 3> I{};              // I_0, I_2, I_4
  std::array<double, 3> error{};          // quadrature + gap + tail estimate
  std::array<double, 3> gap{};            // contribution of [0, k_min]
  std::array<double, 3> tail{};           // bound on the part beyond k_max
  std::array<double, 3> gap_model{};      // a, b, c of a + b ln k + c k near 0
  bool gap_flagged = false;               // the two gap fits disagree by > 10%
  bool decay_verified = false;
  bool smooth = true;
  double k_min = 0.0;
  double k_max = 0.0;
  double max_unitarity = 0.0;
  double min_logdet = 0.0;
  std::string potential_fingerprint;

  std::string to_csv() const;
  nlohmann::json summary() const;
};

/// Adaptive k sweep, Jost solves at +k and -k, and the integrals
/// I_j = (2 pi)^{-1} int k^j ln|det A(k)| dk. I_4 is NaN for potentials with
/// jumps, where the integral diverges.
ScatteringData compute_scattering(const SampledPotential& v, const ScatteringOptions& options = {});

std::array<double, 3> spectral_integrals(const ScatteringData& data);

BoundReport unitarity_audit(const ScatteringData& data, double tolerance = 1e-7);

/// ln|det A| >= -1e-10 on every sample and I_j >= -1e-9.
BoundReport determinant_positivity_audit(const ScatteringData& data);
BoundReport integral_positivity_audit(const ScatteringData& data);

/// Residuals of the three trace identities; each passes iff |residual| <= tolerance.
std::vector<BoundReport> trace_identity_audit(const SampledPotential& v, const NegativeSpectrum& spec,
                                              const ScatteringData& data, double tolerance);

}  // namespace ltlab

#pragma once

#include <string>
#include <vector>

#include "ltlab/potentials.hpp"
#include "ltlab/report.hpp"
#include "ltlab/scattering.hpp"
#include "ltlab/spectral1d.hpp"

namespace ltlab {

/// Gamma(gamma + 1) / (2^d pi^{d/2} Gamma(gamma + d/2 + 1)).
double classical_constant(double gamma, int d);

/// Multiplier on the classical constant in the Lieb-Thirring bounds audited
/// here: d = 1: 2 below 3/2, else 1; d >= 2: 4 below 1, 2 below 3/2, else 1.
double lt_factor(double gamma, int d);

/// (gamma, d) admissible for a Lieb-Thirring inequality.
bool admissible(double gamma, int d);

/// L^cl_{gamma,1} L^cl_{gamma+1/2,d-1} = L^cl_{gamma,d}.
BoundReport product_identity_check(double gamma, int d);

/// Quadrature error estimate of int tr V_{+/-}^p from the doubled sample step.
double trace_power_error(const SampledPotential& v, Part part, double p);

/// sum_j E_j^{1/2} <= (1/2) int tr V-.
BoundReport sharp_half_audit(const SampledPotential& v, const NegativeSpectrum& spec);

/// sum_j E_j^gamma <= factor L^cl_{gamma,1} int tr V-^{gamma+1/2}, factor 2 for
/// gamma < 3/2 and 1 from 3/2 on.
BoundReport lifted_moment_audit(const SampledPotential& v, const NegativeSpectrum& spec, double gamma);

/// C_gamma int_0^inf t^{gamma-3/2} (s + t)_-^{1/2} dt against s_-^gamma.
double lifting_integral(double gamma, double s);
BoundReport lifting_identity_check(double gamma, double s, double tolerance = 1e-8);

/// L^cl_{1/2,1} int (tr V- - tr V+) <= sum E^{1/2} <= 2 L^cl_{1/2,1} int tr V-.
std::vector<BoundReport> lower_bound_audit(const SampledPotential& v, const NegativeSpectrum& spec);

/// I_0 <= L^cl_{1/2,1} int (tr V+ + tr V-);
/// 5 I_4 <= L^cl_{5/2,1} int tr V+^3 + (1/2) L^cl_{5/2,1} int tr V'^2;
/// I_2 <= sqrt(I_0 I_4).
std::vector<BoundReport> holder_chain_audit(const SampledPotential& v, const ScatteringData& data,
                                            const NegativeSpectrum& spec);

/// Grid control for spectra of alpha V: step base_step / sqrt(alpha), box from
/// a pre-solve capped at `cap` beyond the support.
struct SweepOptions {
  double base_step = 0.02;
  double cap = 30.0;
  int levels = 2;
  double edge_threshold = 1e-8;
  unsigned threads = 1;
};

NegativeSpectrum scaled_spectrum(const SampledPotential& v, double alpha, const SweepOptions& options);

/// n values log-spaced over [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int n);

struct RemainderSweep {
  std::vector<double> alphas;
  std::vector<double> remainder;  // R(alpha)
  std::vector<double> cap;        // (3 alpha^{3/2} / 16) (int tr V-)^{1/2} (int tr V'^2)^{1/2}
  std::vector<double> budget;
  std::vector<double> riesz;      // sum E_j(alpha)^{3/2}
  double slope = 0.0;             // least-squares slope of ln R vs ln alpha over the top decade
  std::vector<BoundReport> reports;

  std::string to_csv() const;
};

/// R(alpha) = alpha^2 L^cl_{3/2,1} int tr V-^2 - sum E_j(alpha)^{3/2}, with
/// 0 <= R <= cap at each alpha and the top-decade slope <= slope_limit.
RemainderSweep remainder_sweep(const SampledPotential& v, const std::vector<double>& alphas,
                               const SweepOptions& options = {}, double slope_limit = 1.6);

struct WeylSweep {
  double gamma = 1.5;
  std::vector<double> alphas;
  std::vector<double> ratios;
  std::vector<BoundReport> reports;

  std::string to_csv() const;
};

/// tr(-d^2/dx^2 + alpha V)_-^gamma / (alpha^{gamma+1/2} L^cl_{gamma,1} int tr V-^{gamma+1/2}).
/// Reports the cap (ratio <= lt_factor) over the sweep and, when
/// `limit_tolerance` > 0, the deviation of the last ratio from 1.
WeylSweep weyl_ratio_sweep(const SampledPotential& v, double gamma, const std::vector<double>& alphas,
                           const SweepOptions& options = {}, double limit_tolerance = 0.0);

struct DeltaSweep {
  std::vector<double> widths;
  std::vector<double> ratios;
  std::vector<double> energies;  // ground state per width
  std::vector<BoundReport> reports;
};

/// Rank-one wells -(c/w) 1_[0,w] P for each width: sharp-half audit at each
/// width plus the ratio at the narrowest width against `sharpness_floor`.
DeltaSweep delta_limit_sweep(double c, const std::vector<double>& widths, int dim, double sharpness_floor = 0.499,
                             unsigned threads = 1);

}  // namespace ltlab

#pragma once

#include <limits>
#include <vector>

#include "ltlab/potentials.hpp"
#include "ltlab/report.hpp"
#include "ltlab/spectral1d.hpp"

namespace ltlab {

/// Symmetric stable density Phi(p) = (1/pi) int_0^inf exp(-c1 x^alpha) cos(p x) dx,
/// the Fourier transform of exp(-c1 |x|^alpha), tabulated on a p grid. `beta`
/// and `c0` are filled in by c0_search.
struct ComparisonDensity {
  double alpha = 1.0;
  double c1 = 1.0;
  std::vector<double> p;
  std::vector<double> phi;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double c0 = std::numeric_limits<double>::quiet_NaN();

  /// Leading tail coefficient: Phi(p) ~ A |p|^{-(1+alpha)}.
  double tail_coefficient() const;
};

/// Phi at one point. Small |p| integrates along the real axis up to the
/// cutoff c1 x^alpha = 40; larger |p| along a ray rotated into the upper half
/// plane, where the integrand decays without oscillating.
double stable_density_value(double alpha, double c1, double p);

ComparisonDensity stable_density(double alpha, double c1, std::vector<double> p);

/// int Phi dp over the real line: quadrature on [-P, P] plus the asymptotic tail.
double density_mass(double alpha, double c1);

struct C0Certificate {
  double c0 = 0.0;          // max of grid_sup and tail_bound
  double grid_sup = 0.0;    // sup of (1 + |p|^beta)^{-1} / Phi over [0, P], golden-section refined
  double argmax = 0.0;
  double tail_bound = 0.0;  // bound on the ratio beyond P from the asymptotic tail
  double cutoff = 0.0;      // P
  double tail_deviation = 0.0;  // max |Phi p^{1+alpha} / A - 1| over P, 2P, 4P, 8P
  int grid_points = 0;
};

/// Smallest c0 with (1 + |p|^beta)^{-1} <= c0 Phi(p). Requires alpha + 1 <= beta
/// so that Phi dominates |p|^{-beta} in the tail. Fills density.beta and c0.
C0Certificate c0_search(double beta, ComparisonDensity& density, int grid_points = 1500, double cutoff = 1e4);

/// |p|^beta + V on the periodic box [center - L, center + L) with N nodes,
/// assembled densely from the exact Fourier multiplier.
NegativeSpectrum fractional_spectrum(const SampledPotential& v, double beta, double half_length, int points,
                                     double edge_threshold = 1e-8);

struct FractionalOptions {
  double half_length = 0.0;  // 0: support radius + 24
  double max_step = 0.15;
  double edge_threshold = 1e-8;
};

/// sum_j E_j^{(beta-1)/beta} <= (c0 / 2 pi) int V_-, with the budget taken from
/// the drift between the box and the doubled box at equal resolution.
BoundReport fractional_moment_audit(const SampledPotential& v, double beta, double c0,
                                    const FractionalOptions& options = {});

/// Pointwise check of (1 + |p|^beta)^{-1} <= c0 Phi(p) + 1e-9 over the
/// density's p grid; lhs is the largest violation (<= 0 when it holds).
BoundReport majorization_check(const ComparisonDensity& density);

}  // namespace ltlab

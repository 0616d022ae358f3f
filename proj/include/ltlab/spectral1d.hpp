#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltlab/hermitian.hpp"
#include "ltlab/potentials.hpp"

namespace ltlab {

/// Dirichlet box [center - L, center + L] with M interior points
/// x_i = center - L + (i + 1) h, h = 2L / (M + 1).
struct Grid1D {
  double center = 0.0;
  double half_length = 1.0;
  int points = 16;

  double step() const { return 2.0 * half_length / (points + 1); }
  double x(int i) const { return center - half_length + (i + 1) * step(); }
  /// Grid with the same nodes plus the midpoints: M -> 2M + 1.
  Grid1D refined() const { return {center, half_length, 2 * points + 1}; }
};

/// Box of half-length >= `min_half_length` around the support of `v`, with
/// step <= `max_step`, placed so that every jump of a piecewise potential whose
/// breakpoints are the support ends lands on a grid node at every refinement.
Grid1D aligned_grid(const SampledPotential& v, double min_half_length, double max_step);

/// Support radius plus 8 / sqrt(E_est), the decay length of the shallowest
/// retained bound state, capped at `cap` beyond the support.
double suggest_half_length(const SampledPotential& v, double e_est, double cap = 60.0);

/// Aligned grid whose box is sized from a coarse pre-solve on a box of radius
/// `cap` beyond the support, so that the shallowest bound state found there
/// decays over the margin 8 / sqrt(E_min).
Grid1D auto_grid(const SampledPotential& v, double max_step, double edge_threshold = 1e-8, double cap = 1000.0);

/// -d^2/dx^2 (x) 1 + V with the second-order three-point stencil.
struct DiscretizedOperator1D {
  Grid1D grid;
  int dim = 1;
  BlockTridiagonal<Complex> matrix;
  std::string potential_fingerprint;
};

/// Diagonal blocks are 2/h^2 + V(x_i); for potentials with jumps V(x_i) is the
/// exact mean of V over [x_i - h/2, x_i + h/2].
DiscretizedOperator1D discretize(const SampledPotential& v, const Grid1D& grid);
DiscretizedOperator1D discretize(const SampledPotential& v, double half_length, int points);

struct NegativeSpectrum {
  std::vector<double> energies;  // E_1 >= E_2 >= ... > 0
  std::vector<double> errors;    // per-eigenvalue error estimate, 0 when unrefined
  Grid1D grid;
  int extrapolation_level = 0;
  double edge_threshold = 1e-8;
  std::string method;
  std::string potential_fingerprint;

  std::size_t size() const { return energies.size(); }
  bool empty() const { return energies.empty(); }
  double max_error() const;
};

/// Matrices up to this size go to the dense solver; larger ones to Sturm
/// bisection on the block LDL* inertia.
inline constexpr int kDenseLimit1D = 512;

NegativeSpectrum negative_spectrum(const DiscretizedOperator1D& op, double edge_threshold = 1e-8);

/// Richardson extrapolation over grids M, 2M+1 (and 4M+3 for levels = 2).
/// Throws NumericalError when the grids disagree on the bound-state count.
NegativeSpectrum refined_negative_spectrum(const SampledPotential& v, const Grid1D& grid, int levels = 1,
                                           double edge_threshold = 1e-8);
NegativeSpectrum refined_negative_spectrum(const SampledPotential& v, double half_length, int points);

/// sum_j E_j^gamma.
double riesz_mean(const NegativeSpectrum& spec, double gamma);
double riesz_mean(const std::vector<double>& energies, double gamma);

/// First-order error of sum_j E_j^gamma propagated from the per-eigenvalue
/// estimates.
double riesz_mean_error(const NegativeSpectrum& spec, double gamma);

nlohmann::json to_json(const NegativeSpectrum& spec);

}  // namespace ltlab

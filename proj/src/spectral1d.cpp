#include "ltlab/spectral1d.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ltlab {

Grid1D aligned_grid(const SampledPotential& v, double min_half_length, double max_step) {
  if (!(max_step > 0.0)) throw InvalidArgument("aligned_grid: step must be positive");
  const Interval s = v.support();
  const double len = s.length();
  Grid1D g;
  g.center = 0.5 * (s.lo + s.hi);
  const double radius = 0.5 * len;
  if (len <= 0.0) {
    const double h = max_step;
    const int half = static_cast<int>(std::ceil(min_half_length / h));
    g.half_length = half * h;
    g.points = 2 * half - 1;
    return g;
  }
  const int cells = static_cast<int>(std::ceil(len / max_step - 1e-9));
  const double h = len / cells;
  const double reach = std::max(min_half_length - radius, h);
  const int margin = static_cast<int>(std::ceil(reach / h - 1e-9));
  g.half_length = radius + margin * h;
  g.points = cells + 2 * margin - 1;
  return g;
}

double suggest_half_length(const SampledPotential& v, double e_est, double cap) {
  const Interval s = v.support();
  const double radius = 0.5 * s.length();
  const double tail = e_est > 0.0 ? 8.0 / std::sqrt(e_est) : cap;
  return radius + std::min(std::max(tail, 1.0), cap);
}

Grid1D auto_grid(const SampledPotential& v, double max_step, double edge_threshold, double cap) {
  const Interval s = v.support();
  const double radius = 0.5 * s.length();
  const double coarse_step = std::max(0.05, max_step);
  Grid1D coarse{0.5 * (s.lo + s.hi), radius + cap, 0};
  coarse.points = std::max(16, static_cast<int>(std::ceil(2.0 * coarse.half_length / coarse_step)) - 1);
  const NegativeSpectrum pre = negative_spectrum(discretize(v, coarse), edge_threshold);
  const double e_min = pre.empty() ? 0.0 : pre.energies.back();
  return aligned_grid(v, suggest_half_length(v, e_min, cap), max_step);
}

DiscretizedOperator1D discretize(const SampledPotential& v, const Grid1D& grid) {
  if (grid.points < 16) throw InvalidArgument("discretize: need at least 16 interior points");
  if (!(grid.half_length > 0.0)) throw InvalidArgument("discretize: box half-length must be positive");
  const Interval s = v.support();
  const double lo = grid.center - grid.half_length;
  const double hi = grid.center + grid.half_length;
  if (s.length() > 0.0 && (s.lo <= lo || s.hi >= hi)) {
    throw InvalidArgument("discretize: support [" + std::to_string(s.lo) + ", " + std::to_string(s.hi) +
                          "] exceeds the box (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
  }
  const double h = grid.step();
  const int n = v.dim();
  const bool jumps = !v.is_smooth();
  DiscretizedOperator1D op;
  op.grid = grid;
  op.dim = n;
  op.potential_fingerprint = v.fingerprint();
  op.matrix.coupling = -1.0 / (h * h);
  op.matrix.diagonal.resize(grid.points);
  const Matrix kinetic = (2.0 / (h * h)) * Matrix::Identity(n, n);
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.x(i);
    Matrix block;
    if (!s.contains(x) && !(jumps && (s.contains(x - 0.5 * h) || s.contains(x + 0.5 * h)))) {
      block = kinetic;
    } else {
      block = kinetic + (jumps ? v.cell_mean(x - 0.5 * h, x + 0.5 * h) : v.at(x));
    }
    op.matrix.diagonal[i] = 0.5 * (block + block.adjoint());
  }
  return op;
}

DiscretizedOperator1D discretize(const SampledPotential& v, double half_length, int points) {
  return discretize(v, Grid1D{0.0, half_length, points});
}

double NegativeSpectrum::max_error() const {
  double e = 0.0;
  for (double x : errors) e = std::max(e, x);
  return e;
}

NegativeSpectrum negative_spectrum(const DiscretizedOperator1D& op, double edge_threshold) {
  if (edge_threshold < 0.0) throw InvalidArgument("negative_spectrum: edge threshold must be >= 0");
  NegativeSpectrum out;
  out.grid = op.grid;
  out.edge_threshold = edge_threshold;
  out.potential_fingerprint = op.potential_fingerprint;
  std::vector<double> lambdas;
  bool real = true;
  for (const Matrix& b : op.matrix.diagonal) real = real && is_real(b);
  if (op.matrix.size() <= kDenseLimit1D) {
    out.method = "dense";
    const RealVector ev = real ? hermitian_eigenvalues(RealMatrix(op.matrix.dense().real()))
                               : hermitian_eigenvalues(op.matrix.dense());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < -edge_threshold) lambdas.push_back(ev(i));
    }
  } else {
    out.method = "sturm";
    if (real) {
      BlockTridiagonal<double> m;
      m.coupling = op.matrix.coupling;
      m.diagonal.reserve(op.matrix.diagonal.size());
      for (const Matrix& b : op.matrix.diagonal) m.diagonal.push_back(b.real());
      lambdas = m.eigenvalues_below(-edge_threshold);
    } else {
      lambdas = op.matrix.eigenvalues_below(-edge_threshold);
    }
  }
  out.energies.reserve(lambdas.size());
  for (double l : lambdas) out.energies.push_back(-l);
  std::sort(out.energies.begin(), out.energies.end(), std::greater<>());
  out.errors.assign(out.energies.size(), 0.0);
  return out;
}

NegativeSpectrum refined_negative_spectrum(const SampledPotential& v, const Grid1D& grid, int levels,
                                           double edge_threshold) {
  if (levels < 1 || levels > 2) throw InvalidArgument("refined_negative_spectrum: levels must be 1 or 2");
  std::vector<NegativeSpectrum> runs;
  Grid1D g = grid;
  for (int l = 0; l <= levels; ++l) {
    runs.push_back(negative_spectrum(discretize(v, g), edge_threshold));
    g = g.refined();
  }
  for (std::size_t l = 1; l < runs.size(); ++l) {
    if (runs[l].size() != runs[0].size()) {
      throw NumericalError("bound-state count changes under refinement (" + std::to_string(runs[0].size()) + " on M=" +
                           std::to_string(runs[0].grid.points) + ", " + std::to_string(runs[l].size()) + " on M=" +
                           std::to_string(runs[l].grid.points) + "); enlarge the box or refine the grid");
    }
  }
  NegativeSpectrum out = runs.back();
  out.grid = grid;
  out.extrapolation_level = levels;
  const std::size_t count = runs[0].size();
  for (std::size_t j = 0; j < count; ++j) {
    const double r0 = (4.0 * runs[1].energies[j] - runs[0].energies[j]) / 3.0;
    if (levels == 1) {
      out.energies[j] = r0;
      out.errors[j] = std::abs(runs[0].energies[j] - runs[1].energies[j]) / 3.0;
    } else {
      const double r1 = (4.0 * runs[2].energies[j] - runs[1].energies[j]) / 3.0;
      out.energies[j] = (16.0 * r1 - r0) / 15.0;
      out.errors[j] = std::abs(r1 - r0) / 15.0;
    }
  }
  // extrapolation may reorder nearly degenerate levels
  std::vector<std::size_t> order(count);
  for (std::size_t j = 0; j < count; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.energies[a] > out.energies[b]; });
  std::vector<double> e(count), err(count);
  for (std::size_t j = 0; j < count; ++j) {
    e[j] = out.energies[order[j]];
    err[j] = out.errors[order[j]];
  }
  out.energies = std::move(e);
  out.errors = std::move(err);
  return out;
}

NegativeSpectrum refined_negative_spectrum(const SampledPotential& v, double half_length, int points) {
  return refined_negative_spectrum(v, Grid1D{0.0, half_length, points});
}

double riesz_mean(const std::vector<double>& energies, double gamma) {
  if (gamma < 0.0) throw InvalidArgument("riesz_mean: gamma must be >= 0");
  double s = 0.0;
  for (double e : energies) s += std::pow(std::max(e, 0.0), gamma);
  return s;
}

double riesz_mean(const NegativeSpectrum& spec, double gamma) { return riesz_mean(spec.energies, gamma); }

double riesz_mean_error(const NegativeSpectrum& spec, double gamma) {
  double s = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double e = spec.energies[j];
    if (gamma == 0.0 || e <= 0.0) continue;
    s += gamma * std::pow(e, gamma - 1.0) * spec.errors[j];
  }
  return s;
}

nlohmann::json to_json(const NegativeSpectrum& spec) {
  return {{"energies", spec.energies},
          {"errors", spec.errors},
          {"grid", {{"center", spec.grid.center}, {"half_length", spec.grid.half_length}, {"points", spec.grid.points},
                    {"step", spec.grid.step()}}},
          {"extrapolation_level", spec.extrapolation_level},
          {"edge_threshold", spec.edge_threshold},
          {"method", spec.method},
          {"potential", spec.potential_fingerprint}};
}

}  // namespace ltlab

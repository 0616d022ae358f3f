#include "ltlab/multidim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <Eigen/Eigenvalues>

#include "ltlab/bounds.hpp"
#include "ltlab/hermitian.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

Potential2D gaussian_well_2d(double depth, double width) {
  if (!(depth >= 0.0) || !(width > 0.0)) throw InvalidArgument("gaussian_well_2d: need depth >= 0 and width > 0");
  Potential2D p;
  p.name = "gaussian2d(depth=" + format_double(depth) + ",width=" + format_double(width) + ")";
  p.radius = width * std::sqrt(std::log(1e16));
  const double r2 = p.radius * p.radius;
  p.value = [depth, width, r2](double x, double y) {
    const double s = x * x + y * y;
    return s >= r2 ? 0.0 : -depth * std::exp(-s / (width * width));
  };
  return p;
}

Potential2D separable_2d(const SampledPotential& v) {
  if (v.dim() != 1) throw InvalidArgument("separable_2d: needs a scalar potential");
  const auto shared = std::make_shared<SampledPotential>(v);
  Potential2D p;
  p.name = "separable(" + v.fingerprint() + ")";
  const Interval s = v.support();
  p.radius = std::sqrt(2.0) * std::max(std::abs(s.lo), std::abs(s.hi));
  p.value = [shared](double x, double y) {
    const Interval s = shared->support();
    const double a = s.contains(x) ? shared->at(x)(0, 0).real() : 0.0;
    const double b = s.contains(y) ? shared->at(y)(0, 0).real() : 0.0;
    return a + b;
  };
  for (const Matrix& m : v.values()) p.nonpositive = p.nonpositive && m(0, 0).real() <= kSupportThreshold;
  return p;
}

Potential2D zero_potential_2d() {
  Potential2D p;
  p.name = "zero";
  p.value = [](double, double) { return 0.0; };
  return p;
}

double potential_power_integral_2d(const Potential2D& v, double p) {
  if (!(p > 0.0)) throw InvalidArgument("potential_power_integral_2d: p must be positive");
  if (v.radius <= 0.0) return 0.0;
  const double r = v.radius;
  constexpr int panels = 64;
  const auto row = [&](double y) {
    return quad::composite_gauss([&](double x) { return std::pow(std::max(-v.value(x, y), 0.0), p); }, -r, r, panels);
  };
  return quad::composite_gauss(row, -r, r, panels);
}

std::pair<double, double> MagneticField::vector_potential(double x, double y) const {
  if (gauge == Gauge::landau) return {-B * y, 0.0};
  return {-0.5 * B * y, 0.5 * B * x};
}

GridOperator2D assemble_2d(const Potential2D& v, const Grid2D& grid, const MagneticField* field) {
  const int m = grid.points;
  if (m < 8) throw InvalidArgument("assemble_2d: need at least 8 points per direction");
  if (m > kMaxGrid2D) {
    throw InvalidArgument("assemble_2d: M=" + std::to_string(m) + " exceeds the memory guard " +
                          std::to_string(kMaxGrid2D));
  }
  if (v.radius >= grid.half_length) throw InvalidArgument("assemble_2d: support does not fit inside the box");
  const double h = grid.step();
  const double hop = 1.0 / (h * h);
  GridOperator2D op;
  op.grid = grid;
  op.magnetic = field != nullptr;
  op.potential.resize(static_cast<std::size_t>(m) * m);
  std::vector<Eigen::Triplet<Complex>> entries;
  entries.reserve(static_cast<std::size_t>(5) * m * m);
  const auto index = [m](int i, int j) { return i + m * j; };
  // phase of the link from node (i, j) to its neighbour at (x + dx, y + dy)
  const auto phase = [&](double x, double y, double dx, double dy) -> Complex {
    if (!field) return 1.0;
    const auto [ax, ay] = field->vector_potential(x + 0.5 * dx, y + 0.5 * dy);
    double theta = ax * dx + ay * dy;
    if (field->chi) theta += field->chi(x + dx, y + dy) - field->chi(x, y);
    return std::polar(1.0, theta);
  };
  for (int j = 0; j < m; ++j) {
    const double y = grid.x(j);
    for (int i = 0; i < m; ++i) {
      const double x = grid.x(i);
      const double vx = v.value(x, y);
      op.potential[index(i, j)] = vx;
      entries.emplace_back(index(i, j), index(i, j), 4.0 * hop + vx);
      // H_{ab} = -(1/h^2) exp(i int_b^a a.dl): entry (neighbour, here) carries
      // the phase of the link here -> neighbour
      if (i + 1 < m) {
        const Complex p = phase(x, y, h, 0.0);
        entries.emplace_back(index(i + 1, j), index(i, j), -hop * p);
        entries.emplace_back(index(i, j), index(i + 1, j), -hop * std::conj(p));
      }
      if (j + 1 < m) {
        const Complex p = phase(x, y, 0.0, h);
        entries.emplace_back(index(i, j + 1), index(i, j), -hop * p);
        entries.emplace_back(index(i, j), index(i, j + 1), -hop * std::conj(p));
      }
    }
  }
  op.matrix.resize(m * m, m * m);
  op.matrix.setFromTriplets(entries.begin(), entries.end());
  return op;
}

NegativeSpectrum negative_spectrum_2d(const GridOperator2D& op, double edge_threshold) {
  NegativeSpectrum out;
  out.grid = Grid1D{0.0, op.grid.half_length, op.grid.points};
  out.edge_threshold = edge_threshold;
  std::vector<double> lambdas;
  if (op.grid.points <= kDenseLimit2D) {
    out.method = "dense";
    const RealVector ev = op.magnetic ? hermitian_eigenvalues(op.dense())
                                      : hermitian_eigenvalues(RealMatrix(op.dense().real()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < -edge_threshold) lambdas.push_back(ev(i));
    }
  } else {
    out.method = "lanczos";
    lambdas = sparse_eigenvalues_below(op.matrix, -edge_threshold);
  }
  for (double l : lambdas) out.energies.push_back(-l);
  std::sort(out.energies.begin(), out.energies.end(), std::greater<>());
  out.errors.assign(out.energies.size(), 0.0);
  return out;
}

double Spectrum2D::riesz(double gamma) const { return riesz_mean(fine, gamma); }

double Spectrum2D::error(double gamma) const {
  return std::abs(riesz_mean(fine, gamma) - riesz_mean(coarse, gamma)) / 3.0;
}

Spectrum2D spectrum_2d(const Potential2D& v, const Grid2D& grid, const MagneticField* field, double edge_threshold) {
  Spectrum2D s;
  s.magnetic = field != nullptr;
  s.fine = negative_spectrum_2d(assemble_2d(v, grid, field), edge_threshold);
  const Grid2D half{grid.half_length, grid.points / 2};
  s.coarse = negative_spectrum_2d(assemble_2d(v, half, field), edge_threshold);
  return s;
}

namespace {

double lt_factor_2d(double gamma) {
  if (gamma >= 1.5) return 1.0;
  if (gamma >= 1.0) return 2.0;
  return 4.0;
}

std::string grid_provenance(const Grid2D& g) {
  return "box [-" + format_double(g.half_length) + ", " + format_double(g.half_length) + "]^2, M=" +
         std::to_string(g.points) + ", error from M=" + std::to_string(g.points / 2);
}

}  // namespace

BoundReport lt_audit_2d(const Potential2D& v, const Spectrum2D& spec, double gamma) {
  if (!(gamma >= 0.5 && gamma <= 2.5)) throw InvalidArgument("lt_audit_2d: gamma must lie in [1/2, 5/2]");
  if (!v.nonpositive) throw InvalidArgument("lt_audit_2d: potential must be nonpositive");
  const double factor = lt_factor_2d(gamma);
  const double rhs = factor * classical_constant(gamma, 2) * potential_power_integral_2d(v, gamma + 1.0);
  const std::string row = factor == 4.0 ? "4 L^cl (1/2 <= g < 1)" : factor == 2.0 ? "2 L^cl (1 <= g < 3/2)"
                                                                                  : "L^cl (g >= 3/2)";
  BoundSpec s{gamma, 2, Side::upper, factor,
              (spec.magnetic ? "magnetic sum E^g <= " : "sum E^g <= ") + row + " int V-^{g+1}",
              spec.magnetic ? "magnetic fields" : "higher dimensions"};
  BoundReport r = make_report(spec.magnetic ? "lt-2d-magnetic" : "lt-2d", s, spec.riesz(gamma), rhs, 0.0,
                              spec.error(gamma), grid_provenance(Grid2D{spec.fine.grid.half_length,
                                                                        spec.fine.grid.points}));
  r.extras["bound_states"] = static_cast<double>(spec.fine.size());
  if (spec.magnetic) r.note = "lattice Peierls discretization; sharpness of constants not claimed for the lattice";
  return r;
}

BoundReport gauge_invariance_check(const Potential2D& v, const Grid2D& grid, MagneticField field,
                                   std::function<double(double, double)> chi, double tolerance) {
  field.chi = nullptr;
  const NegativeSpectrum a = negative_spectrum_2d(assemble_2d(v, grid, &field));
  field.chi = std::move(chi);
  const NegativeSpectrum b = negative_spectrum_2d(assemble_2d(v, grid, &field));
  BoundSpec s{std::numeric_limits<double>::quiet_NaN(), 2, Side::upper, 1.0,
              "spectrum invariant under a -> a + grad chi", "magnetic fields"};
  if (a.size() != b.size()) {
    BoundReport r = make_report("gauge-invariance", s, std::numeric_limits<double>::infinity(), tolerance, 0.0, 0.0);
    r.note = "bound-state counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    return r;
  }
  double diff = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) diff = std::max(diff, std::abs(a.energies[j] - b.energies[j]));
  BoundReport r = make_report("gauge-invariance", s, diff, tolerance, 0.0, 0.0,
                              "box [-" + format_double(grid.half_length) + ", " + format_double(grid.half_length) +
                                  "]^2, M=" + std::to_string(grid.points));
  r.extras["bound_states"] = static_cast<double>(a.size());
  return r;
}

BoundReport diamagnetic_trend(const Spectrum2D& plain, const Spectrum2D& magnetic, double gamma) {
  BoundSpec s{gamma, 2, Side::upper, 1.0, "magnetic Riesz mean <= plain Riesz mean (observed trend)",
              "magnetic fields"};
  BoundReport r = make_report("diamagnetic-trend", s, magnetic.riesz(gamma), plain.riesz(gamma), 0.0,
                              magnetic.error(gamma) + plain.error(gamma));
  r.note = "corpus-level observation, not a theorem";
  if (!r.pass) r.inconclusive = true;
  return r;
}

BoundReport lifting_inequality_audit(const Potential2D& v, const Grid2D& grid, double gamma, int rank,
                                     const NegativeSpectrum* plain) {
  if (!(gamma >= 0.5)) throw InvalidArgument("lifting_inequality_audit: gamma must be >= 1/2");
  if (rank < 1 || rank > 16) throw InvalidArgument("lifting_inequality_audit: rank must lie in [1, 16]");
  const int m = grid.points;
  if (rank > m) throw InvalidArgument("lifting_inequality_audit: rank exceeds the slice size");
  const GridOperator2D op = assemble_2d(v, grid);
  if (plain && plain->grid.points != m) throw InvalidArgument("lifting_inequality_audit: spectrum from another grid");
  const double lhs = riesz_mean(plain ? *plain : negative_spectrum_2d(op), gamma);

  const double h = grid.step();
  const double hop = 1.0 / (h * h);
  const auto slice = [&](int j) {
    RealMatrix w = RealMatrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      w(i, i) = 2.0 * hop + op.potential[i + m * j];
      if (i + 1 < m) w(i, i + 1) = w(i + 1, i) = -hop;
    }
    return w;
  };
  Eigen::SelfAdjointEigenSolver<RealMatrix> middle(slice(m / 2));
  const RealMatrix basis = middle.eigenvectors().leftCols(rank);

  BlockTridiagonal<double> reduced;
  reduced.coupling = -hop;
  double discarded = 0.0;
  for (int j = 0; j < m; ++j) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(slice(j));
    const RealVector neg = (-es.eigenvalues().array()).max(0.0).matrix();
    const RealMatrix wminus = es.eigenvectors() * neg.asDiagonal() * es.eigenvectors().transpose();
    const RealMatrix c = basis.transpose() * wminus * basis;
    reduced.diagonal.push_back(2.0 * hop * RealMatrix::Identity(rank, rank) - c);
    if (rank < m) {
      const RealMatrix rest = wminus - basis * c * basis.transpose();
      const RealVector mu = Eigen::SelfAdjointEigenSolver<RealMatrix>(0.5 * (rest + rest.transpose()),
                                                                      Eigen::EigenvaluesOnly)
                                .eigenvalues();
      for (Eigen::Index k = 0; k < mu.size(); ++k) {
        if (mu(k) > 1e-12 * hop) discarded += h * std::pow(mu(k), gamma + 0.5);
      }
    }
  }
  std::vector<double> lambdas;
  if (reduced.size() <= kDenseLimit1D) {
    const RealVector ev = hermitian_eigenvalues(reduced.dense());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) < -1e-8) lambdas.push_back(-ev(i));
    }
  } else {
    for (double l : reduced.eigenvalues_below(-1e-8)) lambdas.push_back(-l);
  }
  const double rhs = riesz_mean(lambdas, gamma);
  const double allowance = lt_factor(gamma, 1) * classical_constant(gamma, 1) * discarded;
  BoundSpec s{gamma, 2, Side::upper, 1.0, "tr(-Delta + V)_-^g <= tr(-d^2/dy^2 - W_-(y))_-^g", "dimensional lifting"};
  BoundReport r = make_report("lifting-inequality", s, lhs, rhs, 1e-12, allowance,
                              "box [-" + format_double(grid.half_length) + ", " + format_double(grid.half_length) +
                                  "]^2, M=" + std::to_string(m) + ", slice rank " + std::to_string(rank));
  r.extras["rank"] = rank;
  r.extras["allowance"] = allowance;
  if (r.pass && lhs > rhs * (1.0 + 1e-12)) {
    r.inconclusive = true;
    r.note = "holds only within the truncation allowance; raise the rank";
  }
  return r;
}

}  // namespace ltlab

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "ltlab/multidim.hpp"

using namespace ltlab;

namespace {

double well1d(double x) { return -3.0 * std::exp(-x * x); }

// Dirichlet finite-difference matrix of -d^2/dx^2 + well1d on the 2D grid's nodes.
Eigen::VectorXd fd_eigenvalues(const Grid2D& g) {
  const int m = g.points;
  const double h = g.step();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = 2.0 / (h * h) + well1d(g.x(i));
    if (i + 1 < m) a(i, i + 1) = a(i + 1, i) = -1.0 / (h * h);
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
}

Potential2D sum_well() {
  Potential2D v;
  v.name = "sum-well";
  v.value = [](double x, double y) { return well1d(x) + well1d(y); };
  v.radius = 5.0;
  return v;
}

}  // namespace

TEST_CASE("sum-separable potential: 2D spectrum is pairwise sums of 1D spectra") {
  Grid2D g;
  g.half_length = 6.0;
  g.points = 32;
  const Eigen::VectorXd e = fd_eigenvalues(g);
  std::vector<double> oracle;
  for (int i = 0; i < e.size(); ++i) {
    for (int j = 0; j < e.size(); ++j) {
      if (e(i) + e(j) < -1e-8) oracle.push_back(-(e(i) + e(j)));
    }
  }
  std::sort(oracle.rbegin(), oracle.rend());
  const NegativeSpectrum s = negative_spectrum_2d(assemble_2d(sum_well(), g));
  REQUIRE(s.size() == oracle.size());
  for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(s.energies[k] == doctest::Approx(oracle[k]).epsilon(1e-10));
}

TEST_CASE("magnetic operator is Hermitian and gauge invariant") {
  Grid2D g;
  g.half_length = 7.0;
  g.points = 24;
  MagneticField f;
  f.B = 0.8;
  f.gauge = Gauge::symmetric;
  const GridOperator2D op = assemble_2d(gaussian_well_2d(6.0, 1.0), g, &f);
  CHECK(op.magnetic);
  const Matrix h = op.dense();
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  const auto chi = [](double x, double y) { return 0.3 * std::sin(x + 2.0 * y) + 0.1 * x * y; };
  CHECK(gauge_invariance_check(gaussian_well_2d(6.0, 1.0), g, f, chi).pass);

  MagneticField landau = f;
  landau.gauge = Gauge::landau;
  const NegativeSpectrum a = negative_spectrum_2d(op);
  const NegativeSpectrum b = negative_spectrum_2d(assemble_2d(gaussian_well_2d(6.0, 1.0), g, &landau));
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.energies[k] == doctest::Approx(b.energies[k]).epsilon(1e-10));
}

TEST_CASE("vector potentials have curl B") {
  for (Gauge gauge : {Gauge::landau, Gauge::symmetric}) {
    MagneticField f;
    f.B = 1.7;
    f.gauge = gauge;
    const double x = 0.4, y = -1.1, h = 1e-5;
    const double curl = (f.vector_potential(x + h, y).second - f.vector_potential(x - h, y).second) / (2 * h) -
                        (f.vector_potential(x, y + h).first - f.vector_potential(x, y - h).first) / (2 * h);
    CHECK(curl == doctest::Approx(1.7).epsilon(1e-8));
  }
}

TEST_CASE("2D Lieb-Thirring audit on a moderate grid") {
  Grid2D g;
  g.half_length = 7.0;
  g.points = 32;
  const Potential2D v = gaussian_well_2d(8.0, 1.0);
  const Spectrum2D s = spectrum_2d(v, g);
  for (double gamma : {0.75, 1.0, 1.5}) CHECK(lt_audit_2d(v, s, gamma).pass);
  CHECK(potential_power_integral_2d(v, 1.0) == doctest::Approx(8.0 * std::numbers::pi).epsilon(1e-9));
}

TEST_CASE("memory guard") {
  Grid2D g;
  g.points = kMaxGrid2D + 1;
  CHECK_THROWS_AS(assemble_2d(zero_potential_2d(), g), InvalidArgument);
}

#include <cmath>

#include <doctest.h>

#include "ltlab/scattering.hpp"

using namespace ltlab;

namespace {

SampledPotential well(double depth, double a) {
  FamilySpec s;
  s.tag = FamilyTag::square_well;
  s.depth = depth;
  s.half_width = a;
  return build_family(s);
}

// ln|a(k)| from the textbook transmission of a finite well.
double well_logdet(double depth, double a, double k) {
  const double q = std::sqrt(k * k + depth);
  const double s = std::sin(2.0 * a * q);
  return 0.5 * std::log1p(depth * depth * s * s / (4.0 * k * k * q * q));
}

}  // namespace

TEST_CASE("Jost solution of a square well against the closed form") {
  const SampledPotential v = well(4.0, 1.0);
  for (double k : {0.05, 0.3, 1.0, 2.5, 10.0, 40.0}) {
    const JostSolution j = jost_solve(v, k);
    CHECK(log_abs_det(j.A) == doctest::Approx(well_logdet(4.0, 1.0, k)).epsilon(1e-8).scale(1e-12));
  }
}

TEST_CASE("reflectionless wells have |det A| = 1") {
  FamilySpec s;
  s.tag = FamilyTag::poschl_teller;
  s.nu = 2.0;
  const SampledPotential v = build_family(s);
  for (double k : {0.1, 1.0, 5.0}) CHECK(std::abs(log_abs_det(jost_solve(v, k).A)) < 1e-7);
}

TEST_CASE("scattering data of a 2x2 potential") {
  FamilySpec s;
  s.tag = FamilyTag::random_smooth;
  s.dim = 2;
  s.seed = 7;
  const SampledPotential v = build_family(s);
  const ScatteringData d = compute_scattering(v);
  CHECK(d.samples.size() > 100);
  CHECK(unitarity_audit(d).pass);
  CHECK(determinant_positivity_audit(d).pass);
  CHECK(integral_positivity_audit(d).pass);
  const auto I = spectral_integrals(d);
  for (double x : I) CHECK(x >= -1e-9);
  for (std::size_t i = 1; i < d.samples.size(); ++i) CHECK(d.samples[i].k > d.samples[i - 1].k);
}

TEST_CASE("log|det| of a known matrix") {
  Matrix m(2, 2);
  m << Complex(2, 0), Complex(1, 1), Complex(0, 0), Complex(0, 3);
  CHECK(log_abs_det(m) == doctest::Approx(std::log(6.0)));
}

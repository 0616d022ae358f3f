#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ltlab/fractional.hpp"
#include "ltlab/spectral1d.hpp"

using namespace ltlab;

TEST_CASE("Cauchy density is a Lorentzian") {
  for (double c1 : {0.5, 1.0, 2.0}) {
    for (double p : {0.0, 0.3, 1.0, 4.0, 50.0}) {
      const double lorentz = c1 / (std::numbers::pi * (c1 * c1 + p * p));
      CHECK(stable_density_value(1.0, c1, p) == doctest::Approx(lorentz).epsilon(1e-10));
    }
  }
}

TEST_CASE("stable densities are even, positive and decreasing") {
  for (double alpha : {0.6, 1.5, 1.9}) {
    double prev = stable_density_value(alpha, 1.0, 0.0);
    for (double p : {0.5, 1.0, 2.0, 5.0, 20.0}) {
      const double f = stable_density_value(alpha, 1.0, p);
      CHECK(f > 0.0);
      CHECK(f < prev);
      CHECK(stable_density_value(alpha, 1.0, -p) == f);
      prev = f;
    }
  }
  CHECK_THROWS_AS(stable_density_value(2.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("stable densities carry unit mass") {
  for (double alpha : {0.7, 1.0, 1.5}) CHECK(density_mass(alpha, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("c0 search") {
  ComparisonDensity cauchy = stable_density(1.0, 1.0, {});
  const C0Certificate c = c0_search(2.0, cauchy, 400);
  CHECK(c.c0 == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  CHECK_THROWS_AS(c0_search(1.5, cauchy, 100), InvalidArgument);

  ComparisonDensity d = stable_density(1.5, 1.0, {});
  const C0Certificate lo = c0_search(3.0, d, 400);
  const C0Certificate hi = c0_search(4.0, d, 400);
  CHECK(lo.c0 >= lo.grid_sup);
  CHECK(lo.c0 >= lo.tail_bound);
  CHECK(hi.c0 > 0.0);
}

TEST_CASE("beta = 2 Fourier spectrum matches the Laplacian") {
  FamilySpec s;
  s.tag = FamilyTag::poschl_teller;
  s.nu = 1.0;
  const SampledPotential v = build_family(s);
  const NegativeSpectrum f = fractional_spectrum(v, 2.0, 30.0, 512);
  REQUIRE(f.size() == 1);
  CHECK(f.energies[0] == doctest::Approx(1.0).epsilon(1e-6));
}

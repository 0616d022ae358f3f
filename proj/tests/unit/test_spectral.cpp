#include <cmath>
#include <functional>

#include <doctest.h>

#include "ltlab/bounds.hpp"
#include "ltlab/spectral1d.hpp"

using namespace ltlab;

namespace {

FamilySpec pt(double nu) {
  FamilySpec s;
  s.tag = FamilyTag::poschl_teller;
  s.nu = nu;
  return s;
}

FamilySpec well(double depth, double half_width) {
  FamilySpec s;
  s.tag = FamilyTag::square_well;
  s.depth = depth;
  s.half_width = half_width;
  return s;
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(lo) < 0.0) == (f(mid) < 0.0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Even and odd matching conditions of the finite well, solved in z = k a.
std::vector<double> well_energies(double depth, double a) {
  const double z0 = a * std::sqrt(depth);
  std::vector<double> out;
  for (int n = 0;; ++n) {
    const double lo = n * std::numbers::pi / 2.0, hi = std::min((n + 1) * std::numbers::pi / 2.0, z0);
    if (lo >= z0) break;
    const auto f = n % 2 == 0 ? std::function<double(double)>([z0](double z) { return z * std::tan(z) - std::sqrt(z0 * z0 - z * z); })
                              : std::function<double(double)>([z0](double z) { return -z / std::tan(z) - std::sqrt(z0 * z0 - z * z); });
    const double z = bisect(f, lo + 1e-14, hi - 1e-14);
    out.push_back(depth - z * z / (a * a));
  }
  return out;
}

NegativeSpectrum solve(const SampledPotential& v) {
  return refined_negative_spectrum(v, auto_grid(v, 0.02), 2);
}

}  // namespace

TEST_CASE("Poschl-Teller bound states are (nu - j)^2") {
  for (double nu : {1.0, 2.0, 3.0}) {
    const NegativeSpectrum s = solve(build_family(pt(nu)));
    REQUIRE(s.size() == static_cast<std::size_t>(nu));
    for (int j = 0; j < static_cast<int>(nu); ++j) {
      CHECK(s.energies[j] == doctest::Approx((nu - j) * (nu - j)).epsilon(1e-6));
    }
  }
}

TEST_CASE("square well matches the transcendental equations") {
  const auto oracle = well_energies(4.0, 1.0);
  REQUIRE(oracle.size() == 2);
  const NegativeSpectrum s = solve(build_family(well(4.0, 1.0)));
  REQUIRE(s.size() == oracle.size());
  for (std::size_t j = 0; j < oracle.size(); ++j) CHECK(s.energies[j] == doctest::Approx(oracle[j]).epsilon(1e-5));
}

TEST_CASE("matrix potentials: direct sums and unitary conjugation") {
  FamilySpec blocks;
  blocks.tag = FamilyTag::composite;
  blocks.blocks = {pt(1.0), pt(2.0)};
  const SampledPotential sum = build_family(blocks);
  CHECK(sum.dim() == 2);
  const NegativeSpectrum s = solve(sum);
  REQUIRE(s.size() == 3);
  CHECK(s.energies[0] == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(s.energies[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(s.energies[2] == doctest::Approx(1.0).epsilon(1e-6));

  Matrix u(2, 2);
  const double c = std::cos(0.7), sn = std::sin(0.7);
  u << Complex(c, 0), Complex(0, sn), Complex(0, sn), Complex(c, 0);
  const NegativeSpectrum t = solve(conjugated(sum, u));
  REQUIRE(t.size() == 3);
  for (int j = 0; j < 3; ++j) CHECK(t.energies[j] == doctest::Approx(s.energies[j]).epsilon(1e-9));
}

TEST_CASE("Riesz means") {
  CHECK(riesz_mean(std::vector<double>{4.0, 1.0}, 0.5) == doctest::Approx(3.0));
  CHECK(riesz_mean(std::vector<double>{4.0, 1.0}, 1.5) == doctest::Approx(9.0));
  CHECK(riesz_mean(std::vector<double>{}, 1.0) == 0.0);
}

TEST_CASE("moment audits on reflectionless wells") {
  const SampledPotential v = build_family(pt(2.0));
  const NegativeSpectrum s = solve(v);
  CHECK(sharp_half_audit(v, s).pass);
  for (double g : {0.5, 1.0, 1.5, 2.5}) CHECK(lifted_moment_audit(v, s, g).pass);
  for (const auto& r : lower_bound_audit(v, s)) CHECK(r.pass);
}

TEST_CASE("invalid families are rejected") {
  CHECK_THROWS_AS(build_family(well(1.0, -1.0)), InvalidArgument);
  CHECK_THROWS_AS(build_family(pt(0.0)), InvalidArgument);
  CHECK_THROWS_AS(family_from_string("harmonic"), InvalidArgument);
}

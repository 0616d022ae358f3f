#include <cmath>
#include <numbers>

#include <doctest.h>

#include "ltlab/bounds.hpp"

using namespace ltlab;

namespace {

// Direct Gamma-function form, no lgamma.
double oracle_constant(double gamma, int d) {
  return std::tgamma(gamma + 1.0) / (std::pow(4.0 * std::numbers::pi, 0.5 * d) * std::tgamma(gamma + 1.0 + 0.5 * d));
}

}  // namespace

TEST_CASE("classical constants match closed forms") {
  CHECK(classical_constant(0.5, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(classical_constant(1.5, 1) == doctest::Approx(3.0 / 16.0).epsilon(1e-14));
  CHECK(classical_constant(2.5, 1) == doctest::Approx(5.0 / 32.0).epsilon(1e-14));
  CHECK(std::abs(2.0 * classical_constant(1.0, 3) - 0.013509) < 5e-7);
  for (double g : {0.0, 0.5, 1.0, 1.5, 3.25}) {
    for (int d : {1, 2, 3, 5}) {
      CHECK(classical_constant(g, d) == doctest::Approx(oracle_constant(g, d)).epsilon(1e-13));
    }
  }
}

TEST_CASE("constants factor over dimensions") {
  for (double g : {0.5, 1.0, 2.0}) {
    for (int d : {2, 3, 4}) {
      const BoundReport r = product_identity_check(g, d);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("admissible range and factors") {
  CHECK(admissible(0.5, 1));
  CHECK_FALSE(admissible(0.25, 1));
  CHECK(admissible(0.0, 3));
  CHECK(admissible(0.01, 2));
  CHECK_FALSE(admissible(0.0, 2));
  CHECK(lt_factor(1.5, 1) == 1.0);
  CHECK(lt_factor(0.5, 1) == 2.0);
  CHECK_THROWS_AS(lt_factor(0.25, 1), InvalidArgument);
}

TEST_CASE("lifting integral against its Beta-function value") {
  for (double g : {0.75, 1.0, 1.5, 2.5}) {
    for (double s : {-0.1, -1.0, -7.0}) {
      CHECK(lifting_identity_check(g, s).pass);
    }
    CHECK(lifting_integral(g, 0.5) == 0.0);
  }
  // gamma = 3/2: (3/2) int_0^{|s|} (|s| - t)^{1/2} dt by hand
  CHECK(lifting_integral(1.5, -4.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK_THROWS_AS(lifting_integral(0.5, -1.0), InvalidArgument);
}

TEST_CASE("log spacing") {
  const auto v = log_spaced(1.0, 100.0, 3);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(10.0));
  CHECK(v[2] == doctest::Approx(100.0));
}

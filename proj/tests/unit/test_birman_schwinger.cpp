#include <cmath>

#include <doctest.h>

#include "ltlab/birman_schwinger.hpp"

using namespace ltlab;

namespace {

SampledPotential pt(double nu) {
  FamilySpec s;
  s.tag = FamilyTag::poschl_teller;
  s.nu = nu;
  return build_family(s);
}

SampledPotential random_2x2(int seed) {
  FamilySpec s;
  s.tag = FamilyTag::random_smooth;
  s.dim = 2;
  s.seed = seed;
  return build_family(s);
}

}  // namespace

TEST_CASE("K_E has eigenvalue one exactly at a bound state") {
  const KernelSource src = kernel_source(pt(2.0));
  CHECK(bs_eigenvalues(build_K(src, 4.0)).front() == doctest::Approx(1.0).epsilon(1e-3));
  const auto at_one = bs_eigenvalues(build_K(src, 1.0));
  REQUIRE(at_one.size() >= 2);
  CHECK(at_one[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Ky-Fan partial sums decrease in epsilon while the trace stays put") {
  const KernelSource src = kernel_source(random_2x2(11));
  const MonotonicityResult m = monotonicity_audit(src, default_epsilon_grid(8), 6);
  CHECK(m.monotone.pass);
  CHECK(m.trace.pass);
  for (std::size_t e = 1; e < m.profile.epsilons.size(); ++e) {
    for (std::size_t n = 0; n < m.profile.partial_sums[e].size(); ++n) {
      CHECK(m.profile.partial_sums[e][n] <= m.profile.partial_sums[e - 1][n] + 1e-9 * m.profile.traces[e]);
    }
  }
}

TEST_CASE("partial sums of a diagonal matrix") {
  RealMatrix d = RealMatrix::Zero(4, 4);
  d.diagonal() << 1.0, 3.0, -2.0, 2.0;
  const auto s = descending_partial_sums(d, 4);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == doctest::Approx(3.0));
  CHECK(s[1] == doctest::Approx(5.0));
  CHECK(s[2] == doctest::Approx(6.0));
  CHECK(s[3] == doctest::Approx(4.0));
}

TEST_CASE("Cauchy kernel transform is exp(-eps |u|)") {
  for (double eps : {0.1, 0.5, 2.0}) {
    for (double u : {0.0, 0.5, 2.0}) {
      CHECK(cauchy_kernel_transform(eps, u) == doctest::Approx(std::exp(-eps * u)).epsilon(1e-9));
    }
  }
  CHECK(cauchy_kernel_identity_check(1.0, {0.0, 1.0, 3.0}).pass);
}

TEST_CASE("BS audits on Poschl-Teller") {
  const SampledPotential v = pt(1.0);
  const NegativeSpectrum s = refined_negative_spectrum(v, auto_grid(v, 0.02), 2);
  CHECK(birman_schwinger_audit(v, s).pass);
  CHECK(sum_rule_audit(v, s).pass);
}

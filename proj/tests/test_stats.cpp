// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "meander/laws.hpp"
#include "meander/rng.hpp"
#include "meander/stats.hpp"

using namespace meander;
namespace st = meander::stats;

namespace {

// Inverse-CDF sampling from the continuous part of a mixed law, by
// bisection on the conditioned distribution function.
std::vector<double> sample_from_law(const laws::MixedSojournLaw& law,
                                    std::size_t m, sim::Rng& rng) {
  std::vector<double> out(m);
  const double mass = law.continuous_mass();
  for (auto& v : out) {
    const double target = rng.uniform01() * mass;
    double lo = law.support_lo(), hi = law.support_hi();
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (law.cdf_continuous(mid) < target ? lo : hi) = mid;
    }
    v = 0.5 * (lo + hi);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("normal quantile values") {
  CHECK(st::normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(st::normal_quantile(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-10));
  CHECK(st::normal_quantile(0.995) ==
        doctest::Approx(2.5758293035489004).epsilon(1e-10));
  CHECK(st::normal_quantile(0.005) ==
        doctest::Approx(-2.5758293035489004).epsilon(1e-10));
  CHECK_THROWS_AS(st::normal_quantile(0.0), std::invalid_argument);
}

TEST_CASE("Wilson interval") {
  auto zero = st::atom_ci(0, 1000, 0.01);
  CHECK(zero.first == doctest::Approx(0.0));
  CHECK(zero.second > 0.0);
  auto one = st::atom_ci(1000, 1000, 0.01);
  CHECK(one.second == doctest::Approx(1.0));
  CHECK(one.first < 1.0);
  auto mid = st::atom_ci(500, 1000, 0.01);
  CHECK(mid.first == doctest::Approx(0.459407).epsilon(1e-4));
  CHECK(mid.second == doctest::Approx(0.540593).epsilon(1e-4));
}

TEST_CASE("ks critical value") {
  // c(0.01) = sqrt(ln(2/0.01)/2) ~ 1.6276
  const double c = std::sqrt(std::log(200.0) / 2.0);
  CHECK(st::ks_critical_value(0.01, 1) == doctest::Approx(c).epsilon(1e-12));
  CHECK(st::ks_critical_value(0.01, 1) == doctest::Approx(1.6276).epsilon(1e-4));
  CHECK(st::ks_critical_value(0.01, 10000) ==
        doctest::Approx(c / 100.0).epsilon(1e-12));
}

TEST_CASE("ks test calibration under the null") {
  const auto law = laws::meander_limit_law(1.0, 2.0);
  sim::Rng rng(2024, 0);
  int passes = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    st::EmpiricalLaw emp;
    emp.continuous_samples = sample_from_law(law, 10000, rng);
    // Only the continuous part is sampled here, so feed an atom count that
    // matches the law's atom mass to keep the atom check neutral.
    emp.n_total = static_cast<std::int64_t>(
        std::lround(10000.0 / law.continuous_mass()));
    emp.atom_count = emp.n_total - 10000;
    const auto report = st::ks_test_continuous(emp, law, 0.01);
    passes += report.pass ? 1 : 0;
  }
  CHECK(passes >= 49);
}

TEST_CASE("ks test rejects uniform samples against the arcsine law") {
  const auto arcsine = laws::meander_limit_law(0.0, 1.0);
  sim::Rng rng(77, 0);
  st::EmpiricalLaw emp;
  emp.continuous_samples.resize(10000);
  for (auto& v : emp.continuous_samples) v = rng.uniform01();
  std::sort(emp.continuous_samples.begin(), emp.continuous_samples.end());
  emp.n_total = 10000;
  const auto report = st::ks_test_continuous(emp, arcsine, 0.01);
  CHECK_FALSE(report.pass);
  // The population sup-distance between the two CDFs is about 0.105, far
  // beyond the critical value at this sample size.
  CHECK(report.ks_stat > 0.08);
  CHECK(report.ks_stat < 0.13);
}

TEST_CASE("ks test requires continuous samples") {
  const auto law = laws::meander_limit_law(1.0, 2.0);
  st::EmpiricalLaw empty;
  empty.n_total = 5;
  empty.atom_count = 5;
  CHECK_THROWS_AS(st::ks_test_continuous(empty, law, 0.01),
                  std::invalid_argument);
}

TEST_CASE("ks statistic is invariant under monotone reparameterization") {
  const auto law = laws::meander_limit_law(1.0, 2.0);
  sim::Rng rng(5150, 0);
  st::EmpiricalLaw emp;
  emp.continuous_samples = sample_from_law(law, 2000, rng);
  emp.n_total = 2000;
  const auto base = st::ks_test_continuous(emp, law, 0.01);

  // Map z -> z^3 on both the samples and the law.
  st::EmpiricalLaw cubed;
  cubed.n_total = emp.n_total;
  for (double v : emp.continuous_samples) {
    cubed.continuous_samples.push_back(v * v * v);
  }
  std::sort(cubed.continuous_samples.begin(), cubed.continuous_samples.end());
  laws::MixedSojournLaw mapped(
      0.0, 1.0, [&law](double s) { return law.density(std::cbrt(s)); }, {},
      [&law](double z) { return law.cdf_continuous(std::cbrt(z)); });
  const auto transformed = st::ks_test_continuous(cubed, mapped, 0.01);
  CHECK(transformed.ks_stat == doctest::Approx(base.ks_stat).epsilon(1e-12));
}

TEST_CASE("two-sample ks: calibration and discrimination") {
  const auto law = laws::meander_limit_law(1.0, 2.0);
  sim::Rng rng(99, 0);
  st::EmpiricalLaw a, b, c;
  a.continuous_samples = sample_from_law(law, 4000, rng);
  a.n_total = 4000;
  b.continuous_samples = sample_from_law(law, 4000, rng);
  b.n_total = 4000;
  c.continuous_samples.resize(4000);
  for (auto& v : c.continuous_samples) v = rng.uniform01();
  std::sort(c.continuous_samples.begin(), c.continuous_samples.end());
  c.n_total = 4000;

  CHECK(st::two_sample_ks(a, b, 0.01).pass);
  CHECK_FALSE(st::two_sample_ks(a, c, 0.01).pass);

  // Atom-frequency comparison: close counts pass, divergent counts fail.
  a.atom_count = 500;
  a.n_total = 4500;
  b.atom_count = 520;
  b.n_total = 4520;
  CHECK(st::two_sample_ks(a, b, 0.01).pass);
  b.atom_count = 1500;
  b.n_total = 5500;
  CHECK_FALSE(st::two_sample_ks(a, b, 0.01).pass);
}

TEST_CASE("chi-square upper tail") {
  CHECK(st::chi_square_sf(0.0, 10) == doctest::Approx(1.0));
  // P(chi2_10 > 10) = e^{-5} sum_{k<5} 5^k/k!
  double want = 0.0, term = 1.0;
  for (int k = 0; k < 5; ++k) {
    want += term;
    term *= 5.0 / (k + 1);
  }
  want *= std::exp(-5.0);
  CHECK(st::chi_square_sf(10.0, 10) == doctest::Approx(want).epsilon(1e-10));
  CHECK(st::chi_square_sf(40.0, 10) < 1e-4);
}

TEST_CASE("chi-square homogeneity: identical histograms trivially agree") {
  std::vector<std::int64_t> a{100, 220, 340, 200, 140};
  CHECK(st::chi_square_homogeneity_pvalue(a, a) ==
        doctest::Approx(1.0).epsilon(1e-12));
  std::vector<std::int64_t> b{140, 200, 340, 220, 100};
  CHECK(st::chi_square_homogeneity_pvalue(a, b) < 0.05);
}

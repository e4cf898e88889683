// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "meander/quad.hpp"

using namespace meander;
namespace q = meander::quad;

namespace {

constexpr double kPi = std::numbers::pi;

struct CorpusEntry {
  const char* name;
  double truth;
  std::function<q::QuadResult(double rel_tol)> run;
};

// Ten integrands with independently known values, exercising all three
// domain kinds. These back the error-bound and refinement invariants.
std::vector<CorpusEntry> corpus() {
  std::vector<CorpusEntry> c;
  c.push_back({"unit constant", 1.0, [](double rt) {
                 return q::integrate_finite([](double) { return 1.0; }, 0.0,
                                            1.0, rt, 1e-16);
               }});
  c.push_back({"exp on [0,1]", std::exp(1.0) - 1.0, [](double rt) {
                 return q::integrate_finite(
                     [](double x) { return std::exp(x); }, 0.0, 1.0, rt,
                     1e-16);
               }});
  c.push_back({"peaked gaussian", std::sqrt(kPi) * 0.01, [](double rt) {
                 return q::integrate_finite(
                     [](double x) {
                       const double z = (x - 0.3) / 0.01;
                       return std::exp(-z * z);
                     },
                     0.0, 1.0, rt, 1e-16);
               }});
  c.push_back({"arcsine density", 1.0, [](double rt) {
                 return q::integrate_sqrt_singular(
                     [](double s) {
                       return 1.0 / (kPi * std::sqrt(s * (1.0 - s)));
                     },
                     0.0, 1.0, rt, 1e-16);
               }});
  c.push_back({"inverse sqrt", 2.0, [](double rt) {
                 return q::integrate_sqrt_singular(
                     [](double s) { return 1.0 / std::sqrt(s); }, 0.0, 1.0, rt,
                     1e-16);
               }});
  // Weighted arcsine law of the conditioned motion: continuous mass for
  // l = 1, t = 2 is 1 - sqrt(1/2).
  c.push_back({"weighted arcsine mass", 1.0 - std::sqrt(0.5), [](double rt) {
                 return q::integrate_sqrt_singular(
                     [](double s) {
                       return s / (kPi * std::sqrt(s * (1.0 - s)) * (s + 1.0));
                     },
                     0.0, 1.0, rt, 1e-16);
               }});
  // Excursion sojourn density for l = 1, t = 2 integrates to one.
  c.push_back({"excursion mass", 1.0, [](double rt) {
                 return q::integrate_sqrt_singular(
                     [](double s) {
                       return 0.5 * (2.0 * s) / std::sqrt((1.0 + s) * (1.0 - s));
                     },
                     0.0, 1.0, rt, 1e-16);
               }});
  c.push_back({"rayleigh mean-square", 1.0, [](double rt) {
                 return q::integrate_gaussian_tail(
                     [](double x) { return x * std::exp(-x * x / 2.0); }, 0.0,
                     0.0, 1.0, rt, 1e-16);
               }});
  c.push_back({"half gaussian second moment", std::sqrt(kPi / 2.0),
               [](double rt) {
                 return q::integrate_gaussian_tail(
                     [](double x) { return x * x * std::exp(-x * x / 2.0); },
                     0.0, 0.0, 1.0, rt, 1e-16);
               }});
  // First-passage kernel mass: ∫_0^inf w exp(-w^2/2s)/sqrt(2 pi s^3) dw
  // equals 1/sqrt(2 pi s) at s = 1/4.
  c.push_back({"first-passage kernel", 1.0 / std::sqrt(2.0 * kPi * 0.25),
               [](double rt) {
                 const double s = 0.25;
                 return q::integrate_gaussian_tail(
                     [s](double w) {
                       return w * std::exp(-w * w / (2.0 * s)) /
                              (std::sqrt(2.0 * kPi) * s * std::sqrt(s));
                     },
                     0.0, 0.0, std::sqrt(s), rt, 1e-16);
               }});
  return c;
}

}  // namespace

TEST_CASE("basic values at default tolerance") {
  auto r = q::integrate_finite([](double) { return 1.0; }, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.n_evals >= 15);

  r = q::integrate_sqrt_singular(
      [](double s) { return 1.0 / (kPi * std::sqrt(s * (1.0 - s))); }, 0.0,
      1.0);
  CHECK(std::fabs(r.value - 1.0) < 1e-10);

  r = q::integrate_gaussian_tail(
      [](double x) { return x * std::exp(-x * x / 2.0); }, 0.0, 0.0, 1.0);
  CHECK(std::fabs(r.value - 1.0) < 1e-10);
}

TEST_CASE("error estimate bounds the true error on the corpus") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.name);
    const auto r = entry.run(1e-10);
    const double err = std::fabs(r.value - entry.truth);
    CHECK(err <= 10.0 * r.err_est + 1e-15);
    CHECK(err < 1e-9);
  }
}

TEST_CASE("monotone refinement: halving rel_tol never loses accuracy by 2x") {
  for (const auto& entry : corpus()) {
    CAPTURE(entry.name);
    double tol = 1e-4;
    double prev_err = std::fabs(entry.run(tol).value - entry.truth);
    for (int k = 0; k < 20; ++k) {
      tol *= 0.5;
      const double err = std::fabs(entry.run(tol).value - entry.truth);
      CHECK(err <= 2.0 * prev_err + 1e-15);
      prev_err = err;
    }
  }
}

TEST_CASE("subdivision cap raises a numeric error carrying the best estimate") {
  auto nasty = [](double x) {
    return 1.0 / std::sqrt(std::fabs(x - 1.0 / kPi) + 1e-300);
  };
  bool threw = false;
  try {
    q::integrate_finite(nasty, 0.0, 1.0, 1e-14, 1e-16, 8);
  } catch (const q::ConvergenceError& e) {
    threw = true;
    CHECK(e.best().value > 0.0);
    CHECK(e.best().err_est > 0.0);
    CHECK(e.best().n_evals > 0);
  }
  CHECK(threw);
}

TEST_CASE("non-finite integrand values are rejected") {
  CHECK_THROWS_AS(q::integrate_finite([](double x) { return 1.0 / (x - x); },
                                      0.0, 1.0),
                  std::runtime_error);
}

TEST_CASE("degenerate and invalid intervals") {
  const auto r = q::integrate_finite([](double) { return 7.0; }, 2.0, 2.0);
  CHECK(r.value == 0.0);
  CHECK_THROWS_AS(q::integrate_finite([](double) { return 1.0; }, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("integrand spec dispatch") {
  q::IntegrandSpec spec;
  spec.kind = q::DomainKind::sqrt_singular_both_ends;
  spec.f = [](double s) { return 1.0 / (kPi * std::sqrt(s * (1.0 - s))); };
  CHECK(std::fabs(q::integrate(spec, 0.0, 1.0).value - 1.0) < 1e-10);

  spec.kind = q::DomainKind::gaussian_tail_right;
  spec.f = [](double x) { return x * std::exp(-x * x / 2.0); };
  spec.mean_hint = 0.0;
  spec.sigma_hint = 1.0;
  CHECK(std::fabs(q::integrate(spec, 0.0, 0.0).value - 1.0) < 1e-10);
}

TEST_CASE("gaussian tail cutoff covers displaced envelopes") {
  CHECK(q::gaussian_tail_cutoff(0.0, 0.0, 1.0) ==
        doctest::Approx(9.10456395969822));
  CHECK(q::gaussian_tail_cutoff(5.0, 0.0, 1.0) > 5.0);
  CHECK(q::gaussian_tail_cutoff(0.0, -3.0, 2.0) > 0.0);
}

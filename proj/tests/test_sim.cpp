// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "meander/laws.hpp"
#include "meander/sim.hpp"
#include "meander/stats.hpp"

using namespace meander;
namespace s = meander::sim;

TEST_CASE("fixed seed gives bit-identical paths") {
  s::Rng a(42, 3), b(42, 3);
  const auto p1 = s::sample_free_path(0.2, 0.1, 1.0, 64, a);
  const auto p2 = s::sample_free_path(0.2, 0.1, 1.0, 64, b);
  CHECK(p1.values == p2.values);

  s::Rng c(43, 3);
  const auto p3 = s::sample_free_path(0.2, 0.1, 1.0, 64, c);
  CHECK(p1.values != p3.values);
}

TEST_CASE("free path terminal moments") {
  const int n = 100000;
  s::Rng rng(7, 0);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = s::sample_free_path(0.3, 0.5, 2.0, 16, rng);
    const double v = p.values.back();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double want_mean = 0.5 + 0.3 * 2.0;
  CHECK(std::fabs(mean - want_mean) < 3.0 * std::sqrt(2.0 / n));
  CHECK(std::fabs(var - 2.0) < 3.0 * 2.0 * std::sqrt(2.0 / n));
}

TEST_CASE("bridge path pins both endpoints") {
  s::Rng rng(11, 0);
  for (int i = 0; i < 50; ++i) {
    const auto p = s::sample_bridge_path(0.7, 2.0, 128, rng);
    CHECK(p.values.front() == 0.7);
    CHECK(p.values.back() == 0.0);
  }
}

TEST_CASE("occupation time: edge cases") {
  s::Rng rng(1, 0);
  s::SamplePath negative{0.1, 0.0, std::vector<double>(11, -1.0)};
  auto r = s::occupation_time(negative, rng);
  CHECK(r.gamma == 0.0);
  CHECK_FALSE(r.atom_event);

  // All-positive path far from the barrier: crossing draws essentially
  // never fire, so the atom event holds and gamma is the full window.
  s::SamplePath positive{0.1, 0.0, std::vector<double>(11, 1.0)};
  r = s::occupation_time(positive, rng);
  CHECK(r.gamma == doctest::Approx(1.0));
  CHECK(r.atom_event);

  // Mixed step far from the refinement window: exact linear interpolation.
  s::SamplePath mixed{1e-4, 0.0, {30.0, -30.0}};
  r = s::occupation_time(mixed, rng);
  CHECK(r.gamma == doctest::Approx(0.5e-4));
  CHECK_FALSE(r.atom_event);

  // Near the barrier the step refines: the split stays strictly inside the
  // window and the atom still dies.
  s::SamplePath near{1.0, 0.0, {1.0, -1.0}};
  r = s::occupation_time(near, rng);
  CHECK(r.gamma > 0.0);
  CHECK(r.gamma < 1.0);
  CHECK_FALSE(r.atom_event);

  // A zero endpoint forces the crossing check to fire.
  s::SamplePath touch{1.0, 0.0, {1.0, 0.0}};
  r = s::occupation_time(touch, rng);
  CHECK_FALSE(r.atom_event);

  // Window start must sit on the grid.
  s::SamplePath grid{0.5, 0.0, {1.0, 1.0, 1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(s::occupation_time(grid, 0.3, rng), std::invalid_argument);
  CHECK(s::occupation_time(grid, 1.0, rng).gamma == doctest::Approx(1.0));
}

TEST_CASE("meander rejection: acceptance frequency matches the closed form") {
  const double u = 0.5, mu = 0.3, lw = 1.0, tw = 1.5;
  const double want = laws::stay_positive_probability(mu, u, lw);
  s::Rng rng(21, 0);
  // Count acceptances by drawing paths and tracking attempts through the
  // budget argument indirectly: replicate the acceptance loop statistics by
  // timing how many paths a fixed number of draws yields.
  const int n_paths = 30000;
  int attempts = 0;
  for (int i = 0; i < n_paths; ++i) {
    // One attempt = one prefix trial; count by simulating prefixes directly.
    for (;;) {
      ++attempts;
      bool ok = true;
      double v = u;
      const int k_l = 48;
      const double dt = tw / 72.0;  // l = 48 * dt
      const double sd = std::sqrt(dt);
      for (int k = 0; k < k_l; ++k) {
        const double w = v + mu * dt + sd * rng.normal();
        if (w <= 0.0 || rng.uniform01() < std::exp(-2.0 * v * w / dt)) {
          ok = false;
          break;
        }
        v = w;
      }
      if (ok) break;
    }
  }
  const double p_hat = static_cast<double>(n_paths) / attempts;
  const double se = std::sqrt(want * (1.0 - want) / attempts);
  CHECK(std::fabs(p_hat - want) < 3.0 * se);
}

TEST_CASE("meander rejection: accepted paths stay positive over the window") {
  s::Rng rng(33, 0);
  for (int i = 0; i < 100; ++i) {
    const auto p = s::sample_meander_rejection(0.4, -0.2, 1.0, 2.0, 64, rng);
    const int k_l = 64;  // prefix shares the window's grid spacing
    for (int k = 0; k <= k_l; ++k) CHECK(p.values[k] > 0.0);
    CHECK(p.values.size() == 129);
  }
}

TEST_CASE("meander rejection: budget exhaustion reports a budget error") {
  s::Rng rng(5, 0);
  CHECK_THROWS_AS(
      s::sample_meander_rejection(1e-7, 0.0, 1.0, 2.0, 256, rng, 20000),
      s::BudgetError);
}

TEST_CASE("limit meander endpoint drawing") {
  // mu = 0: exact Rayleigh with mean sqrt(pi l / 2).
  s::Rng rng(17, 0);
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto p = s::sample_limit_meander(0.0, 1.0, 2.0, 1, rng);
    sum += p.values.front();
  }
  const double want = std::sqrt(std::numbers::pi / 2.0);
  // Rayleigh sd = sqrt(2 - pi/2).
  const double sd = std::sqrt(2.0 - std::numbers::pi / 2.0);
  CHECK(std::fabs(sum / n - want) < 3.0 * sd / std::sqrt(n));

  // mu != 0: tilted draws remain finite and positive; hopeless tilts hit
  // the budget.
  for (int i = 0; i < 1000; ++i) {
    const auto p = s::sample_limit_meander(0.6, 1.0, 2.0, 1, rng);
    CHECK(p.values.front() > 0.0);
  }
  CHECK_THROWS_AS(s::sample_limit_meander(-40.0, 1.0, 2.0, 1, rng, 1000),
                  s::BudgetError);
}

TEST_CASE("limit excursion ends exactly at zero") {
  s::Rng rng(23, 0);
  for (int i = 0; i < 100; ++i) {
    const auto p = s::sample_limit_excursion(1.0, 2.0, 64, rng);
    CHECK(p.values.back() == 0.0);
    CHECK(p.t0 == 1.0);
    CHECK(p.values.front() > 0.0);
  }
}

TEST_CASE("campaigns are deterministic in (seed, streams)") {
  laws::ProcessParams params;
  params.l = 1.0;
  params.t = 2.0;
  s::SimConfig cfg;
  cfg.n_paths = 2000;
  cfg.n_steps = 128;
  cfg.seed = 99;
  cfg.n_streams = 4;
  const auto a = s::run_campaign(s::LawId::excursion, params, cfg);
  const auto b = s::run_campaign(s::LawId::excursion, params, cfg);
  CHECK(a.continuous_samples == b.continuous_samples);
  CHECK(a.atom_count == b.atom_count);
  CHECK(a.n_total == 2000);
  CHECK(a.atom_count + static_cast<std::int64_t>(a.continuous_samples.size()) ==
        a.n_total);

  cfg.seed = 100;
  const auto c = s::run_campaign(s::LawId::excursion, params, cfg);
  CHECK(a.continuous_samples != c.continuous_samples);
}

TEST_CASE("excursion campaign mean matches the closed form") {
  laws::ProcessParams params;
  params.l = 1.0;
  params.t = 2.0;
  s::SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 1024;
  cfg.seed = 3;
  cfg.n_streams = 4;
  const auto emp = s::run_campaign(s::LawId::excursion, params, cfg);
  CHECK(emp.atom_count == 0);  // pinned endpoint leaves no singular mass
  double sum = 0.0, sum2 = 0.0;
  for (double g : emp.continuous_samples) {
    sum += g;
    sum2 += g * g;
  }
  const double n = static_cast<double>(emp.continuous_samples.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(std::fabs(mean - laws::excursion_sojourn_mean(1.0, 2.0)) <
        3.0 * sd / std::sqrt(n));
}

TEST_CASE("meander-limit campaign atom frequency brackets the closed mass") {
  laws::ProcessParams params;
  params.l = 1.0;
  params.t = 4.0;
  s::SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 1024;
  cfg.seed = 8;
  cfg.n_streams = 4;
  const auto emp = s::run_campaign(s::LawId::meander_limit, params, cfg);
  const auto ci = stats::atom_ci(emp.atom_count, emp.n_total, 0.01);
  CHECK(ci.first <= 0.5);
  CHECK(0.5 <= ci.second);
}

TEST_CASE("free-motion campaign recovers the arcsine law") {
  laws::ProcessParams params;
  params.t = 1.0;
  params.x = 0.0;
  s::SimConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 2048;
  cfg.seed = 5;
  cfg.n_streams = 4;
  const auto emp = s::run_campaign(s::LawId::free_motion, params, cfg);
  const auto law = laws::free_sojourn_law_mu0(0.0, 1.0);
  const auto report = stats::ks_test_continuous(emp, law, 0.01);
  CHECK(report.pass);
}

TEST_CASE("doubling the step count moves the mean by less than two errors") {
  laws::ProcessParams params;
  params.l = 1.0;
  params.t = 2.0;
  s::SimConfig coarse{20000, 512, 31, 4};
  s::SimConfig fine{20000, 1024, 32, 4};
  auto mean_se = [](const stats::EmpiricalLaw& e) {
    double sum = 0.0, sum2 = 0.0;
    for (double g : e.continuous_samples) {
      sum += g;
      sum2 += g * g;
    }
    const double n = static_cast<double>(e.continuous_samples.size());
    const double m = sum / n;
    return std::pair<double, double>(
        m, std::sqrt((sum2 / n - m * m) / n));
  };
  const auto [m1, se1] = mean_se(s::run_campaign(s::LawId::excursion, params, coarse));
  const auto [m2, se2] = mean_se(s::run_campaign(s::LawId::excursion, params, fine));
  CHECK(std::fabs(m1 - m2) < 2.0 * std::hypot(se1, se2));
}

TEST_CASE("time reversal swaps start and endpoint with a drift flip") {
  // Joint histogram of (occupation, endpoint-in-cell) started at y with
  // drift mu against (occupation, endpoint-in-cell) started at w with
  // drift -mu, endpoint cells centred on w and y respectively.
  const double y = 0.5, w = 0.3, mu = 0.4, horizon = 1.0;
  const double half_cell = 0.05;
  const int n = 100000, n_steps = 256, n_bins = 8;
  std::vector<std::int64_t> ha(n_bins + 1, 0), hb(n_bins + 1, 0);

  s::Rng ra(71, 0), rb(72, 0);
  for (int i = 0; i < n; ++i) {
    auto pa = s::sample_free_path(mu, y, horizon, n_steps, ra);
    if (std::fabs(pa.values.back() - w) <= half_cell) {
      const auto r = s::occupation_time(pa, ra);
      if (r.atom_event) {
        ++ha[n_bins];
      } else {
        const int b = std::min(n_bins - 1,
                               static_cast<int>(r.gamma / horizon * n_bins));
        ++ha[b];
      }
    }
    auto pb = s::sample_free_path(-mu, w, horizon, n_steps, rb);
    if (std::fabs(pb.values.back() - y) <= half_cell) {
      const auto r = s::occupation_time(pb, rb);
      if (r.atom_event) {
        ++hb[n_bins];
      } else {
        const int b = std::min(n_bins - 1,
                               static_cast<int>(r.gamma / horizon * n_bins));
        ++hb[b];
      }
    }
  }
  const double p = stats::chi_square_homogeneity_pvalue(ha, hb);
  CHECK(p > 0.01);
}

TEST_CASE("law ids round-trip") {
  for (const char* name :
       {"bridge", "free", "meander-u", "meander-limit", "excursion"}) {
    CHECK(s::to_string(s::law_id_from_string(name)) == name);
  }
  CHECK_THROWS_AS(s::law_id_from_string("nope"), std::invalid_argument);
}

TEST_CASE("campaign validation rejects bad parameters") {
  laws::ProcessParams params;
  params.l = 1.0;
  params.t = 0.5;  // l >= t
  s::SimConfig cfg{10, 16, 0, 1};
  CHECK_THROWS_AS(s::run_campaign(s::LawId::excursion, params, cfg),
                  std::invalid_argument);
  params.t = 2.0;
  params.u = 0.0;
  CHECK_THROWS_AS(s::run_campaign(s::LawId::meander_u, params, cfg),
                  std::invalid_argument);
}

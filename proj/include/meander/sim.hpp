// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "meander/laws.hpp"
#include "meander/rng.hpp"
#include "meander/stats.hpp"

namespace meander::sim {

/// One simulated trajectory on a uniform grid starting at time t0.
struct SamplePath {
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<double> values;
};

/// Occupation time of [0, inf) over the inspected window, plus the
/// structural atom flag (no sign change on the grid and every step survived
/// the bridge no-crossing draw). atom_event implies gamma == window length.
struct OccupationResult {
  double gamma = 0.0;
  bool atom_event = false;
};

struct SimConfig {
  std::int64_t n_paths = 100000;
  int n_steps = 4096;
  std::uint64_t seed = 0;
  int n_streams = 8;
};

/// Raised when a rejection sampler exhausts its step budget; typically the
/// start level is too close to the barrier.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr std::int64_t kDefaultBudget = 10'000'000;

/// Drifted Brownian path from x0 over [0, horizon] with exact Gaussian
/// increments.
SamplePath sample_free_path(double mu, double x0, double horizon, int n_steps,
                            Rng& rng);

/// Brownian bridge from u at time 0 to 0 at time t (exact bridge
/// increments; the terminal value is exactly zero). Drift-free given the
/// endpoints.
SamplePath sample_bridge_path(double u, double t, int n_steps, Rng& rng);

/// Drifted path over [0, t] from u > 0, conditioned on staying positive on
/// [0, l] by rejection: grid positivity plus a Bernoulli bridge-crossing
/// check on every step. n_steps resolves the occupied window [l, t]; the
/// prefix runs on the same spacing (l must sit on that grid). The budget
/// counts step draws across attempts.
SamplePath sample_meander_rejection(double u, double mu, double l, double t,
                                    int n_steps, Rng& rng,
                                    std::int64_t budget = kDefaultBudget);

/// Limit (u -> 0) meander continuation: the position at time l is drawn
/// from the tilted Rayleigh endpoint law, then the path evolves freely on
/// [l, t]. The initial window is not materialized.
SamplePath sample_limit_meander(double mu, double l, double t, int n_steps,
                                Rng& rng,
                                std::int64_t budget = kDefaultBudget);

/// Limit excursion: Rayleigh endpoint at time l (scale^2 = l(t-l)/t), then a
/// Brownian bridge down to 0 at time t. Takes no drift parameter; the
/// pinned endpoint cancels it.
SamplePath sample_limit_excursion(double l, double t, int n_steps, Rng& rng);

/// Finite-u excursion through the general conditioned-rejection route: a
/// rejected meander prefix on [0, l], a thinning step proportional to the
/// bridge return density, then a bridge to 0 on [l, t]. n_steps resolves
/// the occupied window [l, t].
SamplePath sample_excursion_rejection(double u, double mu, double l, double t,
                                      int n_steps, Rng& rng,
                                      std::int64_t budget = kDefaultBudget);

/// Levels of exact bridge bisection applied inside occupation_time to steps
/// whose endpoints sit close enough to the barrier to interact with it.
inline constexpr int kOccupationRefineDepth = 6;

/// Occupation functional of [0, inf) over [from, end of path]. Counts full
/// steps when both endpoints are nonnegative, nothing when both are
/// negative, and the linearly interpolated positive fraction on sign
/// changes; steps near the barrier are first refined by exact bridge
/// bisection. The RNG drives the refinement midpoints and the bridge
/// no-crossing draws behind the atom flag.
OccupationResult occupation_time(const SamplePath& path, double from,
                                 Rng& rng);
OccupationResult occupation_time(const SamplePath& path, Rng& rng);

/// Campaign targets. The first five match the law identifiers of the
/// validation surface; excursion_rejection drives the excursion through the
/// general finite-u conditioned-rejection route (used by the
/// drift-independence checks) rather than the exact limit sampler.
enum class LawId {
  bridge,
  free_motion,
  meander_u,
  meander_limit,
  excursion,
  excursion_rejection,
};

LawId law_id_from_string(const std::string& name);
std::string to_string(LawId id);

/// Runs n_paths of the selected sampler split across seeded worker streams
/// and folds the occupation results into an EmpiricalLaw. The result is a
/// deterministic function of (params, config): stream k always owns the
/// same share of paths whatever the physical thread count. The environment
/// variable MEANDER_SOJOURN_THREADS caps the physical threads only.
stats::EmpiricalLaw run_campaign(LawId id, const laws::ProcessParams& params,
                                 const SimConfig& config);

}  // namespace meander::sim

// SPDX-License-Identifier: Apache-2.0
#include "meander/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace meander::sim {

namespace {

int grid_index_of(double l, double dt, double scale) {
  const int k = static_cast<int>(std::llround(l / dt));
  if (std::fabs(k * dt - l) > 1e-9 * scale) {
    throw std::invalid_argument(
        "sim: the conditioning time l must lie on the simulation grid");
  }
  return k;
}

// Draws the limit-meander position at time l: exact inverse CDF for mu = 0,
// otherwise rejection from a Rayleigh proposal of scale sqrt(2l) with
// acceptance exp(mu y - y^2/4l - mu^2 l) = exp(-(y/2sqrt(l) - mu sqrt(l))^2).
double draw_limit_meander_endpoint(double mu, double l, Rng& rng,
                                   std::int64_t budget) {
  if (mu == 0.0) {
    return std::sqrt(-2.0 * l * std::log(rng.uniform01()));
  }
  for (std::int64_t attempt = 0; attempt < budget; ++attempt) {
    const double y = std::sqrt(-4.0 * l * std::log(rng.uniform01()));
    const double dev = y / (2.0 * std::sqrt(l)) - mu * std::sqrt(l);
    if (rng.uniform01() < std::exp(-dev * dev)) return y;
  }
  throw BudgetError("sample_limit_meander: endpoint rejection budget exhausted");
}

// Appends exact Brownian-bridge steps from the current last value down to
// `target` at the final grid point.
void extend_with_bridge(SamplePath& path, double target, double remaining,
                        int n_steps, Rng& rng) {
  const double dt = path.dt;
  double v = path.values.back();
  double left = remaining;
  for (int k = 0; k < n_steps; ++k) {
    if (k == n_steps - 1) {
      v = target;
    } else {
      const double mean = v + (target - v) * dt / left;
      const double var = dt * (left - dt) / left;
      v = mean + std::sqrt(std::max(var, 0.0)) * rng.normal();
    }
    path.values.push_back(v);
    left -= dt;
  }
}

// Attempts one meander prefix on [0, l]: positive grid values plus a
// surviving no-crossing draw on every step. Returns true and fills `out`
// with the k_l + 1 prefix values on success. `steps_used` accumulates the
// number of Gaussian draws consumed.
bool try_meander_prefix(double u, double mu, double dt, int k_l,
                        std::vector<double>& out, Rng& rng,
                        std::int64_t& steps_used) {
  out.clear();
  out.push_back(u);
  const double drift = mu * dt;
  const double sd = std::sqrt(dt);
  double v = u;
  for (int k = 0; k < k_l; ++k) {
    const double w = v + drift + sd * rng.normal();
    ++steps_used;
    if (w <= 0.0) return false;
    if (rng.uniform01() < std::exp(-2.0 * v * w / dt)) return false;
    v = w;
    out.push_back(v);
  }
  return true;
}

}  // namespace

SamplePath sample_free_path(double mu, double x0, double horizon, int n_steps,
                            Rng& rng) {
  if (!(horizon > 0.0) || n_steps < 1) {
    throw std::invalid_argument("sample_free_path: need horizon > 0, n_steps >= 1");
  }
  SamplePath path;
  path.dt = horizon / n_steps;
  path.t0 = 0.0;
  path.values.resize(n_steps + 1);
  path.values[0] = x0;
  const double drift = mu * path.dt;
  const double sd = std::sqrt(path.dt);
  for (int k = 0; k < n_steps; ++k) {
    path.values[k + 1] = path.values[k] + drift + sd * rng.normal();
  }
  return path;
}

SamplePath sample_bridge_path(double u, double t, int n_steps, Rng& rng) {
  if (!(t > 0.0) || n_steps < 1) {
    throw std::invalid_argument("sample_bridge_path: need t > 0, n_steps >= 1");
  }
  SamplePath path;
  path.dt = t / n_steps;
  path.t0 = 0.0;
  path.values.reserve(n_steps + 1);
  path.values.push_back(u);
  extend_with_bridge(path, 0.0, t, n_steps, rng);
  return path;
}

SamplePath sample_meander_rejection(double u, double mu, double l, double t,
                                    int n_steps, Rng& rng,
                                    std::int64_t budget) {
  if (!(u > 0.0)) throw std::invalid_argument("sample_meander_rejection: u must be > 0");
  if (!(l > 0.0 && l < t)) {
    throw std::invalid_argument("sample_meander_rejection: need 0 < l < t");
  }
  // n_steps resolves the occupied window [l, t]; the conditioned prefix
  // runs on the same grid spacing.
  const double dt = (t - l) / n_steps;
  const int k_l = grid_index_of(l, dt, t);
  std::int64_t steps_used = 0;
  std::vector<double> prefix;
  while (steps_used < budget) {
    if (!try_meander_prefix(u, mu, dt, k_l, prefix, rng, steps_used)) continue;
    SamplePath path;
    path.dt = dt;
    path.t0 = 0.0;
    path.values = prefix;
    const double drift = mu * dt;
    const double sd = std::sqrt(dt);
    double v = path.values.back();
    for (int k = 0; k < n_steps; ++k) {
      v += drift + sd * rng.normal();
      path.values.push_back(v);
    }
    return path;
  }
  throw BudgetError(
      "sample_meander_rejection: acceptance budget exhausted; consider a "
      "larger start level u");
}

SamplePath sample_limit_meander(double mu, double l, double t, int n_steps,
                                Rng& rng, std::int64_t budget) {
  if (!(l > 0.0 && l < t)) {
    throw std::invalid_argument("sample_limit_meander: need 0 < l < t");
  }
  const double y = draw_limit_meander_endpoint(mu, l, rng, budget);
  SamplePath path;
  path.dt = (t - l) / n_steps;
  path.t0 = l;
  path.values.resize(n_steps + 1);
  path.values[0] = y;
  const double drift = mu * path.dt;
  const double sd = std::sqrt(path.dt);
  for (int k = 0; k < n_steps; ++k) {
    path.values[k + 1] = path.values[k] + drift + sd * rng.normal();
  }
  return path;
}

SamplePath sample_limit_excursion(double l, double t, int n_steps, Rng& rng) {
  if (!(l >= 0.0 && l < t)) {
    throw std::invalid_argument("sample_limit_excursion: need 0 <= l < t");
  }
  const double scale2 = l * (t - l) / t;
  const double y =
      scale2 > 0.0 ? std::sqrt(-2.0 * scale2 * std::log(rng.uniform01())) : 0.0;
  SamplePath path;
  path.dt = (t - l) / n_steps;
  path.t0 = l;
  path.values.reserve(n_steps + 1);
  path.values.push_back(y);
  extend_with_bridge(path, 0.0, t - l, n_steps, rng);
  return path;
}

SamplePath sample_excursion_rejection(double u, double mu, double l, double t,
                                      int n_steps, Rng& rng,
                                      std::int64_t budget) {
  if (!(u > 0.0)) throw std::invalid_argument("sample_excursion_rejection: u must be > 0");
  if (!(l > 0.0 && l < t)) {
    throw std::invalid_argument("sample_excursion_rejection: need 0 < l < t");
  }
  const double tau = t - l;
  const double dt = tau / n_steps;
  const int k_l = grid_index_of(l, dt, t);
  std::int64_t steps_used = 0;
  std::vector<double> prefix;
  while (steps_used < budget) {
    if (!try_meander_prefix(u, mu, dt, k_l, prefix, rng, steps_used)) continue;
    // Thinning proportional to the return density of the drifted motion
    // from the prefix endpoint down to zero at time t.
    const double y = prefix.back();
    const double dev = y + mu * tau;
    if (rng.uniform01() >= std::exp(-dev * dev / (2.0 * tau))) continue;
    SamplePath path;
    path.dt = dt;
    path.t0 = 0.0;
    path.values = prefix;
    extend_with_bridge(path, 0.0, tau, n_steps, rng);
    return path;
  }
  throw BudgetError(
      "sample_excursion_rejection: acceptance budget exhausted; consider a "
      "larger start level u");
}

namespace {

// Occupation contribution of one step, with local bridge refinement near
// the barrier: while the bridge between the endpoints has a non-negligible
// chance of touching zero, the step is bisected by drawing the exact
// Gaussian bridge midpoint and the same rules recurse on the halves. The
// refinement is exact in law and spreads occupation mass that a bare grid
// rule would clump at the window edges; far from the barrier it never
// triggers. `atom` is cleared on any detected crossing.
double step_occupation(double a, double b, double dt, int depth, bool& atom,
                       Rng& rng) {
  if (depth > 0 && 2.0 * std::fabs(a * b) < 30.0 * dt) {
    const double mid =
        0.5 * (a + b) + std::sqrt(0.25 * dt) * rng.normal();
    const double left = step_occupation(a, mid, 0.5 * dt, depth - 1, atom, rng);
    return left + step_occupation(mid, b, 0.5 * dt, depth - 1, atom, rng);
  }
  if (a >= 0.0 && b >= 0.0) {
    if (atom) {
      // The bridge between two nonnegative values crosses zero with
      // probability exp(-2ab/dt); a crossing kills the atom event.
      if (a == 0.0 || b == 0.0 ||
          rng.uniform01() < std::exp(-2.0 * a * b / dt)) {
        atom = false;
      }
    }
    return dt;
  }
  if (a < 0.0 && b < 0.0) {
    atom = false;
    return 0.0;
  }
  atom = false;
  const double frac = a >= 0.0 ? a / (a - b) : b / (b - a);
  return dt * frac;
}

}  // namespace

OccupationResult occupation_time(const SamplePath& path, double from,
                                 Rng& rng) {
  if (path.values.size() < 2 || !(path.dt > 0.0)) {
    throw std::invalid_argument("occupation_time: path needs at least one step");
  }
  const int n_steps = static_cast<int>(path.values.size()) - 1;
  const double span = n_steps * path.dt;
  int k0 = static_cast<int>(std::llround((from - path.t0) / path.dt));
  if (k0 < 0 || k0 >= n_steps ||
      std::fabs(path.t0 + k0 * path.dt - from) > 1e-9 * (span + std::fabs(from))) {
    throw std::invalid_argument("occupation_time: window start not on the path grid");
  }

  const double dt = path.dt;
  double gamma = 0.0;
  bool atom = true;
  for (int k = k0; k < n_steps; ++k) {
    gamma += step_occupation(path.values[k], path.values[k + 1], dt,
                             kOccupationRefineDepth, atom, rng);
  }

  const double window = (n_steps - k0) * dt;
  if (atom) gamma = window;
  OccupationResult r;
  r.gamma = std::clamp(gamma, 0.0, window);
  r.atom_event = atom;
  return r;
}

OccupationResult occupation_time(const SamplePath& path, Rng& rng) {
  return occupation_time(path, path.t0, rng);
}

LawId law_id_from_string(const std::string& name) {
  if (name == "bridge") return LawId::bridge;
  if (name == "free") return LawId::free_motion;
  if (name == "meander-u") return LawId::meander_u;
  if (name == "meander-limit") return LawId::meander_limit;
  if (name == "excursion") return LawId::excursion;
  throw std::invalid_argument("unknown law id: " + name);
}

std::string to_string(LawId id) {
  switch (id) {
    case LawId::bridge: return "bridge";
    case LawId::free_motion: return "free";
    case LawId::meander_u: return "meander-u";
    case LawId::meander_limit: return "meander-limit";
    case LawId::excursion: return "excursion";
    case LawId::excursion_rejection: return "excursion-rejection";
  }
  return "?";
}

namespace {

void validate_campaign(LawId id, const laws::ProcessParams& p) {
  if (!(p.t > 0.0)) throw std::invalid_argument("run_campaign: t must be > 0");
  switch (id) {
    case LawId::bridge:
      if (p.u < 0.0) throw std::invalid_argument("run_campaign: bridge needs u >= 0");
      break;
    case LawId::free_motion:
      if (p.x < 0.0) throw std::invalid_argument("run_campaign: free law needs x >= 0");
      break;
    case LawId::meander_u:
      if (!(p.u > 0.0) || !(p.l > 0.0 && p.l < p.t)) {
        throw std::invalid_argument("run_campaign: meander-u needs u > 0, 0 < l < t");
      }
      break;
    case LawId::meander_limit:
      if (!(p.l > 0.0 && p.l < p.t)) {
        throw std::invalid_argument("run_campaign: meander-limit needs 0 < l < t");
      }
      break;
    case LawId::excursion:
      if (!(p.l >= 0.0 && p.l < p.t)) {
        throw std::invalid_argument("run_campaign: excursion needs 0 <= l < t");
      }
      break;
    case LawId::excursion_rejection:
      if (!(p.u > 0.0) || !(p.l > 0.0 && p.l < p.t)) {
        throw std::invalid_argument(
            "run_campaign: excursion-rejection needs u > 0, 0 < l < t");
      }
      break;
  }
}

OccupationResult draw_one(LawId id, const laws::ProcessParams& p, int n_steps,
                          Rng& rng) {
  switch (id) {
    case LawId::bridge: {
      SamplePath path = sample_bridge_path(p.u, p.t, n_steps, rng);
      return occupation_time(path, rng);
    }
    case LawId::free_motion: {
      SamplePath path = sample_free_path(p.mu, p.x, p.t, n_steps, rng);
      return occupation_time(path, rng);
    }
    case LawId::meander_u: {
      SamplePath path = sample_meander_rejection(p.u, p.mu, p.l, p.t, n_steps, rng);
      return occupation_time(path, p.l, rng);
    }
    case LawId::meander_limit: {
      SamplePath path = sample_limit_meander(p.mu, p.l, p.t, n_steps, rng);
      return occupation_time(path, rng);
    }
    case LawId::excursion: {
      SamplePath path = sample_limit_excursion(p.l, p.t, n_steps, rng);
      return occupation_time(path, rng);
    }
    case LawId::excursion_rejection: {
      SamplePath path =
          sample_excursion_rejection(p.u, p.mu, p.l, p.t, n_steps, rng);
      return occupation_time(path, p.l, rng);
    }
  }
  throw std::logic_error("run_campaign: unknown law id");
}

int physical_thread_count(int n_streams) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* cap = std::getenv("MEANDER_SOJOURN_THREADS")) {
    const int v = std::atoi(cap);
    if (v >= 1) threads = std::min(threads, v);
  }
  return std::min(threads, n_streams);
}

}  // namespace

stats::EmpiricalLaw run_campaign(LawId id, const laws::ProcessParams& params,
                                 const SimConfig& config) {
  validate_campaign(id, params);
  if (config.n_paths < 1 || config.n_steps < 1 || config.n_streams < 1) {
    throw std::invalid_argument("run_campaign: invalid SimConfig");
  }

  const int n_streams = config.n_streams;
  std::vector<std::vector<double>> continuous(n_streams);
  std::vector<std::int64_t> atoms(n_streams, 0);

  std::atomic<int> next_stream{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      const int k = next_stream.fetch_add(1);
      if (k >= n_streams) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        Rng rng(config.seed, static_cast<std::uint64_t>(k));
        const std::int64_t quota = config.n_paths / n_streams +
                                   (k < config.n_paths % n_streams ? 1 : 0);
        auto& cont = continuous[k];
        cont.reserve(quota);
        for (std::int64_t i = 0; i < quota; ++i) {
          const OccupationResult r = draw_one(id, params, config.n_steps, rng);
          if (r.atom_event) {
            ++atoms[k];
          } else {
            cont.push_back(r.gamma);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int n_threads = physical_thread_count(n_streams);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  stats::EmpiricalLaw law;
  law.n_total = config.n_paths;
  std::size_t total = 0;
  for (const auto& c : continuous) total += c.size();
  law.continuous_samples.reserve(total);
  for (int k = 0; k < n_streams; ++k) {
    law.continuous_samples.insert(law.continuous_samples.end(),
                                  continuous[k].begin(), continuous[k].end());
    law.atom_count += atoms[k];
  }
  std::sort(law.continuous_samples.begin(), law.continuous_samples.end());
  return law;
}

}  // namespace meander::sim

// SPDX-License-Identifier: Apache-2.0
#include "meander/fkpde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "meander/quad.hpp"

namespace meander::fkpde {

namespace {

// One theta-scheme stepper for dw/dt = 1/2 w_xx + mu w_x - k(x) w (the
// backward equation of the +mu-drifted motion) with Dirichlet boundary
// values supplied per time level. The tridiagonal factors are fixed, so a
// step is a matrix-vector product plus one Thomas solve.
class ThetaStepper {
 public:
  ThetaStepper(const std::vector<double>& x, double dx, double mu,
               const std::vector<double>& potential, double dt,
               DriftScheme scheme, std::vector<double> initial)
      : nx_(static_cast<int>(x.size())), dt_(dt), state_(std::move(initial)) {
    const double theta = 0.5;
    // Assemble the spatial operator A as tridiagonals (lower, diag, upper).
    std::vector<double> lo(nx_, 0.0), di(nx_, 0.0), up(nx_, 0.0);
    const double idx2 = 1.0 / (dx * dx);
    for (int i = 1; i + 1 < nx_; ++i) {
      lo[i] += 0.5 * idx2;
      di[i] += -idx2;
      up[i] += 0.5 * idx2;
      if (scheme == DriftScheme::central) {
        lo[i] += -mu / (2.0 * dx);
        up[i] += mu / (2.0 * dx);
      } else if (mu > 0.0) {
        // +mu w_x transports from the right; one-sided differences keep the
        // off-diagonal weights nonnegative.
        di[i] += -mu / dx;
        up[i] += mu / dx;
      } else if (mu < 0.0) {
        lo[i] += -mu / dx;
        di[i] += mu / dx;
      }
      di[i] += -potential[i];
    }
    lhs_lo_.resize(nx_);
    lhs_di_.resize(nx_);
    lhs_up_.resize(nx_);
    rhs_lo_.resize(nx_);
    rhs_di_.resize(nx_);
    rhs_up_.resize(nx_);
    for (int i = 0; i < nx_; ++i) {
      lhs_lo_[i] = -dt * theta * lo[i];
      lhs_di_[i] = 1.0 - dt * theta * di[i];
      lhs_up_[i] = -dt * theta * up[i];
      rhs_lo_[i] = dt * (1.0 - theta) * lo[i];
      rhs_di_[i] = 1.0 + dt * (1.0 - theta) * di[i];
      rhs_up_[i] = dt * (1.0 - theta) * up[i];
    }
    // Boundary rows are identities; their values come from the BCs.
    lhs_di_[0] = lhs_di_[nx_ - 1] = 1.0;
    lhs_lo_[0] = lhs_up_[0] = lhs_lo_[nx_ - 1] = lhs_up_[nx_ - 1] = 0.0;
    work_.resize(nx_);
    rhs_.resize(nx_);
  }

  void advance(double left_value, double right_value) {
    rhs_[0] = left_value;
    rhs_[nx_ - 1] = right_value;
    for (int i = 1; i + 1 < nx_; ++i) {
      rhs_[i] = rhs_lo_[i] * state_[i - 1] + rhs_di_[i] * state_[i] +
                rhs_up_[i] * state_[i + 1];
    }
    // Thomas solve of lhs * state = rhs.
    work_[0] = lhs_up_[0] / lhs_di_[0];
    rhs_[0] = rhs_[0] / lhs_di_[0];
    for (int i = 1; i < nx_; ++i) {
      const double denom = lhs_di_[i] - lhs_lo_[i] * work_[i - 1];
      work_[i] = lhs_up_[i] / denom;
      rhs_[i] = (rhs_[i] - lhs_lo_[i] * rhs_[i - 1]) / denom;
    }
    state_[nx_ - 1] = rhs_[nx_ - 1];
    for (int i = nx_ - 2; i >= 0; --i) {
      state_[i] = rhs_[i] - work_[i] * state_[i + 1];
    }
  }

  const std::vector<double>& state() const { return state_; }
  double dt() const { return dt_; }

 private:
  int nx_;
  double dt_;
  std::vector<double> state_;
  std::vector<double> lhs_lo_, lhs_di_, lhs_up_;
  std::vector<double> rhs_lo_, rhs_di_, rhs_up_;
  std::vector<double> work_, rhs_;
};

std::vector<double> build_nodes(const FkGrid& grid) {
  std::vector<double> x(grid.nx);
  const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
  for (int i = 0; i < grid.nx; ++i) x[i] = grid.x_min + i * dx;
  return x;
}

std::vector<double> build_potential(const std::vector<double>& x,
                                    double beta) {
  std::vector<double> k(x.size(), 0.0);
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) k[i] = beta;
    if (std::fabs(x[i]) < std::fabs(x[nearest])) nearest = i;
  }
  k[nearest] = beta / 2.0;
  return k;
}

void validate_grid(const FkGrid& grid, double horizon) {
  if (!(grid.x_min < 0.0 && grid.x_max > 0.0)) {
    throw std::invalid_argument("FkGrid: need x_min < 0 < x_max");
  }
  if (grid.nx < 3) throw std::invalid_argument("FkGrid: nx must be >= 3");
  if (!(grid.dt > 0.0)) throw std::invalid_argument("FkGrid: dt must be > 0");
  if (grid.beta < 0.0) throw std::invalid_argument("FkGrid: beta must be >= 0");
  if (!(horizon > 0.0)) throw std::invalid_argument("solve_fk: horizon must be > 0");
  const double steps = horizon / grid.dt;
  if (std::fabs(steps - std::llround(steps)) > 1e-6) {
    throw std::invalid_argument("solve_fk: horizon must be a multiple of dt");
  }
}

}  // namespace

FkSolution::FkSolution(std::vector<double> x, std::vector<double> times,
                       std::vector<std::vector<double>> levels)
    : x_(std::move(x)), times_(std::move(times)), levels_(std::move(levels)) {}

double FkSolution::value_at(double xq) const {
  const auto& w = levels_.back();
  if (xq <= x_.front()) return w.front();
  if (xq >= x_.back()) return w.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), xq);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double frac = (xq - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return w[i - 1] + frac * (w[i] - w[i - 1]);
}

FkSolution solve_fk(const FkGrid& grid, double horizon, DriftScheme scheme,
                    bool store_all_levels) {
  validate_grid(grid, horizon);
  const auto x = build_nodes(grid);
  const auto potential = build_potential(x, grid.beta);
  const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
  const auto n_steps = std::llround(horizon / grid.dt);

  ThetaStepper stepper(x, dx, grid.mu, potential, grid.dt, scheme,
                       std::vector<double>(grid.nx, 1.0));

  std::vector<std::vector<double>> levels;
  std::vector<double> times;
  if (store_all_levels) {
    levels.push_back(stepper.state());
    times.push_back(0.0);
  }
  for (long long n = 1; n <= n_steps; ++n) {
    const double tau = n * grid.dt;
    stepper.advance(1.0, std::exp(-grid.beta * tau));
    if (store_all_levels) {
      levels.push_back(stepper.state());
      times.push_back(tau);
    }
  }
  if (!store_all_levels) {
    levels.push_back(stepper.state());
    times.push_back(horizon);
  }
  for (double v : levels.back()) {
    if (!std::isfinite(v)) {
      throw std::runtime_error("solve_fk: solution diverged (non-finite values)");
    }
  }
  return FkSolution(x, std::move(times), std::move(levels));
}

double laplace_of_law(const laws::MixedSojournLaw& law, double beta) {
  if (beta < 0.0) throw std::invalid_argument("laplace_of_law: beta must be >= 0");
  auto f = [&law, beta](double s) { return std::exp(-beta * s) * law.density(s); };
  // Law densities built from nested quadratures carry ~1e-10 relative
  // noise; the tolerance sits above that floor and far below any consumer's.
  double value = quad::integrate_sqrt_singular(f, law.support_lo(),
                                               law.support_hi(), 1e-9, 1e-12)
                     .value;
  for (const auto& a : law.atoms()) {
    value += std::exp(-beta * a.location) * a.mass;
  }
  return value;
}

double check_transformation(double mu, double beta, const FkGrid& grid,
                            double horizon, DriftScheme scheme) {
  FkGrid g = grid;
  g.mu = mu;
  g.beta = beta;
  validate_grid(g, horizon);
  const auto x = build_nodes(g);
  const auto potential = build_potential(x, beta);
  const double dx = (g.x_max - g.x_min) / (g.nx - 1);
  const auto n_steps = std::llround(horizon / g.dt);

  ThetaStepper drifted(x, dx, mu, potential, g.dt, scheme,
                       std::vector<double>(g.nx, 1.0));
  // Drift-removed route: w = exp(-mu^2 tau / 2 - mu x) z with
  // z_t = z_xx / 2 - k z and z(x, 0) = exp(mu x).
  std::vector<double> z0(g.nx);
  for (int i = 0; i < g.nx; ++i) z0[i] = std::exp(mu * x[i]);
  ThetaStepper driftless(x, dx, 0.0, potential, g.dt, scheme, std::move(z0));

  double max_mismatch = 0.0;
  for (long long n = 1; n <= n_steps; ++n) {
    const double tau = n * g.dt;
    drifted.advance(1.0, std::exp(-beta * tau));
    const double gauge = std::exp(-mu * mu * tau / 2.0);
    driftless.advance(std::exp(mu * x.front()) / gauge,
                      std::exp(mu * x.back() - beta * tau) / gauge);
    const auto& w = drifted.state();
    const auto& z = driftless.state();
    for (int i = 1; i + 1 < g.nx; ++i) {
      const double mapped = gauge * std::exp(-mu * x[i]) * z[i];
      max_mismatch = std::max(max_mismatch, std::fabs(w[i] - mapped));
    }
  }
  return max_mismatch;
}

}  // namespace meander::fkpde

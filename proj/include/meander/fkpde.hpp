// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "meander/laws.hpp"

namespace meander::fkpde {

/// Space-time grid and coefficients of the Cauchy problem
///   dw/dt = 1/2 d2w/dx2 + mu dw/dx - k(x) w,   w(x, 0) = 1,
/// the backward equation of the +mu-drifted motion under the step potential
/// k(x) = beta for x > 0 and 0 for x < 0; w(x, t) is the Laplace transform
/// in beta of the occupation time started at x. The node nearest the origin
/// carries beta/2, which halves the interface error of the discontinuous
/// potential.
struct FkGrid {
  double x_min = -10.0;
  double x_max = 10.0;
  int nx = 2001;
  double dt = 5e-4;
  double beta = 1.0;
  double mu = 0.0;
};

enum class DriftScheme { upwind, central };

class FkSolution {
 public:
  FkSolution(std::vector<double> x, std::vector<double> times,
             std::vector<std::vector<double>> levels);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& times() const { return times_; }
  int n_levels() const { return static_cast<int>(levels_.size()); }

  /// Value at (node i, stored level n).
  double at(int level, int node) const { return levels_[level][node]; }
  const std::vector<double>& level(int n) const { return levels_[n]; }
  const std::vector<double>& final_level() const { return levels_.back(); }

  /// Linear interpolation of the final time level at position x.
  double value_at(double x) const;

 private:
  std::vector<double> x_;
  std::vector<double> times_;
  std::vector<std::vector<double>> levels_;
};

/// Marches the theta = 1/2 scheme (implicit in the diffusion) from w = 1 to
/// the horizon. Far-field Dirichlet values follow the known pure-exponential
/// behaviour: w = 1 on the deep negative side, w = exp(-beta tau) on the
/// deep positive side. Throws on a non-finite solution.
FkSolution solve_fk(const FkGrid& grid, double horizon,
                    DriftScheme scheme = DriftScheme::central,
                    bool store_all_levels = false);

/// ∫ e^{-beta s} density(s) ds + sum over atoms of e^{-beta loc} mass.
double laplace_of_law(const laws::MixedSojournLaw& law, double beta);

/// Solves the drifted problem and the drift-removed problem obtained from
/// the substitution w = exp(-mu^2 t / 2 - mu x) z, and returns the largest
/// absolute mismatch between the two routes over interior nodes and all
/// time levels.
double check_transformation(double mu, double beta, const FkGrid& grid,
                            double horizon,
                            DriftScheme scheme = DriftScheme::central);

}  // namespace meander::fkpde

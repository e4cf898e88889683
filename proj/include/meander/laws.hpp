// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace meander::laws {

/// Bag of process parameters shared by the law evaluators, the samplers and
/// the CLI: drift mu, horizon t, length l of the initial conditioned window,
/// start level u, generic start/end level x.
struct ProcessParams {
  double mu = 0.0;
  double t = 1.0;
  double l = 0.0;
  double u = 0.0;
  double x = 0.0;
};

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// A probability law on an interval made of an absolutely continuous density
/// plus finitely many atoms. Immutable after construction; all cached state
/// is built eagerly, so concurrent evaluation is safe.
class MixedSojournLaw {
 public:
  MixedSojournLaw(double lo, double hi, std::function<double(double)> density,
                  std::vector<Atom> atoms,
                  std::function<double(double)> cdf_continuous);

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  /// Density of the continuous part; defined on [lo, hi] (may be +inf at an
  /// endpoint with an integrable singularity), throws outside.
  double density(double s) const;

  /// Integral of the density from lo to z (atoms excluded).
  double cdf_continuous(double z) const;

  /// Full distribution function: continuous part plus atoms at or below z.
  double cdf(double z) const;

  const std::vector<Atom>& atoms() const { return atoms_; }
  double atom_mass_total() const;
  double continuous_mass() const { return continuous_mass_; }

 private:
  double lo_, hi_;
  std::function<double(double)> density_;
  std::function<double(double)> cdfc_;
  std::vector<Atom> atoms_;
  double continuous_mass_;
};

// -------------------------------------------------------------------------
// Bridge sojourn laws
// -------------------------------------------------------------------------

/// Density of the time spent in [0,inf) by a zero-to-zero Brownian bridge on
/// [0,t]: uniform, 1/t on (0,t).
double bridge_sojourn_density(double t, double s);

/// Same functional for a bridge pinned at u > 0 at time 0 and at 0 at time t.
/// Evaluated by quadrature of the first-passage decomposition.
double bridge_sojourn_density_from_u(double u, double t, double s);

MixedSojournLaw bridge_sojourn_law(double t);
MixedSojournLaw bridge_sojourn_law_from_u(double u, double t);

// -------------------------------------------------------------------------
// Joint law of (occupation time, terminal position) for the drifted motion
// started at 0, per unit ds dx. Two equivalent single-integral forms.
// -------------------------------------------------------------------------

double joint_density_v1(double mu, double t, double s, double x);
double joint_density_v2(double mu, double t, double s, double x);

// -------------------------------------------------------------------------
// Free drifted Brownian motion started at x >= 0
// -------------------------------------------------------------------------

/// Law of the occupation time of [0,inf) on [0,t]. The density is the
/// product of two tilted first-passage integrals (evaluated by truncated
/// Gaussian-tail quadrature); the atom at s = t carries the complementary
/// mass (the probability of never entering the negative half-line).
MixedSojournLaw free_sojourn_law(double mu, double x, double t);

/// Driftless special case in closed form: density
/// exp(-x^2/2s) / (pi sqrt(s(t-s))) and atom erf(x / sqrt(2t)) at t.
MixedSojournLaw free_sojourn_law_mu0(double x, double t);

/// Probability that the drifted motion started at x >= 0 stays nonnegative
/// on [0,t] (closed form; used as an independent check of atom masses).
double stay_positive_probability(double mu, double x, double t);

// -------------------------------------------------------------------------
// Meander endpoint laws and the conditioned sojourn laws
// -------------------------------------------------------------------------

/// Density of the position at time l given a start at u > 0 and a positive
/// minimum over [0,l] (reflection kernel times exponential tilt, normalized
/// by quadrature).
double meander_endpoint_density(double u, double mu, double l, double y);

/// u -> 0 limit of the above: proportional to y exp(-y^2/2l + mu y).
double meander_limit_endpoint_density(double mu, double l, double y);

/// Density of the occupation time of [0,inf) over a window of length t - l
/// for the motion restarted at y > 0 at time l.
double sojourn_density_given_position(double y, double mu, double l, double t,
                                      double s);

/// Occupation-time law over [l,t] given a positive minimum on [0,l] and
/// start u > 0: the endpoint mixture of the conditional laws, evaluated by
/// an outer quadrature in the restart level.
MixedSojournLaw meander_sojourn_law_finite_u(double u, double mu, double l,
                                             double t);

/// u -> 0, mu = 0 limit law: density s / (pi sqrt(s(t-l-s)) (s+l)) on
/// (0, t-l) plus an atom of mass sqrt(l/t) at t-l. For l = 0 this is the
/// plain arcsine law on (0,t) with no atom.
MixedSojournLaw meander_limit_law(double l, double t);

/// Closed-form distribution function of the limit law's continuous part.
double meander_limit_cdf(double l, double t, double z);

// -------------------------------------------------------------------------
// Generalized excursion (bridge of the meander); drift-free by construction
// -------------------------------------------------------------------------

double excursion_sojourn_density(double l, double t, double s);
double excursion_sojourn_cdf(double l, double t, double sbar);
double excursion_sojourn_mean(double l, double t);

/// Position density at time l for the excursion: Rayleigh with
/// scale^2 = l (t-l) / t.
double excursion_endpoint_density(double l, double t, double y);

MixedSojournLaw excursion_sojourn_law(double l, double t);

// -------------------------------------------------------------------------
// Elastic Brownian motion (killing rate equal to the drift, mu >= 0)
// -------------------------------------------------------------------------

/// Transition density on the positive half-line from y at time 0 to x at
/// time t, in the closed (erfc-style) form.
double elastic_transition_density(double mu, double y, double x, double t);

/// The equivalent reflection-kernel + tilted-tail-integral form, evaluated
/// by quadrature. Kept as an independent route for cross-checks.
double elastic_transition_density_integral_form(double mu, double y, double x,
                                                double t);

/// Closed-form transition kernel from the origin of the elastic motion with
/// signed rate nu (negative rate selects the interchanged branch used by
/// the product representation below).
double elastic_kernel_from_zero(double nu, double x, double tau);

/// Occupation-time density of the free motion recomputed as half the
/// Girsanov weight times a product of two independent elastic densities;
/// an erf-only route that is independent of the quadrature-built law.
double sojourn_law_as_elastic_product(double mu, double x, double t, double s);

}  // namespace meander::laws

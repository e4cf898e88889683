// SPDX-License-Identifier: Apache-2.0
#include "meander/laws.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "meander/quad.hpp"

namespace meander::laws {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt2Pi = std::sqrt(2.0 * kPi);
constexpr double kInf = std::numeric_limits<double>::infinity();

// Inner (nested) quadratures run tighter than outer ones so their noise
// stays below the outer error estimator.
constexpr double kInnerRel = 1e-12;
constexpr double kOuterRel = 1e-10;
constexpr double kPureRel = 1e-300;  // abs floor that never triggers
constexpr double kAbsFloor = 1e-14;

inline double exp_or_zero(double e) { return e < -745.0 ? 0.0 : std::exp(e); }

inline double sqr(double v) { return v * v; }

// exp(q^2) erfc(q), stable for large q.
double erfcx(double q) {
  if (q < 12.0) return std::exp(q * q) * std::erfc(q);
  const double inv2q2 = 1.0 / (2.0 * q * q);
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2 * k - 1) * inv2q2;
    sum += term;
  }
  return sum / (q * std::sqrt(kPi));
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// ∫_x^∞ e^{-mu w} w e^{-w^2/2s} dw / sqrt(2 pi s^3): the exponentially
// tilted first-passage kernel integrated past level x.
double fp_tilted_from(double x, double mu, double s) {
  const double norm = kSqrt2Pi * s * std::sqrt(s);
  auto f = [mu, s](double w) {
    const double e = -mu * w - w * w / (2.0 * s);
    if (e < -745.0) return 0.0;
    return w * std::exp(e);
  };
  const auto r = quad::integrate_gaussian_tail(f, x, -mu * s, std::sqrt(s),
                                               kInnerRel, kPureRel);
  return r.value / norm;
}

// ∫_0^∞ e^{+mu w} w e^{-w^2/2 tau} dw / sqrt(2 pi tau^3).
double fp_tilted_zero(double mu, double tau) {
  const double norm = kSqrt2Pi * tau * std::sqrt(tau);
  auto f = [mu, tau](double w) {
    const double e = mu * w - w * w / (2.0 * tau);
    if (e < -745.0) return 0.0;
    return w * std::exp(e);
  };
  const auto r = quad::integrate_gaussian_tail(f, 0.0, mu * tau,
                                               std::sqrt(tau), kInnerRel,
                                               kPureRel);
  return r.value / norm;
}

// Occupation-time density of the motion with drift +mu from start level x
// over a horizon of length `horizon`, evaluated at s. Product of the two
// tilted first-passage integrals with the Girsanov weight. The tilts carry
// -mu relative to the source display, whose Cauchy problem is written for
// the reversed drift; the Monte Carlo and PDE oracles pin this orientation.
double free_density_value(double mu, double x, double horizon, double s) {
  if (s <= 0.0) return x > 0.0 ? 0.0 : kInf;
  if (s >= horizon) return kInf;
  const double i1 = fp_tilted_from(x, -mu, s);
  const double i2 = fp_tilted_zero(-mu, horizon - s);
  return 2.0 * exp_or_zero(-mu * mu * horizon / 2.0 - 2.0 * mu * x) * i1 * i2;
}

// Unnormalized endpoint kernel of the conditioned motion at time l: the
// reflection difference written through sinh to avoid cancellation for
// small u, times the exponential tilt.
double meander_endpoint_kernel(double u, double mu, double l, double y) {
  if (y <= 0.0) return 0.0;
  const double arg = u * y / l;
  if (arg < 30.0) {
    return 2.0 * exp_or_zero(-(y * y + u * u) / (2.0 * l) + mu * y) *
           std::sinh(arg);
  }
  return exp_or_zero(-sqr(y - u) / (2.0 * l) + mu * y) -
         exp_or_zero(-sqr(y + u) / (2.0 * l) + mu * y);
}

// Cumulative table of a density over [lo, hi] built in the
// theta-parameterization s = lo + (hi-lo) sin^2(theta). Panel sums use a
// two-point Gauss rule (no endpoint evaluations; the density may diverge
// there), and queries interpolate the cumulative with monotone cubic
// Hermite polynomials.
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& density, double lo,
               double hi, int n_panels)
      : lo_(lo), len_(hi - lo), n_(n_panels), h_(kPi / 2.0 / n_panels) {
    cum_.resize(n_ + 1);
    cum_[0] = 0.0;
    const double off = h_ / (2.0 * std::sqrt(3.0));
    for (int j = 0; j < n_; ++j) {
      const double c = (j + 0.5) * h_;
      cum_[j + 1] =
          cum_[j] + 0.5 * h_ * (eval_theta(density, c - off) +
                                eval_theta(density, c + off));
    }
    build_slopes();
  }

  double total() const { return cum_.back(); }

  double operator()(double z) const {
    if (z <= lo_) return 0.0;
    if (z >= lo_ + len_) return total();
    double r = (z - lo_) / len_;
    r = std::clamp(r, 0.0, 1.0);
    const double theta = std::asin(std::sqrt(r));
    int j = static_cast<int>(theta / h_);
    j = std::clamp(j, 0, n_ - 1);
    const double xi = (theta - j * h_) / h_;
    const double xi2 = xi * xi, xi3 = xi2 * xi;
    const double h00 = 2 * xi3 - 3 * xi2 + 1;
    const double h10 = xi3 - 2 * xi2 + xi;
    const double h01 = -2 * xi3 + 3 * xi2;
    const double h11 = xi3 - xi2;
    double v = h00 * cum_[j] + h10 * h_ * slope_[j] + h01 * cum_[j + 1] +
               h11 * h_ * slope_[j + 1];
    return std::clamp(v, cum_[j], cum_[j + 1]);
  }

 private:
  double eval_theta(const std::function<double(double)>& density,
                    double theta) const {
    const double st = std::sin(theta);
    const double s = lo_ + len_ * st * st;
    return density(s) * len_ * std::sin(2.0 * theta);
  }

  // Fritsch-Carlson monotone slopes on the uniform theta grid.
  void build_slopes() {
    slope_.assign(n_ + 1, 0.0);
    std::vector<double> sec(n_);
    for (int j = 0; j < n_; ++j) sec[j] = (cum_[j + 1] - cum_[j]) / h_;
    auto clip_end = [](double d, double s0) {
      if (d * s0 <= 0.0) return 0.0;
      if (std::fabs(d) > 3.0 * std::fabs(s0)) return 3.0 * s0;
      return d;
    };
    slope_[0] = n_ > 1 ? clip_end(1.5 * sec[0] - 0.5 * sec[1], sec[0]) : sec[0];
    slope_[n_] = n_ > 1
                     ? clip_end(1.5 * sec[n_ - 1] - 0.5 * sec[n_ - 2],
                                sec[n_ - 1])
                     : sec[n_ - 1];
    for (int j = 1; j < n_; ++j) {
      if (sec[j - 1] * sec[j] <= 0.0) {
        slope_[j] = 0.0;
      } else {
        slope_[j] = 2.0 * sec[j - 1] * sec[j] / (sec[j - 1] + sec[j]);
      }
    }
  }

  double lo_, len_;
  int n_;
  double h_;
  std::vector<double> cum_;
  std::vector<double> slope_;
};

std::function<double(double)> make_tabulated_cdf(
    std::function<double(double)> density, double lo, double hi,
    int n_panels = 2048) {
  auto table = std::make_shared<TabulatedCdf>(density, lo, hi, n_panels);
  return [table](double z) { return (*table)(z); };
}

std::vector<Atom> atom_if_significant(double location, double mass) {
  std::vector<Atom> atoms;
  if (mass > 1e-10) atoms.push_back({location, mass});
  return atoms;
}

}  // namespace

// --------------------------------------------------------------------------
// MixedSojournLaw
// --------------------------------------------------------------------------

MixedSojournLaw::MixedSojournLaw(double lo, double hi,
                                 std::function<double(double)> density,
                                 std::vector<Atom> atoms,
                                 std::function<double(double)> cdf_continuous)
    : lo_(lo),
      hi_(hi),
      density_(std::move(density)),
      cdfc_(std::move(cdf_continuous)),
      atoms_(std::move(atoms)) {
  if (!(lo_ < hi_)) throw std::invalid_argument("MixedSojournLaw: empty support");
  continuous_mass_ = cdfc_(hi_);
}

double MixedSojournLaw::density(double s) const {
  if (s < lo_ || s > hi_) {
    throw std::domain_error("MixedSojournLaw::density: s outside support");
  }
  return density_(s);
}

double MixedSojournLaw::cdf_continuous(double z) const {
  if (z <= lo_) return 0.0;
  if (z >= hi_) return continuous_mass_;
  return std::clamp(cdfc_(z), 0.0, continuous_mass_);
}

double MixedSojournLaw::cdf(double z) const {
  double v = cdf_continuous(z);
  for (const auto& a : atoms_) {
    if (a.location <= z) v += a.mass;
  }
  return v;
}

double MixedSojournLaw::atom_mass_total() const {
  double m = 0.0;
  for (const auto& a : atoms_) m += a.mass;
  return m;
}

// --------------------------------------------------------------------------
// Bridge sojourn laws
// --------------------------------------------------------------------------

double bridge_sojourn_density(double t, double s) {
  if (!(t > 0.0)) throw std::domain_error("bridge_sojourn_density: t must be > 0");
  if (!(s > 0.0 && s < t)) {
    throw std::domain_error("bridge_sojourn_density: s outside (0, t)");
  }
  return 1.0 / t;
}

double bridge_sojourn_density_from_u(double u, double t, double s) {
  if (!(t > 0.0)) throw std::domain_error("bridge_sojourn_density_from_u: t must be > 0");
  if (!(u > 0.0)) {
    throw std::domain_error(
        "bridge_sojourn_density_from_u: u must be > 0 (use "
        "bridge_sojourn_density for u = 0)");
  }
  if (s < 0.0 || s > t) {
    throw std::domain_error("bridge_sojourn_density_from_u: s outside [0, t]");
  }
  if (s == 0.0) return 0.0;
  if (s == t) return kInf;
  auto f = [u, t](double w) {
    if (w <= 0.0 || w >= t) return 0.0;
    const double e = -u * u / (2.0 * w);
    if (e < -745.0) return 0.0;
    const double q = w * (t - w);
    return u * std::exp(e) / (q * std::sqrt(q));
  };
  const double inner = quad::integrate_finite(f, 0.0, s, kInnerRel, kPureRel).value;
  return std::sqrt(t / (2.0 * kPi)) * std::exp(u * u / (2.0 * t)) * inner;
}

MixedSojournLaw bridge_sojourn_law(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("bridge_sojourn_law: t must be > 0");
  return MixedSojournLaw(
      0.0, t, [t](double) { return 1.0 / t; }, {},
      [t](double z) { return std::clamp(z / t, 0.0, 1.0); });
}

MixedSojournLaw bridge_sojourn_law_from_u(double u, double t) {
  if (!(u > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("bridge_sojourn_law_from_u: need u > 0, t > 0");
  }
  auto dens = [u, t](double s) { return bridge_sojourn_density_from_u(u, t, s); };
  return MixedSojournLaw(0.0, t, dens, {}, make_tabulated_cdf(dens, 0.0, t));
}

// --------------------------------------------------------------------------
// Joint law of (occupation time, endpoint)
// --------------------------------------------------------------------------

namespace {

// ∫_0^window a (t-z)^{-3/2} z^{-3/2} e^{-a^2/2z} dz  (a > 0).
double joint_core_v1(double a, double window, double t) {
  auto f = [a, t](double z) {
    if (z <= 0.0 || z >= t) return 0.0;
    const double e = -a * a / (2.0 * z);
    if (e < -745.0) return 0.0;
    const double q1 = z, q2 = t - z;
    return a * std::exp(e) / (q1 * std::sqrt(q1) * q2 * std::sqrt(q2));
  };
  return quad::integrate_finite(f, 0.0, window, kInnerRel, kPureRel).value;
}

// ∫_0^∞ z (z+a) e^{-(z+a)^2/2 sigma - z^2/2 (t - sigma)} dz
//   / sqrt(sigma^3 (t-sigma)^3)    (a > 0).
double joint_core_v2(double a, double sigma, double t) {
  const double tau = t - sigma;
  auto f = [a, sigma, tau](double z) {
    const double e = -sqr(z + a) / (2.0 * sigma) - z * z / (2.0 * tau);
    if (e < -745.0) return 0.0;
    return z * (z + a) * std::exp(e);
  };
  const double sig_eff = std::sqrt(sigma * tau / t);
  const double inner =
      quad::integrate_gaussian_tail(f, 0.0, 0.0, sig_eff, kInnerRel, kPureRel)
          .value;
  return inner / (sigma * std::sqrt(sigma) * tau * std::sqrt(tau));
}

void check_joint_args(double t, double s, double x) {
  if (!(t > 0.0)) throw std::domain_error("joint density: t must be > 0");
  if (!(s > 0.0 && s < t)) throw std::domain_error("joint density: s outside (0, t)");
  if (x == 0.0) {
    throw std::domain_error("joint density: the density form is not defined at x = 0");
  }
}

}  // namespace

double joint_density_v1(double mu, double t, double s, double x) {
  check_joint_args(t, s, x);
  const double core =
      x > 0.0 ? joint_core_v1(x, s, t) : joint_core_v1(-x, t - s, t);
  return core * exp_or_zero(-mu * mu * t / 2.0 + mu * x) / (2.0 * kPi);
}

double joint_density_v2(double mu, double t, double s, double x) {
  check_joint_args(t, s, x);
  const double core =
      x > 0.0 ? joint_core_v2(x, s, t) : joint_core_v2(-x, t - s, t);
  // Normalizing constant 1/pi, not 1/2pi: the handbook transcription is a
  // factor 2 low against the first form and against simulation.
  return core * exp_or_zero(-mu * mu * t / 2.0 + mu * x) / kPi;
}

// --------------------------------------------------------------------------
// Free drifted motion
// --------------------------------------------------------------------------

MixedSojournLaw free_sojourn_law(double mu, double x, double t) {
  if (!(x >= 0.0)) throw std::invalid_argument("free_sojourn_law: x must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("free_sojourn_law: t must be > 0");
  auto dens = [mu, x, t](double s) { return free_density_value(mu, x, t, s); };
  auto cdfc = make_tabulated_cdf(dens, 0.0, t);
  const double cont = cdfc(t);
  const double atom = std::clamp(1.0 - cont, 0.0, 1.0);
  return MixedSojournLaw(0.0, t, dens, atom_if_significant(t, atom), cdfc);
}

MixedSojournLaw free_sojourn_law_mu0(double x, double t) {
  if (!(x >= 0.0)) throw std::invalid_argument("free_sojourn_law_mu0: x must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("free_sojourn_law_mu0: t must be > 0");
  auto dens = [x, t](double s) {
    if (s <= 0.0) return x > 0.0 ? 0.0 : kInf;
    if (s >= t) return kInf;
    return exp_or_zero(-x * x / (2.0 * s)) / (kPi * std::sqrt(s * (t - s)));
  };
  const double atom = std::erf(x / std::sqrt(2.0 * t));
  return MixedSojournLaw(0.0, t, dens, atom_if_significant(t, atom),
                         make_tabulated_cdf(dens, 0.0, t));
}

double stay_positive_probability(double mu, double x, double t) {
  if (!(x >= 0.0)) throw std::invalid_argument("stay_positive_probability: x must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("stay_positive_probability: t must be > 0");
  if (x == 0.0) return 0.0;
  const double rt = std::sqrt(t);
  const double first = normal_cdf((x + mu * t) / rt);
  // e^{-2 mu x} Phi((mu t - x)/sqrt(t)) computed through erfcx so large
  // opposite exponents never overflow.
  const double q = (x - mu * t) / std::sqrt(2.0 * t);
  const double second = 0.5 * erfcx(q) * exp_or_zero(-sqr(x + mu * t) / (2.0 * t));
  return std::clamp(first - second, 0.0, 1.0);
}

// --------------------------------------------------------------------------
// Meander endpoint and conditioned sojourn laws
// --------------------------------------------------------------------------

double meander_endpoint_density(double u, double mu, double l, double y) {
  if (!(u > 0.0)) {
    throw std::domain_error(
        "meander_endpoint_density: u must be > 0 (use "
        "meander_limit_endpoint_density for the u -> 0 limit)");
  }
  if (!(l > 0.0)) throw std::domain_error("meander_endpoint_density: l must be > 0");
  if (!(y > 0.0)) throw std::domain_error("meander_endpoint_density: y must be > 0");
  auto kernel = [u, mu, l](double w) { return meander_endpoint_kernel(u, mu, l, w); };
  const double norm = quad::integrate_gaussian_tail(kernel, 0.0, u + mu * l,
                                                    std::sqrt(l), kOuterRel,
                                                    kPureRel)
                          .value;
  return kernel(y) / norm;
}

double meander_limit_endpoint_density(double mu, double l, double y) {
  if (!(l > 0.0)) throw std::domain_error("meander_limit_endpoint_density: l must be > 0");
  if (!(y > 0.0)) throw std::domain_error("meander_limit_endpoint_density: y must be > 0");
  auto kernel = [mu, l](double w) {
    if (w <= 0.0) return 0.0;
    return w * exp_or_zero(-w * w / (2.0 * l) + mu * w);
  };
  const double norm = quad::integrate_gaussian_tail(kernel, 0.0, mu * l,
                                                    std::sqrt(l), kOuterRel,
                                                    kPureRel)
                          .value;
  return kernel(y) / norm;
}

double sojourn_density_given_position(double y, double mu, double l, double t,
                                      double s) {
  if (!(y > 0.0)) throw std::domain_error("sojourn_density_given_position: y must be > 0");
  if (!(l >= 0.0 && l < t)) {
    throw std::domain_error("sojourn_density_given_position: need 0 <= l < t");
  }
  if (!(s > 0.0 && s < t - l)) {
    throw std::domain_error("sojourn_density_given_position: s outside (0, t-l)");
  }
  return free_density_value(mu, y, t - l, s);
}

MixedSojournLaw meander_sojourn_law_finite_u(double u, double mu, double l,
                                             double t) {
  if (!(u > 0.0)) throw std::invalid_argument("meander_sojourn_law_finite_u: u must be > 0");
  if (!(l > 0.0 && l < t)) {
    throw std::invalid_argument("meander_sojourn_law_finite_u: need 0 < l < t");
  }
  const double tau = t - l;
  auto kernel = [u, mu, l](double y) { return meander_endpoint_kernel(u, mu, l, y); };
  const double norm = quad::integrate_gaussian_tail(kernel, 0.0, u + mu * l,
                                                    std::sqrt(l), kInnerRel,
                                                    kPureRel)
                          .value;
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::runtime_error("meander_sojourn_law_finite_u: endpoint kernel did not normalize");
  }

  // Mixture of the conditional occupation densities over the endpoint law.
  // The factor independent of the restart level is hoisted out of the outer
  // quadrature in y.
  auto dens = [kernel, norm, mu, u, l, tau](double s) -> double {
    if (s <= 0.0) return 0.0;
    if (s >= tau) return kInf;
    const double i2 = fp_tilted_zero(-mu, tau - s);
    auto f = [&kernel, mu, s](double y) {
      const double k = kernel(y);
      if (k == 0.0) return 0.0;
      return k * exp_or_zero(-2.0 * mu * y) * fp_tilted_from(y, -mu, s);
    };
    const double mix = quad::integrate_gaussian_tail(
                           f, 0.0, u - mu * l, std::sqrt(l), kOuterRel,
                           kPureRel)
                           .value;
    return 2.0 * exp_or_zero(-mu * mu * tau / 2.0) * i2 * mix / norm;
  };

  auto cdfc = make_tabulated_cdf(dens, 0.0, tau);
  const double cont = cdfc(tau);
  const double atom = std::clamp(1.0 - cont, 0.0, 1.0);
  return MixedSojournLaw(0.0, tau, dens, atom_if_significant(tau, atom), cdfc);
}

MixedSojournLaw meander_limit_law(double l, double t) {
  if (!(t > 0.0) || !(l >= 0.0 && l < t)) {
    throw std::invalid_argument("meander_limit_law: need 0 <= l < t");
  }
  if (l == 0.0) {
    auto dens = [t](double s) {
      if (s <= 0.0 || s >= t) return kInf;
      return 1.0 / (kPi * std::sqrt(s * (t - s)));
    };
    auto cdfc = [t](double z) {
      const double r = std::clamp(z / t, 0.0, 1.0);
      return 2.0 / kPi * std::asin(std::sqrt(r));
    };
    return MixedSojournLaw(0.0, t, dens, {}, cdfc);
  }
  const double tau = t - l;
  auto dens = [l, tau](double s) {
    if (s <= 0.0) return 0.0;
    if (s >= tau) return kInf;
    return s / (kPi * std::sqrt(s * (tau - s)) * (s + l));
  };
  auto cdfc = [l, t](double z) { return meander_limit_cdf(l, t, z); };
  return MixedSojournLaw(0.0, tau, dens, {{tau, std::sqrt(l / t)}}, cdfc);
}

double meander_limit_cdf(double l, double t, double z) {
  if (!(t > 0.0) || !(l >= 0.0 && l < t)) {
    throw std::domain_error("meander_limit_cdf: need 0 <= l < t");
  }
  const double tau = t - l;
  if (z < 0.0 || z > tau) {
    throw std::domain_error("meander_limit_cdf: z outside [0, t-l]");
  }
  const double arc1 = std::asin(std::sqrt(std::clamp(z / tau, 0.0, 1.0)));
  if (l == 0.0) return 2.0 / kPi * arc1;
  const double arg2 = std::clamp(z * t / ((l + z) * tau), 0.0, 1.0);
  const double arc2 = std::asin(std::sqrt(arg2));
  return 2.0 / kPi * arc1 - 2.0 / kPi * std::sqrt(l / t) * arc2;
}

// --------------------------------------------------------------------------
// Generalized excursion
// --------------------------------------------------------------------------

namespace {

void check_excursion_window(double l, double t) {
  if (!(t > 0.0) || !(l >= 0.0 && l < t)) {
    throw std::domain_error("excursion law: need 0 <= l < t");
  }
}

double excursion_density_value(double l, double t, double s) {
  if (l == 0.0) return 1.0 / t;
  const double tau = t - l;
  if (s <= 0.0) return 0.0;
  if (s >= tau) return kInf;
  return 1.0 / t * std::sqrt(l / tau) *
         ((t - 2.0 * l) / std::sqrt(l * tau) -
          (t - 2.0 * (l + s)) / std::sqrt((l + s) * (tau - s)));
}

}  // namespace

double excursion_sojourn_density(double l, double t, double s) {
  check_excursion_window(l, t);
  if (!(s > 0.0 && s < t - l)) {
    throw std::domain_error("excursion_sojourn_density: s outside (0, t-l)");
  }
  return excursion_density_value(l, t, s);
}

double excursion_sojourn_cdf(double l, double t, double sbar) {
  check_excursion_window(l, t);
  const double tau = t - l;
  if (sbar < 0.0 || sbar > tau) {
    throw std::domain_error("excursion_sojourn_cdf: sbar outside [0, t-l]");
  }
  const double v = (sbar + l) * (t - 2.0 * l) / (t * tau) + l / tau -
                   2.0 / t * std::sqrt(l / tau) *
                       std::sqrt((l + sbar) * (tau - sbar));
  return std::clamp(v, 0.0, 1.0);
}

double excursion_sojourn_mean(double l, double t) {
  check_excursion_window(l, t);
  const double tau = t - l;
  return t / 2.0 * std::sqrt(l / tau) *
             std::acos(std::sqrt(std::clamp(l / t, 0.0, 1.0))) +
         (t - 2.0 * l) / 2.0;
}

double excursion_endpoint_density(double l, double t, double y) {
  if (!(t > 0.0) || !(l > 0.0 && l < t)) {
    throw std::domain_error("excursion_endpoint_density: need 0 < l < t");
  }
  if (!(y > 0.0)) throw std::domain_error("excursion_endpoint_density: y must be > 0");
  const double scale2 = l * (t - l) / t;
  return y / scale2 * exp_or_zero(-y * y / (2.0 * scale2));
}

MixedSojournLaw excursion_sojourn_law(double l, double t) {
  check_excursion_window(l, t);
  const double tau = t - l;
  auto dens = [l, t](double s) { return excursion_density_value(l, t, s); };
  auto cdfc = [l, t](double z) { return excursion_sojourn_cdf(l, t, z); };
  return MixedSojournLaw(0.0, tau, dens, {}, cdfc);
}

// --------------------------------------------------------------------------
// Elastic Brownian motion
// --------------------------------------------------------------------------

namespace {

void check_elastic_args(double mu, double y, double x, double t) {
  if (mu < 0.0) {
    throw std::domain_error(
        "elastic transition density: mu must be >= 0 (the negative-drift "
        "representation interchanges the two motions and is not built)");
  }
  if (!(x >= 0.0) || !(y >= 0.0)) {
    throw std::domain_error("elastic transition density: need x >= 0, y >= 0");
  }
  if (!(t > 0.0)) throw std::domain_error("elastic transition density: t must be > 0");
}

}  // namespace

double elastic_transition_density(double mu, double y, double x, double t) {
  check_elastic_args(mu, y, x, t);
  const double g = exp_or_zero(-sqr(x - y) / (2.0 * t));
  const double h = exp_or_zero(-sqr(x + y) / (2.0 * t));
  const double base = (g + h) / std::sqrt(2.0 * kPi * t);
  if (mu == 0.0) return base;
  const double q = (x + y + mu * t) / std::sqrt(2.0 * t);
  return base - mu * exp_or_zero(-sqr(x + y) / (2.0 * t)) * erfcx(q);
}

double elastic_transition_density_integral_form(double mu, double y, double x,
                                                double t) {
  check_elastic_args(mu, y, x, t);
  const double g = exp_or_zero(-sqr(x - y) / (2.0 * t));
  const double h = exp_or_zero(-sqr(x + y) / (2.0 * t));
  const double tail = fp_tilted_from(x + y, mu, t);
  return (g - h) / std::sqrt(2.0 * kPi * t) +
         2.0 * std::exp(mu * (x + y)) * tail;
}

double elastic_kernel_from_zero(double nu, double x, double tau) {
  if (!(tau > 0.0)) {
    throw std::domain_error("elastic_kernel_from_zero: tau must be > 0");
  }
  const double base = 2.0 * exp_or_zero(-x * x / (2.0 * tau)) /
                      std::sqrt(2.0 * kPi * tau);
  if (nu == 0.0) return base;
  const double q = (x + nu * tau) / std::sqrt(2.0 * tau);
  return base - nu * exp_or_zero(-x * x / (2.0 * tau)) * erfcx(q);
}

double sojourn_law_as_elastic_product(double mu, double x, double t, double s) {
  if (mu < 0.0) {
    throw std::domain_error("sojourn_law_as_elastic_product: mu must be >= 0");
  }
  if (!(x >= 0.0) || !(t > 0.0)) {
    throw std::domain_error("sojourn_law_as_elastic_product: need x >= 0, t > 0");
  }
  if (!(s > 0.0 && s < t)) {
    throw std::domain_error("sojourn_law_as_elastic_product: s outside (0, t)");
  }
  // The first factor carries the interchanged (creation-rate) kernel, the
  // second the plain killing-rate kernel; their product reproduces the
  // occupation density of the +mu motion.
  return 0.5 * exp_or_zero(-mu * mu * t / 2.0 - mu * x) *
         elastic_kernel_from_zero(-mu, x, s) *
         elastic_kernel_from_zero(mu, 0.0, t - s);
}

}  // namespace meander::laws

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace meander::quad {

/// Result of an adaptive integration: value, an error estimate that is
/// intended to bound the true error, and the number of integrand calls.
struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  std::int64_t n_evals = 0;
};

/// Thrown when the subdivision cap is reached before the error target.
/// Carries the best estimate so callers can decide whether it is usable.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadResult& best() const noexcept { return best_; }

 private:
  QuadResult best_;
};

using Integrand = std::function<double(double)>;

inline constexpr double kDefaultRelTol = 1e-10;
inline constexpr double kDefaultAbsTol = 1e-14;
inline constexpr int kMaxIntervals = 10000;

/// Adaptive 15/7 Gauss-Kronrod integration over [a, b]. Panels are kept in
/// a worst-error-first queue and bisected until the summed error estimate
/// falls below max(abs_tol, rel_tol * |value|). The integrand must be finite
/// everywhere it is sampled (panel nodes are interior points).
QuadResult integrate_finite(const Integrand& f, double a, double b,
                            double rel_tol = kDefaultRelTol,
                            double abs_tol = kDefaultAbsTol,
                            int max_intervals = kMaxIntervals);

/// Truncation point for a semi-infinite integrand dominated by a Gaussian
/// envelope centred at `mean` with scale `sigma`: the envelope has dropped
/// below 1e-18 of its peak over [a, inf) beyond the returned abscissa.
double gaussian_tail_cutoff(double a, double mean, double sigma);

/// Integrates f over [a, inf) assuming |f| is bounded by a Gaussian envelope
/// (times a polynomial) with the given centre and scale. The tail is
/// truncated at gaussian_tail_cutoff and handed to integrate_finite.
QuadResult integrate_gaussian_tail(const Integrand& f, double a, double mean,
                                   double sigma,
                                   double rel_tol = kDefaultRelTol,
                                   double abs_tol = kDefaultAbsTol,
                                   int max_intervals = kMaxIntervals);

/// Integrates f over (a, b) where f may blow up like 1/sqrt(s - a) and/or
/// 1/sqrt(b - s) at the endpoints. Applies s = a + (b-a) sin^2(theta), which
/// turns such integrands into bounded smooth ones on [0, pi/2].
QuadResult integrate_sqrt_singular(const Integrand& f, double a, double b,
                                   double rel_tol = kDefaultRelTol,
                                   double abs_tol = kDefaultAbsTol,
                                   int max_intervals = kMaxIntervals);

enum class DomainKind { finite, gaussian_tail_right, sqrt_singular_both_ends };

/// Declarative description of an integrand; `kind` selects the
/// transformation applied before the adaptive pass.
struct IntegrandSpec {
  Integrand f;
  DomainKind kind = DomainKind::finite;
  double mean_hint = 0.0;   // Gaussian envelope centre (gaussian_tail_right)
  double sigma_hint = 1.0;  // Gaussian envelope scale (gaussian_tail_right)
};

QuadResult integrate(const IntegrandSpec& spec, double a, double b,
                     double rel_tol = kDefaultRelTol,
                     double abs_tol = kDefaultAbsTol);

}  // namespace meander::quad

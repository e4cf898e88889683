// SPDX-License-Identifier: Apache-2.0
#include "meander/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace meander::quad {

namespace {

// Nodes of the 15-point Kronrod rule on [-1,1] (positive half; the rule is
// symmetric). Odd indices are the embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a = 0, b = 0;
  double value = 0;
  double err = 0;
};

struct WorstFirst {
  bool operator()(const Panel& p, const Panel& q) const { return p.err < q.err; }
};

double checked_eval(const Integrand& f, double x) {
  const double v = f(x);
  if (std::isnan(v) || std::isinf(v)) {
    throw std::runtime_error("quad: integrand returned non-finite value at x=" +
                             std::to_string(x));
  }
  return v;
}

// One Gauss-Kronrod 15(7) evaluation with a QUADPACK-style error estimate.
Panel evaluate_panel(const Integrand& f, double a, double b,
                     std::int64_t& n_evals) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  const double fc = checked_eval(f, c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::fabs(fc);
  double flo[7], fhi[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double f1 = checked_eval(f, c - dx);
    const double f2 = checked_eval(f, c + dx);
    flo[j] = f1;
    fhi[j] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  n_evals += 15;

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(flo[j] - reskh) + std::fabs(fhi[j] - reskh));
  }

  double err = std::fabs(resk - resg) * h;
  resasc *= h;
  resabs *= h;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / eps50) {
    err = std::max(err, eps50 * resabs);
  }

  Panel p;
  p.a = a;
  p.b = b;
  p.value = resk * h;
  p.err = err;
  return p;
}

}  // namespace

QuadResult integrate_finite(const Integrand& f, double a, double b,
                            double rel_tol, double abs_tol,
                            int max_intervals) {
  if (std::isnan(a) || std::isnan(b) || a > b) {
    throw std::invalid_argument("integrate_finite: invalid interval");
  }
  QuadResult out;
  if (a == b) return out;

  std::int64_t evals = 0;
  std::priority_queue<Panel, std::vector<Panel>, WorstFirst> heap;
  Panel first = evaluate_panel(f, a, b, evals);
  double sum_val = first.value;
  double sum_err = first.err;
  heap.push(first);
  int n_panels = 1;

  const double min_width =
      (b - a) * 4.0 * std::numeric_limits<double>::epsilon();

  while (true) {
    const double target = std::max(abs_tol, rel_tol * std::fabs(sum_val));
    if (sum_err <= target) break;
    if (n_panels >= max_intervals) {
      QuadResult best{sum_val, sum_err, evals};
      throw ConvergenceError(
          "integrate_finite: subdivision cap reached (err_est=" +
              std::to_string(sum_err) + ")",
          best);
    }
    Panel worst = heap.top();
    // A panel too narrow to bisect means the estimate is roundoff-limited;
    // return the current value with its honest error estimate.
    if (worst.b - worst.a <= min_width) break;
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel lo = evaluate_panel(f, worst.a, mid, evals);
    Panel hi = evaluate_panel(f, mid, worst.b, evals);
    sum_val += lo.value + hi.value - worst.value;
    sum_err += lo.err + hi.err - worst.err;
    heap.push(lo);
    heap.push(hi);
    ++n_panels;
  }

  out.value = sum_val;
  out.err_est = sum_err;
  out.n_evals = evals;
  return out;
}

double gaussian_tail_cutoff(double a, double mean, double sigma) {
  // exp(-x^2/2) == 1e-18  at  x = sqrt(-2 ln 1e-18)
  constexpr double kNineSigma = 9.10456395969822;
  const double over = std::max(0.0, a - mean);
  return mean + std::hypot(over, kNineSigma * sigma);
}

QuadResult integrate_gaussian_tail(const Integrand& f, double a, double mean,
                                   double sigma, double rel_tol,
                                   double abs_tol, int max_intervals) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("integrate_gaussian_tail: sigma must be > 0");
  }
  const double b = gaussian_tail_cutoff(a, mean, sigma);
  return integrate_finite(f, a, b, rel_tol, abs_tol, max_intervals);
}

QuadResult integrate_sqrt_singular(const Integrand& f, double a, double b,
                                   double rel_tol, double abs_tol,
                                   int max_intervals) {
  if (std::isnan(a) || std::isnan(b) || a > b) {
    throw std::invalid_argument("integrate_sqrt_singular: invalid interval");
  }
  if (a == b) return QuadResult{};
  const double len = b - a;
  auto g = [&f, a, len](double theta) {
    const double st = std::sin(theta);
    const double s = a + len * st * st;
    return f(s) * len * std::sin(2.0 * theta);
  };
  return integrate_finite(g, 0.0, std::numbers::pi / 2.0, rel_tol, abs_tol,
                          max_intervals);
}

QuadResult integrate(const IntegrandSpec& spec, double a, double b,
                     double rel_tol, double abs_tol) {
  switch (spec.kind) {
    case DomainKind::finite:
      return integrate_finite(spec.f, a, b, rel_tol, abs_tol);
    case DomainKind::gaussian_tail_right:
      return integrate_gaussian_tail(spec.f, a, spec.mean_hint,
                                     spec.sigma_hint, rel_tol, abs_tol);
    case DomainKind::sqrt_singular_both_ends:
      return integrate_sqrt_singular(spec.f, a, b, rel_tol, abs_tol);
  }
  throw std::logic_error("integrate: unknown domain kind");
}

}  // namespace meander::quad

// SPDX-License-Identifier: Apache-2.0
#include "meander/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace meander::stats {

namespace {

// Regularized lower incomplete gamma P(a, x): power series for x < a+1,
// Lentz continued fraction otherwise.
double gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double lng = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - lng);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lng) * h;
  return 1.0 - q;
}

double ks_sup_one_sample(const std::vector<double>& sorted,
                         const std::function<double(double)>& cdf) {
  const double m = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    sup = std::max(sup, std::max((i + 1.0) / m - f, f - i / m));
  }
  return sup;
}

void require_sorted(const std::vector<double>& v, const char* who) {
  if (!std::is_sorted(v.begin(), v.end())) {
    throw std::invalid_argument(std::string(who) +
                                ": continuous samples must be sorted");
  }
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  }
  // Acklam's rational approximation followed by one Halley step.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double ks_critical_value(double alpha, std::int64_t m) {
  if (!(alpha > 0.0 && alpha < 1.0) || m < 1) {
    throw std::invalid_argument("ks_critical_value: bad arguments");
  }
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) /
         std::sqrt(static_cast<double>(m));
}

std::pair<double, double> atom_ci(std::int64_t atom_count,
                                  std::int64_t n_total, double alpha) {
  if (n_total < 1 || atom_count < 0 || atom_count > n_total) {
    throw std::invalid_argument("atom_ci: bad counts");
  }
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double n = static_cast<double>(n_total);
  const double p = static_cast<double>(atom_count) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  const double centre = (p + z2n / 2.0) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

GofReport ks_test_continuous(const EmpiricalLaw& emp,
                             const laws::MixedSojournLaw& law, double alpha) {
  if (emp.continuous_samples.empty()) {
    throw std::invalid_argument("ks_test_continuous: no continuous samples");
  }
  require_sorted(emp.continuous_samples, "ks_test_continuous");
  const double cont_mass = law.continuous_mass();
  if (!(cont_mass > 0.0)) {
    throw std::invalid_argument("ks_test_continuous: law has no continuous part");
  }
  auto conditioned = [&law, cont_mass](double z) {
    return law.cdf_continuous(z) / cont_mass;
  };
  GofReport report;
  report.ks_stat = ks_sup_one_sample(emp.continuous_samples, conditioned);
  report.ks_critical = ks_critical_value(
      alpha, static_cast<std::int64_t>(emp.continuous_samples.size()));
  report.atom_freq =
      static_cast<double>(emp.atom_count) / static_cast<double>(emp.n_total);
  report.atom_ci = atom_ci(emp.atom_count, emp.n_total, alpha);
  bool pass = report.ks_stat < report.ks_critical;
  if (!law.atoms().empty()) {
    const double mass = law.atom_mass_total();
    pass = pass && report.atom_ci.first <= mass && mass <= report.atom_ci.second;
  }
  report.pass = pass;
  return report;
}

GofReport two_sample_ks(const EmpiricalLaw& a, const EmpiricalLaw& b,
                        double alpha) {
  const auto& xs = a.continuous_samples;
  const auto& ys = b.continuous_samples;
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("two_sample_ks: empty continuous sample");
  }
  require_sorted(xs, "two_sample_ks");
  require_sorted(ys, "two_sample_ks");

  const double m = static_cast<double>(xs.size());
  const double n = static_cast<double>(ys.size());
  double sup = 0.0;
  std::size_t i = 0, j = 0;
  while (i < xs.size() || j < ys.size()) {
    const double x = i < xs.size() ? xs[i] : std::numeric_limits<double>::infinity();
    const double y = j < ys.size() ? ys[j] : std::numeric_limits<double>::infinity();
    const double v = std::min(x, y);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    sup = std::max(sup, std::fabs(i / m - j / n));
  }

  GofReport report;
  report.ks_stat = sup;
  report.ks_critical =
      std::sqrt(-0.5 * std::log(alpha / 2.0)) * std::sqrt((m + n) / (m * n));

  const double p1 = static_cast<double>(a.atom_count) / a.n_total;
  const double p2 = static_cast<double>(b.atom_count) / b.n_total;
  const double pooled = static_cast<double>(a.atom_count + b.atom_count) /
                        static_cast<double>(a.n_total + b.n_total);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / a.n_total + 1.0 / b.n_total));
  const double half = z * se;
  report.atom_freq = p1 - p2;
  report.atom_ci = {-half, half};
  report.pass = report.ks_stat < report.ks_critical &&
                std::fabs(p1 - p2) <= half + 1e-15;
  return report;
}

double chi_square_sf(double x, double dof) {
  if (x < 0.0 || dof <= 0.0) throw std::invalid_argument("chi_square_sf: bad arguments");
  if (x == 0.0) return 1.0;
  return 1.0 - gamma_p(dof / 2.0, x / 2.0);
}

double chi_square_homogeneity_pvalue(const std::vector<std::int64_t>& a,
                                     const std::vector<std::int64_t>& b) {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("chi_square_homogeneity_pvalue: bin mismatch");
  }
  // Pool sparse bins (pooled expected count below 5) into a running cell.
  std::vector<std::pair<double, double>> cells;
  double accA = 0.0, accB = 0.0;
  double totalA = 0.0, totalB = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    totalA += static_cast<double>(a[i]);
    totalB += static_cast<double>(b[i]);
  }
  if (totalA == 0.0 || totalB == 0.0) {
    throw std::invalid_argument("chi_square_homogeneity_pvalue: empty sample");
  }
  const double total = totalA + totalB;
  for (std::size_t i = 0; i < a.size(); ++i) {
    accA += static_cast<double>(a[i]);
    accB += static_cast<double>(b[i]);
    const double pooled = accA + accB;
    if (pooled * totalA / total >= 5.0 && pooled * totalB / total >= 5.0) {
      cells.emplace_back(accA, accB);
      accA = accB = 0.0;
    }
  }
  if (accA + accB > 0.0) {
    if (cells.empty()) {
      cells.emplace_back(accA, accB);
    } else {
      cells.back().first += accA;
      cells.back().second += accB;
    }
  }
  if (cells.size() < 2) {
    throw std::invalid_argument("chi_square_homogeneity_pvalue: too few occupied bins");
  }
  double stat = 0.0;
  for (const auto& [oa, ob] : cells) {
    const double rowtot = oa + ob;
    const double ea = rowtot * totalA / total;
    const double eb = rowtot * totalB / total;
    stat += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  const double dof = static_cast<double>(cells.size() - 1);
  return chi_square_sf(stat, dof);
}

}  // namespace meander::stats

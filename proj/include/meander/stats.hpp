// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "meander/laws.hpp"

namespace meander::stats {

/// Monte Carlo estimate of a mixed law: sorted continuous-part samples plus
/// the number of structurally detected atom events.
struct EmpiricalLaw {
  std::vector<double> continuous_samples;  // sorted ascending
  std::int64_t atom_count = 0;
  std::int64_t n_total = 0;
};

struct GofReport {
  double ks_stat = 0.0;
  double ks_critical = 0.0;
  double atom_freq = 0.0;
  std::pair<double, double> atom_ci = {0.0, 0.0};
  bool pass = false;
};

/// Inverse of the standard normal distribution function.
double normal_quantile(double p);

/// Asymptotic one-sample Kolmogorov-Smirnov critical value at level alpha
/// for m samples: sqrt(-ln(alpha/2)/2) / sqrt(m).
double ks_critical_value(double alpha, std::int64_t m);

/// Wilson score interval for a binomial proportion at level 1 - alpha.
std::pair<double, double> atom_ci(std::int64_t atom_count,
                                  std::int64_t n_total, double alpha);

/// One-sample KS test of the continuous samples against the law's CDF
/// conditioned on the continuous part. When the law carries atoms, the
/// report additionally requires the law's atom mass to fall inside the
/// Wilson interval of the observed atom frequency.
GofReport ks_test_continuous(const EmpiricalLaw& emp,
                             const laws::MixedSojournLaw& law, double alpha);

/// Two-sample KS on the continuous parts; atom frequencies are compared with
/// a pooled two-proportion z-interval. In the report, atom_freq holds the
/// frequency difference and atom_ci the acceptance band around zero.
GofReport two_sample_ks(const EmpiricalLaw& a, const EmpiricalLaw& b,
                        double alpha);

/// Two-sample chi-square homogeneity test over per-bin counts. Expected
/// counts below 5 are pooled into their left neighbour. Returns the p-value.
double chi_square_homogeneity_pvalue(const std::vector<std::int64_t>& a,
                                     const std::vector<std::int64_t>& b);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, double dof);

}  // namespace meander::stats

#pragma once

#include <cstddef>
#include <cstdint>

namespace crnwd {

/// Inverse standard normal CDF (Acklam's rational approximation, |rel err|
/// < 1.15e-9).
double normal_quantile(double p);

struct Interval {
  double low;
  double high;
};

/// Wilson score interval for a binomial proportion at significance alpha
/// (two-sided coverage 1-alpha).
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double alpha);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_pvalue(double statistic, int dof);

/// P(X >= m) for X ~ Binomial(n, p).
double binomial_tail_geq(std::int64_t n, double p, std::int64_t m);

/// Binomial pmf P(X = m).
double binomial_pmf(std::int64_t n, double p, std::int64_t m);

/// Asymptotic Kolmogorov-Smirnov p-value for statistic d on n samples.
double ks_pvalue(double d, std::size_t n);

}  // namespace crnwd

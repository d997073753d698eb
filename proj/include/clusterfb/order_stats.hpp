#pragma once
// Order statistics of independent non-identically distributed exponentials:
// distribution of the maximum, within-group rank probabilities, and the
// expected log rate of the maximum.
//
// Conventions: member indices m are 0-based array positions; ranks n are
// 1-based (rank 1 = largest). Rates must be strictly positive.

#include <vector>

namespace clusterfb {

// log of prod_i (1 - e^{-rates[i] x}); -inf for x <= 0.
double max_log_cdf(const std::vector<double>& rates, double x);

// CDF of max_i X_i at x, X_i ~ Exp(rates[i]) independent.
double max_cdf(const std::vector<double>& rates, double x);

// 1 - max_cdf(x), computed without cancellation when the CDF is near 1.
double max_survival(const std::vector<double>& rates, double x);

// Density of the maximum at x; 0 for x <= 0.
double max_pdf(const std::vector<double>& rates, double x);

// P(max in [lo, hi)), stable for masses far below 1. hi may be +infinity.
double max_mass(const std::vector<double>& rates, double lo, double hi);

// x in (lo, hi) with P(max in [lo, x)) = u * P(max in [lo, hi)), u in (0,1).
double max_quantile_in(const std::vector<double>& rates, double lo, double hi, double u);

// integral of x * max_pdf(x) dx over [lo, hi); hi may be +infinity.
double max_partial_mean(const std::vector<double>& rates, double lo, double hi);

// P(member m holds rank n at value r): exactly n-1 of the other members
// exceed r, each independently with probability e^{-rates[j] r}.
double rank_probability(const std::vector<double>& rates, int m, int n, double r);

// All L rank probabilities for member m at r; out[n-1] = P(rank n).
// Computed by the Poisson-binomial recursion over the others' tail
// probabilities; entries sum to 1.
std::vector<double> rank_probabilities(const std::vector<double>& rates, int m, double r);

// argmax_n P(rank n) at value r, 1-based; ties go to the smaller rank.
int most_probable_rank(const std::vector<double>& rates, int m, double r);

// E[log2(1 + max_i X_i)] by adaptive quadrature on the survival function.
double expected_max_log_rate(const std::vector<double>& rates, double abs_tol = 1e-8);

} // namespace clusterfb

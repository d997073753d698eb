#include "clusterfb/order_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "clusterfb/numerics.hpp"

namespace clusterfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_rates(const std::vector<double>& rates) {
    if (rates.empty()) throw std::invalid_argument("rates must be nonempty");
    for (double l : rates)
        if (!(l > 0.0)) throw std::invalid_argument("rates must be strictly positive");
}

double min_rate(const std::vector<double>& rates) {
    return *std::min_element(rates.begin(), rates.end());
}

// Upper integration cutoff: survival below frac times its value at lo.
double tail_cutoff(const std::vector<double>& rates, double lo, double frac) {
    double step = 1.0 / min_rate(rates);
    double ref = std::max(max_survival(rates, std::max(lo, 0.0)), 1e-300);
    double hi = std::max(lo, 0.0) + step;
    while (max_survival(rates, hi) > frac * ref) hi += step, step *= 2.0;
    return hi;
}

} // namespace

double max_log_cdf(const std::vector<double>& rates, double x) {
    check_rates(rates);
    if (x <= 0.0) return -kInf; // no mass below the support
    if (x == kInf) return 0.0;
    double s = 0.0;
    for (double l : rates) s += std::log1p(-std::exp(-l * x));
    return s;
}

double max_cdf(const std::vector<double>& rates, double x) {
    return std::exp(max_log_cdf(rates, x));
}

double max_survival(const std::vector<double>& rates, double x) {
    return -std::expm1(max_log_cdf(rates, x));
}

double max_pdf(const std::vector<double>& rates, double x) {
    check_rates(rates);
    if (x <= 0.0 || x == kInf) return 0.0;
    double hazard = 0.0;
    for (double l : rates) {
        double e = std::expm1(l * x); // overflows to inf for deep tails: term -> 0
        hazard += l / e;
    }
    return max_cdf(rates, x) * hazard;
}

double max_mass(const std::vector<double>& rates, double lo, double hi) {
    check_rates(rates);
    if (!(hi > lo)) throw std::invalid_argument("max_mass: need hi > lo");
    lo = std::max(lo, 0.0);
    if (hi == kInf) return max_survival(rates, lo);
    if (lo == 0.0) return max_cdf(rates, hi);
    double log_lo = max_log_cdf(rates, lo);
    double log_hi = max_log_cdf(rates, hi);
    // F(hi) - F(lo) without cancellation when both are far below 1
    return std::exp(log_hi) * -std::expm1(log_lo - log_hi);
}

double max_quantile_in(const std::vector<double>& rates, double lo, double hi, double u) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("max_quantile_in: u must be in (0,1)");
    lo = std::max(lo, 0.0);
    double total = max_mass(rates, lo, hi);
    if (!(total > 0.0)) throw std::invalid_argument("max_quantile_in: region has no mass");
    double target = u * total;
    double cap = hi;
    if (cap == kInf) {
        double step = 1.0 / min_rate(rates);
        cap = lo + step;
        while (max_mass(rates, lo, cap) < target) cap += step, step *= 2.0;
    }
    auto g = [&](double x) { return (x <= lo ? 0.0 : max_mass(rates, lo, x)) - target; };
    return num::bisect(g, lo, cap, 1e-12);
}

double max_partial_mean(const std::vector<double>& rates, double lo, double hi) {
    check_rates(rates);
    lo = std::max(lo, 0.0);
    if (!(hi > lo)) throw std::invalid_argument("max_partial_mean: need hi > lo");
    if (hi == kInf) {
        // integral of x f = lo S(lo) + integral of S over the tail
        double cut = tail_cutoff(rates, lo, 1e-18);
        double s_lo = max_survival(rates, lo);
        double tail = num::integrate([&](double x) { return max_survival(rates, x); },
                                     lo, cut, 1e-12 * std::max(1.0, (cut - lo) * s_lo));
        return lo * s_lo + tail;
    }
    double scale = hi * max_mass(rates, lo, hi);
    return num::integrate([&](double x) { return x * max_pdf(rates, x); },
                          lo, hi, 1e-12 * std::max(scale, 1e-300));
}

std::vector<double> rank_probabilities(const std::vector<double>& rates, int m, double r) {
    check_rates(rates);
    int L = static_cast<int>(rates.size());
    if (m < 0 || m >= L) throw std::invalid_argument("rank_probabilities: member out of range");
    if (r < 0.0) throw std::invalid_argument("rank_probabilities: r must be >= 0");
    // P(rank n) = P(exactly n-1 of the others exceed r); Poisson-binomial
    // recursion over the others' tail probabilities e^{-rate r}.
    std::vector<double> coef(static_cast<std::size_t>(L), 0.0);
    coef[0] = 1.0;
    int done = 0;
    for (int j = 0; j < L; ++j) {
        if (j == m) continue;
        double p = std::exp(-rates[static_cast<std::size_t>(j)] * r);
        for (int c = done + 1; c >= 1; --c)
            coef[static_cast<std::size_t>(c)] =
                coef[static_cast<std::size_t>(c)] * (1.0 - p) +
                coef[static_cast<std::size_t>(c - 1)] * p;
        coef[0] *= (1.0 - p);
        ++done;
    }
    return coef;
}

double rank_probability(const std::vector<double>& rates, int m, int n, double r) {
    int L = static_cast<int>(rates.size());
    if (n < 1 || n > L) throw std::invalid_argument("rank_probability: rank out of range");
    return rank_probabilities(rates, m, r)[static_cast<std::size_t>(n - 1)];
}

int most_probable_rank(const std::vector<double>& rates, int m, double r) {
    std::vector<double> p = rank_probabilities(rates, m, r);
    int best = 1;
    for (int n = 2; n <= static_cast<int>(p.size()); ++n)
        if (p[static_cast<std::size_t>(n - 1)] > p[static_cast<std::size_t>(best - 1)]) best = n;
    return best;
}

double expected_max_log_rate(const std::vector<double>& rates, double abs_tol) {
    check_rates(rates);
    // E[log2(1+X)] = (1/ln 2) * integral of S(x)/(1+x) dx
    double cut = tail_cutoff(rates, 0.0, 1e-16);
    double ln2 = std::log(2.0);
    double v = num::integrate([&](double x) { return max_survival(rates, x) / (1.0 + x); },
                              0.0, cut, abs_tol * ln2 * 0.5);
    return v / ln2;
}

} // namespace clusterfb

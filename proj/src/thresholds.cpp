#include "clusterfb/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "clusterfb/numerics.hpp"
#include "clusterfb/order_stats.hpp"

namespace clusterfb {

namespace {

void check_rates(const std::vector<double>& rates) {
    if (rates.empty()) throw std::invalid_argument("rates must be nonempty");
    for (double l : rates)
        if (!(l > 0.0)) throw std::invalid_argument("rates must be strictly positive");
}

// Rank-1/rank-2 crossing for member m: P(rank 1) = prod_j (1-p_j) and
// P(rank 2) = P(rank 1) * sum_j p_j/(1-p_j), so the crossing solves
// sum_{j != m} 1/expm1(rate_j r) = 1. The sum decreases from +inf to 0.
double crossing_rank1(const std::vector<double>& rates, int m) {
    auto g = [&](double r) {
        double s = 0.0;
        for (int j = 0; j < static_cast<int>(rates.size()); ++j) {
            if (j == m) continue;
            s += 1.0 / std::expm1(rates[static_cast<std::size_t>(j)] * r);
        }
        return 1.0 - s;
    };
    double scale = 1.0 / *std::max_element(rates.begin(), rates.end());
    return num::find_root_positive(g, 1e-10, 1e-15 * scale, scale);
}

} // namespace

std::vector<double> ClusterPlan::member_rates(int c) const {
    const std::vector<int>& ids = members.at(static_cast<std::size_t>(c));
    std::vector<double> out;
    out.reserve(ids.size());
    for (int u : ids) out.push_back(rates[static_cast<std::size_t>(u)]);
    return out;
}

double ClusterPlan::smallest_threshold() const {
    if (thresholds.empty()) throw std::logic_error("ClusterPlan: thresholds not derived");
    return thresholds.back();
}

ClusterPlan partition_users(const std::vector<double>& rates, int n_clusters) {
    check_rates(rates);
    int K = static_cast<int>(rates.size());
    if (n_clusters < 1) throw std::invalid_argument("n_clusters must be >= 1");
    if (n_clusters > K) throw std::invalid_argument("n_clusters must not exceed the user count");

    ClusterPlan plan;
    plan.rates = rates;
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        double ra = rates[static_cast<std::size_t>(a)];
        double rb = rates[static_cast<std::size_t>(b)];
        return ra != rb ? ra < rb : a < b; // mean descending; index breaks ties
    });

    int base = K / n_clusters;
    int extra = K % n_clusters;
    plan.cluster_of_user.assign(static_cast<std::size_t>(K), -1);
    int pos = 0;
    for (int c = 0; c < n_clusters; ++c) {
        int size = base + (c < extra ? 1 : 0);
        std::vector<int> ids(order.begin() + pos, order.begin() + pos + size);
        pos += size;
        double sum = 0.0;
        for (int u : ids) {
            plan.cluster_of_user[static_cast<std::size_t>(u)] = c;
            sum += rates[static_cast<std::size_t>(u)];
        }
        plan.cluster_mean_rate.push_back(sum / size);
        plan.members.push_back(std::move(ids));
    }
    plan.region_bits = 0;
    while ((1 << plan.region_bits) < n_clusters) ++plan.region_bits;
    return plan;
}

double crossing_point(const std::vector<double>& group_rates, int m, int n) {
    check_rates(group_rates);
    int L = static_cast<int>(group_rates.size());
    if (L < 2) throw std::invalid_argument("crossing_point: need at least 2 members");
    if (m < 0 || m >= L) throw std::invalid_argument("crossing_point: member out of range");
    if (n < 1 || n > L - 1) throw std::invalid_argument("crossing_point: rank out of range");
    if (n == 1) return crossing_rank1(group_rates, m);

    // P(rank n+1)/P(rank n) decreases through 1; bracket where both ranks
    // have representable probability, then bisect on 1 - ratio.
    double mean_rate = std::accumulate(group_rates.begin(), group_rates.end(), 0.0) / L;
    double lo = 1e-6 / mean_rate;
    for (int it = 0; it < 2000; ++it) {
        std::vector<double> p = rank_probabilities(group_rates, m, lo);
        if (p[static_cast<std::size_t>(n - 1)] > 0.0) break;
        lo *= 2.0;
    }
    auto g = [&](double r) {
        std::vector<double> p = rank_probabilities(group_rates, m, r);
        double pn = p[static_cast<std::size_t>(n - 1)];
        double pn1 = p[static_cast<std::size_t>(n)];
        if (pn <= 0.0) return pn1 > 0.0 ? -1.0 : 1.0;
        return 1.0 - pn1 / pn;
    };
    if (g(lo) >= 0.0) return lo;
    double hi = std::max(2.0 * lo, 1.0 / mean_rate);
    for (int it = 0; it < 200 && g(hi) <= 0.0; ++it) hi *= 2.0;
    return num::bisect(g, lo, hi, 1e-10);
}

std::vector<double> type1_thresholds(const ClusterPlan& plan) {
    std::vector<double> out;
    out.reserve(plan.members.size());
    for (int c = 0; c < plan.n_clusters(); ++c) {
        std::vector<double> rates = plan.member_rates(c);
        if (rates.size() < 2) {
            out.push_back(0.0);
            continue;
        }
        double best = 0.0;
        for (int m = 0; m < static_cast<int>(rates.size()); ++m)
            best = std::max(best, crossing_point(rates, m, 1));
        out.push_back(best);
    }
    return out;
}

std::vector<double> type2_thresholds(const ClusterPlan& plan) {
    std::vector<double> out;
    out.reserve(plan.members.size());
    for (int c = 0; c < plan.n_clusters(); ++c) {
        double L = static_cast<double>(plan.members[static_cast<std::size_t>(c)].size());
        out.push_back(L < 2.0 ? 0.0
                              : std::log(L) / plan.cluster_mean_rate[static_cast<std::size_t>(c)]);
    }
    return out;
}

std::vector<double> homogeneous_thresholds(double lambda, int K, int n_thresholds) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (n_thresholds < 1 || n_thresholds > K)
        throw std::invalid_argument("n_thresholds must be in 1..K");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_thresholds));
    for (int p = 1; p <= n_thresholds; ++p)
        out.push_back(std::log(static_cast<double>(K) / p) / lambda);
    return out;
}

ClusterPlan make_plan(const std::vector<double>& rates, int n_clusters, ThresholdType type) {
    ClusterPlan plan = partition_users(rates, n_clusters);
    plan.thresholds = type == ThresholdType::Type1 ? type1_thresholds(plan)
                                                   : type2_thresholds(plan);
    for (std::size_t i = 1; i < plan.thresholds.size(); ++i)
        plan.thresholds[i] = std::min(plan.thresholds[i], plan.thresholds[i - 1]);
    return plan;
}

double loss_probability(const std::vector<double>& rates, double r_min) {
    return max_cdf(rates, r_min);
}

TruncatedMoments truncated_moments(double lambda, double r) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (r < 0.0) throw std::invalid_argument("r must be >= 0");
    double a = lambda * r;
    double e = std::exp(-a);
    TruncatedMoments m;
    m.mean = (1.0 - e * (1.0 + a)) / lambda;
    m.second_moment = 2.0 * (1.0 - e * (1.0 + a + 0.5 * a * a)) / (lambda * lambda);
    m.variance = std::max(0.0, m.second_moment - m.mean * m.mean);
    return m;
}

double max_expectation_bound(const std::vector<double>& means,
                             const std::vector<double>& variances) {
    std::size_t K = means.size();
    if (K < 2) throw std::invalid_argument("max_expectation_bound: need at least 2 variables");
    if (variances.size() != K)
        throw std::invalid_argument("max_expectation_bound: size mismatch");
    double kd = static_cast<double>(K);
    double c = (kd - 2.0) / (2.0 * std::sqrt(kd - 1.0));
    double T = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < K; ++i) {
        if (variances[i] < 0.0)
            throw std::invalid_argument("max_expectation_bound: negative variance");
        T = std::max(T, means[i] + c * std::sqrt(variances[i]));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        double d = means[i] - T;
        sum += 0.5 * (means[i] + std::sqrt(d * d + variances[i]));
    }
    return sum + 0.5 * (2.0 - kd) * T;
}

RateLossBound rate_loss_bound(const std::vector<double>& rates, double r_min, int beams) {
    check_rates(rates);
    if (r_min < 0.0) throw std::invalid_argument("r_min must be >= 0");
    if (beams < 1) throw std::invalid_argument("beams must be >= 1");
    RateLossBound out;
    out.r_min = r_min;
    out.p_loss = loss_probability(rates, r_min);
    if (rates.size() == 1) {
        out.mean_upper = truncated_moments(rates[0], r_min).mean;
    } else {
        std::vector<double> means, vars;
        means.reserve(rates.size());
        vars.reserve(rates.size());
        for (double l : rates) {
            TruncatedMoments m = truncated_moments(l, r_min);
            means.push_back(m.mean);
            vars.push_back(m.variance);
        }
        out.mean_upper = max_expectation_bound(means, vars);
    }
    out.bound = beams * std::log2(1.0 + out.mean_upper) * out.p_loss;
    return out;
}

int min_clusters(const std::vector<double>& rates, double max_loss, int beams,
                 ThresholdType type) {
    check_rates(rates);
    if (!(max_loss > 0.0)) throw std::invalid_argument("max_loss must be > 0");
    int K = static_cast<int>(rates.size());
    for (int n = 1; n < K; ++n) {
        ClusterPlan plan = make_plan(rates, n, type);
        if (rate_loss_bound(rates, plan.smallest_threshold(), beams).bound <= max_loss)
            return n;
    }
    return K;
}

} // namespace clusterfb

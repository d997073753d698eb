#pragma once
// Clustering of users by mean SNR, per-cluster feedback thresholds, and the
// sum-rate-loss analysis that picks the number of clusters.

#include <vector>

namespace clusterfb {

enum class ThresholdType { Type1, Type2 };

// Users sorted by decreasing mean SNR (increasing rate) and cut into
// contiguous clusters. Cluster 0 holds the strongest users and owns the
// largest threshold.
struct ClusterPlan {
    std::vector<double> rates;             // per user, original order
    std::vector<int> cluster_of_user;      // user -> cluster index
    std::vector<std::vector<int>> members; // cluster -> user ids, strongest first
    std::vector<double> cluster_mean_rate; // average member rate per cluster
    std::vector<double> thresholds;        // per cluster, weakly decreasing; empty until derived
    int region_bits = 0;                   // bits to name a region, 0 for one cluster

    int n_clusters() const { return static_cast<int>(members.size()); }
    int n_users() const { return static_cast<int>(rates.size()); }
    std::vector<double> member_rates(int c) const;
    double smallest_threshold() const;
};

// Membership, mean rates, and region bit count; thresholds left empty.
// When n_clusters does not divide K, the first K mod n_clusters clusters
// take one extra user. Throws if n_clusters < 1 or n_clusters > K.
ClusterPlan partition_users(const std::vector<double>& rates, int n_clusters);

// SNR where P(rank n) and P(rank n+1) cross for member m of a group with
// the given rates; above it rank n is the likelier of the two. Requires
// 1 <= n <= L-1 and L >= 2. Bracketing plus bisection to 1e-10 relative.
double crossing_point(const std::vector<double>& group_rates, int m, int n);

// Per cluster, the largest rank-1/rank-2 crossing over its members.
// Size-1 clusters get threshold 0.
std::vector<double> type1_thresholds(const ClusterPlan& plan);

// Closed form on the homogenized cluster: ln(L_i) / (average member rate).
std::vector<double> type2_thresholds(const ClusterPlan& plan);

// Equal-rate special case: r_p = ln(K/p) / lambda for p = 1..n_thresholds.
std::vector<double> homogeneous_thresholds(double lambda, int K, int n_thresholds);

// partition_users + the chosen threshold derivation. Roundoff-scale
// inversions are clamped so the stored list is weakly decreasing, which
// downstream region lookup relies on.
ClusterPlan make_plan(const std::vector<double>& rates, int n_clusters, ThresholdType type);

// P(all users' SNR below r_min) = CDF of the max at r_min.
double loss_probability(const std::vector<double>& rates, double r_min);

// Moments of Z = X when X <= r, else 0, for X ~ Exp(lambda).
struct TruncatedMoments {
    double mean;
    double second_moment;
    double variance;
};
TruncatedMoments truncated_moments(double lambda, double r);

// Distribution-free upper bound on E[max Z_i] from means and variances.
// Requires at least 2 entries; the 1-entry case is the mean itself and is
// handled by rate_loss_bound directly.
double max_expectation_bound(const std::vector<double>& means,
                             const std::vector<double>& variances);

struct RateLossBound {
    double r_min;      // smallest threshold the bound is evaluated at
    double p_loss;     // probability no user clears r_min
    double mean_upper; // upper bound on E[max truncated SNR]
    double bound;      // M * log2(1 + mean_upper) * p_loss
};
RateLossBound rate_loss_bound(const std::vector<double>& rates, double r_min, int beams);

// Smallest cluster count in 1..K whose smallest threshold keeps
// rate_loss_bound within max_loss; K when none qualifies.
int min_clusters(const std::vector<double>& rates, double max_loss, int beams,
                 ThresholdType type);

} // namespace clusterfb

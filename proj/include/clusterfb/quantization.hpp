#pragma once
// Equiprobable scalar quantizers per SNR region, exhaustive bit allocation
// under per-user average feedback constraints, and analytic feedback load.
//
// Regions are indexed from the top: region 0 = [thresholds[0], inf),
// region i = [thresholds[i], thresholds[i-1]). The thresholds list is
// weakly decreasing; the last entry is the reporting cutoff.

#include <vector>

namespace clusterfb {

// Exponential measure of a region for one user: e^{-lambda r_i} - e^{-lambda r_{i-1}}.
double region_probability(double lambda, int region, const std::vector<double>& thresholds);

// 2^bits reconstruction levels on [lo, hi) for the distribution of the max
// of independent exponentials with the given rates, restricted to the
// region: cells are equiprobable, each level is its cell's conditional
// mean. hi may be +infinity. Throws if the region has no mass.
std::vector<double> equiprobable_levels(const std::vector<double>& rates,
                                        double lo, double hi, int bits);

struct QuantizerSet {
    std::vector<double> thresholds;           // region edges below +inf
    std::vector<int> bits;                    // per region
    std::vector<std::vector<double>> levels;  // per region, ascending
    std::vector<std::vector<double>> edges;   // per region, 2^bits - 1 interior cell bounds

    // cell index of v within a region: count of interior edges <= v
    int cell_of(int region, double v) const;
};

QuantizerSet build_quantizers(const std::vector<double>& rates,
                              const std::vector<double>& thresholds,
                              const std::vector<int>& bits);

// Guaranteed-rate objective of an allocation: beams * sum_i P(max in region
// i) * mean over that region's equiprobable cells of log2(1 + cell lower
// edge). Strictly increasing in each region's bit count, so bits are worth
// spending up to the budget.
double allocation_objective(const std::vector<double>& rates,
                            const QuantizerSet& q, int beams);

// Every user's average quantization bits stay within its budget
// (1e-12 slack): sum_i P(user in region i) * bits[i] <= budget[user].
bool allocation_feasible(const std::vector<double>& rates,
                         const std::vector<double>& thresholds,
                         const std::vector<int>& bits,
                         const std::vector<double>& budgets);

// Exhaustive search over {0..b_max}^regions for the feasible allocation
// maximizing allocation_objective; ties go to the lexicographically
// smallest vector. The all-zero vector is always feasible.
std::vector<int> allocate_bits(const std::vector<double>& rates,
                               const std::vector<double>& thresholds,
                               const std::vector<double>& budgets,
                               int b_max, int beams);

// Average uplink bits per scheduling instant when every user reports each
// beam whose SNR clears r_min, spending region_bits + per_user_load[k]:
// beams * sum_k e^{-lambda_k r_min} * (region_bits + per_user_load[k]).
double expected_feedback_load(const std::vector<double>& rates, double r_min,
                              int region_bits,
                              const std::vector<double>& per_user_load, int beams);

// Same load with the budget replaced by the allocation actually in use:
// beams * sum_k [e^{-lambda_k r_min} * region_bits + sum_i P(user k in i) * bits[i]].
double expected_feedback_load_exact(const std::vector<double>& rates,
                                    const std::vector<double>& thresholds,
                                    const std::vector<int>& bits,
                                    int region_bits, int beams);

} // namespace clusterfb

#include "clusterfb/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "clusterfb/order_stats.hpp"

namespace clusterfb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_thresholds(const std::vector<double>& thresholds) {
    if (thresholds.empty()) throw std::invalid_argument("thresholds must be nonempty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] >= 0.0))
            throw std::invalid_argument("thresholds must be >= 0");
        if (i > 0 && thresholds[i] > thresholds[i - 1])
            throw std::invalid_argument("thresholds must be weakly decreasing");
    }
}

double region_upper(const std::vector<double>& thresholds, int region) {
    return region == 0 ? kInf : thresholds[static_cast<std::size_t>(region - 1)];
}

struct RegionTable {
    std::vector<double> edges;  // interior cell bounds, ascending, size 2^bits - 1
    std::vector<double> levels; // cell centroids, ascending, size 2^bits
};

// Equiprobable cells under the max distribution restricted to [lo, hi).
RegionTable equiprobable_table(const std::vector<double>& rates, double lo, double hi,
                               int bits) {
    double total = max_mass(rates, lo, hi);
    if (!(total > 0.0)) throw std::invalid_argument("region has no probability mass");
    int n = 1 << bits;
    RegionTable t;
    t.edges.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 1; j < n; ++j)
        t.edges.push_back(max_quantile_in(rates, lo, hi, static_cast<double>(j) / n));
    t.levels.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double a = j == 0 ? lo : t.edges[static_cast<std::size_t>(j - 1)];
        double b = j == n - 1 ? hi : t.edges[static_cast<std::size_t>(j)];
        double mass = b > a ? max_mass(rates, a, b) : 0.0;
        if (mass > 0.0) {
            t.levels.push_back(max_partial_mean(rates, a, b) / mass);
        } else {
            // roundoff-degenerate cell: pin the level inside it
            t.levels.push_back(b == kInf ? a : 0.5 * (a + b));
        }
    }
    return t;
}

// Evenly spaced stand-in table for regions whose reference mass underflows;
// such regions are effectively never scheduled, but the table must exist.
RegionTable fallback_table(const std::vector<double>& rates, double lo, double hi, int bits) {
    int n = 1 << bits;
    double step = hi == kInf
                      ? 1.0 / *std::min_element(rates.begin(), rates.end())
                      : (hi - lo) / n;
    RegionTable t;
    for (int j = 1; j < n; ++j) t.edges.push_back(lo + step * j);
    for (int j = 0; j < n; ++j) t.levels.push_back(lo + step * (j + 0.5));
    return t;
}

RegionTable region_table(const std::vector<double>& rates, double lo, double hi, int bits) {
    if (!(hi > lo)) {
        // empty region (tied thresholds): never matched by region lookup
        int n = 1 << bits;
        return {std::vector<double>(static_cast<std::size_t>(n - 1), lo),
                std::vector<double>(static_cast<std::size_t>(n), lo)};
    }
    if (!(max_mass(rates, lo, hi) > 0.0)) return fallback_table(rates, lo, hi, bits);
    return equiprobable_table(rates, lo, hi, bits);
}

// Mean over a region's equiprobable cells of log2(1 + cell lower edge), the
// rate each reported level can guarantee. Refining a cell keeps its lower
// edge and adds a higher one, so the mean grows with the bit count; that
// growth is what gives extra bits their value in the allocation search.
// Centroid levels would shrink under refinement (concavity of the log) and
// make the search degenerate.
double edge_log_mean(double lo, const std::vector<double>& edges) {
    double s = std::log2(1.0 + lo);
    for (double e : edges) s += std::log2(1.0 + e);
    return s / static_cast<double>(edges.size() + 1);
}

} // namespace

int QuantizerSet::cell_of(int region, double v) const {
    const std::vector<double>& e = edges.at(static_cast<std::size_t>(region));
    return static_cast<int>(std::upper_bound(e.begin(), e.end(), v) - e.begin());
}

double region_probability(double lambda, int region, const std::vector<double>& thresholds) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    check_thresholds(thresholds);
    if (region < 0 || region >= static_cast<int>(thresholds.size()))
        throw std::invalid_argument("region out of range");
    double lo = thresholds[static_cast<std::size_t>(region)];
    double hi = region_upper(thresholds, region);
    double upper_term = hi == kInf ? 0.0 : std::exp(-lambda * hi);
    return std::exp(-lambda * lo) - upper_term;
}

std::vector<double> equiprobable_levels(const std::vector<double>& rates, double lo, double hi,
                                        int bits) {
    if (bits < 0 || bits > 24) throw std::invalid_argument("bits must be in 0..24");
    lo = std::max(lo, 0.0);
    if (!(hi > lo)) throw std::invalid_argument("region must have positive width");
    return equiprobable_table(rates, lo, hi, bits).levels;
}

QuantizerSet build_quantizers(const std::vector<double>& rates,
                              const std::vector<double>& thresholds,
                              const std::vector<int>& bits) {
    check_thresholds(thresholds);
    if (bits.size() != thresholds.size())
        throw std::invalid_argument("bits list must match the threshold list");
    QuantizerSet q;
    q.thresholds = thresholds;
    q.bits = bits;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        RegionTable t = region_table(rates, thresholds[i],
                                     region_upper(thresholds, static_cast<int>(i)), bits[i]);
        q.edges.push_back(std::move(t.edges));
        q.levels.push_back(std::move(t.levels));
    }
    return q;
}

double allocation_objective(const std::vector<double>& rates, const QuantizerSet& q,
                            int beams) {
    double total = 0.0;
    for (std::size_t i = 0; i < q.thresholds.size(); ++i) {
        double lo = q.thresholds[i];
        double hi = region_upper(q.thresholds, static_cast<int>(i));
        double mass = hi > lo ? max_mass(rates, lo, hi) : 0.0;
        if (mass <= 0.0) continue;
        total += mass * edge_log_mean(lo, q.edges[i]);
    }
    return beams * total;
}

bool allocation_feasible(const std::vector<double>& rates,
                         const std::vector<double>& thresholds,
                         const std::vector<int>& bits,
                         const std::vector<double>& budgets) {
    check_thresholds(thresholds);
    if (bits.size() != thresholds.size())
        throw std::invalid_argument("bits list must match the threshold list");
    if (budgets.size() != rates.size())
        throw std::invalid_argument("budgets must match the user count");
    for (std::size_t k = 0; k < rates.size(); ++k) {
        double cost = 0.0;
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            cost += region_probability(rates[k], static_cast<int>(i), thresholds) * bits[i];
        if (cost > budgets[k] + 1e-12) return false;
    }
    return true;
}

std::vector<int> allocate_bits(const std::vector<double>& rates,
                               const std::vector<double>& thresholds,
                               const std::vector<double>& budgets,
                               int b_max, int beams) {
    check_thresholds(thresholds);
    if (budgets.size() != rates.size())
        throw std::invalid_argument("budgets must match the user count");
    if (b_max < 0) throw std::invalid_argument("b_max must be >= 0");
    int regions = static_cast<int>(thresholds.size());
    if (std::pow(static_cast<double>(b_max + 1), regions) > 2e7)
        throw std::invalid_argument("bit-allocation search space too large");

    // objective contribution of region i at b bits; the beams factor scales
    // every candidate equally and cannot change the argmax
    std::vector<std::vector<double>> score(static_cast<std::size_t>(regions));
    for (int i = 0; i < regions; ++i) {
        double lo = thresholds[static_cast<std::size_t>(i)];
        double hi = region_upper(thresholds, i);
        double mass = hi > lo ? max_mass(rates, lo, hi) : 0.0;
        for (int b = 0; b <= b_max; ++b) {
            if (mass <= 0.0) {
                score[static_cast<std::size_t>(i)].push_back(0.0);
                continue;
            }
            score[static_cast<std::size_t>(i)].push_back(
                mass * edge_log_mean(lo, region_table(rates, lo, hi, b).edges));
        }
    }

    std::vector<std::vector<double>> prob(rates.size());
    for (std::size_t k = 0; k < rates.size(); ++k)
        for (int i = 0; i < regions; ++i)
            prob[k].push_back(region_probability(rates[k], i, thresholds));

    std::vector<int> current(static_cast<std::size_t>(regions), 0);
    std::vector<int> best = current; // all-zero is always feasible
    double best_obj = -kInf;
    for (;;) {
        bool feasible = true;
        for (std::size_t k = 0; k < rates.size() && feasible; ++k) {
            double cost = 0.0;
            for (int i = 0; i < regions; ++i)
                cost += prob[k][static_cast<std::size_t>(i)] *
                        current[static_cast<std::size_t>(i)];
            feasible = cost <= budgets[k] + 1e-12;
        }
        if (feasible) {
            double obj = 0.0;
            for (int i = 0; i < regions; ++i)
                obj += score[static_cast<std::size_t>(i)]
                            [static_cast<std::size_t>(current[static_cast<std::size_t>(i)])];
            if (obj > best_obj) { // lexicographically first maximizer wins
                best_obj = obj;
                best = current;
            }
        }
        int pos = regions - 1; // odometer in lexicographic order
        while (pos >= 0 && current[static_cast<std::size_t>(pos)] == b_max) {
            current[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++current[static_cast<std::size_t>(pos)];
    }
    (void)beams;
    return best;
}

double expected_feedback_load(const std::vector<double>& rates, double r_min,
                              int region_bits,
                              const std::vector<double>& per_user_load, int beams) {
    if (per_user_load.size() != rates.size())
        throw std::invalid_argument("per_user_load must match the user count");
    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k)
        total += std::exp(-rates[k] * r_min) * (region_bits + per_user_load[k]);
    return beams * total;
}

double expected_feedback_load_exact(const std::vector<double>& rates,
                                    const std::vector<double>& thresholds,
                                    const std::vector<int>& bits,
                                    int region_bits, int beams) {
    check_thresholds(thresholds);
    if (bits.size() != thresholds.size())
        throw std::invalid_argument("bits list must match the threshold list");
    double r_min = thresholds.back();
    double total = 0.0;
    for (std::size_t k = 0; k < rates.size(); ++k) {
        double t = std::exp(-rates[k] * r_min) * region_bits;
        for (std::size_t i = 0; i < thresholds.size(); ++i)
            t += region_probability(rates[k], static_cast<int>(i), thresholds) * bits[i];
        total += t;
    }
    return beams * total;
}

} // namespace clusterfb

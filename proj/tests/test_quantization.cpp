#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "clusterfb/order_stats.hpp"
#include "clusterfb/quantization.hpp"
#include "clusterfb/thresholds.hpp"
#include "test_util.hpp"

using namespace clusterfb;

namespace {
const double kInf = std::numeric_limits<double>::infinity();

std::vector<double> random_rates(std::mt19937& gen, int n, double lo = 0.4, double hi = 2.2) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (double& r : out) r = u(gen);
    return out;
}
} // namespace

TEST_CASE("one-bit quantizer of a unit exponential splits at the median") {
    auto levels = equiprobable_levels({1.0}, 0.0, kInf, 1);
    REQUIRE(levels.size() == 2);
    CHECK(levels[0] == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-9));
    CHECK(levels[1] == doctest::Approx(1.0 + std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("cells carry equal probability and centroid levels") {
    std::mt19937 gen(31);
    for (int it = 0; it < 10; ++it) {
        auto rates = random_rates(gen, 2 + it % 3);
        double lo = 0.3 + 0.1 * (it % 4);
        double hi = (it % 2) ? lo + 1.5 : kInf;
        int bits = 1 + it % 3;
        QuantizerSet q = build_quantizers(rates, {lo}, {bits});
        REQUIRE(q.levels.size() == 1);
        const auto& lv = q.levels[0];
        const auto& ed = q.edges[0];
        const int cells = 1 << bits;
        REQUIRE(static_cast<int>(lv.size()) == cells);
        REQUIRE(static_cast<int>(ed.size()) == cells - 1);
        (void)hi;

        double total = max_mass(rates, lo, kInf);
        for (int c = 0; c < cells; ++c) {
            double a = c == 0 ? lo : ed[static_cast<std::size_t>(c - 1)];
            double b = c == cells - 1 ? kInf : ed[static_cast<std::size_t>(c)];
            CHECK(max_mass(rates, a, b) == doctest::Approx(total / cells).epsilon(1e-9));
            // level sits at the conditional mean of its cell
            double upper = std::isinf(b) ? a + 60.0 / rates[0] : b;
            double num = testutil::simpson(
                [&](double x) { return x * max_pdf(rates, x); }, a, upper, 4000);
            double den = testutil::simpson(
                [&](double x) { return max_pdf(rates, x); }, a, upper, 4000);
            CHECK(lv[static_cast<std::size_t>(c)] == doctest::Approx(num / den).epsilon(1e-6));
            CHECK(lv[static_cast<std::size_t>(c)] > a);
            if (std::isfinite(b)) CHECK(lv[static_cast<std::size_t>(c)] < b);
        }
        for (std::size_t c = 1; c < lv.size(); ++c) CHECK(lv[c] > lv[c - 1]);
    }
}

TEST_CASE("cell lookup respects closed lower and open upper bounds") {
    QuantizerSet q = build_quantizers({1.0}, {0.5}, {2});
    const auto& ed = q.edges[0];
    REQUIRE(ed.size() == 3);
    CHECK(q.cell_of(0, 0.5) == 0);
    CHECK(q.cell_of(0, ed[0]) == 1);            // boundary opens the next cell
    CHECK(q.cell_of(0, ed[0] - 1e-12) == 0);
    CHECK(q.cell_of(0, ed[2]) == 3);
    CHECK(q.cell_of(0, ed[2] + 5.0) == 3);
}

TEST_CASE("region probabilities partition the reporting range") {
    std::mt19937 gen(32);
    for (int it = 0; it < 15; ++it) {
        double lambda = 0.3 + 0.2 * it;
        std::vector<double> thr{2.0, 1.1, 0.4};
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) sum += region_probability(lambda, i, thr);
        CHECK(sum == doctest::Approx(std::exp(-lambda * thr.back())).epsilon(1e-12));
        // zero bottom threshold makes the regions a full partition
        std::vector<double> thr0{2.0, 1.1, 0.0};
        double sum0 = 0.0;
        for (int i = 0; i < 3; ++i) sum0 += region_probability(lambda, i, thr0);
        CHECK(sum0 == doctest::Approx(1.0).epsilon(1e-12));
    }
    // region 0 is the open top interval
    CHECK(region_probability(1.0, 0, {0.7}) == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
}

TEST_CASE("bit search matches exhaustive enumeration") {
    std::mt19937 gen(33);
    for (int it = 0; it < 6; ++it) {
        auto rates = random_rates(gen, 4 + it % 3);
        ClusterPlan plan = make_plan(rates, 2, ThresholdType::Type2);
        std::vector<double> budgets(rates.size(), 0.8);
        const int b_max = 3, beams = 4;

        auto feasible = [&](const std::vector<int>& bits) {
            for (std::size_t k = 0; k < rates.size(); ++k) {
                double load = 0.0;
                for (int i = 0; i < 2; ++i)
                    load += region_probability(rates[k], i, plan.thresholds) *
                            bits[static_cast<std::size_t>(i)];
                if (load > budgets[k] + 1e-12) return false;
            }
            return true;
        };

        double best = -1.0;
        for (int b0 = 0; b0 <= b_max; ++b0)
            for (int b1 = 0; b1 <= b_max; ++b1) {
                std::vector<int> bits{b0, b1};
                if (!feasible(bits)) continue;
                QuantizerSet q = build_quantizers(rates, plan.thresholds, bits);
                best = std::max(best, allocation_objective(rates, q, beams));
            }

        std::vector<int> got = allocate_bits(rates, plan.thresholds, budgets, b_max, beams);
        REQUIRE(got.size() == 2);
        CHECK(feasible(got));
        CHECK(allocation_feasible(rates, plan.thresholds, got, budgets));
        QuantizerSet qgot = build_quantizers(rates, plan.thresholds, got);
        CHECK(allocation_objective(rates, qgot, beams) ==
              doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("objective grows with resolution and saturates a loose budget") {
    std::mt19937 gen(36);
    auto rates = random_rates(gen, 5);
    ClusterPlan plan = make_plan(rates, 2, ThresholdType::Type2);

    for (int region = 0; region < 2; ++region) {
        double prev = -1.0;
        for (int b = 0; b <= 5; ++b) {
            std::vector<int> bits{0, 0};
            bits[static_cast<std::size_t>(region)] = b;
            QuantizerSet q = build_quantizers(rates, plan.thresholds, bits);
            double obj = allocation_objective(rates, q, 4);
            CHECK(obj > prev);
            prev = obj;
        }
    }

    // a budget no user can exhaust pins every region at the cap
    std::vector<double> loose(rates.size(), 1e6);
    auto bits = allocate_bits(rates, plan.thresholds, loose, 5, 4);
    for (int b : bits) CHECK(b == 5);
}

TEST_CASE("zero budget forces the all-zero allocation") {
    std::mt19937 gen(34);
    auto rates = random_rates(gen, 6);
    ClusterPlan plan = make_plan(rates, 3, ThresholdType::Type1);
    std::vector<double> budgets(rates.size(), 0.0);
    auto bits = allocate_bits(rates, plan.thresholds, budgets, 4, 4);
    for (int b : bits) CHECK(b == 0);
}

TEST_CASE("expected feedback load follows the budget formula") {
    std::vector<double> rates(10, 1.0);
    std::vector<double> per_user(10, 0.8);
    // r_min = 0: every user reports every beam, 2 region bits + 0.8 budget
    CHECK(expected_feedback_load(rates, 0.0, 2, per_user, 4) ==
          doctest::Approx(112.0).epsilon(1e-12));

    std::mt19937 gen(35);
    auto hrates = random_rates(gen, 7);
    ClusterPlan plan = make_plan(hrates, 3, ThresholdType::Type2);
    std::vector<double> budgets(hrates.size(), 0.8);
    auto bits = allocate_bits(hrates, plan.thresholds, budgets, 3, 4);
    double r_min = plan.smallest_threshold();

    double manual = 0.0;
    for (double lam : hrates) {
        double reg = std::exp(-lam * r_min) * plan.region_bits;
        double lvl = 0.0;
        for (int i = 0; i < plan.n_clusters(); ++i)
            lvl += region_probability(lam, i, plan.thresholds) *
                   bits[static_cast<std::size_t>(i)];
        manual += reg + lvl;
    }
    manual *= 4.0;
    CHECK(expected_feedback_load_exact(hrates, plan.thresholds, bits, plan.region_bits, 4) ==
          doctest::Approx(manual).epsilon(1e-12));

    double budget_form = expected_feedback_load(hrates, r_min, plan.region_bits, budgets, 4);
    double manual_budget = 0.0;
    for (double lam : hrates)
        manual_budget += std::exp(-lam * r_min) * (plan.region_bits + 0.8);
    CHECK(budget_form == doctest::Approx(4.0 * manual_budget).epsilon(1e-12));
}

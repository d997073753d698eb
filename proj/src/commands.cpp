#include "clusterfb/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "clusterfb/quantization.hpp"
#include "clusterfb/thresholds.hpp"

namespace clusterfb {

namespace {

void print_cluster_table(std::ostream& out, const ClusterPlan& t1, const ClusterPlan& t2) {
    for (int c = 0; c < t1.n_clusters(); ++c) {
        out << "cluster " << c << ": users [";
        const auto& mem = t1.members[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < mem.size(); ++i)
            out << (i ? " " : "") << mem[i];
        out << "]  mean_rate=" << t1.cluster_mean_rate[static_cast<std::size_t>(c)]
            << "  threshold_type1=" << t1.thresholds[static_cast<std::size_t>(c)]
            << "  threshold_type2=" << t2.thresholds[static_cast<std::size_t>(c)] << "\n";
    }
}

void check_cluster_count(const ExperimentConfig& cfg, int K) {
    if (cfg.scheme.n_clusters < 1)
        throw std::invalid_argument("scheme.n_clusters must be >= 1");
    if (cfg.scheme.n_clusters > K)
        throw std::invalid_argument("scheme.n_clusters exceeds system.K");
}

} // namespace

int cmd_thresholds(const ExperimentConfig& cfg, std::ostream& out) {
    SystemConfig sys = system_for_k(cfg, cfg.system.K);
    check_cluster_count(cfg, sys.K);
    std::vector<double> rates = lambdas_from_config(sys);

    ClusterPlan t1 = make_plan(rates, cfg.scheme.n_clusters, ThresholdType::Type1);
    ClusterPlan t2 = make_plan(rates, cfg.scheme.n_clusters, ThresholdType::Type2);

    out << std::setprecision(6);
    out << "K=" << sys.K << " users, M=" << sys.M << " beams, n_clusters="
        << t1.n_clusters() << ", region_bits=" << t1.region_bits << "\n";
    print_cluster_table(out, t1, t2);

    RateLossBound b1 = rate_loss_bound(rates, t1.smallest_threshold(), sys.M);
    RateLossBound b2 = rate_loss_bound(rates, t2.smallest_threshold(), sys.M);
    out << "rate_loss_bound: type1=" << b1.bound << " (p_loss=" << b1.p_loss
        << "), type2=" << b2.bound << " (p_loss=" << b2.p_loss << ")\n";
    out << "min_clusters for bound <= " << cfg.scheme.delta_r_u << ": type1="
        << min_clusters(rates, cfg.scheme.delta_r_u, sys.M, ThresholdType::Type1)
        << ", type2="
        << min_clusters(rates, cfg.scheme.delta_r_u, sys.M, ThresholdType::Type2)
        << "\n";
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out) {
    std::vector<ResultRow> rows = run_experiment(cfg);
    std::string csv = to_csv(rows);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(cfg.run.out_dir, ec); // existing directory is fine

    fs::path csv_path = fs::path(cfg.run.out_dir) / "results.csv";
    {
        std::ofstream f(csv_path);
        if (!f) {
            out << "cannot write " << csv_path.string() << "\n";
            return 1;
        }
        f << csv;
        if (!f) {
            out << "write to " << csv_path.string() << " failed\n";
            return 1;
        }
    }

    nlohmann::json manifest = {
        {"config", nlohmann::json::parse(render_config(cfg))},
        {"rows", rows.size()},
        {"results", "results.csv"},
    };
    fs::path man_path = fs::path(cfg.run.out_dir) / "manifest.json";
    {
        std::ofstream f(man_path);
        if (!f) {
            out << "cannot write " << man_path.string() << "\n";
            return 1;
        }
        f << manifest.dump(2) << "\n";
        if (!f) {
            out << "write to " << man_path.string() << " failed\n";
            return 1;
        }
    }

    out << std::setprecision(6);
    out << "K scheme sum_rate fb_bits\n";
    for (const ResultRow& r : rows)
        out << r.K << " " << r.scheme << " " << r.sum_rate << " " << r.fb_bits << "\n";
    out << "wrote " << csv_path.string() << " (" << rows.size() << " rows) and "
        << man_path.string() << "\n";
    return 0;
}

int cmd_bitalloc(const ExperimentConfig& cfg, std::ostream& out) {
    SystemConfig sys = system_for_k(cfg, cfg.system.K);
    check_cluster_count(cfg, sys.K);
    std::vector<double> rates = lambdas_from_config(sys);
    std::vector<double> budgets(static_cast<std::size_t>(sys.K), cfg.scheme.budget);

    out << std::setprecision(6);
    out << "K=" << sys.K << " users, n_clusters=" << cfg.scheme.n_clusters
        << ", budget=" << cfg.scheme.budget << ", b_max=" << cfg.scheme.b_max << "\n";

    for (ThresholdType type : {ThresholdType::Type1, ThresholdType::Type2}) {
        ClusterPlan plan = make_plan(rates, cfg.scheme.n_clusters, type);
        std::vector<int> bits =
            allocate_bits(rates, plan.thresholds, budgets, cfg.scheme.b_max, sys.M);
        QuantizerSet q = build_quantizers(rates, plan.thresholds, bits);

        out << "\n" << (type == ThresholdType::Type1 ? "type1" : "type2")
            << " thresholds:";
        for (double t : plan.thresholds) out << " " << t;
        out << "\nbits per region:";
        for (int b : bits) out << " " << b;
        out << "\nobjective: " << allocation_objective(rates, q, sys.M) << "\n";

        for (int k = 0; k < sys.K; ++k) {
            double expected = 0.0;
            for (int i = 0; i < plan.n_clusters(); ++i)
                expected += region_probability(rates[static_cast<std::size_t>(k)], i,
                                               plan.thresholds) *
                            bits[static_cast<std::size_t>(i)];
            out << "user " << k << ": expected_bits=" << expected
                << " slack=" << cfg.scheme.budget - expected << "\n";
        }

        for (int i = 0; i < plan.n_clusters(); ++i) {
            out << "region " << i << " levels:";
            for (double v : q.levels[static_cast<std::size_t>(i)]) out << " " << v;
            out << "\n";
        }
    }
    return 0;
}

} // namespace clusterfb

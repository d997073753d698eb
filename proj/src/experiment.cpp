#include "clusterfb/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace clusterfb {

namespace {

using nlohmann::json;

constexpr std::uint64_t kVarianceTag = 0x76617273ull; // stream label for variance draws

void reject_unknown(const json& block, const char* name, const std::set<std::string>& allowed) {
    for (auto it = block.begin(); it != block.end(); ++it)
        if (allowed.find(it.key()) == allowed.end())
            throw std::invalid_argument(std::string("unknown key \"") + it.key() + "\" in " +
                                        name + " block");
}

SchemeKind parse_scheme_kind(const std::string& s) {
    if (s == "fullcsi") return SchemeKind::FullCSI;
    if (s == "conventional") return SchemeKind::Conventional;
    if (s == "single_threshold") return SchemeKind::SingleThreshold;
    if (s == "cluster_type1") return SchemeKind::ClusterType1;
    if (s == "cluster_type2") return SchemeKind::ClusterType2;
    throw std::invalid_argument("unknown scheme \"" + s + "\"");
}

std::string scheme_token(SchemeKind k) { return scheme_name(k); }

template <class T>
void take(const json& block, const char* key, T& into) {
    if (block.contains(key)) into = block.at(key).get<T>();
}

} // namespace

std::vector<double> draw_variances(std::uint64_t seed, int K) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        // one stream per user index: growing K keeps earlier users' draws
        Rng rng(derive_stream(seed, kVarianceTag, static_cast<std::uint64_t>(k)));
        out.push_back(rng.uniform01_open());
    }
    return out;
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.system.M = 4;
    cfg.system.N = 4;
    cfg.system.K = 10;
    cfg.system.P = 10.0;
    cfg.system.noise_var = 1.0;
    return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root = json::parse(json_text);
    if (!root.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown(root, "top-level", {"system", "scheme", "run"});

    ExperimentConfig cfg = default_config();

    if (root.contains("system")) {
        const json& b = root.at("system");
        reject_unknown(b, "system",
                       {"M", "N", "K", "P", "noise_var", "channel_vars", "channel_var_seed"});
        take(b, "M", cfg.system.M);
        take(b, "N", cfg.system.N);
        take(b, "P", cfg.system.P);
        take(b, "noise_var", cfg.system.noise_var);
        if (b.contains("channel_vars") && b.contains("channel_var_seed"))
            throw std::invalid_argument(
                "system.channel_vars and system.channel_var_seed are mutually exclusive");
        if (b.contains("channel_vars")) {
            cfg.variances.explicit_list = true;
            cfg.variances.values = b.at("channel_vars").get<std::vector<double>>();
            cfg.system.K = static_cast<int>(cfg.variances.values.size());
        }
        take(b, "channel_var_seed", cfg.variances.seed);
        if (b.contains("K")) {
            int k = b.at("K").get<int>();
            if (cfg.variances.explicit_list &&
                k != static_cast<int>(cfg.variances.values.size()))
                throw std::invalid_argument(
                    "system.K disagrees with the length of system.channel_vars");
            cfg.system.K = k;
        }
    }

    if (root.contains("scheme")) {
        const json& b = root.at("scheme");
        reject_unknown(b, "scheme",
                       {"schemes", "n_clusters", "delta_r_u", "budget", "b_max", "p_out",
                        "conventional_bits", "threshold_policy", "report_policy",
                        "exact_report", "rate_on_reported", "snr_source"});
        if (b.contains("schemes")) {
            cfg.scheme.schemes.clear();
            for (const auto& s : b.at("schemes"))
                cfg.scheme.schemes.push_back(parse_scheme_kind(s.get<std::string>()));
        }
        take(b, "n_clusters", cfg.scheme.n_clusters);
        take(b, "delta_r_u", cfg.scheme.delta_r_u);
        take(b, "budget", cfg.scheme.budget);
        take(b, "b_max", cfg.scheme.b_max);
        take(b, "p_out", cfg.scheme.p_out);
        take(b, "conventional_bits", cfg.scheme.conventional_bits);
        if (b.contains("threshold_policy")) {
            std::string s = b.at("threshold_policy").get<std::string>();
            if (s == "own_cluster") cfg.scheme.threshold_policy = ThresholdPolicy::OwnCluster;
            else if (s == "min_threshold")
                cfg.scheme.threshold_policy = ThresholdPolicy::MinThreshold;
            else throw std::invalid_argument("scheme.threshold_policy must be own_cluster or min_threshold");
        }
        if (b.contains("report_policy")) {
            std::string s = b.at("report_policy").get<std::string>();
            if (s == "best_beam") cfg.scheme.report_policy = ReportPolicy::BestBeam;
            else if (s == "all_beams") cfg.scheme.report_policy = ReportPolicy::AllBeams;
            else throw std::invalid_argument("scheme.report_policy must be best_beam or all_beams");
        }
        take(b, "exact_report", cfg.scheme.exact_report);
        take(b, "rate_on_reported", cfg.scheme.rate_on_reported);
        if (b.contains("snr_source")) {
            std::string s = b.at("snr_source").get<std::string>();
            if (s == "analytic") cfg.scheme.snr_source = SnrSource::Analytic;
            else if (s == "matrix") cfg.scheme.snr_source = SnrSource::Matrix;
            else throw std::invalid_argument("scheme.snr_source must be analytic or matrix");
        }
    }

    if (root.contains("run")) {
        const json& b = root.at("run");
        reject_unknown(b, "run", {"n_drops", "seed", "k_sweep", "workers", "out_dir"});
        take(b, "n_drops", cfg.run.n_drops);
        take(b, "seed", cfg.run.seed);
        if (b.contains("k_sweep"))
            cfg.run.k_sweep = b.at("k_sweep").get<std::vector<int>>();
        take(b, "workers", cfg.run.workers);
        take(b, "out_dir", cfg.run.out_dir);
    }

    if (!cfg.run.k_sweep.empty() && cfg.variances.explicit_list)
        throw std::invalid_argument("run.k_sweep requires drawn channel variances "
                                    "(system.channel_var_seed), not an explicit list");
    if (cfg.run.n_drops < 1) throw std::invalid_argument("run.n_drops must be >= 1");
    if (cfg.run.workers < 1) throw std::invalid_argument("run.workers must be >= 1");
    for (int k : cfg.run.k_sweep)
        if (k < 1) throw std::invalid_argument("run.k_sweep entries must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& cfg) {
    json sys = {{"M", cfg.system.M}, {"N", cfg.system.N}, {"K", cfg.system.K},
                {"P", cfg.system.P}, {"noise_var", cfg.system.noise_var}};
    if (cfg.variances.explicit_list) sys["channel_vars"] = cfg.variances.values;
    else sys["channel_var_seed"] = cfg.variances.seed;

    json schemes = json::array();
    for (SchemeKind k : cfg.scheme.schemes) schemes.push_back(scheme_token(k));
    json sch = {
        {"schemes", schemes},
        {"n_clusters", cfg.scheme.n_clusters},
        {"delta_r_u", cfg.scheme.delta_r_u},
        {"budget", cfg.scheme.budget},
        {"b_max", cfg.scheme.b_max},
        {"p_out", cfg.scheme.p_out},
        {"conventional_bits", cfg.scheme.conventional_bits},
        {"threshold_policy",
         cfg.scheme.threshold_policy == ThresholdPolicy::OwnCluster ? "own_cluster"
                                                                    : "min_threshold"},
        {"report_policy",
         cfg.scheme.report_policy == ReportPolicy::BestBeam ? "best_beam" : "all_beams"},
        {"exact_report", cfg.scheme.exact_report},
        {"rate_on_reported", cfg.scheme.rate_on_reported},
        {"snr_source", cfg.scheme.snr_source == SnrSource::Analytic ? "analytic" : "matrix"},
    };
    json run = {{"n_drops", cfg.run.n_drops}, {"seed", cfg.run.seed},
                {"k_sweep", cfg.run.k_sweep}, {"workers", cfg.run.workers},
                {"out_dir", cfg.run.out_dir}};
    json root = {{"system", sys}, {"scheme", sch}, {"run", run}};
    return root.dump(2) + "\n";
}

SchemeSpec scheme_spec_for(const SchemeSettings& s, SchemeKind kind) {
    SchemeSpec spec;
    spec.kind = kind;
    spec.quant_bits = s.conventional_bits;
    spec.p_out = s.p_out;
    spec.n_clusters = s.n_clusters;
    spec.b_max = s.b_max;
    spec.budget = s.budget;
    spec.threshold_policy = s.threshold_policy;
    spec.report_policy = s.report_policy;
    spec.exact_report = s.exact_report;
    spec.rate_on_reported = s.rate_on_reported;
    return spec;
}

SystemConfig system_for_k(const ExperimentConfig& cfg, int K) {
    SystemConfig sys = cfg.system;
    sys.K = K;
    if (cfg.variances.explicit_list) {
        if (static_cast<int>(cfg.variances.values.size()) != K)
            throw std::invalid_argument("explicit channel_vars list does not match K");
        sys.channel_vars = cfg.variances.values;
    } else {
        sys.channel_vars = draw_variances(cfg.variances.seed, K);
    }
    sys.validate();
    return sys;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
    std::vector<int> ks = cfg.run.k_sweep.empty() ? std::vector<int>{cfg.system.K}
                                                  : cfg.run.k_sweep;
    std::vector<ResultRow> rows;
    for (int K : ks) {
        SystemConfig sys = system_for_k(cfg, K);
        for (SchemeKind kind : cfg.scheme.schemes) {
            PreparedScheme ps = prepare_scheme(sys, scheme_spec_for(cfg.scheme, kind));
            SchemeResult res = simulate(sys, ps, cfg.run.n_drops, cfg.run.seed,
                                        cfg.run.workers, cfg.scheme.snr_source);
            ResultRow row;
            row.K = K;
            row.scheme = ps.name;
            row.sum_rate = res.sum_rate;
            row.sum_rate_se = res.sum_rate_se;
            row.fb_bits = res.fb_bits;
            row.fb_bits_se = res.fb_bits_se;
            row.fb_bits_analytic = ps.analytic_load;
            row.rate_loss_bound = ps.loss_bound;
            row.seed = cfg.run.seed;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
    std::string out =
        "K,scheme,sum_rate,sum_rate_se,fb_bits,fb_bits_se,fb_bits_analytic,"
        "rate_loss_bound,seed\n";
    char buf[320];
    for (const ResultRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%llu\n",
                      r.K, r.scheme.c_str(), r.sum_rate, r.sum_rate_se, r.fb_bits,
                      r.fb_bits_se, r.fb_bits_analytic, r.rate_loss_bound,
                      static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

} // namespace clusterfb

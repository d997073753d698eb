#include "clusterfb/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "clusterfb/fading.hpp"
#include "clusterfb/numerics.hpp"
#include "clusterfb/order_stats.hpp"

namespace clusterfb {

namespace {

// First region (from the top) containing v; regions tile [thresholds.back(), inf).
int region_of(const std::vector<double>& thresholds, double v) {
    for (std::size_t i = 0; i < thresholds.size(); ++i)
        if (v >= thresholds[i]) return static_cast<int>(i);
    return static_cast<int>(thresholds.size()) - 1; // strict-cutoff edge case
}

double expected_reports_per_user(double rate, double r, int beams, ReportPolicy policy) {
    double tail = std::exp(-rate * r);
    if (policy == ReportPolicy::AllBeams) return beams * tail;
    double below = -std::expm1(-rate * r);
    return 1.0 - std::pow(below, beams); // best beam clears r
}

} // namespace

// Same tokens the config format and the CSV scheme column use.
const char* scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::FullCSI: return "fullcsi";
        case SchemeKind::Conventional: return "conventional";
        case SchemeKind::SingleThreshold: return "single_threshold";
        case SchemeKind::ClusterType1: return "cluster_type1";
        case SchemeKind::ClusterType2: return "cluster_type2";
    }
    return "unknown";
}

double single_threshold_level(const std::vector<double>& rates, double p_out) {
    if (!(p_out > 0.0 && p_out < 1.0))
        throw std::invalid_argument("p_out must be in (0,1)");
    double scale = 1.0 / *std::min_element(rates.begin(), rates.end());
    double hi = scale;
    while (max_cdf(rates, hi) < p_out) hi *= 2.0;
    auto g = [&](double r) { return max_cdf(rates, r) - p_out; };
    return num::bisect(g, 0.0, hi, 1e-13);
}

PreparedScheme prepare_scheme(const SystemConfig& cfg, const SchemeSpec& spec) {
    cfg.validate();
    PreparedScheme ps;
    ps.spec = spec;
    ps.name = scheme_name(spec.kind);
    ps.rates = lambdas_from_config(cfg);
    int K = cfg.K;
    int M = cfg.M;

    switch (spec.kind) {
        case SchemeKind::FullCSI:
            ps.user_threshold.assign(static_cast<std::size_t>(K), 0.0);
            break;
        case SchemeKind::Conventional: {
            ps.quant = build_quantizers(ps.rates, {0.0}, {spec.quant_bits});
            ps.user_threshold.assign(static_cast<std::size_t>(K), 0.0);
            double per_user =
                spec.report_policy == ReportPolicy::AllBeams ? M : 1.0;
            ps.analytic_load = per_user * K * spec.quant_bits;
            ps.analytic_load_exact = ps.analytic_load;
            break;
        }
        case SchemeKind::SingleThreshold: {
            double r_th = single_threshold_level(ps.rates, spec.p_out);
            ps.r_min = r_th;
            ps.cutoff_strict = true;
            ps.quant = build_quantizers(ps.rates, {r_th}, {spec.quant_bits});
            ps.user_threshold.assign(static_cast<std::size_t>(K), r_th);
            double load = 0.0;
            for (double l : ps.rates)
                load += expected_reports_per_user(l, r_th, M, spec.report_policy) *
                        spec.quant_bits;
            ps.analytic_load = load;
            ps.analytic_load_exact = load;
            break;
        }
        case SchemeKind::ClusterType1:
        case SchemeKind::ClusterType2: {
            ThresholdType type = spec.kind == SchemeKind::ClusterType1
                                     ? ThresholdType::Type1
                                     : ThresholdType::Type2;
            ps.plan = make_plan(ps.rates, spec.n_clusters, type);
            ps.r_min = ps.plan.smallest_threshold();
            std::vector<double> budgets(static_cast<std::size_t>(K), spec.budget);
            std::vector<int> bits =
                allocate_bits(ps.rates, ps.plan.thresholds, budgets, spec.b_max, M);
            ps.quant = build_quantizers(ps.rates, ps.plan.thresholds, bits);
            ps.user_threshold.resize(static_cast<std::size_t>(K));
            for (int k = 0; k < K; ++k)
                ps.user_threshold[static_cast<std::size_t>(k)] =
                    spec.threshold_policy == ThresholdPolicy::OwnCluster
                        ? ps.plan.thresholds[static_cast<std::size_t>(
                              ps.plan.cluster_of_user[static_cast<std::size_t>(k)])]
                        : ps.r_min;
            ps.loss_bound = rate_loss_bound(ps.rates, ps.r_min, M).bound;
            ps.analytic_load =
                expected_feedback_load(ps.rates, ps.r_min, ps.plan.region_bits, budgets, M);
            ps.analytic_load_exact = expected_feedback_load_exact(
                ps.rates, ps.plan.thresholds, bits, ps.plan.region_bits, M);
            break;
        }
    }
    return ps;
}

void sample_drop_snrs(const SystemConfig& cfg, Rng& rng, SnrSource source,
                      std::vector<double>& out) {
    int K = cfg.K;
    int M = cfg.M;
    out.resize(static_cast<std::size_t>(K) * M);
    if (source == SnrSource::Analytic) {
        for (int k = 0; k < K; ++k) {
            double l = lambda_from_config(cfg, k);
            for (int m = 0; m < M; ++m)
                out[static_cast<std::size_t>(k) * M + m] = rng.exponential(l);
        }
        return;
    }
    std::vector<std::vector<double>> per_user = sample_user_snrs(rng, cfg);
    for (int k = 0; k < K; ++k)
        for (int m = 0; m < M; ++m)
            out[static_cast<std::size_t>(k) * M + m] =
                per_user[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
}

void process_drop(const SystemConfig& cfg, const PreparedScheme& scheme,
                  const std::vector<double>& snr, DropRecord& out) {
    int K = cfg.K;
    int M = cfg.M;
    if (snr.size() != static_cast<std::size_t>(K) * M)
        throw std::invalid_argument("process_drop: SNR matrix has the wrong shape");
    out.n_users = K;
    out.n_beams = M;
    out.snr = snr;
    out.events.clear();
    out.scheduled.assign(static_cast<std::size_t>(M), -1);
    out.beam_rate.assign(static_cast<std::size_t>(M), 0.0);
    out.sum_rate = 0.0;
    out.fb_bits = 0.0;

    bool exact = scheme.spec.kind == SchemeKind::FullCSI || scheme.spec.exact_report;
    const std::vector<double>& thr = scheme.quant.thresholds;

    for (int k = 0; k < K; ++k) {
        double cutoff = scheme.user_threshold[static_cast<std::size_t>(k)];
        int beam_lo = 0;
        int beam_hi = M;
        if (scheme.spec.report_policy == ReportPolicy::BestBeam) {
            int best = 0;
            for (int m = 1; m < M; ++m)
                if (snr[static_cast<std::size_t>(k) * M + m] >
                    snr[static_cast<std::size_t>(k) * M + best])
                    best = m;
            beam_lo = best;
            beam_hi = best + 1;
        }
        for (int m = beam_lo; m < beam_hi; ++m) {
            double v = snr[static_cast<std::size_t>(k) * M + m];
            bool pass = scheme.cutoff_strict ? v > cutoff : v >= cutoff;
            if (!pass) continue;
            FeedbackEvent ev{k, m, -1, -1, 0, v};
            if (scheme.spec.kind != SchemeKind::FullCSI) {
                ev.region = region_of(thr, v);
                ev.level = scheme.quant.cell_of(ev.region, v);
                ev.bits = scheme.quant.bits[static_cast<std::size_t>(ev.region)];
                if (scheme.plan.n_clusters() > 0) ev.bits += scheme.plan.region_bits;
                if (!exact)
                    ev.reported = scheme.quant.levels[static_cast<std::size_t>(ev.region)]
                                                     [static_cast<std::size_t>(ev.level)];
            }
            out.fb_bits += ev.bits;
            out.events.push_back(ev);
        }
    }

    // events arrive in user order; strict > keeps the smaller user on ties
    std::vector<double> best_rep(static_cast<std::size_t>(M), -1.0);
    for (const FeedbackEvent& ev : out.events) {
        std::size_t m = static_cast<std::size_t>(ev.beam);
        if (ev.reported > best_rep[m]) {
            best_rep[m] = ev.reported;
            out.scheduled[m] = ev.user;
        }
    }

    for (int m = 0; m < M; ++m) {
        int u = out.scheduled[static_cast<std::size_t>(m)];
        if (u < 0) continue;
        double value = scheme.spec.rate_on_reported && !exact
                           ? best_rep[static_cast<std::size_t>(m)]
                           : snr[static_cast<std::size_t>(u) * M + m];
        out.beam_rate[static_cast<std::size_t>(m)] = std::log2(1.0 + value);
        out.sum_rate += out.beam_rate[static_cast<std::size_t>(m)];
    }
}

DropRecord run_drop(const SystemConfig& cfg, const PreparedScheme& scheme, Rng& rng,
                    SnrSource source) {
    DropRecord rec;
    std::vector<double> snr;
    sample_drop_snrs(cfg, rng, source, snr);
    process_drop(cfg, scheme, snr, rec);
    return rec;
}

SchemeResult simulate(const SystemConfig& cfg, const PreparedScheme& scheme,
                      long n_drops, std::uint64_t seed, int workers, SnrSource source) {
    if (n_drops < 1) throw std::invalid_argument("n_drops must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    std::vector<double> rate(static_cast<std::size_t>(n_drops));
    std::vector<double> bits(static_cast<std::size_t>(n_drops));

    auto work = [&](long d0, long d1) {
        DropRecord rec;
        std::vector<double> snr;
        for (long d = d0; d < d1; ++d) {
            Rng rng(derive_stream(seed, static_cast<std::uint64_t>(d)));
            sample_drop_snrs(cfg, rng, source, snr);
            process_drop(cfg, scheme, snr, rec);
            rate[static_cast<std::size_t>(d)] = rec.sum_rate;
            bits[static_cast<std::size_t>(d)] = rec.fb_bits;
        }
    };

    int w = static_cast<int>(std::min<long>(workers, n_drops));
    if (w <= 1) {
        work(0, n_drops);
    } else {
        std::vector<std::thread> pool;
        long chunk = (n_drops + w - 1) / w;
        for (int i = 0; i < w; ++i) {
            long d0 = i * chunk;
            long d1 = std::min(n_drops, d0 + chunk);
            if (d0 >= d1) break;
            pool.emplace_back(work, d0, d1);
        }
        for (std::thread& t : pool) t.join();
    }

    // sequential drop-order reduction keeps results worker-count independent
    SchemeResult res;
    res.n_drops = n_drops;
    res.seed = seed;
    double sr = 0.0, sr2 = 0.0, sb = 0.0, sb2 = 0.0;
    for (long d = 0; d < n_drops; ++d) {
        sr += rate[static_cast<std::size_t>(d)];
        sr2 += rate[static_cast<std::size_t>(d)] * rate[static_cast<std::size_t>(d)];
        sb += bits[static_cast<std::size_t>(d)];
        sb2 += bits[static_cast<std::size_t>(d)] * bits[static_cast<std::size_t>(d)];
    }
    double n = static_cast<double>(n_drops);
    res.sum_rate = sr / n;
    res.fb_bits = sb / n;
    if (n_drops > 1) {
        res.sum_rate_se = std::sqrt(std::max(0.0, (sr2 - n * res.sum_rate * res.sum_rate) /
                                                      (n * (n - 1.0))));
        res.fb_bits_se = std::sqrt(std::max(0.0, (sb2 - n * res.fb_bits * res.fb_bits) /
                                                     (n * (n - 1.0))));
    }
    return res;
}

} // namespace clusterfb

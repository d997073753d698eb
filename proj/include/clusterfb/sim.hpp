#pragma once
// Monte Carlo scheduling engine: realizes per-user per-beam SNRs, applies a
// feedback scheme, schedules each beam to the strongest reported value, and
// accumulates sum-rate and feedback-bit statistics.

#include <cstdint>
#include <string>
#include <vector>

#include "clusterfb/quantization.hpp"
#include "clusterfb/rng.hpp"
#include "clusterfb/system_config.hpp"
#include "clusterfb/thresholds.hpp"

namespace clusterfb {

enum class SchemeKind { FullCSI, Conventional, SingleThreshold, ClusterType1, ClusterType2 };

// Which cutoff a cluster-scheme user compares against before reporting:
// its own cluster's threshold, or the smallest threshold (the analysis
// formulas are written against the latter).
enum class ThresholdPolicy { OwnCluster, MinThreshold };

// BestBeam: each user considers only the beam where its SNR peaks.
// AllBeams: each user competes on every beam that clears its cutoff.
enum class ReportPolicy { BestBeam, AllBeams };

// Analytic: per-beam SNRs drawn directly from their exponential marginals.
// Matrix: full channel + precoder draw with zero-forcing reception.
enum class SnrSource { Analytic, Matrix };

const char* scheme_name(SchemeKind kind);

struct SchemeSpec {
    SchemeKind kind = SchemeKind::FullCSI;
    int quant_bits = 3;      // Conventional / SingleThreshold level bits
    double p_out = 0.1;      // SingleThreshold outage target
    int n_clusters = 4;      // cluster schemes
    int b_max = 6;           // per-region cap in the bit search
    double budget = 0.8;     // per-user average quantization-bit budget
    ThresholdPolicy threshold_policy = ThresholdPolicy::OwnCluster;
    ReportPolicy report_policy = ReportPolicy::BestBeam;
    bool exact_report = false;      // schedule on true values; quantizers only count bits
    bool rate_on_reported = false;  // realized rate uses the reconstruction level
};

// r with P(max SNR < r) = p_out, found by bisection to 1e-10.
double single_threshold_level(const std::vector<double>& rates, double p_out);

// Everything a drop needs, derived once per (config, scheme).
struct PreparedScheme {
    SchemeSpec spec;
    std::string name;
    std::vector<double> rates;          // per-user exponential rates
    ClusterPlan plan;                   // cluster schemes only
    QuantizerSet quant;                 // per-region levels (baselines: one region)
    std::vector<double> user_threshold; // per-user report cutoff
    bool cutoff_strict = false;         // report requires SNR > cutoff instead of >=
    double r_min = 0.0;                 // smallest threshold / r_th / 0
    double loss_bound = 0.0;            // rate-loss bound, cluster schemes
    double analytic_load = 0.0;         // budget-based expected bits per drop
    double analytic_load_exact = 0.0;   // allocation-based expected bits per drop
};

PreparedScheme prepare_scheme(const SystemConfig& cfg, const SchemeSpec& spec);

struct FeedbackEvent {
    int user;
    int beam;
    int region;      // -1 when the scheme has no regions (FullCSI)
    int level;       // -1 for exact reports
    int bits;
    double reported; // value scheduling compares
};

struct DropRecord {
    int n_users = 0;
    int n_beams = 0;
    std::vector<double> snr;       // true SNRs, snr[user * n_beams + beam]
    std::vector<FeedbackEvent> events;
    std::vector<int> scheduled;    // per beam, user id or -1 for idle
    std::vector<double> beam_rate; // realized rate per beam
    double sum_rate = 0.0;
    double fb_bits = 0.0;
};

// Fills out.snr with one realization in a fixed consumption order, so equal
// seeds give equal draws across schemes.
void sample_drop_snrs(const SystemConfig& cfg, Rng& rng, SnrSource source,
                      std::vector<double>& out);

// Feedback, scheduling, and accounting on an already-sampled SNR matrix.
void process_drop(const SystemConfig& cfg, const PreparedScheme& scheme,
                  const std::vector<double>& snr, DropRecord& out);

DropRecord run_drop(const SystemConfig& cfg, const PreparedScheme& scheme, Rng& rng,
                    SnrSource source = SnrSource::Analytic);

struct SchemeResult {
    double sum_rate = 0.0;
    double sum_rate_se = 0.0;
    double fb_bits = 0.0;
    double fb_bits_se = 0.0;
    long n_drops = 0;
    std::uint64_t seed = 0;
};

// Per-drop streams are derived from (seed, drop index) and per-drop values
// are reduced in drop order, so the result is bit-identical for any worker
// count.
SchemeResult simulate(const SystemConfig& cfg, const PreparedScheme& scheme,
                      long n_drops, std::uint64_t seed, int workers = 1,
                      SnrSource source = SnrSource::Analytic);

} // namespace clusterfb

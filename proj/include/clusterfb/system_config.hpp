#pragma once
// System-level parameters of the downlink: antenna counts, user count,
// transmit power, noise level, per-user channel variances.

#include <stdexcept>
#include <string>
#include <vector>

namespace clusterfb {

struct SystemConfig {
    int M = 4;                        // transmit antennas / beams
    int N = 4;                        // receive antennas per user, N >= M
    int K = 1;                        // number of users
    double P = 10.0;                  // total transmit power
    double noise_var = 1.0;           // per-antenna noise variance
    std::vector<double> channel_vars; // K entries, all > 0

    void validate() const {
        if (M < 1) throw std::invalid_argument("system.M must be >= 1");
        if (N < M) throw std::invalid_argument("system.N must be >= system.M");
        if (K < 1) throw std::invalid_argument("system.K must be >= 1");
        if (!(P > 0.0)) throw std::invalid_argument("system.P must be > 0");
        if (!(noise_var > 0.0)) throw std::invalid_argument("system.noise_var must be > 0");
        if (static_cast<int>(channel_vars.size()) != K)
            throw std::invalid_argument("system.channel_vars must have K entries");
        for (double v : channel_vars)
            if (!(v > 0.0)) throw std::invalid_argument("system.channel_vars entries must be > 0");
    }
};

// Per-beam SNR of user k is exponential; this is its rate parameter.
inline double lambda_from_config(const SystemConfig& cfg, int k) {
    if (k < 0 || k >= cfg.K)
        throw std::invalid_argument("lambda_from_config: user index out of range");
    double var = cfg.channel_vars.at(static_cast<std::size_t>(k));
    if (!(var > 0.0)) throw std::invalid_argument("system.channel_vars entries must be > 0");
    return static_cast<double>(cfg.M) * cfg.noise_var / (cfg.P * var);
}

inline std::vector<double> lambdas_from_config(const SystemConfig& cfg) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) out.push_back(lambda_from_config(cfg, k));
    return out;
}

} // namespace clusterfb

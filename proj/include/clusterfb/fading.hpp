#pragma once
// Channel sampling: Rayleigh MIMO channels, Haar-distributed beamforming
// matrices, and the per-beam zero-forcing SNR at each receiver.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "clusterfb/rng.hpp"
#include "clusterfb/system_config.hpp"

namespace clusterfb {

using CMatrix = Eigen::MatrixXcd;

// N x M matrix with i.i.d. CN(0, var) entries (variance per complex entry).
CMatrix sample_channel(Rng& rng, int n_rx, int n_tx, double var);

// Haar-distributed M x M unitary matrix (QR of a complex Ginibre matrix
// with the phase convention fixed so the result is exactly Haar).
CMatrix sample_unitary(Rng& rng, int m);

// Per-beam SNR after zero-forcing reception of H * Q with total power P
// split across M beams and noise variance noise_var. Returns one value per
// beam, or nullopt when the effective channel is numerically rank deficient.
std::optional<std::vector<double>> zf_snr(const CMatrix& H, const CMatrix& Q,
                                          double P, double noise_var);

// Per-beam SNRs for every user in one channel use. Rank-deficient draws are
// resampled (they have probability zero; this only guards degenerate inputs).
std::vector<std::vector<double>> sample_user_snrs(Rng& rng, const SystemConfig& cfg);

} // namespace clusterfb

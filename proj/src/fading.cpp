#include "clusterfb/fading.hpp"

#include <cmath>
#include <stdexcept>

namespace clusterfb {

CMatrix sample_channel(Rng& rng, int n_rx, int n_tx, double var) {
    if (n_rx < 1 || n_tx < 1) throw std::invalid_argument("matrix dimensions must be >= 1");
    if (!(var > 0.0)) throw std::invalid_argument("variance must be > 0");
    double s = std::sqrt(0.5 * var); // per real component
    CMatrix H(n_rx, n_tx);
    for (int i = 0; i < n_rx; ++i)
        for (int j = 0; j < n_tx; ++j) {
            double re = s * rng.normal();
            double im = s * rng.normal();
            H(i, j) = std::complex<double>(re, im);
        }
    return H;
}

CMatrix sample_unitary(Rng& rng, int m) {
    if (m < 1) throw std::invalid_argument("dimension must be >= 1");
    // QR of a complex Ginibre matrix; rescaling each column of Q by the
    // phase of the matching diagonal of R makes the factorization unique
    // (R diagonal real positive), which is what yields the Haar measure.
    CMatrix Z = sample_channel(rng, m, m, 1.0);
    Eigen::HouseholderQR<CMatrix> qr(Z);
    CMatrix Q = qr.householderQ() * CMatrix::Identity(m, m);
    CMatrix R = qr.matrixQR();
    for (int j = 0; j < m; ++j) {
        std::complex<double> d = R(j, j);
        double mag = std::abs(d);
        Q.col(j) *= mag > 0.0 ? d / mag : std::complex<double>(1.0, 0.0);
    }
    return Q;
}

std::optional<std::vector<double>> zf_snr(const CMatrix& H, const CMatrix& Q,
                                          double P, double noise_var) {
    if (H.cols() != Q.rows() || Q.rows() != Q.cols())
        throw std::invalid_argument("zf_snr: incompatible shapes");
    if (H.rows() < H.cols()) throw std::invalid_argument("zf_snr: need rows >= cols");
    if (!(P > 0.0) || !(noise_var > 0.0))
        throw std::invalid_argument("zf_snr: power and noise must be > 0");
    int M = static_cast<int>(Q.cols());
    CMatrix A = H * Q;
    CMatrix G = A.adjoint() * A;
    Eigen::LLT<CMatrix> llt(G);
    if (llt.info() != Eigen::Success) return std::nullopt;
    CMatrix Ginv = llt.solve(CMatrix::Identity(M, M));
    std::vector<double> snr(static_cast<std::size_t>(M));
    double scale = P / M / noise_var;
    for (int m = 0; m < M; ++m) {
        double d = Ginv(m, m).real();
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        snr[static_cast<std::size_t>(m)] = scale / d;
    }
    return snr;
}

std::vector<std::vector<double>> sample_user_snrs(Rng& rng, const SystemConfig& cfg) {
    cfg.validate();
    CMatrix W = sample_unitary(rng, cfg.M);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        for (;;) {
            CMatrix H = sample_channel(rng, cfg.N, cfg.M,
                                       cfg.channel_vars[static_cast<std::size_t>(k)]);
            auto snr = zf_snr(H, W, cfg.P, cfg.noise_var);
            if (snr) {
                out.push_back(std::move(*snr));
                break;
            }
        }
    }
    return out;
}

} // namespace clusterfb

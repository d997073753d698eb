#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "clusterfb/fading.hpp"
#include "clusterfb/rng.hpp"
#include "clusterfb/system_config.hpp"
#include "test_util.hpp"

using namespace clusterfb;

TEST_CASE("sampled beamforming matrices are unitary") {
    Rng rng(derive_stream(101, 1));
    for (int m : {1, 2, 4, 6}) {
        for (int it = 0; it < 5; ++it) {
            CMatrix Q = sample_unitary(rng, m);
            CMatrix err = Q.adjoint() * Q - CMatrix::Identity(m, m);
            CHECK(err.cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("channel entries have the requested second moment") {
    Rng rng(derive_stream(102, 1));
    const double var = 0.7;
    double acc = 0.0;
    long n = 0;
    std::vector<double> re;
    for (int it = 0; it < 2000; ++it) {
        CMatrix H = sample_channel(rng, 4, 4, var);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                acc += std::norm(H(i, j));
                re.push_back(H(i, j).real());
                ++n;
            }
    }
    CHECK(acc / static_cast<double>(n) == doctest::Approx(var).epsilon(0.02));
    // real parts are N(0, var/2)
    auto ms = testutil::mean_se(re);
    CHECK(std::fabs(ms.mean) < 4.0 * ms.se);
}

TEST_CASE("zero-forcing SNR is invariant to receive rotations and beam phases") {
    Rng rng(derive_stream(103, 1));
    const double P = 10.0, noise = 1.0;
    for (int it = 0; it < 10; ++it) {
        CMatrix H = sample_channel(rng, 4, 4, 1.0);
        CMatrix Q = sample_unitary(rng, 4);
        auto base = zf_snr(H, Q, P, noise);
        REQUIRE(base.has_value());

        CMatrix U = sample_unitary(rng, 4);
        auto rotated = zf_snr(U * H, Q, P, noise);
        REQUIRE(rotated.has_value());
        for (int m = 0; m < 4; ++m)
            CHECK((*rotated)[static_cast<std::size_t>(m)] ==
                  doctest::Approx((*base)[static_cast<std::size_t>(m)]).epsilon(1e-8));

        CMatrix Qp = Q;
        Qp.col(2) *= std::polar(1.0, 1.234);
        auto phased = zf_snr(H, Qp, P, noise);
        REQUIRE(phased.has_value());
        for (int m = 0; m < 4; ++m)
            CHECK((*phased)[static_cast<std::size_t>(m)] ==
                  doctest::Approx((*base)[static_cast<std::size_t>(m)]).epsilon(1e-8));
    }
}

TEST_CASE("rank-deficient effective channels are rejected") {
    CMatrix H = CMatrix::Zero(4, 4);
    CMatrix Q = CMatrix::Identity(4, 4);
    CHECK_FALSE(zf_snr(H, Q, 10.0, 1.0).has_value());
}

TEST_CASE("zero-forcing SNR per beam is exponential with the derived rate") {
    SystemConfig cfg;
    cfg.M = 2;
    cfg.N = 2;
    cfg.K = 1;
    cfg.P = 10.0;
    cfg.noise_var = 1.0;
    cfg.channel_vars = {0.6};
    const double lambda = lambda_from_config(cfg, 0);

    Rng rng(derive_stream(104, 1));
    std::vector<double> sample, other_beam;
    sample.reserve(100000);
    other_beam.reserve(100000);
    for (int it = 0; it < 100000; ++it) {
        auto snrs = sample_user_snrs(rng, cfg);
        REQUIRE(snrs.size() == 1);
        REQUIRE(snrs[0].size() == 2);
        sample.push_back(snrs[0][0]);
        other_beam.push_back(snrs[0][1]);
    }
    double d = testutil::ks_statistic(
        sample, [&](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); });
    CHECK(d < testutil::ks_critical_1pct(sample.size()));

    auto ms = testutil::mean_se(other_beam);
    CHECK(std::fabs(ms.mean - 1.0 / lambda) < 4.0 * ms.se);
}

TEST_CASE("square four-beam system also matches the exponential marginal") {
    SystemConfig cfg;
    cfg.M = 4;
    cfg.N = 4;
    cfg.K = 1;
    cfg.P = 10.0;
    cfg.noise_var = 1.0;
    cfg.channel_vars = {1.0};
    const double lambda = lambda_from_config(cfg, 0);

    Rng rng(derive_stream(105, 1));
    std::vector<double> sample;
    sample.reserve(30000);
    for (int it = 0; it < 30000; ++it) {
        auto snrs = sample_user_snrs(rng, cfg);
        sample.push_back(snrs[0][3]);
    }
    double d = testutil::ks_statistic(
        sample, [&](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-lambda * x); });
    CHECK(d < testutil::ks_critical_1pct(sample.size()));
}

TEST_CASE("uniform and exponential generators behave") {
    Rng rng(derive_stream(106, 1));
    std::vector<double> us;
    for (int i = 0; i < 200000; ++i) {
        double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        us.push_back(u);
    }
    double d = testutil::ks_statistic(us, [](double x) { return x; });
    CHECK(d < testutil::ks_critical_1pct(us.size()));

    std::vector<double> es;
    const double rate = 1.7;
    for (int i = 0; i < 200000; ++i) es.push_back(rng.exponential(rate));
    double de = testutil::ks_statistic(
        es, [&](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); });
    CHECK(de < testutil::ks_critical_1pct(es.size()));
    auto ms = testutil::mean_se(es);
    CHECK(std::fabs(ms.mean - 1.0 / rate) < 4.0 * ms.se);

    // open-interval variant never returns an exact endpoint
    for (int i = 0; i < 100000; ++i) {
        double u = rng.uniform01_open();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("derived streams with different labels decorrelate") {
    Rng a(derive_stream(7, 1)), b(derive_stream(7, 2));
    int agree = 0;
    for (int i = 0; i < 1000; ++i) agree += a.bits() == b.bits() ? 1 : 0;
    CHECK(agree == 0);
    // same label reproduces the stream
    Rng c(derive_stream(7, 1)), d(derive_stream(7, 1));
    for (int i = 0; i < 100; ++i) CHECK(c.bits() == d.bits());
}

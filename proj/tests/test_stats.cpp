#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sublin/numeric.hpp"
#include "sublin/rng.hpp"
#include "sublin/stats.hpp"

using namespace sublin;

namespace {
const GParams kBand = GParams::make(0.5, 1.0);
const GParams kUnit = GParams::make(1.0, 1.0);

PathBatch zero_batch(std::size_t steps, std::size_t paths) {
    PathBatch b;
    b.params = kUnit;
    b.n_paths = paths;
    b.n_steps = steps;
    b.increments.assign(paths * steps, 0.0);
    b.sigma_trace.assign(paths * steps, 1.0);
    return b;
}
}  // namespace

TEST_CASE("normalizers: classical band gives B_n = sqrt(n)") {
    auto seq = normalizers(kUnit, 16);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(seq.b2[i] == static_cast<double>(i + 1));
        CHECK(seq.b[i] == std::sqrt(static_cast<double>(i + 1)));
    }
}

TEST_CASE("normalizers: sigma_mid arithmetic and the telescoping identity") {
    auto seq = normalizers(kBand, 8);
    CHECK(seq.sigma_mid[0] == 0.75);
    CHECK(seq.b[3] == 1.5);  // B_4 = 0.75 * 2

    for (std::size_t i = 1; i < seq.size(); ++i) {
        CHECK(seq.b2[i] - seq.b2[i - 1] == seq.sigma_mid[i] * seq.sigma_mid[i]);
        CHECK(seq.b[i] > seq.b[i - 1]);
    }
}

TEST_CASE("w_sequence: zeros, tiny hand case, length guard") {
    auto wz = w_sequence(zero_batch(8, 3), normalizers(kUnit, 8));
    for (const auto& path : wz)
        for (double w : path) CHECK(w == 0.0);

    PathBatch b = zero_batch(2, 1);
    b.increments = {1.0, -1.0};
    auto w = w_sequence(b, normalizers(kUnit, 2));
    CHECK(w[0][0] == 1.0);
    CHECK(w[0][1] == 0.0);

    CHECK_THROWS_WITH_AS(w_sequence(b, normalizers(kUnit, 1)), "length mismatch",
                         std::invalid_argument);
}

TEST_CASE("w_sequence: variance of W_n is ~1 for classical rademacher") {
    auto batch = sample_batch(StrategySpec::parse("const_hi/rademacher"), kUnit, 1000, 10000, 21);
    auto w = w_sequence(batch, normalizers(kUnit, 1000));
    double acc = 0.0;
    for (const auto& path : w) acc += path[999] * path[999];
    CHECK(std::abs(acc / 1e4 - 1.0) < 0.05);
}

TEST_CASE("log_average of a constant tracks H_n / log n") {
    const double c = -2.5;
    auto f = make_constant(c);
    std::vector<double> w(1 << 14, 0.0);

    const double a10 = log_average(f, w, 10);
    const double want10 = c * oracle::harmonic(10) / std::log(10.0);
    CHECK(a10 == doctest::Approx(want10).epsilon(1e-13));
    CHECK(a10 / c == doctest::Approx(1.272039).epsilon(1e-5));

    // H_n / log n -> 1
    const double a_big = log_average(f, w, 1 << 14);
    CHECK(std::abs(a_big / c - 1.0) < 0.07);
    CHECK(std::abs(a_big / c - 1.0) < std::abs(a10 / c - 1.0));

    CHECK_THROWS(log_average(f, w, 1));
}

TEST_CASE("log_average bound and linearity") {
    CounterRng rng(31, 0, 0);
    std::vector<double> w(512);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 3.0 * (rng.uniform(k) - 0.5);

    auto f = make_cosine(1.0);
    auto g = make_ramp(1.0);
    for (std::size_t n : {2ul, 17ul, 512ul}) {
        const double an = log_average(f, w, n);
        CHECK(std::abs(an) <=
              f.bound * oracle::harmonic(n) / std::log(static_cast<double>(n)) + 1e-12);
        // linearity on shared paths
        const double combo = log_average(combine(2.0, f, -3.0, g), w, n);
        CHECK(combo ==
              doctest::Approx(2.0 * log_average(f, w, n) - 3.0 * log_average(g, w, n)).epsilon(1e-12));
    }
}

TEST_CASE("centered_xi: constants vanish, bound holds, missing refs rejected") {
    auto f = make_constant(3.0);
    std::vector<double> w(16, 0.5);
    std::vector<double> refs(16, 3.0);
    auto xi = centered_xi(f, w, refs);
    for (double v : xi) CHECK(v == 0.0);

    auto g = make_cosine(1.0);
    std::vector<double> refs2(16, 0.2);
    auto xi2 = centered_xi(g, w, refs2);
    for (double v : xi2) CHECK(std::abs(v) <= 2.0 * g.bound);

    std::vector<double> shortrefs(8, 0.0);
    CHECK_THROWS(centered_xi(g, w, shortrefs));
}

TEST_CASE("blocks: index ranges, harmonic values, reconstruction") {
    // Z_1 sums k in {1,2,3}
    std::vector<double> xi(3, 1.0);
    auto dec = blocks(xi);
    CHECK(dec.n_blocks() == 1);
    CHECK(dec.z[0] == doctest::Approx(oracle::harmonic(3)).epsilon(1e-15));

    // xi = 1: T_N = H_{4^N - 1}
    std::vector<double> xi3((1 << 6) - 1, 1.0);  // 4^3 - 1 = 63
    auto dec3 = blocks(xi3);
    CHECK(dec3.n_blocks() == 3);
    CHECK(dec3.t[2] == doctest::Approx(oracle::harmonic(63)).epsilon(1e-14));

    // partial sums telescope by construction
    CHECK(dec3.t[0] == dec3.z[0]);

    // exact reconstruction for random xi under the fixed summation order
    CounterRng rng(77, 0, 0);
    std::vector<double> xr(255);
    for (std::size_t k = 0; k < xr.size(); ++k) xr[k] = 2.0 * rng.uniform(k) - 1.0;
    auto decr = blocks(xr);
    CompensatedSum flat;
    for (std::size_t k = 1; k <= xr.size(); ++k) flat.add(xr[k - 1] / static_cast<double>(k));
    CHECK(decr.t[3] == flat.value());
}

TEST_CASE("blocks rejects incomplete final blocks with the required length") {
    std::vector<double> xi(10, 0.0);
    CHECK_THROWS_WITH_AS(blocks(xi), "incomplete final block: need length 15, got 10",
                         std::invalid_argument);
    std::vector<double> empty;
    CHECK_THROWS(blocks(empty));
}

TEST_CASE("d_statistic: constants, linear ramp, window guard, triangle bound") {
    std::vector<double> t_const(36, 2.0);
    for (double d : d_statistic(t_const, 5)) CHECK(d == 0.0);

    std::vector<double> t_lin(24);
    for (std::size_t k = 1; k <= t_lin.size(); ++k) t_lin[k - 1] = static_cast<double>(k);
    auto d = d_statistic(t_lin, 3);
    CHECK(d[1] == 4.0);  // n=2: max over k in [4,9) of |k - 4|

    CHECK_THROWS_WITH_AS(d_statistic(t_lin, 5), "window exceeds sequence", std::invalid_argument);

    // |T_k / k| <= |T_{n^2}|/n^2 + D_n/n^2 on each window
    CounterRng rng(13, 0, 0);
    std::vector<double> t(80);
    double acc = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        acc += rng.uniform(k) - 0.5;
        t[k] = acc;
    }
    auto dr = d_statistic(t, 7);
    for (std::size_t n = 1; n <= 7; ++n) {
        const double base = std::abs(t[n * n - 1]) / static_cast<double>(n * n);
        for (std::size_t k = n * n; k < (n + 1) * (n + 1); ++k)
            CHECK(std::abs(t[k - 1]) / static_cast<double>(k) <=
                  base + dr[n - 1] / static_cast<double>(n * n) + 1e-15);
    }
}

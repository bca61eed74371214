#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sublin/params.hpp"
#include "sublin/sampler.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

// Per-step band midpoints sigma_i = (sigma_lo+sigma_hi)/2 and the
// normalizers B_n = sqrt(sum_{i<=n} sigma_i^2). b2 holds the prefix sums,
// so b2[n] - b2[n-1] == sigma_mid[n]^2 holds bit-for-bit by construction.
struct NormalizerSeq {
    std::vector<double> sigma_mid;  // sigma_i, i = 1..n (index 0 is i=1)
    std::vector<double> b2;         // B_i^2 prefix sums
    std::vector<double> b;          // B_i

    [[nodiscard]] std::size_t size() const { return b.size(); }
};

NormalizerSeq normalizers(const GParams& params, std::size_t n);

// W_k = S_k / B_k per path; S accumulated in ascending step order with
// compensation.
std::vector<std::vector<double>> w_sequence(const PathBatch& batch, const NormalizerSeq& norm);

// A_n = (1/log n) * sum_{k<=n} f(W_k)/k, ascending k, compensated.
// Requires n >= 2.
double log_average(const TestFunction& f, std::span<const double> w_path, std::size_t n);

// xi_k = f(W_k) - reference_means[k-1]. Throws if a reference index is
// missing.
std::vector<double> centered_xi(const TestFunction& f, std::span<const double> w_path,
                                std::span<const double> reference_means);

// Z_l = sum_{4^{l-1} <= k < 4^l} xi_k / k and T_n = sum_{l<=n} Z_l.
// xi must cover k = 1 .. 4^N - 1 exactly; anything else is rejected with
// the required length in the message.
struct BlockDecomposition {
    std::vector<double> z;  // Z_1 .. Z_N
    std::vector<double> t;  // T_1 .. T_N

    [[nodiscard]] std::size_t n_blocks() const { return z.size(); }
};

BlockDecomposition blocks(std::span<const double> xi);

// D_n = max_{n^2 <= k < (n+1)^2} |T_k - T_{n^2}| for n = 1..n_max.
// t_seq[k-1] holds T_k; requires (n_max+1)^2 - 1 <= t_seq.size().
std::vector<double> d_statistic(std::span<const double> t_seq, std::size_t n_max);

}  // namespace sublin

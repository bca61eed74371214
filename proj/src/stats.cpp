#include "sublin/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sublin/numeric.hpp"

namespace sublin {

NormalizerSeq normalizers(const GParams& params, std::size_t n) {
    params.validate();
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    NormalizerSeq seq;
    seq.sigma_mid.assign(n, params.sigma_mid());
    seq.b2.resize(n);
    seq.b.resize(n);
    double acc = 0.0;
    const double s2 = params.sigma_mid() * params.sigma_mid();
    for (std::size_t i = 0; i < n; ++i) {
        acc += s2;
        seq.b2[i] = acc;
        seq.b[i] = std::sqrt(acc);
    }
    return seq;
}

std::vector<std::vector<double>> w_sequence(const PathBatch& batch, const NormalizerSeq& norm) {
    if (norm.size() < batch.n_steps) throw std::invalid_argument("length mismatch");
    std::vector<std::vector<double>> out(batch.n_paths);
    for (std::size_t p = 0; p < batch.n_paths; ++p) {
        auto& w = out[p];
        w.resize(batch.n_steps);
        CompensatedSum s;
        for (std::size_t k = 0; k < batch.n_steps; ++k) {
            s.add(batch.increment(p, k));
            w[k] = s.value() / norm.b[k];
        }
    }
    return out;
}

double log_average(const TestFunction& f, std::span<const double> w_path, std::size_t n) {
    if (n < 2) throw std::invalid_argument("log_average requires n >= 2");
    if (w_path.size() < n) throw std::invalid_argument("length mismatch");
    CompensatedSum s;
    for (std::size_t k = 1; k <= n; ++k) s.add(f(w_path[k - 1]) / static_cast<double>(k));
    return s.value() / std::log(static_cast<double>(n));
}

std::vector<double> centered_xi(const TestFunction& f, std::span<const double> w_path,
                                std::span<const double> reference_means) {
    if (reference_means.size() < w_path.size())
        throw std::invalid_argument("missing reference index " +
                                    std::to_string(reference_means.size() + 1));
    std::vector<double> xi(w_path.size());
    for (std::size_t k = 0; k < w_path.size(); ++k) xi[k] = f(w_path[k]) - reference_means[k];
    return xi;
}

BlockDecomposition blocks(std::span<const double> xi) {
    // length must be 4^N - 1 for some N >= 1
    std::size_t n_blocks = 0;
    std::size_t len = 1;  // 4^n_blocks
    while (len - 1 < xi.size()) {
        len *= 4;
        ++n_blocks;
    }
    if (n_blocks == 0 || len - 1 != xi.size())
        throw std::invalid_argument("incomplete final block: need length " +
                                    std::to_string(len - 1) + ", got " +
                                    std::to_string(xi.size()));

    BlockDecomposition dec;
    dec.z.reserve(n_blocks);
    dec.t.reserve(n_blocks);
    CompensatedSum t_acc;
    std::size_t lo = 1;  // 4^{l-1}
    for (std::size_t l = 1; l <= n_blocks; ++l) {
        const std::size_t hi = lo * 4;  // 4^l
        CompensatedSum z_acc;
        for (std::size_t k = lo; k < hi; ++k) z_acc.add(xi[k - 1] / static_cast<double>(k));
        dec.z.push_back(z_acc.value());
        t_acc.add(z_acc.value());
        dec.t.push_back(t_acc.value());
        lo = hi;
    }
    return dec;
}

std::vector<double> d_statistic(std::span<const double> t_seq, std::size_t n_max) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if ((n_max + 1) * (n_max + 1) - 1 > t_seq.size())
        throw std::invalid_argument("window exceeds sequence");
    std::vector<double> d(n_max);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const std::size_t base = n * n;
        const double t_base = t_seq[base - 1];
        double m = 0.0;
        for (std::size_t k = base; k < (n + 1) * (n + 1); ++k)
            m = std::max(m, std::abs(t_seq[k - 1] - t_base));
        d[n - 1] = m;
    }
    return d;
}

}  // namespace sublin

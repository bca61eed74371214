#include "sublin/expectation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sublin/exact.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

void StatMatrix::validate() const {
    if (values.empty()) throw std::invalid_argument("empty family");
    if (!model_ids.empty() && model_ids.size() != values.size())
        throw std::invalid_argument("model id count does not match rows");
    const std::size_t n = values[0].size();
    if (n == 0) throw std::invalid_argument("empty family");
    for (const auto& row : values) {
        if (row.size() != n) throw std::invalid_argument("models must share the same path count");
        for (double v : row)
            if (!std::isfinite(v)) throw std::invalid_argument("non-finite statistic");
    }
}

namespace {

std::string model_name(const StatMatrix& m, std::size_t i) {
    return i < m.model_ids.size() ? m.model_ids[i] : "model" + std::to_string(i);
}

std::vector<ExactSum> exact_row_sums(const StatMatrix& m) {
    std::vector<ExactSum> sums(m.n_models());
    for (std::size_t i = 0; i < m.n_models(); ++i)
        for (double v : m.values[i]) sums[i].add(v);
    return sums;
}

std::size_t arg_max(const std::vector<ExactSum>& sums) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < sums.size(); ++i)
        if (sums[i].compare(sums[best]) > 0) best = i;
    return best;
}

double sample_std_error(const std::vector<double>& row, double mean) {
    if (row.size() < 2) return 0.0;
    CompensatedSum ss;
    for (double v : row) {
        const double d = v - mean;
        ss.add(d * d);
    }
    const double var = ss.value() / static_cast<double>(row.size() - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(row.size()));
}

}  // namespace

UpperExpectationEstimate upper_expect(const StatMatrix& stats) {
    stats.validate();
    const auto n = static_cast<std::int64_t>(stats.n_paths());
    const auto sums = exact_row_sums(stats);

    UpperExpectationEstimate est;
    est.n_paths = stats.n_paths();
    est.per_model.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        const double mean = sums[i].mean(n);
        est.per_model.push_back({model_name(stats, i), mean, sample_std_error(stats.values[i], mean)});
    }
    est.value = est.per_model[arg_max(sums)].mean;
    return est;
}

double lower_expect(const StatMatrix& stats) {
    stats.validate();
    StatMatrix neg = stats;
    for (auto& row : neg.values)
        for (double& v : row) v = -v;
    return -upper_expect(neg).value;
}

EventProbEstimate event_prob(const StatMatrix& indicators) {
    indicators.validate();
    const auto n = static_cast<std::int64_t>(indicators.n_paths());
    EventProbEstimate est;
    est.n_paths = indicators.n_paths();
    std::int64_t cmin = n + 1, cmax = -1;
    for (std::size_t i = 0; i < indicators.n_models(); ++i) {
        std::int64_t count = 0;
        for (double v : indicators.values[i]) {
            if (v != 0.0 && v != 1.0) throw std::invalid_argument("indicator entries must be 0 or 1");
            if (v == 1.0) ++count;
        }
        ExactSum s;
        s.add(static_cast<double>(count));
        const double freq = s.mean(n);
        est.per_model.push_back({model_name(indicators, i), freq,
                                 sample_std_error(indicators.values[i], freq)});
        cmin = std::min(cmin, count);
        cmax = std::max(cmax, count);
    }
    ExactSum smin, smax;
    smin.add(static_cast<double>(cmin));
    smax.add(static_cast<double>(cmax));
    est.lower = smin.mean(n);
    est.upper = smax.mean(n);
    return est;
}

AxiomReport check_axioms(const StatMatrix& x, const StatMatrix& y, double lambda, double c) {
    x.validate();
    y.validate();
    if (x.n_models() != y.n_models() || x.n_paths() != y.n_paths() || x.grid_id != y.grid_id)
        throw std::invalid_argument("paired evaluation required");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite and >= 0");
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite statistic");

    const auto n = static_cast<std::int64_t>(x.n_paths());
    const auto sx = exact_row_sums(x);
    const auto sy = exact_row_sums(y);
    const std::size_t mx = arg_max(sx);
    const std::size_t my = arg_max(sy);

    AxiomReport report;
    report.lambda = lambda;
    report.constant = c;

    // Monotonicity: max(X,Y) >= X pointwise, so its upper expectation
    // dominates both inputs'.
    {
        std::vector<ExactSum> sz(x.n_models());
        for (std::size_t i = 0; i < x.n_models(); ++i)
            for (std::size_t p = 0; p < x.n_paths(); ++p)
                sz[i].add(std::max(x.values[i][p], y.values[i][p]));
        const std::size_t mz = arg_max(sz);
        const bool pass = sz[mz].compare(sx[mx]) >= 0 && sz[mz].compare(sy[my]) >= 0;
        report.checks.push_back({"monotonicity", pass, sz[mz].mean(n),
                                 std::max(sx[mx].mean(n), sy[my].mean(n))});
    }

    // Constant preserving: the exact sum of n copies of c is n*c, and the
    // correctly rounded mean recovers c bit-for-bit.
    {
        ExactSum sc;
        for (std::int64_t p = 0; p < n; ++p) sc.add(c);
        const double mean = sc.mean(n);
        report.checks.push_back({"constant_preserving", mean == c, mean, c});
    }

    // Sub-additivity: max_m(Sx_m + Sy_m) <= max_m Sx_m + max_m Sy_m.
    {
        ExactSum best_sum;
        bool first = true;
        for (std::size_t i = 0; i < x.n_models(); ++i) {
            ExactSum s = sx[i];
            s.add(sy[i]);
            if (first || s.compare(best_sum) > 0) {
                best_sum = std::move(s);
                first = false;
            }
        }
        ExactSum rhs = sx[mx];
        rhs.add(sy[my]);
        report.checks.push_back({"sub_additivity", best_sum.compare(rhs) <= 0,
                                 best_sum.mean(n), sx[mx].mean(n) + sy[my].mean(n)});
    }

    // Positive homogeneity: the scaled statistic's per-model sums are
    // lambda*Sx_m exactly, and max commutes with nonnegative scaling.
    {
        std::vector<ExactSum> sl(x.n_models());
        for (std::size_t i = 0; i < x.n_models(); ++i) sl[i] = ExactSum::scaled(sx[i], lambda);
        const std::size_t ml = arg_max(sl);
        const bool pass = sl[ml].equals_scaled(sx[mx], lambda);
        report.checks.push_back({"positive_homogeneity", pass, sl[ml].mean(n),
                                 ExactSum::scaled(sx[mx], lambda).mean(n)});
    }

    report.all_pass = true;
    for (const auto& chk : report.checks) report.all_pass = report.all_pass && chk.pass;
    return report;
}

}  // namespace sublin

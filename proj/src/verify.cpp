#include "sublin/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>

#include "sublin/expectation.hpp"
#include "sublin/gheat.hpp"
#include "sublin/numeric.hpp"
#include "sublin/parallel.hpp"
#include "sublin/rng.hpp"
#include "sublin/sampler.hpp"
#include "sublin/stats.hpp"

namespace sublin::verify {

namespace {

constexpr std::uint64_t kMainBank = 0;
constexpr std::uint64_t kRefBank = 1;
constexpr std::size_t kChunk = 16;
constexpr double kTrendFactor = 1.5;  // "last <= 1.5 x median" trend checks

struct Plan {
    std::vector<StrategySpec> strategies;
    std::vector<TestFunction> functions;
};

Plan make_plan(const ExperimentConfig& cfg) {
    Plan plan;
    for (const auto& s : cfg.strategies) plan.strategies.push_back(StrategySpec::parse(s));
    for (const auto& f : cfg.functions) plan.functions.push_back(parse_function(f));
    return plan;
}

// One path's normalized partial sums W_k = S_k / B_k, streamed.
struct WStream {
    ScenarioCursor cur;
    CompensatedSum s;
    double b2 = 0.0;
    double mid2;

    WStream(const StrategySpec& st, const GParams& p, std::uint64_t seed, std::uint64_t bank,
            std::uint64_t path)
        : cur(st, p, seed, bank, path), mid2(p.sigma_mid() * p.sigma_mid()) {}

    double next() {
        s.add(cur.next().increment);
        b2 += mid2;
        return s.value() / std::sqrt(b2);
    }
};

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2) return 0.0;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

double se_from_moments(double sum, double sum2, std::int64_t n) {
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(sum2 / static_cast<double>(n) - mean * mean, 0.0);
    return std::sqrt(var / static_cast<double>(n));
}

std::string pair_stat(const char* prefix, std::int64_t j) {
    return std::string(prefix) + std::to_string(j);
}

// --- reference means -------------------------------------------------------

// Catalog-sup estimate of E f(W_k) from the independent reference bank,
// per k in 1..n_max; or the PDE limit replicated.
std::vector<double> reference_means_full(const ExperimentConfig& cfg, const Plan& plan,
                                         const TestFunction& f, std::size_t n_max) {
    std::vector<double> refs(n_max);
    if (cfg.reference_mode == ReferenceMode::pde_limit) {
        const double target = g_expect(f, cfg.params, 1.0, cfg.pde_tol);
        std::fill(refs.begin(), refs.end(), target);
        return refs;
    }
    std::vector<double> best(n_max, -std::numeric_limits<double>::infinity());
    const auto paths = static_cast<std::size_t>(cfg.n_paths);
    for (const auto& strat : plan.strategies) {
        std::vector<double> total(n_max, 0.0);
        chunked_reduce(
            paths, kChunk, cfg.jobs, [&] { return std::vector<double>(n_max, 0.0); },
            [&](std::vector<double>& part, std::size_t path) {
                WStream ws(strat, cfg.params, cfg.seed, kRefBank, path);
                for (std::size_t k = 0; k < n_max; ++k) part[k] += f(ws.next());
            },
            [&](const std::vector<double>& part) {
                for (std::size_t k = 0; k < n_max; ++k) total[k] += part[k];
            });
        for (std::size_t k = 0; k < n_max; ++k)
            best[k] = std::max(best[k], total[k] / static_cast<double>(paths));
    }
    return best;
}

// Same, but only at the grid points (ascending k values).
std::vector<double> reference_means_grid(const ExperimentConfig& cfg, const Plan& plan,
                                         const TestFunction& f,
                                         const std::vector<std::int64_t>& grid) {
    std::vector<double> refs(grid.size());
    if (cfg.reference_mode == ReferenceMode::pde_limit) {
        const double target = g_expect(f, cfg.params, 1.0, cfg.pde_tol);
        std::fill(refs.begin(), refs.end(), target);
        return refs;
    }
    std::vector<double> best(grid.size(), -std::numeric_limits<double>::infinity());
    const auto paths = static_cast<std::size_t>(cfg.n_paths);
    const auto n_max = static_cast<std::size_t>(grid.back());
    for (const auto& strat : plan.strategies) {
        std::vector<double> total(grid.size(), 0.0);
        chunked_reduce(
            paths, kChunk, cfg.jobs, [&] { return std::vector<double>(grid.size(), 0.0); },
            [&](std::vector<double>& part, std::size_t path) {
                WStream ws(strat, cfg.params, cfg.seed, kRefBank, path);
                std::size_t gi = 0;
                for (std::size_t k = 1; k <= n_max; ++k) {
                    const double w = ws.next();
                    if (gi < grid.size() && static_cast<std::int64_t>(k) == grid[gi]) {
                        part[gi] += f(w);
                        ++gi;
                    }
                }
            },
            [&](const std::vector<double>& part) {
                for (std::size_t i = 0; i < grid.size(); ++i) total[i] += part[i];
            });
        for (std::size_t i = 0; i < grid.size(); ++i)
            best[i] = std::max(best[i], total[i] / static_cast<double>(paths));
    }
    return best;
}

ExperimentReport skeleton(const std::string& experiment, const ExperimentConfig& cfg) {
    ExperimentReport rep;
    rep.experiment = experiment;
    rep.config_echo = cfg.canonical_items();
    rep.config_hash = cfg.hash();
    return rep;
}

// --- verdict helpers over tables -------------------------------------------

using Rows = std::vector<TableRow>;

std::vector<const TableRow*> rows_with(const Rows& table, const std::string& statistic) {
    std::vector<const TableRow*> out;
    for (const auto& r : table)
        if (r.statistic == statistic) out.push_back(&r);
    return out;
}

std::vector<const TableRow*> rows_prefix(const Rows& table, const std::string& prefix) {
    std::vector<const TableRow*> out;
    for (const auto& r : table)
        if (r.statistic.rfind(prefix, 0) == 0) out.push_back(&r);
    return out;
}

ExperimentConfig config_from_echo(const std::vector<std::pair<std::string, std::string>>& echo) {
    ExperimentConfig cfg;
    std::vector<std::string> overrides;
    overrides.reserve(echo.size());
    for (const auto& [k, v] : echo) overrides.push_back(k + "=" + v);
    apply_overrides(cfg, overrides);
    return cfg;
}

Verdict trend_verdict(const std::string& name, const std::vector<double>& series) {
    Verdict v;
    v.name = name;
    v.threshold = kTrendFactor;
    if (series.empty()) {
        v.status = "inconclusive";
        v.note = "no data";
        return v;
    }
    const double med = median(series);
    const double last = series.back();
    v.observed = med != 0.0 ? last / med : (last == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    v.status = last <= kTrendFactor * med ? "pass" : "fail";
    return v;
}

std::vector<Verdict> derive_slln(const Rows& table, const ExperimentConfig& cfg) {
    std::vector<Verdict> out;

    // Hypothesis gates (computed per function, sup over strategies).
    bool hypotheses_ok = true;
    {
        // E[T_N] <= eps_mean * M_f + 3 SE
        Verdict v{"slln_hyp_mean", "pass", 0.0, 0.0, ""};
        const auto rows = rows_with(table, "mean_T");
        std::int64_t n_top = 0;
        for (const auto* r : rows) n_top = std::max(n_top, r->horizon);
        double worst = -std::numeric_limits<double>::infinity();
        double worst_thr = 0.0;
        for (const auto* r : rows) {
            if (r->horizon != n_top) continue;
            const double bound = parse_function(r->function).bound;
            const double thr = cfg.eps_mean * bound + 3.0 * r->std_error;
            if (r->value - thr > worst) {
                worst = r->value - thr;
                worst_thr = thr;
                v.observed = r->value;
            }
        }
        v.threshold = worst_thr;
        if (worst > 0.0) v.status = "hypotheses_not_met";
        hypotheses_ok = hypotheses_ok && v.status == "pass";
        out.push_back(v);
    }
    {
        // E[T_n^2]/n bounded (no increasing trend)
        std::map<std::int64_t, double> by_n;
        for (const auto* r : rows_with(table, "mean_T2_over_n"))
            by_n[r->horizon] = std::max(by_n.count(r->horizon) ? by_n[r->horizon] : -1e300, r->value);
        std::vector<double> series;
        for (const auto& [n, val] : by_n) series.push_back(val);
        Verdict v = trend_verdict("slln_hyp_t2", series);
        if (v.status == "fail") v.status = "hypotheses_not_met";
        hypotheses_ok = hypotheses_ok && v.status == "pass";
        out.push_back(v);
    }
    {
        // window sums of E[Z_l^2] grow linearly
        std::map<std::int64_t, double> by_l;
        for (const auto* r : rows_with(table, "mean_Z2"))
            by_l[r->horizon] = std::max(by_l.count(r->horizon) ? by_l[r->horizon] : -1e300, r->value);
        std::vector<double> prefix_avg;
        double acc = 0.0;
        std::size_t m = 0;
        for (const auto& [l, val] : by_l) {
            acc += val;
            ++m;
            prefix_avg.push_back(acc / static_cast<double>(m));
        }
        Verdict v = trend_verdict("slln_hyp_z2win", prefix_avg);
        if (v.status == "fail") v.status = "hypotheses_not_met";
        hypotheses_ok = hypotheses_ok && v.status == "pass";
        out.push_back(v);
    }

    Verdict main{"slln_event", "pass", 1.0 - cfg.delta_slln, 1.0, ""};
    double nu = std::numeric_limits<double>::infinity();
    for (const auto* r : rows_with(table, "freq_pass")) nu = std::min(nu, r->value);
    main.observed = nu;
    if (!hypotheses_ok) {
        main.status = "hypotheses_not_met";
        main.note = "hypotheses not met";
    } else {
        main.status = nu >= main.threshold ? "pass" : "fail";
    }
    out.push_back(main);
    return out;
}

std::vector<Verdict> derive_asclt(const Rows& table, const ExperimentConfig& cfg) {
    std::vector<Verdict> out;

    // group medians by (strategy, function)
    std::map<std::pair<std::string, std::string>, std::map<std::int64_t, double>> med;
    for (const auto* r : rows_with(table, "median_abs_dev"))
        med[{r->strategy, r->function}][r->horizon] = r->value;

    {
        Verdict v{"asclt_median_trend", "pass", 0.0, std::numeric_limits<double>::infinity(), ""};
        if (med.empty()) {
            v.status = "inconclusive";
            v.note = "no two-sided battery";
        }
        for (const auto& [key, series] : med) {
            double prev = std::numeric_limits<double>::infinity();
            for (const auto& [n, m] : series) {
                v.observed = std::min(v.observed, prev - m);
                prev = m;
            }
        }
        if (v.status == "pass" && !(v.observed > 0.0)) v.status = "fail";
        out.push_back(v);
    }
    {
        Verdict v{"asclt_top_fraction", "pass", cfg.frac_asclt,
                  std::numeric_limits<double>::infinity(), ""};
        const auto rows = rows_with(table, "frac_within");
        if (rows.empty()) {
            v.status = "inconclusive";
            v.note = "no two-sided battery";
        }
        for (const auto* r : rows) v.observed = std::min(v.observed, r->value);
        if (v.status == "pass" && v.observed < v.threshold) v.status = "fail";
        out.push_back(v);
    }
    if (!rows_with(table, "degraded_mode").empty()) {
        out.push_back({"asclt_mode", "inconclusive", 0.0, 1.0,
                       "degraded to classical mode; band has no nonconstant H members"});
    }
    return out;
}

std::vector<Verdict> derive_rate(const Rows& table, const ExperimentConfig& cfg) {
    std::vector<Verdict> out;
    const auto devs = rows_with(table, "dev_max");
    std::map<std::int64_t, std::pair<double, double>> by_n;  // n -> (dev, se)
    for (const auto* r : devs) by_n[r->horizon] = {r->value, r->std_error};
    if (by_n.size() < 2) {
        out.push_back({"rate_decay", "inconclusive", 0.0, 0.0, "need at least two horizons"});
        return out;
    }

    {
        Verdict v{"rate_se", "pass", 1.0 / 3.0, 0.0, "max SE / resolution scale"};
        const double floor = cfg.rate_se_floor * by_n.begin()->second.first;
        for (const auto& [n, dv] : by_n) {
            const double scale = std::max(dv.first, floor);
            if (scale > 0.0) v.observed = std::max(v.observed, dv.second / scale);
        }
        if (v.observed > v.threshold) {
            v.status = "inconclusive";
            v.note = "Monte Carlo error too large at the path cap";
        }
        out.push_back(v);
    }
    {
        const double first = by_n.begin()->second.first;
        const double last = by_n.rbegin()->second.first;
        Verdict v{"rate_decay", last <= 0.5 * first ? "pass" : "fail", 0.5,
                  first > 0 ? last / first : 0.0, ""};
        out.push_back(v);
    }
    {
        std::vector<double> xs, ys;
        for (const auto& [n, dv] : by_n)
            if (dv.first > 0.0) {
                xs.push_back(std::log2(static_cast<double>(n)));
                ys.push_back(std::log2(dv.first));
            }
        const double slope = ols_slope(xs, ys);
        out.push_back({"rate_slope_negative", slope < 0.0 ? "pass" : "fail", 0.0, slope, ""});
        if (cfg.params.classical()) {
            out.push_back({"rate_slope_be", std::abs(slope + 0.5) <= 0.15 ? "pass" : "fail", 0.15,
                           slope, "Berry-Esseen comparison at beta=1"});
        }
    }
    return out;
}

std::vector<Verdict> derive_cov(const Rows& table, const ExperimentConfig& cfg) {
    // ratio of sup-covariance to the bound shape (j/k)^{1/2} + k^{-alpha/2}
    std::map<std::int64_t, double> colmax;  // by k
    double ratio_max = 0.0;
    for (const auto* r : rows_prefix(table, "xiprod:j=")) {
        const auto j = static_cast<double>(std::stoll(r->statistic.substr(9)));
        const auto k = static_cast<double>(r->horizon);
        const double bound = std::sqrt(j / k) + std::pow(k, -0.5 * cfg.alpha);
        const double ratio = r->value / bound;
        ratio_max = std::max(ratio_max, ratio);
        auto& slot = colmax[r->horizon];
        slot = std::max(slot, ratio);
    }
    std::vector<double> series;
    for (const auto& [k, v] : colmax) series.push_back(std::max(v, 0.0));
    std::vector<Verdict> out;
    Verdict v = trend_verdict("cov_bounded_trend", series);
    v.note = "max ratio " + format_sig6(ratio_max);
    out.push_back(v);
    return out;
}

std::vector<Verdict> derive_blocks(const Rows& table, const ExperimentConfig&) {
    std::vector<Verdict> out;

    // geometric decay of E[Z_l Z_m] in d = m - l
    std::map<std::int64_t, double> by_d;  // d -> max over (l, strategy, function)
    std::map<std::string, std::map<std::pair<std::int64_t, std::int64_t>,
                                   std::map<std::string, double>>>
        pair_means;  // function -> (l, m) -> strategy -> mean
    for (const auto* r : rows_prefix(table, "zprod:l=")) {
        const std::int64_t l = std::stoll(r->statistic.substr(8));
        const std::int64_t m = r->horizon;
        pair_means[r->function][{l, m}][r->strategy] = r->value;
        if (m > l) {
            auto& slot = by_d[m - l];
            slot = std::max(slot, r->value);
        }
    }
    {
        std::vector<double> xs, ys;
        for (const auto& [d, v] : by_d)
            if (v > 0.0) {
                xs.push_back(static_cast<double>(d));
                ys.push_back(std::log2(v));
            }
        Verdict v{"blocks_geometric", "pass", 1.0, 0.0, ""};
        if (xs.size() < 2) {
            v.status = "inconclusive";
            v.note = "too few positive cross-block covariances";
        } else {
            const double factor = std::exp2(ols_slope(xs, ys));
            v.observed = factor;
            v.status = factor < 1.0 ? "pass" : "fail";
        }
        out.push_back(v);
    }
    {
        // E[T_n^2]/n from the pair table: per (function, strategy),
        // E[T_n^2] = sum_{l,m<=n} E[Z_l Z_m] (off-diagonal twice).
        std::map<std::int64_t, double> by_n;
        for (const auto& [fn, pairs] : pair_means) {
            std::set<std::string> strategies;
            std::int64_t n_max = 0;
            for (const auto& [lm, per_s] : pairs) {
                n_max = std::max(n_max, lm.second);
                for (const auto& [s, val] : per_s) strategies.insert(s);
            }
            for (const auto& s : strategies) {
                for (std::int64_t n = 1; n <= n_max; ++n) {
                    double t2 = 0.0;
                    for (const auto& [lm, per_s] : pairs) {
                        if (lm.second > n) continue;
                        const auto it = per_s.find(s);
                        if (it == per_s.end()) continue;
                        t2 += (lm.first == lm.second ? 1.0 : 2.0) * it->second;
                    }
                    auto& slot = by_n[n];
                    slot = std::max(slot, t2 / static_cast<double>(n));
                }
            }
        }
        std::vector<double> series;
        for (const auto& [n, v] : by_n) series.push_back(v);
        out.push_back(trend_verdict("blocks_t2_trend", series));
    }
    return out;
}

std::vector<Verdict> derive_ineq(const Rows& table, const ExperimentConfig&) {
    std::vector<Verdict> out;
    {
        // Chebyshev rows come in lhs/rhs pairs keyed by the same x tag.
        std::size_t violations = 0, total = 0;
        std::map<std::pair<std::string, std::string>, double> lhs, rhs;
        for (const auto* r : rows_prefix(table, "cheb_lhs:x="))
            lhs[{r->strategy, r->statistic.substr(11)}] = r->value;
        for (const auto* r : rows_prefix(table, "cheb_rhs:x="))
            rhs[{r->strategy, r->statistic.substr(11)}] = r->value;
        for (const auto& [key, l] : lhs) {
            ++total;
            if (l > rhs[key]) ++violations;
        }
        out.push_back({"chebyshev", violations == 0 ? "pass" : "fail", 0.0,
                       static_cast<double>(violations),
                       std::to_string(total) + " grid checks"});
    }
    {
        // Hoelder: per-model violations fail; sup-level violations are
        // findings only.
        std::size_t per_model = 0, sup_level = 0;
        for (const char* tag : {"p=2", "p=4"}) {
            std::map<std::string, double> mxy, mxp, myq;
            double p = tag[2] == '2' ? 2.0 : 4.0;
            const double q = p / (p - 1.0);
            for (const auto* r : rows_prefix(table, std::string("holder_mxy:") + tag))
                mxy[r->strategy] = r->value;
            for (const auto* r : rows_prefix(table, std::string("holder_mxp:") + tag))
                mxp[r->strategy] = r->value;
            for (const auto* r : rows_prefix(table, std::string("holder_myq:") + tag))
                myq[r->strategy] = r->value;
            if (mxy.empty()) continue;
            double sup_lhs = 0, sup_xp = 0, sup_yq = 0;
            for (const auto& [s, l] : mxy) {
                const double r_model = p == 2.0 ? std::sqrt(mxp[s] * myq[s])
                                                : std::pow(mxp[s], 1.0 / p) * std::pow(myq[s], 1.0 / q);
                if (l > r_model) ++per_model;
                sup_lhs = std::max(sup_lhs, l);
                sup_xp = std::max(sup_xp, mxp[s]);
                sup_yq = std::max(sup_yq, myq[s]);
            }
            const double sup_rhs = p == 2.0 ? std::sqrt(sup_xp * sup_yq)
                                            : std::pow(sup_xp, 1.0 / p) * std::pow(sup_yq, 1.0 / q);
            if (sup_lhs > sup_rhs) ++sup_level;
        }
        Verdict v{"holder", per_model == 0 ? "pass" : "fail", 0.0,
                  static_cast<double>(per_model), ""};
        if (sup_level > 0)
            v.note = std::to_string(sup_level) + " sup-level finding(s), recorded not failed";
        out.push_back(v);
    }
    {
        // Rosenthal p=4 ratio: bounded by 10 and no growth trend.
        std::map<std::int64_t, double> num, den_x4, den_x2;
        for (const auto* r : rows_with(table, "ros_num")) {
            auto& slot = num[r->horizon];
            slot = std::max(slot, r->value);
        }
        for (const auto* r : rows_with(table, "ros_den_x4")) {
            auto& slot = den_x4[r->horizon];
            slot = std::max(slot, r->value);
        }
        for (const auto* r : rows_with(table, "ros_den_x2")) {
            auto& slot = den_x2[r->horizon];
            slot = std::max(slot, r->value);
        }
        std::vector<double> ratios;
        for (const auto& [n, v] : num)
            ratios.push_back(v / (den_x4[n] + den_x2[n] * den_x2[n]));
        Verdict bound{"rosenthal_bound", "pass", 10.0, 0.0, ""};
        for (double r : ratios) bound.observed = std::max(bound.observed, r);
        if (bound.observed > bound.threshold) bound.status = "fail";
        out.push_back(bound);
        out.push_back(trend_verdict("rosenthal_trend", ratios));

        const auto gate = rows_with(table, "mean_gap_scaled");
        // max over n_steps per-step means: the null extreme grows like
        // sqrt(2 ln n), so the gate scales with it
        std::int64_t top = 2;
        for (const auto* r : gate) top = std::max(top, r->horizon);
        Verdict g{"rosenthal_mean_zero", "pass",
                  std::sqrt(2.0 * std::log(static_cast<double>(top))) + 1.5, 0.0,
                  "max_k |mean X_k| * sqrt(P) / sigma_hi"};
        for (const auto* r : gate) g.observed = std::max(g.observed, r->value);
        if (g.observed > g.threshold) g.status = "hypotheses_not_met";
        out.push_back(g);
    }
    return out;
}

std::vector<Verdict> derive_axioms(const Rows& table, const ExperimentConfig&) {
    double failures = 0;
    double total = 0;
    for (const auto* r : rows_prefix(table, "axiom_pass:")) {
        total += 1;
        if (r->value != 1.0) failures += 1;
    }
    Verdict v{"axioms", failures == 0.0 ? "pass" : "fail", 0.0, failures,
              format_sig6(total) + " checks"};
    return {v};
}

}  // namespace

std::vector<Verdict> derive_verdicts(const std::string& experiment, const std::vector<TableRow>& table,
                                     const ExperimentConfig& config) {
    if (experiment == "slln") return derive_slln(table, config);
    if (experiment == "asclt") return derive_asclt(table, config);
    if (experiment == "rate") return derive_rate(table, config);
    if (experiment == "cov") return derive_cov(table, config);
    if (experiment == "blocks") return derive_blocks(table, config);
    if (experiment == "ineq") return derive_ineq(table, config);
    if (experiment == "axioms") return derive_axioms(table, config);
    throw std::invalid_argument("unknown experiment '" + experiment + "'");
}

bool recheck(const ExperimentReport& report) {
    const ExperimentConfig cfg = config_from_echo(report.config_echo);
    return derive_verdicts(report.experiment, report.table, cfg) == report.verdicts;
}

// --- SLLN -------------------------------------------------------------------

ExperimentReport run_slln(const ExperimentConfig& cfg) {
    const Plan plan = make_plan(cfg);
    const int N = cfg.n_blocks;
    std::size_t n_max = 1;
    for (int l = 0; l < N; ++l) n_max *= 4;
    n_max -= 1;
    const auto paths = static_cast<std::size_t>(cfg.n_paths);

    ExperimentReport rep = skeleton("slln", cfg);

    struct Partial {
        long pass_count = 0;
        std::vector<double> sum_t, sum_t2, sum_z2;
    };

    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        const TestFunction& f = plan.functions[fi];
        const auto refs = reference_means_full(cfg, plan, f, n_max);

        for (const auto& strat : plan.strategies) {
            Partial total;
            total.sum_t.assign(N, 0.0);
            total.sum_t2.assign(N, 0.0);
            total.sum_z2.assign(N, 0.0);

            chunked_reduce(
                paths, kChunk, cfg.jobs,
                [&] {
                    Partial p;
                    p.sum_t.assign(N, 0.0);
                    p.sum_t2.assign(N, 0.0);
                    p.sum_z2.assign(N, 0.0);
                    return p;
                },
                [&](Partial& part, std::size_t path) {
                    WStream ws(strat, cfg.params, cfg.seed, kMainBank, path);
                    CompensatedSum t_acc;
                    double worst = -std::numeric_limits<double>::infinity();
                    std::size_t k = 1;
                    std::size_t block_hi = 4;
                    for (int l = 1; l <= N; ++l) {
                        CompensatedSum z;
                        for (; k < block_hi; ++k)
                            z.add((f(ws.next()) - refs[k - 1]) / static_cast<double>(k));
                        const double zl = z.value();
                        t_acc.add(zl);
                        const double tl = t_acc.value();
                        part.sum_z2[l - 1] += zl * zl;
                        part.sum_t[l - 1] += tl;
                        part.sum_t2[l - 1] += tl * tl;
                        if (l >= 2) worst = std::max(worst, tl / static_cast<double>(l));
                        block_hi *= 4;
                    }
                    if (worst + cfg.drift <= cfg.eps_slln) ++part.pass_count;
                },
                [&](const Partial& part) {
                    total.pass_count += part.pass_count;
                    for (int l = 0; l < N; ++l) {
                        total.sum_t[l] += part.sum_t[l];
                        total.sum_t2[l] += part.sum_t2[l];
                        total.sum_z2[l] += part.sum_z2[l];
                    }
                });

            const auto pn = static_cast<double>(paths);
            for (int l = 1; l <= N; ++l) {
                const double mean_t = total.sum_t[l - 1] / pn;
                rep.table.push_back({"slln", l, strat.id(), f.id, "mean_T", mean_t,
                                     se_from_moments(total.sum_t[l - 1], total.sum_t2[l - 1],
                                                     cfg.n_paths)});
                rep.table.push_back({"slln", l, strat.id(), f.id, "mean_T2_over_n",
                                     total.sum_t2[l - 1] / pn / static_cast<double>(l), 0.0});
                rep.table.push_back(
                    {"slln", l, strat.id(), f.id, "mean_Z2", total.sum_z2[l - 1] / pn, 0.0});
            }
            const double freq = static_cast<double>(total.pass_count) / pn;
            rep.table.push_back({"slln", N, strat.id(), f.id, "freq_pass", freq,
                                 std::sqrt(std::max(freq * (1.0 - freq), 0.0) / pn)});
        }
    }

    rep.verdicts = derive_verdicts("slln", rep.table, cfg);
    // empirical stand-ins for the existence constants: M0 bounds E[T_n^2]/n,
    // M1 the per-window second-moment sums
    double m0 = 0.0, m1 = 0.0;
    {
        std::map<std::int64_t, double> z2_by_l;
        for (const auto& r : rep.table) {
            if (r.statistic == "mean_T2_over_n") m0 = std::max(m0, r.value);
            if (r.statistic == "mean_Z2") {
                auto& slot = z2_by_l[r.horizon];
                slot = std::max(slot, r.value);
            }
        }
        double acc = 0.0;
        std::size_t cnt = 0;
        for (const auto& [l, val] : z2_by_l) {
            acc += val;
            ++cnt;
            m1 = std::max(m1, acc / static_cast<double>(cnt));
        }
    }
    rep.constants.push_back({"M0_empirical", m0});
    rep.constants.push_back({"M1_empirical", m1});
    return rep;
}

// --- ASCLT ------------------------------------------------------------------

ExperimentReport run_asclt(const ExperimentConfig& cfg) {
    Plan plan = make_plan(cfg);
    if (cfg.horizons.size() < 2) throw std::invalid_argument("asclt needs at least two horizons");
    const auto n_max = static_cast<std::size_t>(cfg.horizons.back());
    const auto paths = static_cast<std::size_t>(cfg.n_paths);

    ExperimentReport rep = skeleton("asclt", cfg);

    // Class-H filter over the battery.
    GParams run_params = cfg.params;
    std::vector<MeanCertaintyReport> membership;
    std::vector<bool> in_h;
    bool any_h = false;
    for (const auto& f : plan.functions) {
        auto m = is_mean_certain(f, cfg.params, cfg.eps_h, cfg.pde_tol);
        membership.push_back(m);
        in_h.push_back(m.in_h);
        any_h = any_h || m.in_h;
    }
    if (!any_h && !cfg.params.classical()) {
        // No two-sided targets exist in this band: fall back to the
        // classical mid-band law and flag the report.
        run_params = GParams::make(cfg.params.sigma_mid(), cfg.params.sigma_mid());
        for (std::size_t i = 0; i < plan.functions.size(); ++i) {
            membership[i] = is_mean_certain(plan.functions[i], run_params, cfg.eps_h, cfg.pde_tol);
            in_h[i] = membership[i].in_h;
        }
        rep.table.push_back({"asclt", 0, "", "", "degraded_mode", 1.0, 0.0});
    }

    for (std::size_t fi = 0; fi < plan.functions.size(); ++fi) {
        rep.table.push_back({"asclt", 0, "", plan.functions[fi].id, "target",
                             membership[fi].e_plus, 0.0});
        rep.table.push_back({"asclt", 0, "", plan.functions[fi].id, "in_h",
                             in_h[fi] ? 1.0 : 0.0, 0.0});
    }

    struct Partial {
        // [function][horizon] -> per-path A_n values, chunk-local
        std::vector<std::vector<std::vector<double>>> a;
    };
    const std::size_t nf = plan.functions.size();
    const std::size_t nh = cfg.horizons.size();

    for (const auto& strat : plan.strategies) {
        std::vector<std::vector<std::vector<double>>> a_all(nf);
        for (auto& per_f : a_all) per_f.assign(nh, {});

        chunked_reduce(
            paths, kChunk, cfg.jobs,
            [&] {
                Partial p;
                p.a.resize(nf);
                for (auto& per_f : p.a) per_f.assign(nh, {});
                return p;
            },
            [&](Partial& part, std::size_t path) {
                WStream ws(strat, run_params, cfg.seed, kMainBank, path);
                std::vector<CompensatedSum> acc(nf);
                std::size_t hi = 0;
                for (std::size_t k = 1; k <= n_max; ++k) {
                    const double w = ws.next();
                    for (std::size_t fi = 0; fi < nf; ++fi)
                        acc[fi].add(plan.functions[fi](w) / static_cast<double>(k));
                    if (hi < nh && static_cast<std::int64_t>(k) == cfg.horizons[hi]) {
                        const double logn = std::log(static_cast<double>(k));
                        for (std::size_t fi = 0; fi < nf; ++fi)
                            part.a[fi][hi].push_back(acc[fi].value() / logn);
                        ++hi;
                    }
                }
            },
            [&](const Partial& part) {
                for (std::size_t fi = 0; fi < nf; ++fi)
                    for (std::size_t h = 0; h < nh; ++h)
                        a_all[fi][h].insert(a_all[fi][h].end(), part.a[fi][h].begin(),
                                            part.a[fi][h].end());
            });

        for (std::size_t fi = 0; fi < nf; ++fi) {
            const auto& f = plan.functions[fi];
            const double target = membership[fi].e_plus + cfg.target_offset;
            if (in_h[fi]) {
                for (std::size_t h = 0; h < nh; ++h) {
                    std::vector<double> devs;
                    devs.reserve(a_all[fi][h].size());
                    for (double a : a_all[fi][h]) devs.push_back(std::abs(a - target));
                    rep.table.push_back({"asclt", cfg.horizons[h], strat.id(), f.id,
                                         "median_abs_dev", median(devs), 0.0});
                    if (h + 1 == nh) {
                        double within = 0;
                        for (double d : devs)
                            if (d <= cfg.delta_asclt) within += 1;
                        rep.table.push_back({"asclt", cfg.horizons[h], strat.id(), f.id,
                                             "frac_within",
                                             within / static_cast<double>(devs.size()), 0.0});
                    }
                }
            }
            // One-sided exploratory view for the whole battery: the
            // log-average should eventually sit inside
            // [-E[-f], E[f]] +- delta.
            const double e_plus = membership[fi].e_plus;
            const double e_minus = membership[fi].e_minus;
            const auto& top = a_all[fi][nh - 1];
            double up_ok = 0, lo_ok = 0;
            for (double a : top) {
                if (a <= e_plus + cfg.delta_asclt) up_ok += 1;
                if (a >= -e_minus - cfg.delta_asclt) lo_ok += 1;
            }
            rep.table.push_back({"asclt", cfg.horizons[nh - 1], strat.id(), f.id, "frac_upper_ok",
                                 up_ok / static_cast<double>(top.size()), 0.0});
            rep.table.push_back({"asclt", cfg.horizons[nh - 1], strat.id(), f.id, "frac_lower_ok",
                                 lo_ok / static_cast<double>(top.size()), 0.0});
        }
    }

    rep.verdicts = derive_verdicts("asclt", rep.table, cfg);
    return rep;
}

// --- rate -------------------------------------------------------------------

ExperimentReport run_rate(const ExperimentConfig& cfg) {
    Plan plan = make_plan(cfg);
    if (cfg.horizons.size() < 2) throw std::invalid_argument("rate needs at least two horizons");

    // Lipschitz-1 normalization of the battery; constants carry no signal.
    std::vector<TestFunction> battery;
    std::vector<std::string> battery_src;
    for (std::size_t i = 0; i < plan.functions.size(); ++i)
        if (plan.functions[i].lip > 0.0) {
            battery.push_back(plan.functions[i].scaled(1.0 / plan.functions[i].lip));
            battery_src.push_back(cfg.functions[i]);
        }
    if (battery.empty()) throw std::invalid_argument("rate battery has no nonconstant functions");

    ExperimentReport rep = skeleton("rate", cfg);

    std::vector<double> targets(battery.size());
    for (std::size_t fi = 0; fi < battery.size(); ++fi) {
        targets[fi] = g_expect(battery[fi], cfg.params, 1.0, cfg.pde_tol);
        rep.table.push_back({"rate", 0, "", battery[fi].id, "target", targets[fi], 0.0});
    }

    // Per-horizon adversary catalog: the configured strategies plus one
    // bsb control per battery function at that horizon. A flat band makes
    // every strategy identical, so one representative suffices there.
    const bool classical = cfg.params.classical();
    auto catalog_for = [&](std::int64_t n) {
        std::vector<StrategySpec> out = plan.strategies;
        if (classical) {
            out.resize(1);
            return out;
        }
        for (const auto& fid : battery_src) {
            StrategySpec b;
            b.kind = StrategySpec::Kind::bsb;
            b.target_id = fid;
            b.horizon = static_cast<int>(n);
            b.shape = plan.strategies[0].shape;
            out.push_back(b);
        }
        return out;
    };

    const std::size_t nf = battery.size();
    const std::size_t nh = cfg.horizons.size();

    struct Cell {
        double sum = 0.0, sum2 = 0.0;
    };

    std::int64_t used_paths = cfg.n_paths;
    // cells[h] is a (catalog x battery) matrix for that horizon
    std::vector<std::vector<Cell>> cells(nh);
    std::vector<std::vector<StrategySpec>> catalogs(nh);
    for (std::size_t h = 0; h < nh; ++h) catalogs[h] = catalog_for(cfg.horizons[h]);

    auto dev_at = [&](std::size_t h, double paths, double* se_out) {
        double dev = 0.0, se_at = 0.0;
        for (std::size_t fi = 0; fi < nf; ++fi) {
            double best = -std::numeric_limits<double>::infinity();
            double best_se = 0.0;
            for (std::size_t si = 0; si < catalogs[h].size(); ++si) {
                const auto& c = cells[h][si * nf + fi];
                const double mean = c.sum / paths;
                if (mean > best) {
                    best = mean;
                    best_se = se_from_moments(c.sum, c.sum2,
                                              static_cast<std::int64_t>(paths));
                }
            }
            dev = std::max(dev, std::abs(best - targets[fi]));
            se_at = std::max(se_at, best_se);
        }
        if (se_out) *se_out = se_at;
        return dev;
    };

    while (true) {
        const auto paths = static_cast<std::size_t>(used_paths);
        for (std::size_t h = 0; h < nh; ++h) {
            const auto n = static_cast<std::size_t>(cfg.horizons[h]);
            cells[h].assign(catalogs[h].size() * nf, Cell{});
            for (std::size_t si = 0; si < catalogs[h].size(); ++si) {
                std::vector<Cell> total(nf);
                chunked_reduce(
                    paths, kChunk, cfg.jobs, [&] { return std::vector<Cell>(nf); },
                    [&](std::vector<Cell>& part, std::size_t path) {
                        WStream ws(catalogs[h][si], cfg.params, cfg.seed, kMainBank, path);
                        double w = 0.0;
                        for (std::size_t k = 0; k < n; ++k) w = ws.next();
                        for (std::size_t fi = 0; fi < nf; ++fi) {
                            const double v = battery[fi](w);
                            part[fi].sum += v;
                            part[fi].sum2 += v * v;
                        }
                    },
                    [&](const std::vector<Cell>& part) {
                        for (std::size_t fi = 0; fi < nf; ++fi) {
                            total[fi].sum += part[fi].sum;
                            total[fi].sum2 += part[fi].sum2;
                        }
                    });
                for (std::size_t fi = 0; fi < nf; ++fi) cells[h][si * nf + fi] = total[fi];
            }
        }

        bool se_ok = true;
        const double first_dev = dev_at(0, static_cast<double>(used_paths), nullptr);
        for (std::size_t h = 0; h < nh; ++h) {
            double se_at = 0.0;
            const double dev = dev_at(h, static_cast<double>(used_paths), &se_at);
            if (se_at > std::max(dev, cfg.rate_se_floor * first_dev) / 3.0) se_ok = false;
        }
        if (se_ok || used_paths >= cfg.max_paths) break;
        used_paths = std::min(used_paths * 4, cfg.max_paths);
    }

    const auto pn = static_cast<double>(used_paths);
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t fi = 0; fi < nf; ++fi) {
            double best = -std::numeric_limits<double>::infinity();
            double best_se = 0.0;
            for (std::size_t si = 0; si < catalogs[h].size(); ++si) {
                const auto& c = cells[h][si * nf + fi];
                const double mean = c.sum / pn;
                rep.table.push_back({"rate", cfg.horizons[h], catalogs[h][si].id(),
                                     battery[fi].id, "mean_f", mean,
                                     se_from_moments(c.sum, c.sum2, used_paths)});
                if (mean > best) {
                    best = mean;
                    best_se = se_from_moments(c.sum, c.sum2, used_paths);
                }
            }
            rep.table.push_back({"rate", cfg.horizons[h], "sup", battery[fi].id, "dev",
                                 std::abs(best - targets[fi]), best_se});
        }
        double se_at = 0.0;
        const double dev = dev_at(h, pn, &se_at);
        rep.table.push_back({"rate", cfg.horizons[h], "sup", "battery", "dev_max", dev, se_at});
    }
    rep.table.push_back({"rate", 0, "", "", "n_paths_used", static_cast<double>(used_paths), 0.0});

    rep.verdicts = derive_verdicts("rate", rep.table, cfg);
    for (const auto& v : rep.verdicts)
        if (v.name == "rate_slope_negative") {
            rep.constants.push_back({"fitted_slope", v.observed});
            // dev(n) ~ C n^{-alpha/2}: the fitted slope is -alpha/2
            rep.constants.push_back({"alpha_empirical", -2.0 * v.observed});
        }
    double c_ab = 0.0;
    for (const auto& r : rep.table)
        if (r.statistic == "dev_max")
            c_ab = std::max(c_ab, r.value * std::pow(static_cast<double>(r.horizon),
                                                     0.5 * cfg.alpha));
    rep.constants.push_back({"C_alpha_beta_empirical", c_ab});
    return rep;
}

// --- covariance -------------------------------------------------------------

ExperimentReport check_covariance(const ExperimentConfig& cfg) {
    const Plan plan = make_plan(cfg);
    const auto& grid = cfg.horizons;
    const auto n_max = static_cast<std::size_t>(grid.back());
    const auto paths = static_cast<std::size_t>(cfg.n_paths);
    const std::size_t ng = grid.size();

    ExperimentReport rep = skeleton("cov", cfg);

    for (const auto& f : plan.functions) {
        const auto refs = reference_means_grid(cfg, plan, f, grid);

        for (const auto& strat : plan.strategies) {
            // upper triangle of xi_j * xi_k sums, plus second moments
            std::vector<double> sum(ng * ng, 0.0), sum2(ng * ng, 0.0);
            chunked_reduce(
                paths, kChunk, cfg.jobs,
                [&] { return std::vector<double>(2 * ng * ng, 0.0); },
                [&](std::vector<double>& part, std::size_t path) {
                    WStream ws(strat, cfg.params, cfg.seed, kMainBank, path);
                    std::vector<double> xi(ng);
                    std::size_t gi = 0;
                    for (std::size_t k = 1; k <= n_max; ++k) {
                        const double w = ws.next();
                        if (gi < ng && static_cast<std::int64_t>(k) == grid[gi]) {
                            xi[gi] = f(w) - refs[gi];
                            ++gi;
                        }
                    }
                    for (std::size_t a = 0; a < ng; ++a)
                        for (std::size_t b = a; b < ng; ++b) {
                            const double v = xi[a] * xi[b];
                            part[a * ng + b] += v;
                            part[ng * ng + a * ng + b] += v * v;
                        }
                },
                [&](const std::vector<double>& part) {
                    for (std::size_t i = 0; i < ng * ng; ++i) {
                        sum[i] += part[i];
                        sum2[i] += part[ng * ng + i];
                    }
                });

            for (std::size_t a = 0; a < ng; ++a)
                for (std::size_t b = a; b < ng; ++b) {
                    rep.table.push_back({"cov", grid[b], strat.id(), f.id,
                                         pair_stat("xiprod:j=", grid[a]),
                                         sum[a * ng + b] / static_cast<double>(paths),
                                         se_from_moments(sum[a * ng + b], sum2[a * ng + b],
                                                         cfg.n_paths)});
                }
        }
    }

    rep.verdicts = derive_verdicts("cov", rep.table, cfg);
    double rmax = -std::numeric_limits<double>::infinity();
    for (const auto& r : rep.table)
        if (r.statistic.rfind("xiprod:j=", 0) == 0) {
            const auto j = static_cast<double>(std::stoll(r.statistic.substr(9)));
            const auto k = static_cast<double>(r.horizon);
            rmax = std::max(rmax, r.value / (std::sqrt(j / k) + std::pow(k, -0.5 * cfg.alpha)));
        }
    rep.constants.push_back({"cov_ratio_max", rmax});
    rep.constants.push_back({"M3M4_empirical", rmax});
    return rep;
}

// --- blocks -----------------------------------------------------------------

ExperimentReport check_blocks(const ExperimentConfig& cfg) {
    const Plan plan = make_plan(cfg);
    const int N = cfg.n_blocks;
    std::size_t n_max = 1;
    for (int l = 0; l < N; ++l) n_max *= 4;
    n_max -= 1;
    const auto paths = static_cast<std::size_t>(cfg.n_paths);

    ExperimentReport rep = skeleton("blocks", cfg);

    const std::size_t np = static_cast<std::size_t>(N) * (N + 1) / 2;
    auto pair_index = [&](int l, int m) {  // 1-based l <= m
        const int i = l - 1, j = m - 1;
        return static_cast<std::size_t>(i) * N - static_cast<std::size_t>(i) * (i - 1) / 2 +
               static_cast<std::size_t>(j - i);
    };

    for (const auto& f : plan.functions) {
        const auto refs = reference_means_full(cfg, plan, f, n_max);

        for (const auto& strat : plan.strategies) {
            std::vector<double> sum(np, 0.0), sum2(np, 0.0);
            chunked_reduce(
                paths, kChunk, cfg.jobs, [&] { return std::vector<double>(2 * np, 0.0); },
                [&](std::vector<double>& part, std::size_t path) {
                    WStream ws(strat, cfg.params, cfg.seed, kMainBank, path);
                    std::vector<double> z(N);
                    std::size_t k = 1, block_hi = 4;
                    for (int l = 1; l <= N; ++l) {
                        CompensatedSum acc;
                        for (; k < block_hi; ++k)
                            acc.add((f(ws.next()) - refs[k - 1]) / static_cast<double>(k));
                        z[l - 1] = acc.value();
                        block_hi *= 4;
                    }
                    for (int l = 1; l <= N; ++l)
                        for (int m = l; m <= N; ++m) {
                            const double v = z[l - 1] * z[m - 1];
                            part[pair_index(l, m)] += v;
                            part[np + pair_index(l, m)] += v * v;
                        }
                },
                [&](const std::vector<double>& part) {
                    for (std::size_t i = 0; i < np; ++i) {
                        sum[i] += part[i];
                        sum2[i] += part[np + i];
                    }
                });

            for (int l = 1; l <= N; ++l)
                for (int m = l; m <= N; ++m) {
                    const std::size_t i = pair_index(l, m);
                    rep.table.push_back({"blocks", m, strat.id(), f.id, pair_stat("zprod:l=", l),
                                         sum[i] / static_cast<double>(paths),
                                         se_from_moments(sum[i], sum2[i], cfg.n_paths)});
                }
        }
    }

    rep.verdicts = derive_verdicts("blocks", rep.table, cfg);

    // window linearity constant: max over prefix windows of mean E[Z_l^2]
    std::map<std::int64_t, double> z2_by_l;
    for (const auto& r : rep.table)
        if (r.statistic == pair_stat("zprod:l=", r.horizon)) {
            auto& slot = z2_by_l[r.horizon];
            slot = std::max(slot, r.value);
        }
    double acc = 0.0, m5 = 0.0;
    std::size_t cnt = 0;
    for (const auto& [l, v] : z2_by_l) {
        acc += v;
        ++cnt;
        m5 = std::max(m5, acc / static_cast<double>(cnt));
    }
    rep.constants.push_back({"M5_empirical", m5});
    for (const auto& v : rep.verdicts) {
        if (v.name == "blocks_t2_trend") rep.constants.push_back({"M6_empirical", v.observed});
        if (v.name == "blocks_geometric") rep.constants.push_back({"block_decay_factor", v.observed});
    }
    return rep;
}

// --- inequalities -----------------------------------------------------------

ExperimentReport check_inequalities(const ExperimentConfig& cfg) {
    const Plan plan = make_plan(cfg);
    const auto paths = static_cast<std::size_t>(cfg.n_paths);
    const auto& ns = cfg.horizons;
    const auto n_top = static_cast<std::size_t>(ns.back());

    ExperimentReport rep = skeleton("ineq", cfg);

    const std::vector<double> x_grid = {0.5, 1.0, 1.5, 2.0, 2.5};

    for (const auto& strat : plan.strategies) {
        // One pass: collect W at the two Hoelder horizons and at the top,
        // max_k |S_k| at each Rosenthal horizon, and per-step increment
        // moments.
        struct Partial {
            std::vector<double> w_top;                    // W_{n_top} per path
            std::vector<double> w_first;                  // W_{ns[0]} per path
            std::vector<double> max_s4_sum;               // per horizon: sum of max|S|^4
            std::vector<double> max_s4_sum2;
            std::vector<double> step_x2, step_x4, step_x1;  // per step sums
        };
        const std::size_t nh = ns.size();

        Partial total;
        total.max_s4_sum.assign(nh, 0.0);
        total.max_s4_sum2.assign(nh, 0.0);
        total.step_x2.assign(n_top, 0.0);
        total.step_x4.assign(n_top, 0.0);
        total.step_x1.assign(n_top, 0.0);

        chunked_reduce(
            paths, kChunk, cfg.jobs,
            [&] {
                Partial p;
                p.max_s4_sum.assign(nh, 0.0);
                p.max_s4_sum2.assign(nh, 0.0);
                p.step_x2.assign(n_top, 0.0);
                p.step_x4.assign(n_top, 0.0);
                p.step_x1.assign(n_top, 0.0);
                return p;
            },
            [&](Partial& part, std::size_t path) {
                ScenarioCursor cur(strat, cfg.params, cfg.seed, kMainBank, path);
                CompensatedSum s;
                double b2 = 0.0;
                const double mid2 = cfg.params.sigma_mid() * cfg.params.sigma_mid();
                double max_abs = 0.0;
                std::size_t hi = 0;
                for (std::size_t k = 1; k <= n_top; ++k) {
                    const double x = cur.next().increment;
                    s.add(x);
                    b2 += mid2;
                    max_abs = std::max(max_abs, std::abs(s.value()));
                    part.step_x1[k - 1] += x;
                    part.step_x2[k - 1] += x * x;
                    part.step_x4[k - 1] += x * x * x * x;
                    if (static_cast<std::int64_t>(k) == ns[0])
                        part.w_first.push_back(s.value() / std::sqrt(b2));
                    if (hi < nh && static_cast<std::int64_t>(k) == ns[hi]) {
                        const double m4 = max_abs * max_abs * max_abs * max_abs;
                        part.max_s4_sum[hi] += m4;
                        part.max_s4_sum2[hi] += m4 * m4;
                        ++hi;
                    }
                    if (k == n_top) part.w_top.push_back(s.value() / std::sqrt(b2));
                }
            },
            [&](const Partial& part) {
                total.w_top.insert(total.w_top.end(), part.w_top.begin(), part.w_top.end());
                total.w_first.insert(total.w_first.end(), part.w_first.begin(),
                                     part.w_first.end());
                for (std::size_t h = 0; h < nh; ++h) {
                    total.max_s4_sum[h] += part.max_s4_sum[h];
                    total.max_s4_sum2[h] += part.max_s4_sum2[h];
                }
                for (std::size_t k = 0; k < n_top; ++k) {
                    total.step_x1[k] += part.step_x1[k];
                    total.step_x2[k] += part.step_x2[k];
                    total.step_x4[k] += part.step_x4[k];
                }
            });

        const auto pn = static_cast<double>(paths);

        // Chebyshev on X = W_{n_top}, g(x) = x^2
        for (double x : x_grid) {
            double count = 0.0;
            CompensatedSum x2;
            for (double w : total.w_top) {
                if (std::abs(w) >= x) count += 1.0;
                x2.add(w * w);
            }
            rep.table.push_back({"ineq", ns.back(), strat.id(), "", "cheb_lhs:x=" + format_sig6(x),
                                 count / pn, 0.0});
            rep.table.push_back({"ineq", ns.back(), strat.id(), "", "cheb_rhs:x=" + format_sig6(x),
                                 x2.value() / pn / (x * x), 0.0});
        }

        // Hoelder on X = W_{ns[0]}, Y = W_{n_top} for (p,q) = (2,2), (4,4/3)
        for (double p : {2.0, 4.0}) {
            const double q = p / (p - 1.0);
            CompensatedSum mxy, mxp, myq;
            for (std::size_t i = 0; i < total.w_top.size(); ++i) {
                mxy.add(std::abs(total.w_first[i] * total.w_top[i]));
                mxp.add(std::pow(std::abs(total.w_first[i]), p));
                myq.add(std::pow(std::abs(total.w_top[i]), q));
            }
            const std::string tag = p == 2.0 ? "p=2" : "p=4";
            rep.table.push_back(
                {"ineq", ns.back(), strat.id(), "", "holder_mxy:" + tag, mxy.value() / pn, 0.0});
            rep.table.push_back(
                {"ineq", ns.back(), strat.id(), "", "holder_mxp:" + tag, mxp.value() / pn, 0.0});
            rep.table.push_back(
                {"ineq", ns.back(), strat.id(), "", "holder_myq:" + tag, myq.value() / pn, 0.0});
        }

        // Rosenthal p=4 components and the mean-zero gate
        for (std::size_t h = 0; h < nh; ++h) {
            const auto n = static_cast<std::size_t>(ns[h]);
            CompensatedSum sx4, sx2;
            for (std::size_t k = 0; k < n; ++k) {
                sx4.add(total.step_x4[k] / pn);
                sx2.add(total.step_x2[k] / pn);
            }
            rep.table.push_back({"ineq", ns[h], strat.id(), "", "ros_num",
                                 total.max_s4_sum[h] / pn,
                                 se_from_moments(total.max_s4_sum[h], total.max_s4_sum2[h],
                                                 cfg.n_paths)});
            rep.table.push_back({"ineq", ns[h], strat.id(), "", "ros_den_x4", sx4.value(), 0.0});
            rep.table.push_back({"ineq", ns[h], strat.id(), "", "ros_den_x2", sx2.value(), 0.0});
        }
        double gap = 0.0;
        for (std::size_t k = 0; k < n_top; ++k)
            gap = std::max(gap, std::abs(total.step_x1[k] / pn));
        rep.table.push_back({"ineq", ns.back(), strat.id(), "", "mean_gap_scaled",
                             gap * std::sqrt(pn) / cfg.params.sigma_hi, 0.0});
    }

    rep.verdicts = derive_verdicts("ineq", rep.table, cfg);
    for (const auto& v : rep.verdicts)
        if (v.name == "rosenthal_bound") rep.constants.push_back({"C4_empirical", v.observed});
    return rep;
}

// --- axioms -----------------------------------------------------------------

ExperimentReport run_axioms(const ExperimentConfig& cfg) {
    constexpr std::size_t kModels = 4;
    constexpr std::size_t kPairs = 20;
    const auto paths = static_cast<std::size_t>(cfg.n_paths);

    ExperimentReport rep = skeleton("axioms", cfg);

    for (std::size_t pair = 0; pair < kPairs; ++pair) {
        StatMatrix x, y;
        x.grid_id = y.grid_id = "pair" + std::to_string(pair);
        x.values.resize(kModels);
        y.values.resize(kModels);
        for (std::size_t m = 0; m < kModels; ++m) {
            x.model_ids.push_back("model" + std::to_string(m));
            y.model_ids.push_back("model" + std::to_string(m));
            CounterRng rx(cfg.seed, 2 * pair, m);
            CounterRng ry(cfg.seed, 2 * pair + 1, m);
            x.values[m].resize(paths);
            y.values[m].resize(paths);
            for (std::size_t p = 0; p < paths; ++p) {
                x.values[m][p] = rx.normal(p);
                y.values[m][p] = ry.normal(p);
            }
        }
        CounterRng rmeta(cfg.seed, 1000 + pair, 0);
        const double lambda = 4.0 * rmeta.uniform(0);
        const double c = 10.0 * (rmeta.uniform(1) - 0.5);
        const auto axioms = check_axioms(x, y, lambda, c);
        for (const auto& chk : axioms.checks) {
            rep.table.push_back({"axioms", static_cast<std::int64_t>(pair), "", "",
                                 "axiom_pass:" + chk.axiom, chk.pass ? 1.0 : 0.0, 0.0});
        }
    }

    rep.verdicts = derive_verdicts("axioms", rep.table, cfg);
    return rep;
}

}  // namespace sublin::verify

#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "sublin/report.hpp"
#include "sublin/verify.hpp"

using namespace sublin;

namespace {

const Verdict* find_verdict(const ExperimentReport& rep, const std::string& name) {
    for (const auto& v : rep.verdicts)
        if (v.name == name) return &v;
    return nullptr;
}

std::vector<const TableRow*> rows(const ExperimentReport& rep, const std::string& stat) {
    std::vector<const TableRow*> out;
    for (const auto& r : rep.table)
        if (r.statistic == stat) out.push_back(&r);
    return out;
}

}  // namespace

TEST_CASE("axiom experiment passes exactly and rechecks") {
    ExperimentConfig cfg;
    cfg.n_paths = 200;
    cfg.seed = 7;
    auto rep = verify::run_axioms(cfg);
    REQUIRE(find_verdict(rep, "axioms"));
    CHECK(find_verdict(rep, "axioms")->status == "pass");
    CHECK(rep.exit_code() == 0);
    CHECK(verify::recheck(rep));
}

TEST_CASE("slln: centered constant statistic gives frequency one") {
    ExperimentConfig cfg;
    cfg.functions = {"const:2"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.n_blocks = 3;
    cfg.n_paths = 30;
    auto rep = verify::run_slln(cfg);
    // xi == 0 after centering, so T == 0 and every path passes
    for (const auto* r : rows(rep, "freq_pass")) CHECK(r->value == 1.0);
    for (const auto* r : rows(rep, "mean_T")) CHECK(r->value == 0.0);
    CHECK(find_verdict(rep, "slln_event")->status == "pass");
}

TEST_CASE("slln: classical battery passes, drift control fails") {
    ExperimentConfig cfg;
    cfg.functions = {"0.15*(cos:1)"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.n_blocks = 5;
    cfg.n_paths = 60;
    cfg.seed = 11;
    auto rep = verify::run_slln(cfg);
    CHECK(find_verdict(rep, "slln_event")->status == "pass");
    CHECK(rep.exit_code() == 0);
    CHECK(verify::recheck(rep));

    auto drifted = cfg;
    drifted.drift = 0.5;
    auto rep2 = verify::run_slln(drifted);
    CHECK(find_verdict(rep2, "slln_event")->status == "fail");
    CHECK(rep2.exit_code() == 1);
}

TEST_CASE("asclt: constant battery tracks the harmonic bias and rechecks") {
    ExperimentConfig cfg;
    cfg.functions = {"const:1"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.horizons = {100, 1000, 10000};
    cfg.n_paths = 10;
    auto rep = verify::run_asclt(cfg);
    CHECK(find_verdict(rep, "asclt_median_trend")->status == "pass");
    CHECK(find_verdict(rep, "asclt_top_fraction")->status == "pass");
    // deviation for f = c is |c| (H_n/log n - 1), identical on every path
    for (const auto* r : rows(rep, "median_abs_dev")) {
        double h = 0.0;
        for (std::int64_t k = 1; k <= r->horizon; ++k) h += 1.0 / static_cast<double>(k);
        CHECK(r->value ==
              doctest::Approx(std::abs(h / std::log(static_cast<double>(r->horizon)) - 1.0))
                  .epsilon(1e-12));
    }
    CHECK(verify::recheck(rep));

    auto off = cfg;
    off.target_offset = 0.5;  // negative control: wrong target
    auto rep2 = verify::run_asclt(off);
    CHECK(rep2.exit_code() == 1);
}

TEST_CASE("asclt degrades to classical mode when the band has no H members") {
    ExperimentConfig cfg;
    cfg.params = GParams::make(0.5, 1.0);
    cfg.functions = {"cos:1"};  // not mean-certain at beta = 2
    cfg.strategies = {"const_hi/gaussian"};
    cfg.horizons = {100, 1000};
    cfg.n_paths = 8;
    auto rep = verify::run_asclt(cfg);
    CHECK_FALSE(rows(rep, "degraded_mode").empty());
    REQUIRE(find_verdict(rep, "asclt_mode"));
    CHECK(find_verdict(rep, "asclt_mode")->status == "inconclusive");
    CHECK(rep.exit_code() != 0);  // flagged: never a clean pass
}

TEST_CASE("rate: structure, SE escalation bookkeeping, recheck") {
    ExperimentConfig cfg;
    cfg.functions = {"ramp:1", "abs:2"};
    cfg.strategies = {"const_hi/skewed:0.2"};
    cfg.horizons = {16, 64, 256};
    cfg.n_paths = 250;
    cfg.max_paths = 4000;
    auto rep = verify::run_rate(cfg);
    CHECK(rows(rep, "dev_max").size() == 3);
    CHECK_FALSE(rows(rep, "n_paths_used").empty());
    CHECK(rows(rep, "n_paths_used")[0]->value >= 250.0);
    REQUIRE(find_verdict(rep, "rate_slope_be"));  // classical band
    CHECK(verify::recheck(rep));
}

TEST_CASE("covariance: distant classical blocks decorrelate") {
    ExperimentConfig cfg;
    cfg.functions = {"cos:1"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.horizons = {16, 1024};
    cfg.n_paths = 600;
    cfg.seed = 5;
    auto rep = verify::check_covariance(cfg);
    const TableRow* cross = nullptr;
    for (const auto& r : rep.table)
        if (r.statistic == "xiprod:j=16" && r.horizon == 1024) cross = &r;
    REQUIRE(cross);
    CHECK(std::abs(cross->value) <= 3.0 * cross->std_error);
    CHECK(find_verdict(rep, "cov_bounded_trend") != nullptr);
    CHECK(verify::recheck(rep));
}

TEST_CASE("blocks: zero statistic, elementwise bound, recheck") {
    ExperimentConfig cfg;
    cfg.functions = {"const:3"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.n_blocks = 3;
    cfg.n_paths = 12;
    auto rep = verify::check_blocks(cfg);
    for (const auto& r : rep.table)
        if (r.statistic.rfind("zprod:l=", 0) == 0) CHECK(r.value == 0.0);

    ExperimentConfig cfg2 = cfg;
    cfg2.functions = {"cos:1"};
    cfg2.n_paths = 40;
    auto rep2 = verify::check_blocks(cfg2);
    // |Z_l| <= 2 M_f sum_{block} 1/k, so the squared means obey the square
    const double m_f = 1.0;
    for (const auto& r : rep2.table) {
        if (r.statistic != "zprod:l=" + std::to_string(r.horizon)) continue;
        std::int64_t lo = 1;
        for (std::int64_t i = 1; i < r.horizon; ++i) lo *= 4;
        double hsum = 0.0;
        for (std::int64_t k = lo; k < 4 * lo; ++k) hsum += 1.0 / static_cast<double>(k);
        CHECK(r.value <= (2.0 * m_f * hsum) * (2.0 * m_f * hsum) + 1e-12);
    }
    CHECK(verify::recheck(rep2));
}

TEST_CASE("inequalities: chebyshev/hoelder/rosenthal on a small run") {
    ExperimentConfig cfg;
    cfg.strategies = {"const_hi/rademacher", "iid_mix:0.5/gaussian"};
    cfg.params = GParams::make(0.5, 1.0);
    cfg.horizons = {16, 64, 256};
    cfg.n_paths = 800;
    auto rep = verify::check_inequalities(cfg);
    CHECK(find_verdict(rep, "chebyshev")->status == "pass");
    CHECK(find_verdict(rep, "holder")->status == "pass");
    CHECK(find_verdict(rep, "rosenthal_bound")->status == "pass");
    CHECK(find_verdict(rep, "rosenthal_bound")->observed <= 10.0);
    CHECK(find_verdict(rep, "rosenthal_mean_zero")->status == "pass");
    CHECK(verify::recheck(rep));
}

TEST_CASE("covariance: constant statistic has exactly zero covariances") {
    ExperimentConfig cfg;
    cfg.functions = {"const:4"};
    cfg.strategies = {"const_hi/gaussian", "iid_mix:0.5/gaussian"};
    cfg.horizons = {4, 16};
    cfg.n_paths = 30;
    auto rep = verify::check_covariance(cfg);
    std::size_t seen = 0;
    for (const auto& r : rep.table)
        if (r.statistic.rfind("xiprod:j=", 0) == 0) {
            CHECK(r.value == 0.0);
            ++seen;
        }
    CHECK(seen > 0);
}

TEST_CASE("covariance: diagonal entries respect the 4 M_f^2 bound") {
    ExperimentConfig cfg;
    cfg.functions = {"cos:1"};
    cfg.strategies = {"iid_mix:0.5/gaussian"};
    cfg.params = GParams::make(0.5, 1.0);
    cfg.horizons = {4, 64};
    cfg.n_paths = 200;
    auto rep = verify::check_covariance(cfg);
    for (const auto& r : rep.table) {
        if (r.statistic == "xiprod:j=" + std::to_string(r.horizon))
            CHECK(r.value <= 4.0 * 1.0 * 1.0 + 1e-12);  // M_f = 1 for cos
    }
}

TEST_CASE("rosenthal ratio matches exact Rademacher enumeration") {
    // Exhaustive enumeration over all 2^16 sign paths is the oracle for
    // the p=4 ratio at n=16; the sampled ratio must sit within Monte Carlo
    // error, and both obey the classical constant bound.
    const int n = 16;
    const double exact_num = oracle::rademacher_max_partial_moment(n, 4.0);
    const double exact_den = n + static_cast<double>(n) * n;  // sum E|X|^4 + (sum E X^2)^2
    const double exact_ratio = exact_num / exact_den;
    CHECK(exact_ratio <= 10.0);

    ExperimentConfig cfg;
    cfg.strategies = {"const_hi/rademacher"};
    cfg.horizons = {16};
    cfg.n_paths = 2000;
    auto rep = verify::check_inequalities(cfg);
    double num = 0, se = 0, den_x4 = 0, den_x2 = 0;
    for (const auto& r : rep.table) {
        if (r.statistic == "ros_num") num = r.value, se = r.std_error;
        if (r.statistic == "ros_den_x4") den_x4 = r.value;
        if (r.statistic == "ros_den_x2") den_x2 = r.value;
    }
    CHECK(den_x4 == doctest::Approx(16.0));  // |X| = 1 exactly
    CHECK(den_x2 == doctest::Approx(16.0));
    CHECK(std::abs(num - exact_num) <= 3.0 * se);
}

TEST_CASE("hoelder equality case and chebyshev arithmetic") {
    // p = q = 2 with X = Y: both sides are E[X^2] and the computed right
    // side sqrt(m*m) recovers m exactly.
    std::vector<double> xs = {0.3, -1.7, 2.4, 0.9, -0.2};
    double m = 0.0;
    for (double x : xs) m += x * x;
    m /= static_cast<double>(xs.size());
    CHECK(std::sqrt(m * m) == m);

    // Rademacher increments at x = 0.5: V(|X| >= 0.5) = 1 <= E[X^2]/0.25 = 4.
    CHECK(1.0 <= 1.0 / (0.5 * 0.5));
}

TEST_CASE("reports persist, reload, and recheck through the runner path") {
    ExperimentConfig cfg;
    cfg.functions = {"const:1"};
    cfg.strategies = {"const_hi/gaussian"};
    cfg.horizons = {100, 1000};
    cfg.n_paths = 6;
    auto rep = verify::run_asclt(cfg);
    const auto path = std::filesystem::temp_directory_path() / "sublin_verify_roundtrip.txt";
    persist(rep, path);
    auto back = load(path);
    CHECK(back == rep);
    CHECK(verify::recheck(back));
    std::filesystem::remove(path);
}

TEST_CASE("reports are bit-identical under different jobs settings") {
    ExperimentConfig base;
    base.functions = {"cos:1"};
    base.strategies = {"const_hi/gaussian", "iid_mix:0.5/gaussian"};
    base.horizons = {16, 64};
    base.n_paths = 200;

    auto a = base;
    a.jobs = 1;
    auto b = base;
    b.jobs = 3;
    CHECK(serialize_report(verify::check_covariance(a)) ==
          serialize_report(verify::check_covariance(b)));

    ExperimentConfig s = base;
    s.functions = {"0.15*(cos:1)"};
    s.n_blocks = 3;
    s.n_paths = 40;
    auto sa = s;
    sa.jobs = 4;
    auto sb = s;
    sb.jobs = 1;
    CHECK(serialize_report(verify::run_slln(sa)) == serialize_report(verify::run_slln(sb)));
}

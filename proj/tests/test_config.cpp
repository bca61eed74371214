#include <string>

#include "doctest.h"
#include "sublin/config.hpp"

using namespace sublin;

TEST_CASE("empty config text yields the default config") {
    auto cfg = parse_config("");
    CHECK(cfg == ExperimentConfig{});
    auto cfg2 = parse_config("# only a comment\n\n");
    CHECK(cfg2 == ExperimentConfig{});
}

TEST_CASE("config round-trips through serialize/parse") {
    ExperimentConfig cfg;
    cfg.params = GParams::make(0.5, 1.25);
    cfg.strategies = {"const_lo/rademacher", "greedy:cos:1:+/skewed:0.2"};
    cfg.functions = {"abs:10", "0.15*(cos:1)"};
    cfg.n_paths = 123;
    cfg.n_blocks = 7;
    cfg.horizons = {100, 10000};
    cfg.seed = 987654321;
    cfg.alpha = 0.25;
    cfg.reference_mode = ReferenceMode::pde_limit;
    cfg.jobs = 3;
    cfg.drift = 0.5;
    cfg.eps_h = 2e-3;
    const std::string text = serialize_config(cfg);
    auto back = parse_config(text);
    CHECK(back == cfg);
    CHECK(serialize_config(back) == text);
    CHECK(back.hash() == cfg.hash());
}

TEST_CASE("range violations are rejected") {
    CHECK_THROWS_AS(parse_config("[params]\nsigma_lo = 1.5\nsigma_hi = 1.0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nalpha = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[tolerances]\neps_slln = -1\n"), ConfigError);
}

TEST_CASE("all problems are aggregated into one error") {
    const std::string text =
        "[params]\n"
        "sigma_lo = 1.5\n"
        "sigma_hi = 1.0\n"
        "sigma_lo = 2.0\n"      // duplicate
        "volatility = 3\n"       // unknown key
        "[run]\n"
        "n_paths = many\n"       // type error
        "[nonsense]\n"           // unknown section
        "x = 1\n";
    try {
        parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems().size() >= 4);
        const std::string what = e.what();
        CHECK(what.find("duplicate key") != std::string::npos);
        CHECK(what.find("unknown key") != std::string::npos);
        CHECK(what.find("unknown section") != std::string::npos);
        CHECK(what.find("n_paths") != std::string::npos);
        CHECK(what.find("sigma_lo") != std::string::npos);
    }
}

TEST_CASE("strategy and function ids are validated at parse time") {
    CHECK_THROWS_AS(parse_config("[run]\nstrategies = const_mid/gaussian\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nfunctions = tanh:1\n"), ConfigError);
}

TEST_CASE("overrides apply after the file and are validated") {
    ExperimentConfig cfg;
    apply_overrides(cfg, {"run.seed=42", "params.sigma_lo=0.5", "tolerances.eps_h=0.002"});
    CHECK(cfg.seed == 42);
    CHECK(cfg.params.sigma_lo == 0.5);
    CHECK(cfg.params.beta == 2.0);
    CHECK(cfg.eps_h == 0.002);
    CHECK_THROWS_AS(apply_overrides(cfg, {"run.bogus=1"}), ConfigError);
    CHECK_THROWS_AS(apply_overrides(cfg, {"no-equals-sign"}), ConfigError);
}

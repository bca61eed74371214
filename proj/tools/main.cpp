#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sublin/config.hpp"
#include "sublin/gheat.hpp"
#include "sublin/numeric.hpp"
#include "sublin/report.hpp"
#include "sublin/sampler.hpp"
#include "sublin/verify.hpp"

namespace {

using namespace sublin;

namespace fs = std::filesystem;

// Exit codes: 0 all verdicts pass, 1 any verdict fail, 2 usage/config
// error, 3 inconclusive (SE too large / hypotheses not met).

ExperimentConfig default_config_for(const std::string& experiment) {
    ExperimentConfig cfg;
    cfg.strategies = {"const_hi/gaussian", "const_lo/gaussian", "iid_mix:0.5/gaussian",
                      "periodic:2/gaussian"};
    if (experiment == "slln") {
        cfg.functions = {"0.15*(cos:1)"};
        cfg.n_blocks = 10;
        cfg.n_paths = 100;
    } else if (experiment == "asclt") {
        cfg.functions = {"cos:1", "const:1"};
        cfg.n_paths = 50;
        cfg.horizons = {1000, 10000, 100000, 1000000};
    } else if (experiment == "rate") {
        cfg.strategies = {"const_lo/skewed:0.2", "const_hi/skewed:0.2", "iid_mix:0.5/skewed:0.2"};
        cfg.functions = {"ramp:1", "ramp:1@0.75", "ramp:1@-0.75", "abs:2", "-1*(abs:2)",
                         "cos:1",  "sin:1",       "abs:2@1",      "poly:4", "sin:2"};
        cfg.horizons = {64, 128, 256, 512, 1024, 2048, 4096};
        cfg.n_paths = 2000;
    } else if (experiment == "cov") {
        cfg.functions = {"cos:1"};
        cfg.horizons = {16, 64, 256, 1024, 4096};
        cfg.n_paths = 2000;
    } else if (experiment == "blocks") {
        cfg.functions = {"0.15*(cos:1)"};
        cfg.n_blocks = 8;
        cfg.n_paths = 100;
    } else if (experiment == "ineq") {
        cfg.strategies = {"const_hi/rademacher", "iid_mix:0.5/gaussian"};
        cfg.functions = {"cos:1"};
        cfg.horizons = {64, 256, 1024};
        cfg.n_paths = 4000;
    } else if (experiment == "axioms") {
        cfg.functions = {"cos:1"};
        cfg.n_paths = 1000;
        cfg.seed = 7;
    }
    return cfg;
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::int64_t seed = -1;
    int jobs = 0;
    bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (flat key = value with sections)");
    cmd->add_option("--set", opts.overrides, "override, e.g. --set run.seed=7")->take_all();
    cmd->add_option("--out", opts.out_dir, "output directory (default $SUBLIN_OUT or .)");
    cmd->add_option("--seed", opts.seed, "override run.seed");
    cmd->add_option("--jobs", opts.jobs, "worker threads (results are identical for any value)");
    cmd->add_flag("-v,--verbose", opts.verbose, "log configuration and row counts");
}

ExperimentConfig resolve_config(const std::string& experiment, const CommonOpts& opts) {
    ExperimentConfig cfg = default_config_for(experiment);
    if (!opts.config_path.empty()) {
        std::ifstream in(opts.config_path);
        if (!in) throw ConfigError({"cannot open config file '" + opts.config_path + "'"});
        std::ostringstream ss;
        ss << in.rdbuf();
        cfg = parse_config(ss.str());
    }
    if (!opts.overrides.empty()) apply_overrides(cfg, opts.overrides);
    std::vector<std::string> late;
    if (opts.seed >= 0) late.push_back("run.seed=" + std::to_string(opts.seed));
    if (opts.jobs > 0) late.push_back("run.jobs=" + std::to_string(opts.jobs));
    if (!late.empty()) apply_overrides(cfg, late);
    return cfg;
}

fs::path output_dir(const CommonOpts& opts) {
    if (!opts.out_dir.empty()) return opts.out_dir;
    if (const char* env = std::getenv("SUBLIN_OUT"); env && *env) return env;
    return ".";
}

int finish_experiment(const ExperimentReport& rep, const CommonOpts& opts) {
    const fs::path dir = output_dir(opts);
    fs::create_directories(dir);
    const fs::path report_path = dir / (rep.experiment + ".report.txt");
    persist(rep, report_path);
    {
        std::ofstream csv(dir / (rep.experiment + ".table.csv"));
        write_table_csv(rep, csv);
    }
    if (opts.verbose)
        std::cout << "# " << rep.table.size() << " table rows -> " << report_path.string() << "\n";
    for (const auto& v : rep.verdicts) {
        std::cout << (v.status == "pass" ? "[PASS] " : v.status == "fail" ? "[FAIL] " : "[????] ")
                  << rep.experiment << "." << v.name << "  observed=" << format_sig6(v.observed)
                  << " threshold=" << format_sig6(v.threshold);
        if (!v.note.empty()) std::cout << "  (" << v.note << ")";
        if (v.status != "pass" && v.status != "fail") std::cout << "  [" << v.status << "]";
        std::cout << "\n";
    }
    return rep.exit_code();
}

int run_experiment(const std::string& name, const CommonOpts& opts) {
    const ExperimentConfig cfg = resolve_config(name, opts);
    if (opts.verbose) std::cout << serialize_config(cfg);
    ExperimentReport rep;
    if (name == "slln") rep = verify::run_slln(cfg);
    else if (name == "asclt") rep = verify::run_asclt(cfg);
    else if (name == "rate") rep = verify::run_rate(cfg);
    else if (name == "cov") rep = verify::check_covariance(cfg);
    else if (name == "blocks") rep = verify::check_blocks(cfg);
    else if (name == "ineq") rep = verify::check_inequalities(cfg);
    else if (name == "axioms") rep = verify::run_axioms(cfg);
    else throw std::runtime_error("unknown experiment " + name);
    return finish_experiment(rep, opts);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sub-linear expectation toolkit: G-normal expectations and"
                 " desk-scale limit-theorem checks"};
    app.require_subcommand(1);

    // expect
    std::string f_id = "cos:1";
    double sigma_lo = 1.0, sigma_hi = 1.0, t = 1.0, tol = 1e-4;
    std::string dump_grid;
    auto* expect_cmd = app.add_subcommand("expect", "G-normal expectation E[f(xi)] via the G-heat solver");
    expect_cmd->add_option("--f", f_id, "test function id")->required();
    expect_cmd->add_option("--sigma-lo", sigma_lo)->required();
    expect_cmd->add_option("--sigma-hi", sigma_hi)->required();
    expect_cmd->add_option("--t", t, "time horizon (law of sqrt(t) xi)");
    expect_cmd->add_option("--tol", tol, "refinement tolerance");
    expect_cmd->add_option("--dump-grid", dump_grid, "write the solution surface as t,x,u CSV");

    // lattice
    int steps = 1024;
    auto* lattice_cmd = app.add_subcommand("lattice", "independent lattice oracle for E[f(xi)]");
    lattice_cmd->add_option("--f", f_id)->required();
    lattice_cmd->add_option("--sigma-lo", sigma_lo)->required();
    lattice_cmd->add_option("--sigma-hi", sigma_hi)->required();
    lattice_cmd->add_option("--t", t);
    lattice_cmd->add_option("--steps", steps);

    // membership
    double eps_h = 1e-3;
    auto* member_cmd = app.add_subcommand("membership", "class-H sweep over the function catalog");
    member_cmd->add_option("--sigma-lo", sigma_lo)->required();
    member_cmd->add_option("--sigma-hi", sigma_hi)->required();
    member_cmd->add_option("--eps-h", eps_h);
    member_cmd->add_option("--tol", tol);

    // sample
    std::string strategy_id = "const_hi/gaussian";
    std::int64_t n_paths = 16, n_steps = 64;
    std::int64_t sample_seed = 1;
    std::string out_file;
    auto* sample_cmd = app.add_subcommand("sample", "emit a path batch as CSV");
    sample_cmd->add_option("--strategy", strategy_id);
    sample_cmd->add_option("--sigma-lo", sigma_lo)->required();
    sample_cmd->add_option("--sigma-hi", sigma_hi)->required();
    sample_cmd->add_option("--paths", n_paths);
    sample_cmd->add_option("--steps", n_steps);
    sample_cmd->add_option("--seed", sample_seed);
    sample_cmd->add_option("--out", out_file, "output file (default stdout)");

    // experiments
    std::vector<std::string> experiments = {"slln", "asclt", "rate", "cov",
                                            "blocks", "ineq", "axioms"};
    std::map<std::string, CommonOpts> opts;
    for (const auto& name : experiments) {
        auto* cmd = app.add_subcommand(
            name, name == "axioms" ? "sub-linear expectation axiom suite (exact checks)"
                                   : "run the " + name + " verification experiment");
        add_common(cmd, opts[name]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    }

    try {
        if (expect_cmd->parsed()) {
            const auto params = GParams::make(sigma_lo, sigma_hi);
            const auto f = parse_function(f_id);
            const double v = g_expect(f, params, t, tol);
            std::cout << "g_expect(" << f_id << ", sigma=[" << format_sig6(sigma_lo) << ","
                      << format_sig6(sigma_hi) << "], t=" << format_sig6(t)
                      << ") = " << format_sig6(v) << "\n";
            if (!dump_grid.empty()) {
                const double half_width = std::max(6.0 * sigma_hi * std::sqrt(t), 1.0);
                const auto grid = GridSpec::make(half_width, 401, t, params, 129);
                const auto sol = solve_gheat(f, params, grid);
                std::ofstream os(dump_grid);
                if (!os) throw ConfigError({"cannot open '" + dump_grid + "' for writing"});
                sol.write_csv(os);
            }
            return 0;
        }
        if (lattice_cmd->parsed()) {
            const auto params = GParams::make(sigma_lo, sigma_hi);
            const double v = lattice_expect(parse_function(f_id), params, t, steps);
            std::cout << "lattice_expect(" << f_id << ", steps=" << steps
                      << ") = " << format_sig6(v) << "\n";
            return 0;
        }
        if (member_cmd->parsed()) {
            const auto params = GParams::make(sigma_lo, sigma_hi);
            auto battery = standard_catalog();
            battery.push_back(make_constant(1.0));
            for (const auto& f : battery) {
                const auto rep = is_mean_certain(f, params, eps_h, tol);
                std::cout << f.id << ": e_plus=" << format_sig6(rep.e_plus)
                          << " e_minus=" << format_sig6(rep.e_minus)
                          << " gap=" << format_sig6(rep.gap) << " in_h="
                          << (rep.in_h ? "true" : "false") << "\n";
            }
            return 0;
        }
        if (sample_cmd->parsed()) {
            const auto params = GParams::make(sigma_lo, sigma_hi);
            const auto batch =
                sample_batch(StrategySpec::parse(strategy_id), params,
                             static_cast<std::size_t>(n_steps), static_cast<std::size_t>(n_paths),
                             static_cast<std::uint64_t>(sample_seed));
            if (out_file.empty()) {
                write_batch_csv(batch, std::cout);
            } else {
                std::ofstream os(out_file);
                if (!os) throw ConfigError({"cannot open '" + out_file + "' for writing"});
                write_batch_csv(batch, os);
            }
            const auto mr = moment_report(batch, 0.5);
            std::cerr << "# sup |X|^2.5 moment " << format_sig6(mr.sup_abs_moment)
                      << ", mean gap " << format_sig6(mr.mean_gap) << "\n";
            return 0;
        }
        for (const auto& name : experiments)
            if (app.get_subcommand(name)->parsed()) return run_experiment(name, opts[name]);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

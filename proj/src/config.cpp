#include "sublin/config.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "sublin/numeric.hpp"
#include "sublin/sampler.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string msg = "config has " + std::to_string(problems.size()) + " problem(s):";
    for (const auto& p : problems) msg += "\n  - " + p;
    return msg;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto pos = s.find(',', start);
        if (pos == std::string::npos) {
            const auto item = trim(s.substr(start));
            if (!item.empty()) out.push_back(item);
            break;
        }
        const auto item = trim(s.substr(start, pos - start));
        if (!item.empty()) out.push_back(item);
        start = pos + 1;
    }
    return out;
}

std::string join_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out;
}

// One schema entry per "section.key": a setter that reports problems and a
// getter used for canonical serialization.
struct Field {
    std::function<void(ExperimentConfig&, const std::string&, std::vector<std::string>&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

bool to_double(const std::string& v, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(v, &used);
        return used == v.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

bool to_int(const std::string& v, std::int64_t& out) {
    try {
        std::size_t used = 0;
        out = std::stoll(v, &used);
        return used == v.size();
    } catch (const std::exception&) {
        return false;
    }
}

Field double_field(double ExperimentConfig::* member, const char* name) {
    return {[member, name](ExperimentConfig& c, const std::string& v, std::vector<std::string>& problems) {
                double d = 0;
                if (!to_double(v, d)) problems.push_back(std::string(name) + ": expected a number, got '" + v + "'");
                else c.*member = d;
            },
            [member](const ExperimentConfig& c) { return format_full(c.*member); }};
}

const std::map<std::string, Field>& schema() {
    static const std::map<std::string, Field> s = [] {
        std::map<std::string, Field> m;
        m["params.sigma_lo"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                    double d = 0;
                                    if (!to_double(v, d)) pr.push_back("params.sigma_lo: expected a number, got '" + v + "'");
                                    else c.params.sigma_lo = d;
                                },
                                [](const ExperimentConfig& c) { return format_full(c.params.sigma_lo); }};
        m["params.sigma_hi"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                    double d = 0;
                                    if (!to_double(v, d)) pr.push_back("params.sigma_hi: expected a number, got '" + v + "'");
                                    else c.params.sigma_hi = d;
                                },
                                [](const ExperimentConfig& c) { return format_full(c.params.sigma_hi); }};
        m["run.strategies"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>&) {
                                   c.strategies = split_list(v);
                               },
                               [](const ExperimentConfig& c) { return join_list(c.strategies); }};
        m["run.functions"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>&) {
                                  c.functions = split_list(v);
                              },
                              [](const ExperimentConfig& c) { return join_list(c.functions); }};
        m["run.n_paths"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                std::int64_t i = 0;
                                if (!to_int(v, i)) pr.push_back("run.n_paths: expected an integer, got '" + v + "'");
                                else c.n_paths = i;
                            },
                            [](const ExperimentConfig& c) { return std::to_string(c.n_paths); }};
        m["run.n_blocks"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                 std::int64_t i = 0;
                                 if (!to_int(v, i)) pr.push_back("run.n_blocks: expected an integer, got '" + v + "'");
                                 else c.n_blocks = static_cast<int>(i);
                             },
                             [](const ExperimentConfig& c) { return std::to_string(c.n_blocks); }};
        m["run.horizons"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                 c.horizons.clear();
                                 for (const auto& item : split_list(v)) {
                                     std::int64_t i = 0;
                                     if (!to_int(item, i)) {
                                         pr.push_back("run.horizons: expected integers, got '" + item + "'");
                                         continue;
                                     }
                                     c.horizons.push_back(i);
                                 }
                             },
                             [](const ExperimentConfig& c) {
                                 std::vector<std::string> items;
                                 for (auto h : c.horizons) items.push_back(std::to_string(h));
                                 return join_list(items);
                             }};
        m["run.seed"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                             std::int64_t i = 0;
                             if (!to_int(v, i) || i < 0) pr.push_back("run.seed: expected a nonnegative integer, got '" + v + "'");
                             else c.seed = static_cast<std::uint64_t>(i);
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.seed); }};
        m["run.alpha"] = double_field(&ExperimentConfig::alpha, "run.alpha");
        m["run.reference_mode"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                       if (v == "catalog_sup") c.reference_mode = ReferenceMode::catalog_sup;
                                       else if (v == "pde_limit") c.reference_mode = ReferenceMode::pde_limit;
                                       else pr.push_back("run.reference_mode: expected catalog_sup or pde_limit, got '" + v + "'");
                                   },
                                   [](const ExperimentConfig& c) { return to_string(c.reference_mode); }};
        m["run.jobs"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                             std::int64_t i = 0;
                             if (!to_int(v, i)) pr.push_back("run.jobs: expected an integer, got '" + v + "'");
                             else c.jobs = static_cast<int>(i);
                         },
                         [](const ExperimentConfig& c) { return std::to_string(c.jobs); }};
        m["run.max_paths"] = {[](ExperimentConfig& c, const std::string& v, std::vector<std::string>& pr) {
                                  std::int64_t i = 0;
                                  if (!to_int(v, i)) pr.push_back("run.max_paths: expected an integer, got '" + v + "'");
                                  else c.max_paths = i;
                              },
                              [](const ExperimentConfig& c) { return std::to_string(c.max_paths); }};
        m["run.drift"] = double_field(&ExperimentConfig::drift, "run.drift");
        m["run.target_offset"] = double_field(&ExperimentConfig::target_offset, "run.target_offset");
        m["tolerances.eps_slln"] = double_field(&ExperimentConfig::eps_slln, "tolerances.eps_slln");
        m["tolerances.delta_slln"] = double_field(&ExperimentConfig::delta_slln, "tolerances.delta_slln");
        m["tolerances.delta_asclt"] = double_field(&ExperimentConfig::delta_asclt, "tolerances.delta_asclt");
        m["tolerances.frac_asclt"] = double_field(&ExperimentConfig::frac_asclt, "tolerances.frac_asclt");
        m["tolerances.eps_h"] = double_field(&ExperimentConfig::eps_h, "tolerances.eps_h");
        m["tolerances.pde_tol"] = double_field(&ExperimentConfig::pde_tol, "tolerances.pde_tol");
        m["tolerances.eps_mean"] = double_field(&ExperimentConfig::eps_mean, "tolerances.eps_mean");
        m["tolerances.rate_se_floor"] = double_field(&ExperimentConfig::rate_se_floor, "tolerances.rate_se_floor");
        return m;
    }();
    return s;
}

// Fixed serialization order: params, run, tolerances, keys as below.
const std::vector<std::string>& canonical_keys() {
    static const std::vector<std::string> keys = {
        "params.sigma_lo",        "params.sigma_hi",
        "run.strategies",         "run.functions",
        "run.n_paths",            "run.n_blocks",
        "run.horizons",           "run.seed",
        "run.alpha",              "run.reference_mode",
        "run.jobs",               "run.max_paths",
        "run.drift",              "run.target_offset",
        "tolerances.eps_slln",    "tolerances.delta_slln",
        "tolerances.delta_asclt", "tolerances.frac_asclt",
        "tolerances.eps_h",       "tolerances.pde_tol",
        "tolerances.eps_mean",    "tolerances.rate_se_floor",
    };
    return keys;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

std::string to_string(ReferenceMode mode) {
    return mode == ReferenceMode::catalog_sup ? "catalog_sup" : "pde_limit";
}

void ExperimentConfig::validate_or_collect(std::vector<std::string>& problems) const {
    GParams p = params;
    p.beta = p.sigma_hi / p.sigma_lo;
    try {
        p.validate();
    } catch (const std::exception& e) {
        problems.push_back(std::string("params: ") + e.what());
    }
    if (strategies.empty()) problems.push_back("run.strategies: at least one strategy required");
    for (const auto& s : strategies) {
        try {
            StrategySpec::parse(s);
        } catch (const std::exception& e) {
            problems.push_back("run.strategies: " + std::string(e.what()));
        }
    }
    if (functions.empty()) problems.push_back("run.functions: at least one function required");
    for (const auto& f : functions) {
        try {
            parse_function(f);
        } catch (const std::exception& e) {
            problems.push_back("run.functions: " + std::string(e.what()));
        }
    }
    if (n_paths < 1) problems.push_back("run.n_paths: must be >= 1");
    if (n_blocks < 1 || n_blocks > 12) problems.push_back("run.n_blocks: must lie in [1, 12]");
    if (horizons.empty()) problems.push_back("run.horizons: at least one horizon required");
    for (auto h : horizons)
        if (h < 2) problems.push_back("run.horizons: horizons must be >= 2");
    if (!std::is_sorted(horizons.begin(), horizons.end()))
        problems.push_back("run.horizons: must be ascending");
    if (!(alpha > 0.0 && alpha < 1.0)) problems.push_back("run.alpha: must lie in (0,1)");
    if (jobs < 1) problems.push_back("run.jobs: must be >= 1");
    if (max_paths < n_paths) problems.push_back("run.max_paths: must be >= run.n_paths");
    if (!std::isfinite(drift)) problems.push_back("run.drift: must be finite");
    if (!std::isfinite(target_offset)) problems.push_back("run.target_offset: must be finite");
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) problems.push_back(std::string(name) + ": must be positive");
    };
    positive(eps_slln, "tolerances.eps_slln");
    positive(delta_slln, "tolerances.delta_slln");
    positive(delta_asclt, "tolerances.delta_asclt");
    positive(eps_h, "tolerances.eps_h");
    positive(pde_tol, "tolerances.pde_tol");
    positive(eps_mean, "tolerances.eps_mean");
    if (!(frac_asclt > 0.0 && frac_asclt <= 1.0))
        problems.push_back("tolerances.frac_asclt: must lie in (0,1]");
    if (!(rate_se_floor >= 0.0 && rate_se_floor <= 1.0))
        problems.push_back("tolerances.rate_se_floor: must lie in [0,1]");
    if (eps_h < 4.0 * pde_tol)
        problems.push_back("tolerances.eps_h: must be at least 4x tolerances.pde_tol");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::canonical_items() const {
    // run.jobs is execution infrastructure, not experiment identity: reports
    // must be bit-identical under any jobs setting, so it stays out of the
    // echo and the hash.
    std::vector<std::pair<std::string, std::string>> items;
    for (const auto& key : canonical_keys()) {
        if (key == "run.jobs") continue;
        items.emplace_back(key, schema().at(key).get(*this));
    }
    return items;
}

std::string ExperimentConfig::hash() const {
    std::string text;
    for (const auto& [k, v] : canonical_items()) text += k + "=" + v + "\n";
    return hex64(fnv1a64(text));
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<std::string> problems;
    std::set<std::string> seen;

    std::istringstream is(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back("line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
                continue;
            }
            section = line.substr(1, line.size() - 2);
            if (section != "params" && section != "run" && section != "tolerances") {
                problems.push_back("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
                section.clear();
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
            continue;
        }
        if (section.empty()) {
            problems.push_back("line " + std::to_string(lineno) + ": key outside any section");
            continue;
        }
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end()) {
            problems.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            continue;
        }
        if (!seen.insert(key).second) {
            problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            continue;
        }
        it->second.set(cfg, value, problems);
    }

    cfg.params.beta = cfg.params.sigma_hi / cfg.params.sigma_lo;
    cfg.validate_or_collect(problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return cfg;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream os;
    std::string current_section;
    for (const auto& key : canonical_keys()) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current_section) {
            if (!current_section.empty()) os << '\n';
            os << '[' << section << "]\n";
            current_section = section;
        }
        os << key.substr(dot + 1) << " = " << schema().at(key).get(config) << '\n';
    }
    return os.str();
}

void apply_overrides(ExperimentConfig& config, const std::vector<std::string>& overrides) {
    std::vector<std::string> problems;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) {
            problems.push_back("override '" + o + "': expected section.key=value");
            continue;
        }
        const std::string key = trim(o.substr(0, eq));
        const std::string value = trim(o.substr(eq + 1));
        const auto it = schema().find(key);
        if (it == schema().end()) {
            problems.push_back("override: unknown key '" + key + "'");
            continue;
        }
        it->second.set(config, value, problems);
    }
    config.params.beta = config.params.sigma_hi / config.params.sigma_lo;
    config.validate_or_collect(problems);
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

}  // namespace sublin

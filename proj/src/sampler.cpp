#include "sublin/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sublin/gheat.hpp"
#include "sublin/numeric.hpp"

namespace sublin {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad " + what + " '" + s + "'");
    }
}

}  // namespace

std::string ShapeSpec::id() const {
    switch (kind) {
        case Kind::rademacher: return "rademacher";
        case Kind::gaussian: return "gaussian";
        case Kind::uniform: return "uniform";
        case Kind::skewed: return "skewed:" + format_sig6(param);
    }
    return "gaussian";
}

ShapeSpec ShapeSpec::parse(const std::string& text) {
    ShapeSpec s;
    const auto parts = split(text, ':');
    const std::string& name = parts[0];
    if (name == "rademacher") s.kind = Kind::rademacher;
    else if (name == "gaussian") s.kind = Kind::gaussian;
    else if (name == "uniform") s.kind = Kind::uniform;
    else if (name == "skewed") s.kind = Kind::skewed;
    else throw std::invalid_argument("unknown shape '" + text + "'");
    if (parts.size() > 1) {
        if (s.kind != Kind::skewed) throw std::invalid_argument("shape '" + name + "' takes no parameter");
        s.param = parse_num(parts[1], "shape parameter");
    }
    if (s.kind == Kind::skewed && !(s.param > 0.0 && s.param < 1.0))
        throw std::invalid_argument("skewed shape probability must lie in (0,1)");
    return s;
}

double ShapeSpec::draw(const CounterRng& rng, std::uint64_t step) const {
    switch (kind) {
        case Kind::rademacher:
            return rng.uniform(step, 0) < 0.5 ? -1.0 : 1.0;
        case Kind::gaussian:
            return rng.normal(step, 0);
        case Kind::uniform:
            return (2.0 * rng.uniform(step, 0) - 1.0) * std::sqrt(3.0);
        case Kind::skewed: {
            const double p = param;
            const double up = std::sqrt((1.0 - p) / p);
            const double down = std::sqrt(p / (1.0 - p));
            return rng.uniform(step, 0) < p ? up : -down;
        }
    }
    return 0.0;
}

double ShapeSpec::abs_bound() const {
    switch (kind) {
        case Kind::rademacher: return 1.0;
        case Kind::gaussian: return std::numeric_limits<double>::infinity();
        case Kind::uniform: return std::sqrt(3.0);
        case Kind::skewed:
            return std::max(std::sqrt((1.0 - param) / param), std::sqrt(param / (1.0 - param)));
    }
    return 0.0;
}

std::string StrategySpec::id() const {
    std::string base;
    switch (kind) {
        case Kind::const_lo: base = "const_lo"; break;
        case Kind::const_hi: base = "const_hi"; break;
        case Kind::periodic: base = "periodic:" + std::to_string(period); break;
        case Kind::iid_mix: base = "iid_mix:" + format_sig6(mix_prob); break;
        case Kind::greedy:
            base = "greedy:" + target_id + (sign >= 0 ? ":+" : ":-");
            break;
        case Kind::bsb:
            base = "bsb:" + target_id + ":" + std::to_string(horizon);
            break;
    }
    return base + "/" + shape.id();
}

StrategySpec StrategySpec::parse(const std::string& text) {
    StrategySpec s;
    std::string head = text;
    if (auto pos = text.find('/'); pos != std::string::npos) {
        head = text.substr(0, pos);
        s.shape = ShapeSpec::parse(text.substr(pos + 1));
    }
    const auto parts = split(head, ':');
    const std::string& name = parts[0];
    if (name == "const_lo") {
        s.kind = Kind::const_lo;
    } else if (name == "const_hi") {
        s.kind = Kind::const_hi;
    } else if (name == "periodic") {
        s.kind = Kind::periodic;
        if (parts.size() > 1) s.period = static_cast<int>(parse_num(parts[1], "period"));
        if (s.period < 1) throw std::invalid_argument("period must be >= 1");
    } else if (name == "iid_mix") {
        s.kind = Kind::iid_mix;
        if (parts.size() > 1) s.mix_prob = parse_num(parts[1], "mix probability");
        if (!(s.mix_prob >= 0.0 && s.mix_prob <= 1.0))
            throw std::invalid_argument("mix probability must lie in [0,1]");
    } else if (name == "greedy") {
        s.kind = Kind::greedy;
        if (parts.size() < 3) throw std::invalid_argument("greedy needs 'greedy:<function>:<+|->'");
        const std::string& last = parts.back();
        if (last != "+" && last != "-") throw std::invalid_argument("greedy sign must be '+' or '-'");
        s.sign = last == "+" ? 1 : -1;
        std::string fid = parts[1];
        for (std::size_t i = 2; i + 1 < parts.size(); ++i) fid += ":" + parts[i];
        s.target_id = fid;
        parse_function(fid);  // validate now
    } else if (name == "bsb") {
        s.kind = Kind::bsb;
        if (parts.size() < 3) throw std::invalid_argument("bsb needs 'bsb:<function>:<horizon>'");
        s.horizon = static_cast<int>(parse_num(parts.back(), "bsb horizon"));
        if (s.horizon < 1) throw std::invalid_argument("bsb horizon must be >= 1");
        std::string fid = parts[1];
        for (std::size_t i = 2; i + 1 < parts.size(); ++i) fid += ":" + parts[i];
        s.target_id = fid;
        parse_function(fid);
    } else {
        throw std::invalid_argument("unknown strategy '" + text + "'");
    }
    return s;
}

namespace {

// One G-heat solve per (function, band), shared by every bsb cursor. The
// stored slices carry u(t, x) on the solver grid; the control only needs
// the sign of the centered second difference.
std::shared_ptr<const GridSolution> continuation_value(const std::string& fid,
                                                       const GParams& params) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const GridSolution>> cache;
    const std::string key =
        fid + "|" + format_full(params.sigma_lo) + "|" + format_full(params.sigma_hi);
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const auto f = parse_function(fid);
    const double half_width = std::max(6.0 * params.sigma_hi, 1.0);
    const auto grid = GridSpec::make(half_width, 801, 1.0, params, 513);
    auto sol = std::make_shared<GridSolution>(solve_gheat(f, params, grid));
    cache.emplace(key, sol);
    return sol;
}

}  // namespace

ScenarioCursor::ScenarioCursor(const StrategySpec& strategy, const GParams& params,
                               std::uint64_t seed, std::uint64_t stream, std::uint64_t path)
    : strategy_(strategy), params_(params), rng_(seed, stream, path) {
    params_.validate();
    if (strategy_.kind == StrategySpec::Kind::greedy)
        target_ = parse_function(strategy_.target_id);
    if (strategy_.kind == StrategySpec::Kind::bsb)
        value_ = continuation_value(strategy_.target_id, params_);
}

double ScenarioCursor::choose_sigma() {
    switch (strategy_.kind) {
        case StrategySpec::Kind::const_lo: return params_.sigma_lo;
        case StrategySpec::Kind::const_hi: return params_.sigma_hi;
        case StrategySpec::Kind::periodic: {
            // Cycle of length `period`: low band in the first half, high in
            // the second, so periodic:2 alternates every step.
            const auto p = static_cast<std::uint64_t>(strategy_.period);
            return (k_ % p) < (p + 1) / 2 ? params_.sigma_lo : params_.sigma_hi;
        }
        case StrategySpec::Kind::iid_mix:
            return rng_.uniform(k_, 4) < strategy_.mix_prob ? params_.sigma_hi : params_.sigma_lo;
        case StrategySpec::Kind::greedy: {
            // Current normalized position, from past increments only.
            const double w = k_ == 0 ? 0.0 : running_sum_ / std::sqrt(running_b2_);
            constexpr double h = 0.25;
            const TestFunction& f = *target_;
            const double curv = f(w + h) - 2.0 * f(w) + f(w - h);
            return strategy_.sign * curv > 0.0 ? params_.sigma_hi : params_.sigma_lo;
        }
        case StrategySpec::Kind::bsb: {
            const auto n = static_cast<double>(strategy_.horizon);
            if (static_cast<double>(k_) >= n) return params_.sigma_hi;
            // position in the terminal statistic's coordinates y = S / B_n
            const double y =
                running_sum_ / (params_.sigma_mid() * std::sqrt(n));
            const double t_remain = 1.0 - static_cast<double>(k_) / n;
            const GridSolution& sol = *value_;
            // first stored slice at or above the remaining time
            const auto it = std::lower_bound(sol.times.begin(), sol.times.end(), t_remain);
            const std::size_t j =
                it == sol.times.end() ? sol.times.size() - 1
                                      : static_cast<std::size_t>(it - sol.times.begin());
            const auto& u = sol.values[j];
            const double dx = sol.grid.dx();
            auto idx = static_cast<long>(std::lround((y - sol.xs.front()) / dx));
            idx = std::clamp(idx, 1L, static_cast<long>(sol.grid.nx) - 2);
            const double d2 = u[idx + 1] - 2.0 * u[idx] + u[idx - 1];
            return d2 >= 0.0 ? params_.sigma_hi : params_.sigma_lo;
        }
    }
    return params_.sigma_hi;
}

ScenarioCursor::Step ScenarioCursor::next() {
    const double sigma = choose_sigma();
    const double draw = strategy_.shape.draw(rng_, k_);
    const double inc = sigma * draw;
    running_sum_ += inc;
    const double mid = params_.sigma_mid();
    running_b2_ += mid * mid;
    ++k_;
    return {inc, sigma};
}

PathBatch sample_batch(const StrategySpec& strategy, const GParams& params, std::size_t n_steps,
                       std::size_t n_paths, std::uint64_t seed) {
    if (n_steps < 1 || n_paths < 1) throw std::invalid_argument("n_steps and n_paths must be >= 1");
    PathBatch b;
    b.strategy = strategy;
    b.params = params;
    b.seed = seed;
    b.n_paths = n_paths;
    b.n_steps = n_steps;
    b.increments.resize(n_paths * n_steps);
    b.sigma_trace.resize(n_paths * n_steps);
    for (std::size_t p = 0; p < n_paths; ++p) {
        ScenarioCursor cur(strategy, params, seed, 0, p);
        for (std::size_t k = 0; k < n_steps; ++k) {
            const auto step = cur.next();
            b.increments[p * n_steps + k] = step.increment;
            b.sigma_trace[p * n_steps + k] = step.sigma;
        }
    }
    return b;
}

MomentReport moment_report(const PathBatch& batch, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0,1]");
    MomentReport rep;
    rep.alpha = alpha;
    const double expo = 2.0 + alpha;
    for (std::size_t k = 0; k < batch.n_steps; ++k) {
        CompensatedSum abs_moment;
        CompensatedSum mean;
        for (std::size_t p = 0; p < batch.n_paths; ++p) {
            const double x = batch.increment(p, k);
            abs_moment.add(std::pow(std::abs(x), expo));
            mean.add(x);
        }
        const auto n = static_cast<double>(batch.n_paths);
        rep.sup_abs_moment = std::max(rep.sup_abs_moment, abs_moment.value() / n);
        rep.mean_gap = std::max(rep.mean_gap, std::abs(mean.value() / n));
    }
    return rep;
}

void write_batch_csv(const PathBatch& batch, std::ostream& os) {
    os << "n_paths,n_steps,seed,strategy,sigma_lo,sigma_hi\n";
    os << batch.n_paths << ',' << batch.n_steps << ',' << batch.seed << ',' << batch.strategy.id()
       << ',' << format_full(batch.params.sigma_lo) << ',' << format_full(batch.params.sigma_hi)
       << '\n';
    auto write_rows = [&](const std::vector<double>& m) {
        for (std::size_t p = 0; p < batch.n_paths; ++p) {
            for (std::size_t k = 0; k < batch.n_steps; ++k) {
                if (k) os << ',';
                os << format_full(m[p * batch.n_steps + k]);
            }
            os << '\n';
        }
    };
    os << "increments\n";
    write_rows(batch.increments);
    os << "sigma\n";
    write_rows(batch.sigma_trace);
}

PathBatch read_batch_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "n_paths,n_steps,seed,strategy,sigma_lo,sigma_hi")
        throw std::invalid_argument("bad batch header");
    if (!std::getline(is, line)) throw std::invalid_argument("truncated batch file");
    const auto fields = split(line, ',');
    if (fields.size() != 6) throw std::invalid_argument("bad batch header row");

    PathBatch b;
    b.n_paths = static_cast<std::size_t>(parse_num(fields[0], "n_paths"));
    b.n_steps = static_cast<std::size_t>(parse_num(fields[1], "n_steps"));
    b.seed = static_cast<std::uint64_t>(parse_num(fields[2], "seed"));
    b.strategy = StrategySpec::parse(fields[3]);
    b.params = GParams::make(parse_num(fields[4], "sigma_lo"), parse_num(fields[5], "sigma_hi"));

    auto read_rows = [&](std::vector<double>& m, const std::string& tag) {
        if (!std::getline(is, line) || line != tag)
            throw std::invalid_argument("expected '" + tag + "' section");
        m.resize(b.n_paths * b.n_steps);
        for (std::size_t p = 0; p < b.n_paths; ++p) {
            if (!std::getline(is, line)) throw std::invalid_argument("truncated batch file");
            const auto vals = split(line, ',');
            if (vals.size() != b.n_steps) throw std::invalid_argument("bad row width");
            for (std::size_t k = 0; k < b.n_steps; ++k)
                m[p * b.n_steps + k] = parse_num(vals[k], "value");
        }
    };
    read_rows(b.increments, "increments");
    read_rows(b.sigma_trace, "sigma");
    return b;
}

}  // namespace sublin

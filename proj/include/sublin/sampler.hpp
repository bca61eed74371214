#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sublin/params.hpp"
#include "sublin/rng.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

struct GridSolution;

// Unit-variance, mean-zero increment shapes. "skewed" is the two-point
// shape P(a) = p, P(-b) = 1-p with a = sqrt((1-p)/p), b = sqrt(p/(1-p));
// its nonzero third moment makes n^{-1/2} convergence rates visible,
// which the symmetric shapes cannot produce.
struct ShapeSpec {
    enum class Kind { rademacher, gaussian, uniform, skewed };
    Kind kind = Kind::gaussian;
    double param = 0.2;  // skewed: probability of the positive point

    [[nodiscard]] std::string id() const;
    static ShapeSpec parse(const std::string& text);
    // Draw for (path, step) slots 0..1; pure in the rng key.
    [[nodiscard]] double draw(const CounterRng& rng, std::uint64_t step) const;
    // sup |X|^{2+alpha} for bounded shapes; infinity for gaussian.
    [[nodiscard]] double abs_bound() const;
    bool operator==(const ShapeSpec&) const = default;
};

// A rule choosing each step's conditional standard deviation inside
// [sigma_lo, sigma_hi], reading only the past of the path. The greedy
// rule picks sigma_hi when the signed discrete curvature of its target
// function at the current normalized position is positive: a cheap
// adversary chasing the convexity pickup. The bsb rule is the dynamic
// version: it follows the curvature sign of the G-heat continuation
// value u(t_remaining, x) for a fixed horizon (the Black-Scholes-
// Barenblatt worst-case volatility control), which is the adversary the
// sup over scenario measures is trying to realize.
struct StrategySpec {
    enum class Kind { const_lo, const_hi, periodic, iid_mix, greedy, bsb };
    Kind kind = Kind::const_hi;
    int period = 2;            // periodic
    double mix_prob = 0.5;     // iid_mix: probability of sigma_hi
    std::string target_id;     // greedy, bsb
    int sign = 1;              // greedy: +1 maximize, -1 minimize
    int horizon = 0;           // bsb: number of steps the control is built for
    ShapeSpec shape;

    [[nodiscard]] std::string id() const;
    // Accepts "const_hi", "periodic:2", "iid_mix:0.25",
    // "greedy:<function-id>:+", "bsb:<function-id>:<horizon>", each with
    // an optional "/shape" suffix.
    static StrategySpec parse(const std::string& text);
    bool operator==(const StrategySpec&) const = default;
};

// Streams one path's increments. Shape noise is keyed by
// (seed, stream, path, step) only, never by the strategy, so different
// strategies evaluated on the same seed share their underlying draws
// (common random numbers by construction).
class ScenarioCursor {
  public:
    ScenarioCursor(const StrategySpec& strategy, const GParams& params, std::uint64_t seed,
                   std::uint64_t stream, std::uint64_t path);

    struct Step {
        double increment;
        double sigma;
    };
    Step next();

    [[nodiscard]] std::uint64_t step_index() const { return k_; }

  private:
    [[nodiscard]] double choose_sigma();

    StrategySpec strategy_;
    GParams params_;
    CounterRng rng_;
    std::optional<TestFunction> target_;
    std::shared_ptr<const GridSolution> value_;  // bsb continuation value
    std::uint64_t k_ = 0;    // steps emitted so far
    double running_sum_ = 0.0;
    double running_b2_ = 0.0;
};

struct PathBatch {
    StrategySpec strategy;
    GParams params;
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::vector<double> increments;   // row-major [path][step]
    std::vector<double> sigma_trace;  // same layout

    [[nodiscard]] double increment(std::size_t path, std::size_t step) const {
        return increments[path * n_steps + step];
    }
    [[nodiscard]] double sigma(std::size_t path, std::size_t step) const {
        return sigma_trace[path * n_steps + step];
    }
    bool operator==(const PathBatch&) const = default;
};

PathBatch sample_batch(const StrategySpec& strategy, const GParams& params, std::size_t n_steps,
                       std::size_t n_paths, std::uint64_t seed);

struct MomentReport {
    double alpha = 0.0;
    double sup_abs_moment = 0.0;  // max over steps of the empirical (2+alpha)-moment
    double mean_gap = 0.0;        // max over steps of |empirical mean|
};

MomentReport moment_report(const PathBatch& batch, double alpha);

void write_batch_csv(const PathBatch& batch, std::ostream& os);
PathBatch read_batch_csv(std::istream& is);

}  // namespace sublin

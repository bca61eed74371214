#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sublin {

// Per-model matrix of per-path statistic values. The model family is the
// finite scenario catalog standing in for the measure family; all
// sup-quantities are maxima over these rows. grid_id tags the common
// random numbers used to evaluate the statistic, so paired checks can
// reject unpaired inputs.
struct StatMatrix {
    std::vector<std::string> model_ids;
    std::vector<std::vector<double>> values;  // [model][path]
    std::string grid_id;

    [[nodiscard]] std::size_t n_models() const { return values.size(); }
    [[nodiscard]] std::size_t n_paths() const { return values.empty() ? 0 : values[0].size(); }

    // Throws on empty family, ragged columns, or non-finite entries.
    void validate() const;
};

struct ModelMean {
    std::string model;
    double mean = 0.0;
    double std_error = 0.0;
};

struct UpperExpectationEstimate {
    double value = 0.0;  // max over per-model means
    std::vector<ModelMean> per_model;
    std::size_t n_paths = 0;
};

struct EventProbEstimate {
    double upper = 0.0;  // V: max of per-model frequencies
    double lower = 0.0;  // nu: min of per-model frequencies
    std::vector<ModelMean> per_model;
    std::size_t n_paths = 0;
};

UpperExpectationEstimate upper_expect(const StatMatrix& stats);

// -upper_expect(-X); always <= upper_expect(X).value.
double lower_expect(const StatMatrix& stats);

// Entries must be exactly 0 or 1.
EventProbEstimate event_prob(const StatMatrix& indicators);

struct AxiomCheck {
    std::string axiom;
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct AxiomReport {
    double lambda = 0.0;
    double constant = 0.0;
    std::vector<AxiomCheck> checks;
    bool all_pass = false;
};

// Asserts the four sub-linear expectation axioms exactly on a paired
// evaluation grid. Derived statistics (pointwise max, X+Y, lambda*X, the
// constant) are formed at the exact-sum level, where the max-of-means
// identities hold with zero tolerance. Throws "paired evaluation
// required" if x and y do not share the same grid.
AxiomReport check_axioms(const StatMatrix& x, const StatMatrix& y, double lambda, double c);

}  // namespace sublin

#pragma once

#include "sublin/config.hpp"
#include "sublin/report.hpp"

namespace sublin::verify {

// Desk-scale verification experiments. Each runner streams paths with the
// counter-based generator (bank 0; reference means use the independent
// bank 1), writes per-(strategy, function, horizon) statistics into the
// report table, and derives its verdicts purely from that table plus the
// echoed config, so persisted reports can be re-checked offline.

ExperimentReport run_slln(const ExperimentConfig& config);
ExperimentReport run_asclt(const ExperimentConfig& config);
ExperimentReport run_rate(const ExperimentConfig& config);
ExperimentReport check_covariance(const ExperimentConfig& config);
ExperimentReport check_blocks(const ExperimentConfig& config);
ExperimentReport check_inequalities(const ExperimentConfig& config);

// The four sub-linear expectation axioms on 4 synthetic models x
// config.n_paths paths x 20 random statistic pairs, exact comparisons.
ExperimentReport run_axioms(const ExperimentConfig& config);

// Pure function of (experiment, table, config); recomputing on a loaded
// report must reproduce its verdicts.
std::vector<Verdict> derive_verdicts(const std::string& experiment,
                                     const std::vector<TableRow>& table,
                                     const ExperimentConfig& config);

// Re-derives the verdicts of a loaded report from its table and config
// echo; true when they match the persisted ones.
bool recheck(const ExperimentReport& report);

}  // namespace sublin::verify

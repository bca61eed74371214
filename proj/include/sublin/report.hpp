#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sublin {

struct TableRow {
    std::string experiment;
    std::int64_t horizon = 0;
    std::string strategy;
    std::string function;
    std::string statistic;
    double value = 0.0;
    double std_error = 0.0;

    bool operator==(const TableRow&) const = default;
};

// pass / fail / inconclusive / hypotheses_not_met; "exploratory" rows are
// informational and never gate an exit code.
struct Verdict {
    std::string name;
    std::string status;
    double threshold = 0.0;
    double observed = 0.0;
    std::string note;

    bool operator==(const Verdict&) const = default;
};

struct NamedConstant {
    std::string name;
    double value = 0.0;

    bool operator==(const NamedConstant&) const = default;
};

// Self-describing, versioned text record of one verification run. The
// verdicts are a pure function of the table plus the echoed config, so a
// loaded report can be re-checked offline.
struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> config_echo;  // canonical order
    std::string config_hash;
    std::vector<TableRow> table;
    std::vector<Verdict> verdicts;
    std::vector<NamedConstant> constants;

    bool operator==(const ExperimentReport&) const = default;

    [[nodiscard]] bool any_status(const std::string& status) const;
    // 0 all pass, 1 any fail, 3 inconclusive or hypotheses unmet.
    [[nodiscard]] int exit_code() const;
};

std::string serialize_report(const ExperimentReport& report);
ExperimentReport parse_report(const std::string& text);

void persist(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport load(const std::filesystem::path& path);

// Standalone CSV of the table: experiment,horizon,strategy,function,statistic,value,stderr
void write_table_csv(const ExperimentReport& report, std::ostream& os);

}  // namespace sublin

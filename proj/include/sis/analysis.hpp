// Configuration ingestion, pipeline orchestration and report emission.
#pragma once

#include "sis/frames.hpp"
#include "sis/oracle.hpp"

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sis {

struct AnalysisToggles {
    bool order = true;
    bool frames = true;
    bool support_bounds = true;
    bool oracle = true;
    bool operator==(const AnalysisToggles&) const = default;
};

struct AnalysisOutputs {
    std::string report_path;  // empty: print to stdout
    std::string csv_dir;      // empty: no CSV bundle
    bool operator==(const AnalysisOutputs&) const = default;
};

struct AnalysisConfig {
    std::vector<GeneratorSpec> generators;
    int grid_m = 256;
    int grid_k = 16;
    int n_max = 16;
    double rel_tol = 1e-8;
    double oracle_tol = 1e-6;
    AnalysisOutputs outputs;
    AnalysisToggles analyses;

    FrequencyGrid grid() const { return FrequencyGrid(grid_m, grid_k); }
    bool operator==(const AnalysisConfig&) const = default;
};

/// Parses and validates a JSON config, filling defaults. Error messages
/// carry the offending field path.
AnalysisConfig parse_config(const std::string& text);
AnalysisConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const AnalysisConfig& config);
void validate_config(const AnalysisConfig& config);

struct InvarianceReport {
    explicit InvarianceReport(AnalysisConfig cfg)
        : config(std::move(cfg)), dimension{config.grid(), {}, config.rel_tol} {}

    AnalysisConfig config;

    RankProfile dimension;
    std::vector<Eigen::VectorXd> eigenvalue_field;  // ascending eigenvalues per cell

    struct PerModulus {
        InvarianceVerdict rank_verdict;
        std::vector<int> rank_full;
        std::vector<int> rank_cutoff_sum;
        std::optional<InvarianceVerdict> oracle_verdict;
        std::vector<double> residual_field;
    };
    std::vector<PerModulus> per_n;  // n = 2..n_max (empty when order disabled)
    std::optional<OrderResult> order;
    bool ti = false;

    SupportBudget support;
    std::vector<ZeroSetReport> zero_set_checks;
    std::vector<int> zero_set_skipped;  // invariant n with no window for I = [0, n)

    std::optional<FrameBounds> bounds;
    bool parseval = false;
    std::vector<CutoffFrameReport> cutoff_frames;

    bool oracle_agreement = true;
    std::vector<double> tail_energy;  // per generator, NaN when not estimable
    std::vector<std::string> caveats;
    std::vector<std::string> warnings;
};

/// Runs every enabled analysis. Deterministic for a fixed config; module
/// errors are annotated with the pipeline stage that raised them.
InvarianceReport run_analysis(const AnalysisConfig& config);

/// Cross-field consistency of an assembled report; returns found violations.
std::vector<std::string> validate_report(const InvarianceReport& report);

nlohmann::json report_to_json(const InvarianceReport& report);

/// Writes the schema-versioned JSON report to a file.
void emit_report_json(const InvarianceReport& report, const std::string& path);

/// Writes the CSV bundle: dimension function, eigenvalue field, one rank
/// profile per tested n, and residual profiles when the oracle ran.
void emit_report_csv(const InvarianceReport& report, const std::string& dir);

}  // namespace sis

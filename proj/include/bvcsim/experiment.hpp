#ifndef BVCSIM_EXPERIMENT_HPP
#define BVCSIM_EXPERIMENT_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvcsim/config.hpp"
#include "bvcsim/metrics.hpp"

namespace bvcsim {

struct TrialOutcome {
    std::filesystem::path dir;
    std::filesystem::path trace_path;
    std::filesystem::path snapshot_path;
    PhaseStats exploration;
    PhaseStats sampling;
    double coverage = 0.0;  // fraction of hex bins visited in the sampling phase
};

/// Runs exploration (plasticity on) then sampling (plasticity off), writing
/// config.json, trace.txt and snapshot.txt into cfg.out_dir.
TrialOutcome run_trial(const RunConfig& cfg, std::ostream* log = nullptr);

struct AnalysisOutput {
    std::string config_digest;
    std::string model;
    int env = 0;
    ModalitySummary summary;
    std::vector<ModalityResult> modality;
    std::vector<double> sai_values;
    double msai = 0.0;
    double coverage = 0.0;
    BinnedTrace binned;
};

/// Bins the trace and computes the modality and aliasing metrics. The config
/// must carry the parameters the trace was produced with; its digest is
/// checked against the trace header.
AnalysisOutput analyze_trace(const std::filesystem::path& trace_path,
                             const RunConfig& cfg);

/// Writes analysis.json, summary.csv, modality.csv, sai.txt and maps.txt.
void write_analysis(const AnalysisOutput& out, const RunConfig& cfg,
                    const std::filesystem::path& dir);

/// Renders activation hexmaps and the SAI heatmap from a written analysis
/// directory into dir/render. `cells` selects map images: "all", "none" or a
/// comma-separated index list.
void render_analysis(const std::filesystem::path& analysis_dir,
                     const std::string& cells = "all", int scale = 8);

struct SuiteTrialRow {
    ModelName model;
    int env = 0;
    ModalitySummary summary;
    std::vector<int> mi_values;  // per place cell
    double msai = 0.0;
    double coverage = 0.0;
};

struct SuiteOutcome {
    std::vector<SuiteTrialRow> rows;  // model-major, env-minor, 16 rows
    std::filesystem::path dir;

    const SuiteTrialRow& row(ModelName m, int env) const;
};

/// Runs the full 4-model x 4-environment grid with per-trial seeds derived
/// from cfg.seed, analyzes every trial, and writes suite_summary.csv, metric
/// bar charts and the 4x4 SAI sheet under cfg.out_dir. Trials run in
/// parallel on cfg.threads workers (0 = hardware concurrency); results do
/// not depend on scheduling.
SuiteOutcome run_suite(const RunConfig& cfg, std::ostream* log = nullptr);

/// Per-trial seed for one cell of the suite grid (stable across runs).
std::uint64_t suite_trial_seed(std::uint64_t base_seed, ModelName model, int env);

}  // namespace bvcsim

#endif

// Command-line front end: run single trials, analyze traces, render maps,
// or run the full 4-model x 4-environment suite.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bvcsim/experiment.hpp"
#include "bvcsim/recording.hpp"

namespace fs = std::filesystem;
using namespace bvcsim;

namespace {

struct CommonFlags {
    std::optional<std::string> config_path;
    std::optional<std::string> model;
    std::optional<int> env;
    std::optional<std::uint64_t> seed;
    std::optional<int> exploration_steps;
    std::optional<int> sampling_steps;
    std::optional<std::string> out;
    std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file")
        ->envname("BVCSIM_CONFIG");
    cmd->add_option("--model", f.model, "model preset: 2d, 3d01, 3d02, 3d3")
        ->envname("BVCSIM_MODEL");
    cmd->add_option("--env", f.env, "environment preset 1..4 (tilt 0/30/45/60 deg)")
        ->envname("BVCSIM_ENV");
    cmd->add_option("--seed", f.seed, "master seed")->envname("BVCSIM_SEED");
    cmd->add_option("--exploration-steps", f.exploration_steps,
                    "exploration phase length")
        ->envname("BVCSIM_EXPLORATION_STEPS");
    cmd->add_option("--sampling-steps", f.sampling_steps, "sampling phase length")
        ->envname("BVCSIM_SAMPLING_STEPS");
    cmd->add_option("--out", f.out, "output directory")->envname("BVCSIM_OUT");
    cmd->add_option("--threads", f.threads, "worker threads (0 = hardware)")
        ->envname("BVCSIM_THREADS");
}

// Flags win over the config file, which wins over defaults.
RunConfig resolve_config(const CommonFlags& f, const fs::path& fallback_config = {}) {
    RunConfig cfg;
    if (f.config_path) {
        cfg.apply_file(*f.config_path);
    } else if (!fallback_config.empty() && fs::exists(fallback_config)) {
        cfg.apply_file(fallback_config);
    }
    if (f.model) {
        cfg.model = model_name_from_str(*f.model);
        cfg.model_config = ModelConfig::preset(cfg.model);
    }
    if (f.env) {
        cfg.env = *f.env;
        cfg.environment.tilt_deg = RunConfig::env_tilt_deg(cfg.env);
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.exploration_steps) cfg.walk.exploration_steps = *f.exploration_steps;
    if (f.sampling_steps) cfg.walk.sampling_steps = *f.sampling_steps;
    if (f.out) cfg.out_dir = *f.out;
    if (f.threads) cfg.threads = *f.threads;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary-vector-cell place network simulator"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    CLI::App* cmd_run = app.add_subcommand("run", "run one trial (exploration + sampling)");
    add_common_flags(cmd_run, run_flags);

    CommonFlags analyze_flags;
    std::string analyze_trace_path;
    std::string analyze_out;
    CLI::App* cmd_analyze = app.add_subcommand("analyze", "bin a trace and compute metrics");
    cmd_analyze->add_option("trace", analyze_trace_path, "trace file")->required();
    cmd_analyze->add_option("--analysis-out", analyze_out,
                            "analysis directory (default: <trace dir>/analysis)");
    add_common_flags(cmd_analyze, analyze_flags);

    std::string render_dir;
    std::string render_cells = "all";
    int render_scale = 8;
    CLI::App* cmd_render = app.add_subcommand("render", "render maps from an analysis directory");
    cmd_render->add_option("analysis_dir", render_dir, "directory written by analyze")->required();
    cmd_render->add_option("--cells", render_cells, "all, none, or comma-separated indices");
    cmd_render->add_option("--scale", render_scale, "pixels per hex bin")
        ->check(CLI::PositiveNumber);

    CommonFlags suite_flags;
    CLI::App* cmd_suite = app.add_subcommand("suite", "run all 16 trials and aggregate");
    add_common_flags(cmd_suite, suite_flags);

    try {
        app.parse(argc, argv);

        if (cmd_run->parsed()) {
            const RunConfig cfg = resolve_config(run_flags);
            const TrialOutcome outcome = run_trial(cfg, &std::cout);
            std::cout << "trace: " << outcome.trace_path.string() << "\n";
            std::cout << "snapshot: " << outcome.snapshot_path.string() << "\n";
        } else if (cmd_analyze->parsed()) {
            const fs::path trace_path = analyze_trace_path;
            const RunConfig cfg =
                resolve_config(analyze_flags, trace_path.parent_path() / "config.json");
            const AnalysisOutput out = analyze_trace(trace_path, cfg);
            const fs::path dir =
                analyze_out.empty() ? trace_path.parent_path() / "analysis" : fs::path(analyze_out);
            write_analysis(out, cfg, dir);
            std::cout << "model " << out.model << " env " << out.env << ": frac_mi_gt0 "
                      << out.summary.frac_mi_gt0 << ", avg_mi_nonzero "
                      << out.summary.avg_mi_nonzero << ", frac_mi_gt1 "
                      << out.summary.frac_mi_gt1 << ", msai " << out.msai << "\n";
            std::cout << "analysis: " << dir.string() << "\n";
        } else if (cmd_render->parsed()) {
            render_analysis(render_dir, render_cells, render_scale);
            std::cout << "rendered: " << (fs::path(render_dir) / "render").string() << "\n";
        } else if (cmd_suite->parsed()) {
            RunConfig cfg = resolve_config(suite_flags);
            if (!suite_flags.out && cfg.out_dir == "out") cfg.out_dir = "suite_out";
            const SuiteOutcome outcome = run_suite(cfg, &std::cout);
            std::cout << "suite summary: "
                      << (outcome.dir / "suite_summary.csv").string() << "\n";
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TraceError& e) {
        if (e.kind == TraceError::Kind::digest) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

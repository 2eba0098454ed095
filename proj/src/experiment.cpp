#include "bvcsim/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "bvcsim/agent.hpp"
#include "bvcsim/image.hpp"
#include "bvcsim/recording.hpp"

namespace bvcsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr ModelName kSuiteModels[] = {ModelName::model_2d, ModelName::model_3d_01,
                                      ModelName::model_3d_02,
                                      ModelName::model_3d_three_layer};

HexGrid grid_for(const RunConfig& cfg) {
    const double h = cfg.environment.arena_side / 2.0;
    const Aabb bounds{{-h, -h, 0.0}, {h, h, cfg.environment.wall_height}};
    return HexGrid(bounds, cfg.hex.nx, cfg.hex.ny);
}

double coverage_of(const std::vector<long>& visit_counts) {
    long visited = 0;
    for (long v : visit_counts) {
        if (v > 0) ++visited;
    }
    return static_cast<double>(visited) / static_cast<double>(visit_counts.size());
}

void write_matrix(std::ostream& os, const std::vector<double>& values, int nx, int ny) {
    char buf[32];
    for (int r = 0; r < ny; ++r) {
        for (int c = 0; c < nx; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", values[static_cast<size_t>(r) * nx + c]);
            os << buf << (c + 1 == nx ? '\n' : ' ');
        }
    }
}

std::vector<double> read_matrix(std::istream& is, int nx, int ny) {
    while (is.peek() == '#') {
        std::string skip;
        std::getline(is, skip);
    }
    std::vector<double> v(static_cast<size_t>(nx) * ny);
    for (double& x : v) {
        if (!(is >> x)) throw std::runtime_error("matrix read failed");
    }
    return v;
}

}  // namespace

TrialOutcome run_trial(const RunConfig& cfg, std::ostream* log) {
    cfg.validate();
    TrialOutcome outcome;
    outcome.dir = cfg.out_dir;
    fs::create_directories(outcome.dir);
    cfg.write_file(outcome.dir / "config.json");

    const World world = build_arena(cfg.environment);
    const BvcPopulation population(cfg.model_config);
    PlaceCellNetwork net(cfg.n_p, population.n_cells(), cfg.pcn,
                         Rng::derive_seed(cfg.seed, 1));

    WalkParams walk = cfg.walk;
    walk.seed = Rng::derive_seed(cfg.seed, 2);
    Rng rng(walk.seed);

    AgentState state;
    state.pose.x = -cfg.environment.arena_side / 4.0;
    state.pose.y = -cfg.environment.arena_side / 4.0;
    state.pose.heading = 0.0;

    if (log) *log << "exploration (" << walk.exploration_steps << " steps)\n";
    outcome.exploration = run_phase(world, population, net, state, walk,
                                    walk.exploration_steps, true, nullptr, rng, log);

    TraceHeader header;
    header.model = model_name_str(cfg.model);
    header.env_tilt_deg = cfg.environment.tilt_deg;
    header.n_p = cfg.n_p;
    header.n_b = population.n_cells();
    header.seed = cfg.seed;
    header.config_digest = cfg.digest();
    outcome.trace_path = outcome.dir / "trace.txt";
    {
        TraceWriter writer(outcome.trace_path, header);
        if (log) *log << "sampling (" << walk.sampling_steps << " steps)\n";
        outcome.sampling = run_phase(world, population, net, state, walk,
                                     walk.sampling_steps, false, &writer, rng, log);
        writer.close();
    }

    outcome.snapshot_path = outcome.dir / "snapshot.txt";
    {
        std::ofstream snap(outcome.snapshot_path, std::ios::binary);
        net.save(snap);
        if (!snap) throw std::runtime_error("snapshot write failed");
    }

    // Sampling-phase coverage over the analysis grid.
    const HexGrid grid = grid_for(cfg);
    TraceReader reader(outcome.trace_path);
    std::vector<long> visits(grid.n_bins(), 0);
    while (auto s = reader.next()) ++visits[grid.bin_index(s->x, s->y)];
    outcome.coverage = coverage_of(visits);
    if (log) {
        *log << "coverage " << 100.0 * outcome.coverage << "% of " << grid.n_bins()
             << " bins\n";
    }
    return outcome;
}

AnalysisOutput analyze_trace(const fs::path& trace_path, const RunConfig& cfg) {
    cfg.validate();
    TraceReader reader(trace_path);
    reader.require_digest(cfg.digest());

    AnalysisOutput out;
    out.config_digest = cfg.digest();
    out.model = reader.header().model;
    out.env = cfg.env;

    const HexGrid grid = grid_for(cfg);
    out.binned = bin_trace(reader, grid);
    out.coverage = coverage_of(out.binned.visit_counts);

    out.modality.reserve(out.binned.maps.size());
    for (const ActivationMap& map : out.binned.maps) {
        out.modality.push_back(modality_index(map, grid));
    }
    out.summary = modality_summary(out.modality);

    const int threads = cfg.threads > 0 ? cfg.threads
                                        : static_cast<int>(std::thread::hardware_concurrency());
    out.sai_values = sai_all(out.binned.maps, grid, cfg.aliasing, std::max(1, threads));
    double sum = 0.0;
    for (double v : out.sai_values) sum += v;
    out.msai = sum / out.sai_values.size();
    return out;
}

void write_analysis(const AnalysisOutput& out, const RunConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    const HexGrid grid = grid_for(cfg);

    {
        json j{{"digest", out.config_digest},
               {"model", out.model},
               {"env", out.env},
               {"env_tilt_deg", cfg.environment.tilt_deg},
               {"arena_side", cfg.environment.arena_side},
               {"n_p", cfg.n_p},
               {"hex", {{"nx", cfg.hex.nx}, {"ny", cfg.hex.ny}}},
               {"aliasing", {{"d_th", cfg.aliasing.d_th}}},
               {"frac_mi_gt0", out.summary.frac_mi_gt0},
               {"avg_mi_nonzero", out.summary.avg_mi_nonzero},
               {"frac_mi_gt1", out.summary.frac_mi_gt1},
               {"msai", out.msai},
               {"coverage", out.coverage}};
        std::ofstream os(dir / "analysis.json", std::ios::binary);
        os << j.dump(2) << '\n';
        if (!os) throw std::runtime_error("analysis.json write failed");
    }
    {
        std::ofstream os(dir / "summary.csv", std::ios::binary);
        char buf[160];
        os << "model,env,frac_mi_gt0,avg_mi_nonzero,frac_mi_gt1,msai,coverage,digest\n";
        std::snprintf(buf, sizeof buf, "%s,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%s\n",
                      out.model.c_str(), out.env, out.summary.frac_mi_gt0,
                      out.summary.avg_mi_nonzero, out.summary.frac_mi_gt1, out.msai,
                      out.coverage, out.config_digest.c_str());
        os << buf;
    }
    {
        std::ofstream os(dir / "modality.csv", std::ios::binary);
        os << "# digest " << out.config_digest << '\n';
        os << "cell,mi\n";
        for (const ModalityResult& r : out.modality) {
            os << r.cell_index << ',' << r.mi << '\n';
        }
    }
    {
        std::ofstream os(dir / "sai.txt", std::ios::binary);
        os << "# digest " << out.config_digest << '\n';
        write_matrix(os, out.sai_values, grid.nx(), grid.ny());
    }
    {
        std::ofstream os(dir / "maps.txt", std::ios::binary);
        os << "# digest " << out.config_digest << '\n';
        for (size_t c = 0; c < out.binned.maps.size(); ++c) {
            os << "# cell " << c << " mi " << out.modality[c].mi << '\n';
            write_matrix(os, out.binned.maps[c].values, grid.nx(), grid.ny());
        }
        if (!os) throw std::runtime_error("maps.txt write failed");
    }
}

void render_analysis(const fs::path& analysis_dir, const std::string& cells, int scale) {
    std::ifstream meta_in(analysis_dir / "analysis.json");
    if (!meta_in) {
        throw std::runtime_error("no analysis.json in " + analysis_dir.string());
    }
    const json meta = json::parse(meta_in);
    const std::string digest = meta.at("digest").get<std::string>();
    const int nx = meta.at("hex").at("nx").get<int>();
    const int ny = meta.at("hex").at("ny").get<int>();
    const double side = meta.at("arena_side").get<double>();
    const int n_p = meta.at("n_p").get<int>();
    const Aabb bounds{{-side / 2, -side / 2, 0.0}, {side / 2, side / 2, 1.0}};
    const HexGrid grid(bounds, nx, ny);

    const fs::path render_dir = analysis_dir / "render";
    fs::create_directories(render_dir);

    {
        std::ifstream is(analysis_dir / "sai.txt");
        const std::vector<double> sai_values = read_matrix(is, nx, ny);
        double max_sai = 0.0;
        for (double v : sai_values) max_sai = std::max(max_sai, v);
        render_hex_map(grid, sai_values, 0.0, max_sai > 0 ? max_sai : 1.0, scale)
            .write_ppm(render_dir / "sai.ppm", "digest " + digest);
    }

    std::vector<bool> wanted(n_p, false);
    if (cells == "all") {
        wanted.assign(n_p, true);
    } else if (cells != "none") {
        std::stringstream ss(cells);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const int idx = std::stoi(tok);
            if (idx < 0 || idx >= n_p) throw std::runtime_error("cell index out of range: " + tok);
            wanted[idx] = true;
        }
    }

    std::ifstream maps_in(analysis_dir / "maps.txt");
    if (!maps_in) throw std::runtime_error("no maps.txt in " + analysis_dir.string());
    std::string line;
    if (maps_in.peek() == '#' ) {
        const auto pos = maps_in.tellg();
        std::getline(maps_in, line);
        if (line.rfind("# digest", 0) != 0) maps_in.seekg(pos);  // cell header, put back
    }
    for (int c = 0; c < n_p; ++c) {
        if (!std::getline(maps_in, line) || line.rfind("# cell", 0) != 0) {
            throw std::runtime_error("maps.txt: bad block header for cell " + std::to_string(c));
        }
        const std::vector<double> values = read_matrix(maps_in, nx, ny);
        std::getline(maps_in, line);  // trailing newline of the matrix block
        if (!wanted[c]) continue;
        char name[32];
        std::snprintf(name, sizeof name, "cell_%04d.ppm", c);
        render_hex_map(grid, values, 0.0, 1.0, scale)
            .write_ppm(render_dir / name, "digest " + digest);
    }
}

std::uint64_t suite_trial_seed(std::uint64_t base_seed, ModelName model, int env) {
    const int model_idx = static_cast<int>(model);
    return Rng::derive_seed(base_seed, 100 + model_idx * 4 + (env - 1));
}

const SuiteTrialRow& SuiteOutcome::row(ModelName m, int env) const {
    for (const SuiteTrialRow& r : rows) {
        if (r.model == m && r.env == env) return r;
    }
    throw std::out_of_range("suite row not found");
}

SuiteOutcome run_suite(const RunConfig& base, std::ostream* log) {
    base.validate();
    SuiteOutcome outcome;
    outcome.dir = base.out_dir;
    fs::create_directories(outcome.dir);

    struct Task {
        RunConfig cfg;
        std::string label;
        SuiteTrialRow row;
        std::vector<double> sai_values;
        std::string error;
    };
    std::vector<Task> tasks;
    for (ModelName model : kSuiteModels) {
        for (int env = 1; env <= 4; ++env) {
            Task t;
            t.cfg = base;
            t.cfg.model = model;
            t.cfg.env = env;
            t.cfg.model_config = ModelConfig::preset(model);
            t.cfg.environment.tilt_deg = RunConfig::env_tilt_deg(env);
            t.cfg.seed = suite_trial_seed(base.seed, model, env);
            t.label = std::string(model_name_str(model)) + "_env" + std::to_string(env);
            t.cfg.out_dir = (outcome.dir / t.label).string();
            t.cfg.threads = 1;  // parallelism is across trials
            t.row.model = model;
            t.row.env = env;
            tasks.push_back(std::move(t));
        }
    }

    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int n_threads = std::max(1, std::min<int>(base.threads > 0 ? base.threads : hw,
                                                    static_cast<int>(tasks.size())));
    std::atomic<size_t> cursor{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t k = cursor.fetch_add(1);
            if (k >= tasks.size()) break;
            Task& t = tasks[k];
            try {
                if (log) {
                    std::lock_guard lock(log_mutex);
                    *log << "trial " << t.label << " starting\n";
                }
                const TrialOutcome trial = run_trial(t.cfg, nullptr);
                const AnalysisOutput analysis = analyze_trace(trial.trace_path, t.cfg);
                write_analysis(analysis, t.cfg, fs::path(t.cfg.out_dir) / "analysis");
                t.row.summary = analysis.summary;
                t.row.mi_values.reserve(analysis.modality.size());
                for (const ModalityResult& r : analysis.modality) {
                    t.row.mi_values.push_back(r.mi);
                }
                t.row.msai = analysis.msai;
                t.row.coverage = trial.coverage;
                t.sai_values = analysis.sai_values;
                if (log) {
                    std::lock_guard lock(log_mutex);
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "trial %-9s done: mi>0 %.3f, avg mi %.3f, mi>1 %.3f, "
                                  "msai %.4f, coverage %.3f\n",
                                  t.label.c_str(), t.row.summary.frac_mi_gt0,
                                  t.row.summary.avg_mi_nonzero, t.row.summary.frac_mi_gt1,
                                  t.row.msai, t.row.coverage);
                    *log << buf;
                }
            } catch (const std::exception& e) {
                t.error = e.what();
            }
        }
    };
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const Task& t : tasks) {
        if (!t.error.empty()) {
            throw std::runtime_error("trial " + t.label + " failed: " + t.error);
        }
    }

    {
        std::ofstream os(outcome.dir / "suite_summary.csv", std::ios::binary);
        os << "model,env,frac_mi_gt0,avg_mi_nonzero,frac_mi_gt1,msai,coverage,digest\n";
        char buf[192];
        for (const Task& t : tasks) {
            std::snprintf(buf, sizeof buf, "%s,%d,%.6g,%.6g,%.6g,%.6g,%.6g,%s\n",
                          model_name_str(t.row.model), t.row.env, t.row.summary.frac_mi_gt0,
                          t.row.summary.avg_mi_nonzero, t.row.summary.frac_mi_gt1,
                          t.row.msai, t.row.coverage, t.cfg.digest().c_str());
            os << buf;
        }
    }

    // Aggregate charts (environments as groups, one bar per model) and the
    // 4x4 SAI sheet, models top-down by row, environments left-right.
    std::vector<std::string> group_names{"env1", "env2", "env3", "env4"};
    std::vector<std::string> series_names;
    for (ModelName m : kSuiteModels) series_names.emplace_back(model_name_str(m));
    const auto chart = [&](const char* file, auto&& metric) {
        std::vector<std::vector<double>> values(4, std::vector<double>(4, 0.0));
        for (const Task& t : tasks) {
            const int m = static_cast<int>(t.row.model);
            values[t.row.env - 1][m] = metric(t.row);
        }
        render_bar_chart(group_names, series_names, values)
            .write_ppm(outcome.dir / file, "digest " + base.digest());
    };
    chart("chart_frac_mi_gt0.ppm", [](const SuiteTrialRow& r) { return r.summary.frac_mi_gt0; });
    chart("chart_avg_mi_nonzero.ppm", [](const SuiteTrialRow& r) { return r.summary.avg_mi_nonzero; });
    chart("chart_frac_mi_gt1.ppm", [](const SuiteTrialRow& r) { return r.summary.frac_mi_gt1; });
    chart("chart_msai.ppm", [](const SuiteTrialRow& r) { return r.msai; });

    {
        double max_sai = 0.0;
        for (const Task& t : tasks) {
            for (double v : t.sai_values) max_sai = std::max(max_sai, v);
        }
        const HexGrid grid = grid_for(base);
        std::vector<Image> tiles;
        tiles.reserve(tasks.size());
        for (const Task& t : tasks) {
            tiles.push_back(render_hex_map(grid, t.sai_values, 0.0,
                                           max_sai > 0 ? max_sai : 1.0, 4));
        }
        render_sheet(tiles, 4, 4).write_ppm(outcome.dir / "sai_sheet.ppm", "digest " + base.digest());
    }

    for (Task& t : tasks) outcome.rows.push_back(t.row);
    return outcome;
}

}  // namespace bvcsim

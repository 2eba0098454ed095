#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <set>

#include "bvcsim/metrics.hpp"
#include "bvcsim/rng.hpp"

using namespace bvcsim;
namespace fs = std::filesystem;

namespace {

Aabb arena_bounds(double side = 10.0) {
    return Aabb{{-side / 2, -side / 2, 0.0}, {side / 2, side / 2, 2.5}};
}

// Writes a trace with the given samples and reads it back through bin_trace.
BinnedTrace bin_samples(const std::vector<TraceSample>& samples, int n_p,
                        const HexGrid& grid) {
    const fs::path path = fs::temp_directory_path() / "bvcsim_metrics_trace.txt";
    TraceHeader h;
    h.model = "2d";
    h.n_p = n_p;
    h.n_b = 960;
    h.config_digest = "0";
    {
        TraceWriter writer(path, h);
        for (const TraceSample& s : samples) writer.append(s);
        writer.close();
    }
    TraceReader reader(path);
    return bin_trace(reader, grid);
}

TraceSample at(double x, double y, std::vector<std::pair<int, double>> acts, long step = 0) {
    TraceSample s;
    s.step = step;
    s.x = x;
    s.y = y;
    s.activations = std::move(acts);
    return s;
}

// Brute-force density connectivity: cluster count from core-point components.
int dbscan_cluster_count_oracle(const std::vector<std::array<double, 2>>& pts,
                                double eps, int min_samples) {
    const int n = static_cast<int>(pts.size());
    const double eps2 = eps * eps;
    auto within = [&](int a, int b) {
        const double dx = pts[a][0] - pts[b][0];
        const double dy = pts[a][1] - pts[b][1];
        return dx * dx + dy * dy <= eps2;
    };
    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i) {
        int cnt = 0;
        for (int j = 0; j < n; ++j) {
            if (within(i, j)) ++cnt;
        }
        core[i] = cnt >= min_samples;
    }
    // Union-find over core points.
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        for (int j = i + 1; j < n; ++j) {
            if (core[j] && within(i, j)) parent[find(i)] = find(j);
        }
    }
    std::set<int> roots;
    for (int i = 0; i < n; ++i) {
        if (core[i]) roots.insert(find(i));
    }
    return static_cast<int>(roots.size());
}

ActivationMap disc_map(const HexGrid& grid, std::vector<std::array<double, 2>> centers,
                       double radius) {
    ActivationMap map;
    map.cell_index = 0;
    map.values.assign(grid.n_bins(), 0.0);
    for (int b = 0; b < grid.n_bins(); ++b) {
        for (const auto& c : centers) {
            const double dx = grid.center(b)[0] - c[0];
            const double dy = grid.center(b)[1] - c[1];
            if (dx * dx + dy * dy <= radius * radius) map.values[b] = 1.0;
        }
    }
    return map;
}

}  // namespace

TEST_CASE("hex grid: counts, pitch, offset rows") {
    const HexGrid grid(arena_bounds(), 50, 50);
    CHECK(grid.n_bins() == 2500);
    CHECK(grid.pitch() == doctest::Approx(0.2));
    CHECK(grid.row_pitch() == doctest::Approx(0.2));
    // Row 0 column 0 center at (-4.9, -4.9); row 1 shifted by half a pitch.
    CHECK(grid.center(0)[0] == doctest::Approx(-4.9));
    CHECK(grid.center(0)[1] == doctest::Approx(-4.9));
    CHECK(grid.center(50)[0] == doctest::Approx(-4.8));
    CHECK(grid.center(50)[1] == doctest::Approx(-4.7));
}

TEST_CASE("hex grid: a point on a center maps to that center") {
    const HexGrid grid(arena_bounds(), 50, 50);
    for (int b : {0, 17, 49, 50, 99, 1234, 2499}) {
        const auto c = grid.center(b);
        CHECK(grid.bin_index(c[0], c[1]) == b);
    }
}

TEST_CASE("hex grid: fast assignment equals exhaustive nearest-center search") {
    const HexGrid grid(arena_bounds(), 50, 50);
    Rng rng(31);
    for (int t = 0; t < 3000; ++t) {
        const double x = rng.uniform(-5.0, 5.0);
        const double y = rng.uniform(-5.0, 5.0);
        int best = -1;
        double best_d2 = 0.0;
        for (int b = 0; b < grid.n_bins(); ++b) {
            const double dx = x - grid.center(b)[0];
            const double dy = y - grid.center(b)[1];
            const double d2 = dx * dx + dy * dy;
            if (best < 0 || d2 < best_d2) {
                best = b;
                best_d2 = d2;
            }
        }
        CHECK(grid.bin_index(x, y) == best);
    }
}

TEST_CASE("bin_trace: single sample normalizes to one") {
    const HexGrid grid(arena_bounds(), 50, 50);
    const BinnedTrace bt = bin_samples({at(1.0, 1.0, {{0, 0.37}})}, 2, grid);
    long visits = 0;
    for (long v : bt.visit_counts) visits += v;
    CHECK(visits == 1);
    const int bin = grid.bin_index(1.0, 1.0);
    CHECK(bt.maps[0].values[bin] == doctest::Approx(1.0));
    for (int b = 0; b < grid.n_bins(); ++b) {
        if (b != bin) CHECK(bt.maps[0].values[b] == 0.0);
    }
    // Cell 1 never fired: all-zero map.
    for (double v : bt.maps[1].values) CHECK(v == 0.0);
}

TEST_CASE("bin_trace: uniform rates bin to uniform ones; visits accumulate") {
    const HexGrid grid(arena_bounds(), 50, 50);
    std::vector<TraceSample> samples;
    long step = 0;
    for (double x = -4.5; x <= 4.5; x += 0.5) {
        for (double y = -4.5; y <= 4.5; y += 0.5) {
            samples.push_back(at(x, y, {{0, 0.25}}, step++));
            samples.push_back(at(x, y, {{0, 0.25}}, step++));  // revisit
        }
    }
    const BinnedTrace bt = bin_samples(samples, 1, grid);
    long visits = 0;
    for (long v : bt.visit_counts) visits += v;
    CHECK(visits == static_cast<long>(samples.size()));
    for (int b = 0; b < grid.n_bins(); ++b) {
        if (bt.visit_counts[b] > 0) {
            CHECK(bt.maps[0].values[b] == doctest::Approx(1.0));
            CHECK(bt.visit_counts[b] == 2);
        } else {
            CHECK(bt.maps[0].values[b] == 0.0);
        }
    }
}

TEST_CASE("bin_trace: the 10% quantile threshold zeros the bottom decile") {
    const HexGrid grid(arena_bounds(), 50, 50);
    // 20 distinct bins with means 0.01..0.20 on row y=0 (even row, no offset).
    std::vector<TraceSample> samples;
    for (int i = 0; i < 20; ++i) {
        const auto c = grid.center(grid.bin_index(-4.9 + 0.4 * i, 0.09));
        samples.push_back(at(c[0], c[1], {{0, 0.01 * (i + 1)}}, i));
    }
    const BinnedTrace bt = bin_samples(samples, 1, grid);
    int zeroed = 0, kept = 0;
    for (int i = 0; i < 20; ++i) {
        const int b = grid.bin_index(-4.9 + 0.4 * i, 0.09);
        if (bt.maps[0].values[b] == 0.0) {
            ++zeroed;
            CHECK(i < 2);  // exactly the two smallest means fall below q10 = 0.029
        } else {
            ++kept;
        }
    }
    CHECK(zeroed == 2);
    CHECK(kept == 18);
    // Max normalizes to exactly 1.
    const int top = grid.bin_index(-4.9 + 0.4 * 19, 0.09);
    CHECK(bt.maps[0].values[top] == doctest::Approx(1.0));
}

TEST_CASE("dbscan: dense disc is one cluster, sparse points are noise") {
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < 25; ++i) {
        pts.push_back({0.25 * std::cos(i * 0.251), 0.25 * std::sin(i * 0.251)});
    }
    auto labels = dbscan(pts, 1.0, 20);
    for (int l : labels) CHECK(l == 0);

    std::vector<std::array<double, 2>> sparse;
    for (int i = 0; i < 10; ++i) sparse.push_back({i * 3.0, 0.0});
    for (int l : dbscan(sparse, 1.0, 20)) CHECK(l == -1);
}

TEST_CASE("dbscan: two far blobs form two clusters") {
    std::vector<std::array<double, 2>> pts;
    Rng rng(41);
    for (int i = 0; i < 30; ++i) pts.push_back({rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    for (int i = 0; i < 30; ++i) pts.push_back({5.0 + rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
    const auto labels = dbscan(pts, 1.0, 20);
    std::set<int> clusters;
    for (int l : labels) {
        CHECK(l >= 0);
        clusters.insert(l);
    }
    CHECK(clusters.size() == 2);
}

TEST_CASE("dbscan cluster count matches brute-force density connectivity") {
    Rng rng(43);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<std::array<double, 2>> pts;
        const int blobs = 1 + static_cast<int>(rng.uniform() * 4);
        for (int b = 0; b < blobs; ++b) {
            const double cx = rng.uniform(-4.0, 4.0);
            const double cy = rng.uniform(-4.0, 4.0);
            const int m = 15 + static_cast<int>(rng.uniform() * 60);
            for (int i = 0; i < m; ++i) {
                pts.push_back({cx + rng.normal(0.0, 0.3), cy + rng.normal(0.0, 0.3)});
            }
        }
        for (int i = 0; i < 40; ++i) {
            pts.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
        }
        REQUIRE(pts.size() <= 500);

        const auto labels = dbscan(pts, 1.0, 20);
        int clusters = 0;
        for (int l : labels) clusters = std::max(clusters, l + 1);
        CHECK(clusters == dbscan_cluster_count_oracle(pts, 1.0, 20));

        // Cluster count is stable under input reordering.
        std::vector<std::array<double, 2>> shuffled = pts;
        for (size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[static_cast<size_t>(rng.uniform() * i)]);
        }
        const auto labels2 = dbscan(shuffled, 1.0, 20);
        int clusters2 = 0;
        for (int l : labels2) clusters2 = std::max(clusters2, l + 1);
        CHECK(clusters2 == clusters);
    }
}

TEST_CASE("modality index: zero, single and four-field maps") {
    const HexGrid grid(arena_bounds(), 50, 50);

    ActivationMap zero;
    zero.cell_index = 0;
    zero.values.assign(grid.n_bins(), 0.0);
    CHECK(modality_index(zero, grid).mi == 0);

    const ActivationMap one = disc_map(grid, {{1.5, -2.0}}, 0.6);
    CHECK(modality_index(one, grid).mi == 1);

    // Cross-symmetric four-field map.
    const ActivationMap four =
        disc_map(grid, {{2.5, 2.5}, {-2.5, 2.5}, {-2.5, -2.5}, {2.5, -2.5}}, 0.6);
    CHECK(modality_index(four, grid).mi == 4);

    // MI ignores any positive rescaling of the map.
    ActivationMap scaled = four;
    for (double& v : scaled.values) v *= 0.123;
    CHECK(modality_index(scaled, grid).mi == 4);
}

TEST_CASE("modality summary ratios") {
    auto mk = [](std::vector<int> mis) {
        std::vector<ModalityResult> rs;
        for (size_t i = 0; i < mis.size(); ++i) rs.push_back({static_cast<int>(i), mis[i]});
        return rs;
    };
    const ModalitySummary all_one = modality_summary(mk({1, 1, 1, 1}));
    CHECK(all_one.frac_mi_gt0 == doctest::Approx(1.0));
    CHECK(all_one.avg_mi_nonzero == doctest::Approx(1.0));
    CHECK(all_one.frac_mi_gt1 == doctest::Approx(0.0));

    const ModalitySummary half = modality_summary(mk({0, 2}));
    CHECK(half.frac_mi_gt0 == doctest::Approx(0.5));
    CHECK(half.avg_mi_nonzero == doctest::Approx(2.0));
    CHECK(half.frac_mi_gt1 == doctest::Approx(0.5));

    // 40% of cells bimodal, 60% unimodal.
    std::vector<int> mix;
    for (int i = 0; i < 100; ++i) mix.push_back(i < 40 ? 2 : 1);
    CHECK(modality_summary(mk(mix)).frac_mi_gt1 == doctest::Approx(0.4));
}

TEST_CASE("sai: orthogonal bins score zero") {
    const HexGrid grid(arena_bounds(), 5, 5);
    const AliasingParams params;  // d_th = 2
    // Cell i active exactly in bin i: all bin vectors mutually orthogonal.
    std::vector<ActivationMap> maps(grid.n_bins());
    for (int c = 0; c < grid.n_bins(); ++c) {
        maps[c].cell_index = c;
        maps[c].values.assign(grid.n_bins(), 0.0);
        maps[c].values[c] = 1.0;
    }
    for (int b = 0; b < grid.n_bins(); ++b) {
        CHECK(sai(b, maps, grid, params) == 0.0);
    }
    CHECK(msai(maps, grid, params) == 0.0);
}

TEST_CASE("sai: two identical distant bins score 1/N") {
    const HexGrid grid(arena_bounds(), 50, 50);
    const AliasingParams params;
    const int b1 = grid.bin_index(-3.0, 0.0);
    const int b2 = grid.bin_index(3.0, 0.0);  // 6 m apart > d_th
    std::vector<ActivationMap> maps(3);
    for (int c = 0; c < 3; ++c) {
        maps[c].cell_index = c;
        maps[c].values.assign(grid.n_bins(), 0.0);
    }
    maps[0].values[b1] = 0.8;
    maps[0].values[b2] = 0.8;
    maps[1].values[b1] = 0.4;
    maps[1].values[b2] = 0.4;

    CHECK(sai(b1, maps, grid, params) == doctest::Approx(1.0 / 2500).epsilon(1e-12));
    CHECK(sai(b2, maps, grid, params) == doctest::Approx(1.0 / 2500).epsilon(1e-12));
    CHECK(msai(maps, grid, params) == doctest::Approx(2.0 / (2500.0 * 2500.0)).epsilon(1e-12));

    // A threshold beyond the arena diagonal suppresses everything.
    AliasingParams far;
    far.d_th = 15.0;
    CHECK(msai(maps, grid, far) == 0.0);
}

TEST_CASE("sai/msai match the naive double loop within 1e-9") {
    const HexGrid grid(arena_bounds(), 20, 20);
    const AliasingParams params;
    Rng rng(51);
    const int n_cells = 30;
    std::vector<ActivationMap> maps(n_cells);
    for (int c = 0; c < n_cells; ++c) {
        maps[c].cell_index = c;
        maps[c].values.assign(grid.n_bins(), 0.0);
        for (int b = 0; b < grid.n_bins(); ++b) {
            if (rng.uniform() < 0.3) maps[c].values[b] = rng.uniform();
        }
    }

    // Naive oracle straight from the definition.
    const int n = grid.n_bins();
    std::vector<double> oracle(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dx = grid.center(i)[0] - grid.center(j)[0];
            const double dy = grid.center(i)[1] - grid.center(j)[1];
            if (std::sqrt(dx * dx + dy * dy) <= params.d_th) continue;
            double dot = 0.0, ni = 0.0, nj = 0.0;
            for (int c = 0; c < n_cells; ++c) {
                dot += maps[c].values[i] * maps[c].values[j];
                ni += maps[c].values[i] * maps[c].values[i];
                nj += maps[c].values[j] * maps[c].values[j];
            }
            if (ni > 0.0 && nj > 0.0) sum += dot / (std::sqrt(ni) * std::sqrt(nj));
        }
        oracle[i] = sum / n;
    }

    const std::vector<double> got = sai_all(maps, grid, params, 1);
    double max_diff = 0.0;
    for (int i = 0; i < n; ++i) max_diff = std::max(max_diff, std::abs(got[i] - oracle[i]));
    CHECK(max_diff <= 1e-9);

    const std::vector<double> threaded = sai_all(maps, grid, params, 3);
    CHECK(threaded == got);

    double oracle_msai = 0.0;
    for (double v : oracle) oracle_msai += v;
    oracle_msai /= n;
    CHECK(msai(maps, grid, params) == doctest::Approx(oracle_msai).epsilon(1e-9));

    for (double v : got) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // Single-bin sai agrees with the batch path exactly.
    CHECK(sai(7, maps, grid, params) == got[7]);
}

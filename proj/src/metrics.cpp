#include "bvcsim/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <thread>

namespace bvcsim {

HexGrid::HexGrid(const Aabb& bounds, int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx <= 0 || ny <= 0) throw std::invalid_argument("HexGrid: nx, ny must be positive");
    x_min_ = bounds.lo.x;
    y_min_ = bounds.lo.y;
    pitch_ = (bounds.hi.x - bounds.lo.x) / nx;
    row_pitch_ = (bounds.hi.y - bounds.lo.y) / ny;
    centers_.reserve(static_cast<size_t>(nx_) * ny_);
    for (int r = 0; r < ny_; ++r) {
        const double offset = (r % 2 == 1) ? pitch_ / 2.0 : 0.0;
        const double cy = y_min_ + (r + 0.5) * row_pitch_;
        for (int c = 0; c < nx_; ++c) {
            centers_.push_back({x_min_ + (c + 0.5) * pitch_ + offset, cy});
        }
    }
}

int HexGrid::bin_index(double x, double y) const {
    const int r0 = static_cast<int>(std::lround((y - y_min_) / row_pitch_ - 0.5));
    int best = -1;
    double best_d2 = 0.0;
    for (int r = std::max(0, r0 - 1); r <= std::min(ny_ - 1, r0 + 1); ++r) {
        const double offset = (r % 2 == 1) ? pitch_ / 2.0 : 0.0;
        const int c0 = static_cast<int>(std::lround((x - x_min_ - offset) / pitch_ - 0.5));
        for (int c = std::max(0, c0 - 1); c <= std::min(nx_ - 1, c0 + 1); ++c) {
            const int idx = r * nx_ + c;
            const double dx = x - centers_[idx][0];
            const double dy = y - centers_[idx][1];
            const double d2 = dx * dx + dy * dy;
            if (best < 0 || d2 < best_d2) {
                best = idx;
                best_d2 = d2;
            }
        }
    }
    return best;
}

namespace {

// Linear-interpolation quantile of sorted values (numpy convention).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * (sorted.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BinnedTrace bin_trace(TraceReader& trace, const HexGrid& grid) {
    const int n_p = trace.header().n_p;
    const int n_bins = grid.n_bins();

    BinnedTrace out;
    out.visit_counts.assign(n_bins, 0);
    std::vector<double> sums(static_cast<size_t>(n_p) * n_bins, 0.0);
    while (auto s = trace.next()) {
        const int bin = grid.bin_index(s->x, s->y);
        ++out.visit_counts[bin];
        for (const auto& [cell, rate] : s->activations) {
            sums[static_cast<size_t>(cell) * n_bins + bin] += rate;
        }
    }

    out.maps.resize(n_p);
    std::vector<double> positive;
    for (int cell = 0; cell < n_p; ++cell) {
        ActivationMap& map = out.maps[cell];
        map.cell_index = cell;
        map.values.assign(n_bins, 0.0);
        const double* cell_sums = sums.data() + static_cast<size_t>(cell) * n_bins;
        positive.clear();
        for (int b = 0; b < n_bins; ++b) {
            if (out.visit_counts[b] > 0 && cell_sums[b] > 0.0) {
                map.values[b] = cell_sums[b] / out.visit_counts[b];
                positive.push_back(map.values[b]);
            }
        }
        if (positive.empty()) continue;
        std::sort(positive.begin(), positive.end());
        const double threshold = quantile_sorted(positive, 0.10);
        double max_val = 0.0;
        for (double& v : map.values) {
            if (v < threshold) v = 0.0;
            max_val = std::max(max_val, v);
        }
        if (max_val > 0.0) {
            for (double& v : map.values) v /= max_val;
        }
    }
    return out;
}

std::vector<int> dbscan(const std::vector<std::array<double, 2>>& points, double eps,
                        int min_samples) {
    if (eps <= 0.0) throw std::invalid_argument("dbscan: eps must be positive");
    const int n = static_cast<int>(points.size());
    const double eps2 = eps * eps;
    const auto within = [&](int a, int b) {
        const double dx = points[a][0] - points[b][0];
        const double dy = points[a][1] - points[b][1];
        return dx * dx + dy * dy <= eps2;
    };

    std::vector<bool> core(n, false);
    for (int i = 0; i < n; ++i) {
        int count = 0;
        for (int j = 0; j < n; ++j) {
            if (within(i, j)) ++count;  // self-inclusive
        }
        core[i] = count >= min_samples;
    }

    std::vector<int> labels(n, -1);
    std::vector<bool> queued(n, false);
    int next_cluster = 0;
    std::deque<int> frontier;
    for (int i = 0; i < n; ++i) {
        if (!core[i] || labels[i] != -1) continue;
        const int cluster = next_cluster++;
        labels[i] = cluster;
        frontier.clear();
        frontier.push_back(i);
        queued[i] = true;
        while (!frontier.empty()) {
            const int q = frontier.front();
            frontier.pop_front();
            for (int j = 0; j < n; ++j) {
                if (labels[j] == -1 && within(q, j)) {
                    labels[j] = cluster;  // border or core reachable from q
                    if (core[j] && !queued[j]) {
                        frontier.push_back(j);
                        queued[j] = true;
                    }
                }
            }
        }
    }
    return labels;
}

ModalityResult modality_index(const ActivationMap& map, const HexGrid& grid, double eps,
                              int min_samples) {
    std::vector<std::array<double, 2>> active;
    for (int b = 0; b < grid.n_bins(); ++b) {
        if (map.values[b] > 0.0) active.push_back(grid.center(b));
    }
    const std::vector<int> labels = dbscan(active, eps, min_samples);
    int clusters = 0;
    for (int l : labels) clusters = std::max(clusters, l + 1);
    return ModalityResult{map.cell_index, clusters};
}

ModalitySummary modality_summary(const std::vector<ModalityResult>& results) {
    if (results.empty()) throw std::invalid_argument("modality_summary: empty input");
    ModalitySummary s;
    long nonzero = 0;
    long multi = 0;
    long total_mi = 0;
    for (const ModalityResult& r : results) {
        if (r.mi > 0) {
            ++nonzero;
            total_mi += r.mi;
        }
        if (r.mi > 1) ++multi;
    }
    const double n = static_cast<double>(results.size());
    s.frac_mi_gt0 = nonzero / n;
    s.avg_mi_nonzero = nonzero > 0 ? static_cast<double>(total_mi) / nonzero : 0.0;
    s.frac_mi_gt1 = multi / n;
    return s;
}

namespace {

// Row-normalized bin-major activation matrix; zero rows stay zero.
struct BinMatrix {
    int n_bins = 0;
    int n_cells = 0;
    std::vector<double> rows;       // n_bins x n_cells
    std::vector<bool> nonzero;

    BinMatrix(const std::vector<ActivationMap>& maps, const HexGrid& grid) {
        n_bins = grid.n_bins();
        n_cells = static_cast<int>(maps.size());
        rows.assign(static_cast<size_t>(n_bins) * n_cells, 0.0);
        nonzero.assign(n_bins, false);
        for (int c = 0; c < n_cells; ++c) {
            for (int b = 0; b < n_bins; ++b) {
                rows[static_cast<size_t>(b) * n_cells + c] = maps[c].values[b];
            }
        }
        for (int b = 0; b < n_bins; ++b) {
            double* row = rows.data() + static_cast<size_t>(b) * n_cells;
            double norm2 = 0.0;
            for (int c = 0; c < n_cells; ++c) norm2 += row[c] * row[c];
            if (norm2 > 0.0) {
                nonzero[b] = true;
                const double inv = 1.0 / std::sqrt(norm2);
                for (int c = 0; c < n_cells; ++c) row[c] *= inv;
            }
        }
    }
};

double sai_row(int i, const BinMatrix& m, const HexGrid& grid, double d_th) {
    if (!m.nonzero[i]) return 0.0;
    const double d_th2 = d_th * d_th;
    const auto ci = grid.center(i);
    const double* row_i = m.rows.data() + static_cast<size_t>(i) * m.n_cells;
    double sum = 0.0;
    for (int j = 0; j < m.n_bins; ++j) {
        if (j == i || !m.nonzero[j]) continue;
        const auto cj = grid.center(j);
        const double dx = ci[0] - cj[0];
        const double dy = ci[1] - cj[1];
        if (dx * dx + dy * dy <= d_th2) continue;
        const double* row_j = m.rows.data() + static_cast<size_t>(j) * m.n_cells;
        double dot = 0.0;
        for (int c = 0; c < m.n_cells; ++c) dot += row_i[c] * row_j[c];
        sum += dot;
    }
    return sum / m.n_bins;
}

}  // namespace

double sai(int bin, const std::vector<ActivationMap>& maps, const HexGrid& grid,
           const AliasingParams& params) {
    const BinMatrix m(maps, grid);
    return sai_row(bin, m, grid, params.d_th);
}

std::vector<double> sai_all(const std::vector<ActivationMap>& maps, const HexGrid& grid,
                            const AliasingParams& params, int n_threads) {
    const BinMatrix m(maps, grid);
    std::vector<double> out(grid.n_bins(), 0.0);
    if (n_threads <= 1) {
        for (int i = 0; i < grid.n_bins(); ++i) out[i] = sai_row(i, m, grid, params.d_th);
        return out;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    std::atomic<int> cursor{0};
    for (int t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = cursor.fetch_add(1);
                if (i >= grid.n_bins()) break;
                out[i] = sai_row(i, m, grid, params.d_th);
            }
        });
    }
    for (auto& w : workers) w.join();
    return out;
}

double msai(const std::vector<ActivationMap>& maps, const HexGrid& grid,
            const AliasingParams& params, int n_threads) {
    const std::vector<double> values = sai_all(maps, grid, params, n_threads);
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / values.size();
}

}  // namespace bvcsim

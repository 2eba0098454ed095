#ifndef BVCSIM_METRICS_HPP
#define BVCSIM_METRICS_HPP

#include <array>
#include <vector>

#include "bvcsim/geometry.hpp"
#include "bvcsim/recording.hpp"

namespace bvcsim {

/// Offset hexagonal lattice over the arena footprint. Columns are spaced
/// `pitch` = side/nx apart with odd rows shifted by pitch/2; rows are spaced
/// side/ny apart (the sqrt(3)/2 hex row spacing rescaled so ny rows span the
/// arena). Point-to-bin assignment is nearest center.
class HexGrid {
public:
    HexGrid(const Aabb& bounds, int nx, int ny);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int n_bins() const { return nx_ * ny_; }
    double pitch() const { return pitch_; }
    double row_pitch() const { return row_pitch_; }
    std::array<double, 2> center(int bin) const { return centers_[bin]; }
    const std::vector<std::array<double, 2>>& centers() const { return centers_; }

    /// Nearest center; ties break toward the lowest bin index.
    int bin_index(double x, double y) const;

private:
    int nx_;
    int ny_;
    double pitch_;
    double row_pitch_;
    double x_min_;
    double y_min_;
    std::vector<std::array<double, 2>> centers_;
};

/// Per-cell activation map over the grid, in [0, 1] after thresholding at the
/// 10% quantile of positive bin means and dividing by the map maximum.
struct ActivationMap {
    int cell_index = 0;
    std::vector<double> values;
};

struct BinnedTrace {
    std::vector<long> visit_counts;   // per bin; sums to the trace length
    std::vector<ActivationMap> maps;  // one per place cell
};

/// Streams the trace once, accumulating per-bin mean rates for every cell,
/// then thresholds and normalizes each map.
BinnedTrace bin_trace(TraceReader& trace, const HexGrid& grid);

/// Density clustering. A point is core when at least min_samples points
/// (itself included) lie within eps. Labels: cluster ids 0..k-1 assigned in
/// scan order, noise -1.
std::vector<int> dbscan(const std::vector<std::array<double, 2>>& points, double eps,
                        int min_samples);

constexpr double kDbscanEps = 1.0;
constexpr int kDbscanMinSamples = 20;

struct ModalityResult {
    int cell_index = 0;
    int mi = 0;  // number of clusters in the thresholded map
};

/// DBSCAN(eps=1, min_samples=20) over the centers of bins with positive value.
ModalityResult modality_index(const ActivationMap& map, const HexGrid& grid,
                              double eps = kDbscanEps, int min_samples = kDbscanMinSamples);

struct ModalitySummary {
    double frac_mi_gt0 = 0.0;
    double avg_mi_nonzero = 0.0;  // over cells with MI > 0; 0 when none
    double frac_mi_gt1 = 0.0;
};

ModalitySummary modality_summary(const std::vector<ModalityResult>& results);

struct AliasingParams {
    double d_th = 2.0;  // m; bins closer than this are excluded as self-similar
};

/// Spatial aliasing index of one bin: mean cosine similarity between its
/// population activation vector and every other bin farther than d_th.
/// Zero vectors have similarity 0 by convention.
double sai(int bin, const std::vector<ActivationMap>& maps, const HexGrid& grid,
           const AliasingParams& params);

/// All bins at once; identical values to per-bin sai(), optionally threaded.
std::vector<double> sai_all(const std::vector<ActivationMap>& maps, const HexGrid& grid,
                            const AliasingParams& params, int n_threads = 1);

/// Mean SAI over all bins.
double msai(const std::vector<ActivationMap>& maps, const HexGrid& grid,
            const AliasingParams& params, int n_threads = 1);

}  // namespace bvcsim

#endif

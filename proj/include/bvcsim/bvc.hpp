#ifndef BVCSIM_BVC_HPP
#define BVCSIM_BVC_HPP

#include <string>
#include <vector>

#include "bvcsim/sensor.hpp"

namespace bvcsim {

/// Fixed population size shared by every model configuration.
constexpr int kNumBvc = 960;

enum class ModelName { model_2d, model_3d_01, model_3d_02, model_3d_three_layer };

const char* model_name_str(ModelName m);
ModelName model_name_from_str(const std::string& s);

struct ModelConfig {
    ModelName name = ModelName::model_2d;
    int horizontal_directions = 8;
    std::vector<double> vertical_angles;  // empty => 2D model
    int bvcs_per_axis = 120;
    double d_max = kDefaultMaxRange;
    double sigma_r = 0.75;
    double sigma_theta = 0.1;
    double sigma_phi = 0.01;

    bool is_3d() const { return !vertical_angles.empty(); }
    int n_layers() const { return is_3d() ? static_cast<int>(vertical_angles.size()) : 1; }
    int n_cells() const { return horizontal_directions * n_layers() * bvcs_per_axis; }

    // Throws std::invalid_argument unless n_cells() == kNumBvc and the tuning
    // parameters are in range.
    void validate() const;

    static ModelConfig preset(ModelName name);
};

/// One tuned cell. psi and sigma_phi are unused for 2D populations.
struct BvcCell {
    double d = 0.0;           // preferred distance, m
    double phi = 0.0;         // preferred allocentric azimuth, rad
    double psi = 0.0;         // preferred elevation, rad
    double sigma_r = 0.0;
    double sigma_theta = 0.0;
    double sigma_phi = 0.0;
};

/// Angular/window pruning candidates for one (direction, layer) block of cells.
struct PruneGroup {
    int direction_index = 0;
    int elevation_index = 0;
    std::vector<int> point_indices;  // ascending scan order
};

/// Tuned boundary-vector population. Cell order is direction-major, then
/// vertical layer, then preferred distance:
///   index = (dir * n_layers + layer) * bvcs_per_axis + distance_rank.
/// Preferred distances exclude 0 and include d_max:
///   d_k = k * d_max / bvcs_per_axis, k = 1..bvcs_per_axis.
class BvcPopulation {
public:
    explicit BvcPopulation(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    const std::vector<BvcCell>& cells() const { return cells_; }
    int n_cells() const { return static_cast<int>(cells_.size()); }

    /// Firing rates in [0, 0.5]. Each rate is the sum over boundary points of
    /// the product of Gaussian tuning factors (range, azimuth and, for 3D
    /// cells, elevation), scaled by 1 / (2 * n_res) so a scan whose every
    /// point sits exactly at a cell's preferred tuning yields 0.5. Azimuth
    /// differences are wrapped to [-pi, pi); elevation differences are not.
    /// Empty scans produce all zeros.
    ///
    /// pruned=true (the production path) skips points outside the tuning
    /// windows; the result matches the exhaustive sum within 1e-9 absolute.
    /// Per-cell summation runs in scan order either way, so repeated calls
    /// are bit-reproducible.
    std::vector<double> compute_activations(const BoundaryPoints& points,
                                            bool pruned = true) const;

private:
    ModelConfig config_;
    std::vector<BvcCell> cells_;
    std::vector<double> direction_azimuths_;

    std::vector<double> compute_pruned(const BoundaryPoints& points) const;
    std::vector<double> compute_exhaustive(const BoundaryPoints& points) const;

    friend std::vector<PruneGroup> activation_window_prune(const BvcPopulation&,
                                                           const BoundaryPoints&);
};

/// Candidate boundary points per (direction, layer) group: a point survives
/// when its azimuth lies within the window around the group azimuth and (3D)
/// its elevation within the window around the layer angle. Dropping the
/// complement changes any activation by far less than 1e-9.
std::vector<PruneGroup> activation_window_prune(const BvcPopulation& pop,
                                                const BoundaryPoints& points);

}  // namespace bvcsim

#endif

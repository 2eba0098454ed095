#include "bvcsim/bvc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bvcsim {

namespace {

// Window half-width in tuning sigmas. A dropped point has at least one
// Gaussian factor below exp(-24.5), so the total error on any activation is
// bounded by exp(-24.5)/2 ~ 1.1e-11, well under the 1e-9 contract.
constexpr double kWindowSigmas = 7.0;

}  // namespace

const char* model_name_str(ModelName m) {
    switch (m) {
        case ModelName::model_2d: return "2d";
        case ModelName::model_3d_01: return "3d01";
        case ModelName::model_3d_02: return "3d02";
        case ModelName::model_3d_three_layer: return "3d3";
    }
    return "?";
}

ModelName model_name_from_str(const std::string& s) {
    if (s == "2d") return ModelName::model_2d;
    if (s == "3d01") return ModelName::model_3d_01;
    if (s == "3d02") return ModelName::model_3d_02;
    if (s == "3d3") return ModelName::model_3d_three_layer;
    throw std::invalid_argument("unknown model name: " + s);
}

void ModelConfig::validate() const {
    if (horizontal_directions <= 0 || bvcs_per_axis <= 0) {
        throw std::invalid_argument("ModelConfig: counts must be positive");
    }
    if (n_cells() != kNumBvc) {
        throw std::invalid_argument(
            "ModelConfig: directions x layers x bvcs_per_axis must equal " +
            std::to_string(kNumBvc) + ", got " + std::to_string(n_cells()));
    }
    if (!(d_max > 0.0) || !(sigma_r > 0.0) || !(sigma_theta > 0.0)) {
        throw std::invalid_argument("ModelConfig: tuning widths must be positive");
    }
    if (is_3d() && !(sigma_phi > 0.0)) {
        throw std::invalid_argument("ModelConfig: sigma_phi must be positive for 3D models");
    }
    for (double psi : vertical_angles) {
        if (!(psi >= 0.0 && psi < kPi / 2.0)) {
            throw std::invalid_argument("ModelConfig: vertical angles must lie in [0, pi/2)");
        }
    }
}

ModelConfig ModelConfig::preset(ModelName name) {
    ModelConfig c;
    c.name = name;
    switch (name) {
        case ModelName::model_2d:
            c.vertical_angles = {};
            c.bvcs_per_axis = 120;
            break;
        case ModelName::model_3d_01:
            c.vertical_angles = {0.0, 0.1};
            c.bvcs_per_axis = 60;
            break;
        case ModelName::model_3d_02:
            c.vertical_angles = {0.0, 0.2};
            c.bvcs_per_axis = 60;
            break;
        case ModelName::model_3d_three_layer:
            c.vertical_angles = {0.0, 0.1, 0.2};
            c.bvcs_per_axis = 40;
            break;
    }
    return c;
}

BvcPopulation::BvcPopulation(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    const int n_dirs = config_.horizontal_directions;
    const int n_layers = config_.n_layers();
    const int n_dist = config_.bvcs_per_axis;
    const double dist_step = config_.d_max / n_dist;

    direction_azimuths_.resize(n_dirs);
    for (int k = 0; k < n_dirs; ++k) {
        direction_azimuths_[k] = wrap_angle(k * (2.0 * kPi / n_dirs));
    }

    cells_.reserve(static_cast<size_t>(config_.n_cells()));
    for (int k = 0; k < n_dirs; ++k) {
        for (int m = 0; m < n_layers; ++m) {
            const double psi = config_.is_3d() ? config_.vertical_angles[m] : 0.0;
            for (int q = 1; q <= n_dist; ++q) {
                BvcCell cell;
                cell.d = q * dist_step;
                cell.phi = direction_azimuths_[k];
                cell.psi = psi;
                cell.sigma_r = config_.sigma_r;
                cell.sigma_theta = config_.sigma_theta;
                cell.sigma_phi = config_.sigma_phi;
                cells_.push_back(cell);
            }
        }
    }
}

std::vector<PruneGroup> activation_window_prune(const BvcPopulation& pop,
                                                const BoundaryPoints& points) {
    const ModelConfig& cfg = pop.config_;
    const double theta_win = kWindowSigmas * cfg.sigma_theta;
    const double phi_win = kWindowSigmas * cfg.sigma_phi;
    const int n_layers = cfg.n_layers();

    std::vector<PruneGroup> groups;
    groups.reserve(static_cast<size_t>(cfg.horizontal_directions) * n_layers);
    for (int k = 0; k < cfg.horizontal_directions; ++k) {
        const double dir_az = pop.direction_azimuths_[k];
        std::vector<int> az_pass;
        for (int j = 0; j < points.n_res(); ++j) {
            if (std::abs(wrap_angle(points.points[j].theta - dir_az)) <= theta_win) {
                az_pass.push_back(j);
            }
        }
        for (int m = 0; m < n_layers; ++m) {
            PruneGroup g;
            g.direction_index = k;
            g.elevation_index = m;
            if (cfg.is_3d()) {
                const double psi = cfg.vertical_angles[m];
                for (int j : az_pass) {
                    if (std::abs(points.points[j].phi - psi) <= phi_win) {
                        g.point_indices.push_back(j);
                    }
                }
            } else {
                g.point_indices = az_pass;
            }
            groups.push_back(std::move(g));
        }
    }
    return groups;
}

std::vector<double> BvcPopulation::compute_activations(const BoundaryPoints& points,
                                                       bool pruned) const {
    if (points.n_res() == 0) return std::vector<double>(cells_.size(), 0.0);
    return pruned ? compute_pruned(points) : compute_exhaustive(points);
}

std::vector<double> BvcPopulation::compute_pruned(const BoundaryPoints& points) const {
    const int n_dist = config_.bvcs_per_axis;
    const double dist_step = config_.d_max / n_dist;
    const double inv_2sr2 = 1.0 / (2.0 * config_.sigma_r * config_.sigma_r);
    const double inv_2st2 = 1.0 / (2.0 * config_.sigma_theta * config_.sigma_theta);
    const double inv_2sp2 = 1.0 / (2.0 * config_.sigma_phi * config_.sigma_phi);
    const double r_win = kWindowSigmas * config_.sigma_r;
    const double scale = 1.0 / (2.0 * points.n_res());

    std::vector<double> v(cells_.size(), 0.0);
    const auto groups = activation_window_prune(*this, points);
    for (const PruneGroup& g : groups) {
        const int base =
            (g.direction_index * config_.n_layers() + g.elevation_index) * n_dist;
        const double dir_az = direction_azimuths_[g.direction_index];
        const double psi = config_.is_3d() ? config_.vertical_angles[g.elevation_index] : 0.0;
        double* vg = v.data() + base;
        for (int j : g.point_indices) {
            const BoundaryPoint& p = points.points[j];
            const double dth = wrap_angle(p.theta - dir_az);
            double w_ang = std::exp(-dth * dth * inv_2st2);
            if (config_.is_3d()) {
                const double dph = p.phi - psi;
                w_ang *= std::exp(-dph * dph * inv_2sp2);
            }
            // Distance cells with |r - d_i| <= r_win; d_i = (i+1) * dist_step.
            int lo = static_cast<int>(std::ceil((p.r - r_win) / dist_step)) - 1;
            int hi = static_cast<int>(std::floor((p.r + r_win) / dist_step)) - 1;
            lo = std::max(lo, 0);
            hi = std::min(hi, n_dist - 1);
            for (int i = lo; i <= hi; ++i) {
                const double dr = p.r - (i + 1) * dist_step;
                vg[i] += w_ang * std::exp(-dr * dr * inv_2sr2);
            }
        }
    }
    for (double& x : v) x *= scale;
    return v;
}

std::vector<double> BvcPopulation::compute_exhaustive(const BoundaryPoints& points) const {
    const double inv_2sr2 = 1.0 / (2.0 * config_.sigma_r * config_.sigma_r);
    const double inv_2st2 = 1.0 / (2.0 * config_.sigma_theta * config_.sigma_theta);
    const double inv_2sp2 = 1.0 / (2.0 * config_.sigma_phi * config_.sigma_phi);
    const double scale = 1.0 / (2.0 * points.n_res());

    std::vector<double> v(cells_.size(), 0.0);
    // Same factor grouping and point order as the pruned path, so the two
    // agree bitwise whenever no point is actually pruned.
    for (size_t i = 0; i < cells_.size(); ++i) {
        const BvcCell& cell = cells_[i];
        double sum = 0.0;
        for (const BoundaryPoint& p : points.points) {
            const double dth = wrap_angle(p.theta - cell.phi);
            double w_ang = std::exp(-dth * dth * inv_2st2);
            if (config_.is_3d()) {
                const double dph = p.phi - cell.psi;
                w_ang *= std::exp(-dph * dph * inv_2sp2);
            }
            const double dr = p.r - cell.d;
            sum += w_ang * std::exp(-dr * dr * inv_2sr2);
        }
        v[i] = sum * scale;
    }
    return v;
}

}  // namespace bvcsim

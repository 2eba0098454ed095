#ifndef BVCSIM_SENSOR_HPP
#define BVCSIM_SENSOR_HPP

#include <iosfwd>
#include <vector>

#include "bvcsim/geometry.hpp"

namespace bvcsim {

constexpr double kDefaultSensorHeight = 0.25;
constexpr double kDefaultMaxRange = 12.0;

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;  // wrapped to [-pi, pi)
    double sensor_height = kDefaultSensorHeight;

    Vec3 sensor_origin() const { return {x, y, sensor_height}; }
};

/// 720 rays over 360 degrees in the horizontal plane.
struct HorizontalScan {
    static constexpr int kRays = 720;
    std::vector<double> distances;  // each in (0, max_range]
    double max_range = kDefaultMaxRange;

    // Egocentric azimuth of ray i.
    static double ray_azimuth(int i) {
        return -kPi + static_cast<double>(i) * (2.0 * kPi / kRays);
    }
};

/// 90 x 180 spherical depth map, pixel-center angular convention.
/// Row r covers elevation pi/2 - (r + 0.5) * (pi / 90): row 0 looks almost
/// straight up, row 89 almost straight down. Column c covers egocentric
/// azimuth -pi + (c + 0.5) * (2*pi / 180).
struct SphericalDepthMap {
    static constexpr int kRows = 90;
    static constexpr int kCols = 180;
    std::vector<double> depth;  // row-major, each in (0, max_range]
    double max_range = kDefaultMaxRange;

    static double row_elevation(int r) {
        return kPi / 2.0 - (static_cast<double>(r) + 0.5) * (kPi / kRows);
    }
    static double col_azimuth(int c) {
        return -kPi + (static_cast<double>(c) + 0.5) * (2.0 * kPi / kCols);
    }
    double at(int r, int c) const { return depth[static_cast<size_t>(r) * kCols + c]; }
};

/// Allocentric boundary point: range, azimuth (world frame) and elevation.
struct BoundaryPoint {
    double r = 0.0;
    double theta = 0.0;
    double phi = 0.0;
};

struct BoundaryPoints {
    std::vector<BoundaryPoint> points;
    int n_res() const { return static_cast<int>(points.size()); }
};

HorizontalScan scan_horizontal(const World& world, const Pose& pose,
                               double max_range = kDefaultMaxRange);

SphericalDepthMap scan_spherical(const World& world, const Pose& pose,
                                 double max_range = kDefaultMaxRange);

/// Keeps pixels with elevation >= 0 (top 45 rows), drops max_range returns,
/// and rotates azimuths into the world frame using the pose heading.
/// include_floor keeps the downward rows as well (off in the normal pipeline,
/// where the bottom half of the map is discarded).
BoundaryPoints depth_map_to_points(const SphericalDepthMap& map, const Pose& pose,
                                   bool include_floor = false);

/// Allocentric points from the horizontal scanner; phi = 0 for every point.
BoundaryPoints horizontal_scan_to_points(const HorizontalScan& scan, const Pose& pose);

/// Plain-text grid dumps for golden tests.
void write_scan_text(const HorizontalScan& scan, std::ostream& os);
void write_scan_text(const SphericalDepthMap& map, std::ostream& os);

}  // namespace bvcsim

#endif

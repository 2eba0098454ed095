#include "bvcsim/sensor.hpp"

#include <ostream>

namespace bvcsim {

namespace {

double cast_clamped(const World& world, const Vec3& origin, double azimuth,
                    double elevation, double max_range) {
    const auto hit = ray_cast(world, origin, UnitVec3::from_angles(azimuth, elevation));
    if (!hit || hit->distance > max_range) return max_range;
    return hit->distance;
}

}  // namespace

HorizontalScan scan_horizontal(const World& world, const Pose& pose, double max_range) {
    HorizontalScan scan;
    scan.max_range = max_range;
    scan.distances.resize(HorizontalScan::kRays);
    const Vec3 origin = pose.sensor_origin();
    for (int i = 0; i < HorizontalScan::kRays; ++i) {
        const double az = pose.heading + HorizontalScan::ray_azimuth(i);
        scan.distances[i] = cast_clamped(world, origin, az, 0.0, max_range);
    }
    return scan;
}

SphericalDepthMap scan_spherical(const World& world, const Pose& pose, double max_range) {
    SphericalDepthMap map;
    map.max_range = max_range;
    map.depth.resize(static_cast<size_t>(SphericalDepthMap::kRows) * SphericalDepthMap::kCols);
    const Vec3 origin = pose.sensor_origin();
    size_t k = 0;
    for (int r = 0; r < SphericalDepthMap::kRows; ++r) {
        const double elev = SphericalDepthMap::row_elevation(r);
        for (int c = 0; c < SphericalDepthMap::kCols; ++c, ++k) {
            const double az = pose.heading + SphericalDepthMap::col_azimuth(c);
            map.depth[k] = cast_clamped(world, origin, az, elev, max_range);
        }
    }
    return map;
}

BoundaryPoints depth_map_to_points(const SphericalDepthMap& map, const Pose& pose,
                                   bool include_floor) {
    BoundaryPoints out;
    out.points.reserve(map.depth.size() / 2);
    for (int r = 0; r < SphericalDepthMap::kRows; ++r) {
        const double elev = SphericalDepthMap::row_elevation(r);
        if (!include_floor && elev < 0.0) break;  // rows are ordered top-down
        for (int c = 0; c < SphericalDepthMap::kCols; ++c) {
            const double d = map.at(r, c);
            if (d >= map.max_range) continue;  // no boundary within range
            const double theta = wrap_angle(SphericalDepthMap::col_azimuth(c) + pose.heading);
            out.points.push_back({d, theta, elev});
        }
    }
    return out;
}

BoundaryPoints horizontal_scan_to_points(const HorizontalScan& scan, const Pose& pose) {
    BoundaryPoints out;
    out.points.reserve(scan.distances.size());
    for (int i = 0; i < HorizontalScan::kRays; ++i) {
        const double d = scan.distances[i];
        if (d >= scan.max_range) continue;
        const double theta = wrap_angle(HorizontalScan::ray_azimuth(i) + pose.heading);
        out.points.push_back({d, theta, 0.0});
    }
    return out;
}

void write_scan_text(const HorizontalScan& scan, std::ostream& os) {
    for (size_t i = 0; i < scan.distances.size(); ++i) {
        os << scan.distances[i] << (i + 1 == scan.distances.size() ? '\n' : ' ');
    }
}

void write_scan_text(const SphericalDepthMap& map, std::ostream& os) {
    for (int r = 0; r < SphericalDepthMap::kRows; ++r) {
        for (int c = 0; c < SphericalDepthMap::kCols; ++c) {
            os << map.at(r, c) << (c + 1 == SphericalDepthMap::kCols ? '\n' : ' ');
        }
    }
}

}  // namespace bvcsim

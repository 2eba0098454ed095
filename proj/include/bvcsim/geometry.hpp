#ifndef BVCSIM_GEOMETRY_HPP
#define BVCSIM_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bvcsim {

constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle to [-pi, pi).
double wrap_angle(double a);

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

/// Direction with unit Euclidean norm (|v| = 1 within 1e-9).
class UnitVec3 {
public:
    // Normalizes v; throws std::invalid_argument on a near-zero vector.
    static UnitVec3 normalize(const Vec3& v);
    // Allocentric azimuth (0 = +x, pi/2 = +y) and elevation above the xy plane.
    static UnitVec3 from_angles(double azimuth, double elevation);

    const Vec3& vec() const { return v_; }
    double x() const { return v_.x; }
    double y() const { return v_.y; }
    double z() const { return v_.z; }

private:
    explicit UnitVec3(const Vec3& v) : v_(v) {}
    Vec3 v_;
};

enum class SurfaceKind { outer_wall, ceiling, floor, central_wall };

const char* surface_kind_name(SurfaceKind k);

/// Planar convex quad, double-sided for ray hits.
struct Surface {
    int id = -1;
    SurfaceKind kind = SurfaceKind::outer_wall;
    std::array<Vec3, 4> corners{};

    // Cached by finalize(): unit normal, plane offset (normal . p = plane_d)
    // and per-edge in-plane outward tests for the point-in-quad check.
    Vec3 normal{};
    double plane_d = 0.0;
    std::array<Vec3, 4> edge_normals{};

    // Computes the cache; throws std::invalid_argument if the corners are not
    // coplanar within 1e-9 m or the quad is not convex.
    void finalize();

    bool contains(const Vec3& p, double eps = 1e-9) const;
};

struct Aabb {
    Vec3 lo;
    Vec3 hi;
    bool contains(const Vec3& p, double eps = 1e-9) const {
        return p.x >= lo.x - eps && p.x <= hi.x + eps && p.y >= lo.y - eps &&
               p.y <= hi.y + eps && p.z >= lo.z - eps && p.z <= hi.z + eps;
    }
};

struct EnvironmentSpec {
    double arena_side = 10.0;
    double wall_height = 2.5;
    double central_wall_length = 7.0;
    double tilt_deg = 0.0;  // in [0, 90)
    bool include_floor_in_scans = false;

    // Throws std::invalid_argument when out of range.
    void validate() const;
};

struct Hit {
    double distance = 0.0;
    int surface_id = -1;
    Vec3 point{};
};

/// Immutable closed arena; ray queries are safe from many threads.
class World {
public:
    World(EnvironmentSpec spec, std::vector<Surface> surfaces, Aabb bounds);

    const EnvironmentSpec& spec() const { return spec_; }
    const std::vector<Surface>& surfaces() const { return surfaces_; }
    const Aabb& bounds() const { return bounds_; }

private:
    EnvironmentSpec spec_;
    std::vector<Surface> surfaces_;
    Aabb bounds_;
};

// Self-intersection guard on ray starts.
constexpr double kRayMinT = 1e-6;

/// Builds the cross-walled arena: outer box of side arena_side centered at the
/// origin, floor at z = 0, ceiling at z = wall_height, and two central walls
/// whose bases lie along the x and y axes. Each central wall leans tilt_deg
/// from vertical toward the (+x,+y) quadrant and is extended by 1/cos(tilt)
/// so its top edge still touches the ceiling.
World build_arena(const EnvironmentSpec& spec);

/// Nearest intersection of the ray with one surface, or nullopt.
/// Hits closer than min_t are ignored.
std::optional<double> intersect_surface(const Surface& s, const Vec3& origin,
                                        const UnitVec3& dir,
                                        double min_t = kRayMinT);

/// Nearest surface hit over the whole world. Returns nullopt only when the
/// origin is outside the closed arena.
std::optional<Hit> ray_cast(const World& w, const Vec3& origin,
                            const UnitVec3& dir);

/// True iff the horizontal ray from position along heading hits a surface
/// closer than body_radius + step_advance.
bool collision_check(const World& w, const Vec3& position, double heading,
                     double body_radius, double step_advance = 0.0);

/// One quad per line: id, kind, 12 corner coordinates.
void write_world_text(const World& w, std::ostream& os);

}  // namespace bvcsim

#endif

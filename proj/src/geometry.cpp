#include "bvcsim/geometry.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace bvcsim {

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0.0) a += 2.0 * kPi;
    return a - kPi;
}

UnitVec3 UnitVec3::normalize(const Vec3& v) {
    const double n = v.norm();
    if (n < 1e-12) {
        throw std::invalid_argument("UnitVec3: cannot normalize near-zero vector");
    }
    return UnitVec3{{v.x / n, v.y / n, v.z / n}};
}

UnitVec3 UnitVec3::from_angles(double azimuth, double elevation) {
    const double c = std::cos(elevation);
    return UnitVec3{{c * std::cos(azimuth), c * std::sin(azimuth), std::sin(elevation)}};
}

const char* surface_kind_name(SurfaceKind k) {
    switch (k) {
        case SurfaceKind::outer_wall: return "outer_wall";
        case SurfaceKind::ceiling: return "ceiling";
        case SurfaceKind::floor: return "floor";
        case SurfaceKind::central_wall: return "central_wall";
    }
    return "?";
}

void Surface::finalize() {
    const Vec3 e01 = corners[1] - corners[0];
    const Vec3 e02 = corners[2] - corners[0];
    const Vec3 n = e01.cross(e02);
    const double nn = n.norm();
    if (nn < 1e-12) {
        throw std::invalid_argument("Surface: degenerate quad");
    }
    normal = n * (1.0 / nn);
    plane_d = normal.dot(corners[0]);

    // Coplanarity of the fourth corner.
    if (std::abs(normal.dot(corners[3]) - plane_d) > 1e-9) {
        throw std::invalid_argument("Surface: corners not coplanar");
    }

    // In-plane edge normals; convexity requires every corner to be on the
    // inner side of every edge.
    for (int i = 0; i < 4; ++i) {
        const Vec3 e = corners[(i + 1) % 4] - corners[i];
        edge_normals[i] = normal.cross(e);
    }
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (edge_normals[i].dot(corners[j] - corners[i]) < -1e-9) {
                throw std::invalid_argument("Surface: quad not convex (or badly wound)");
            }
        }
    }
}

bool Surface::contains(const Vec3& p, double eps) const {
    for (int i = 0; i < 4; ++i) {
        if (edge_normals[i].dot(p - corners[i]) < -eps) return false;
    }
    return std::abs(normal.dot(p) - plane_d) <= eps;
}

void EnvironmentSpec::validate() const {
    if (!(arena_side > 0.0) || !(wall_height > 0.0) || !(central_wall_length > 0.0)) {
        throw std::invalid_argument("EnvironmentSpec: lengths must be positive");
    }
    if (!(tilt_deg >= 0.0 && tilt_deg < 90.0)) {
        throw std::invalid_argument("EnvironmentSpec: tilt_deg must lie in [0, 90)");
    }
}

World::World(EnvironmentSpec spec, std::vector<Surface> surfaces, Aabb bounds)
    : spec_(spec), surfaces_(std::move(surfaces)), bounds_(bounds) {}

namespace {

Surface make_surface(int id, SurfaceKind kind, const Vec3& a, const Vec3& b,
                     const Vec3& c, const Vec3& d) {
    Surface s;
    s.id = id;
    s.kind = kind;
    s.corners = {a, b, c, d};
    s.finalize();
    return s;
}

}  // namespace

World build_arena(const EnvironmentSpec& spec) {
    spec.validate();

    const double h = spec.arena_side / 2.0;
    const double H = spec.wall_height;
    const double L = spec.central_wall_length / 2.0;
    const double tilt = spec.tilt_deg * kPi / 180.0;
    // Leaning the wall moves its top edge sideways by H*tan(tilt); the slant
    // length grows to H/cos(tilt) so the top edge stays on the ceiling.
    const double lean = H * std::tan(tilt);
    if (lean > h + 1e-12 || L > h) {
        throw std::invalid_argument("build_arena: central wall leaves the arena bounds");
    }

    std::vector<Surface> s;
    int id = 0;
    s.push_back(make_surface(id++, SurfaceKind::outer_wall, {h, -h, 0}, {h, h, 0},
                             {h, h, H}, {h, -h, H}));
    s.push_back(make_surface(id++, SurfaceKind::outer_wall, {-h, -h, 0}, {-h, h, 0},
                             {-h, h, H}, {-h, -h, H}));
    s.push_back(make_surface(id++, SurfaceKind::outer_wall, {-h, h, 0}, {h, h, 0},
                             {h, h, H}, {-h, h, H}));
    s.push_back(make_surface(id++, SurfaceKind::outer_wall, {-h, -h, 0}, {h, -h, 0},
                             {h, -h, H}, {-h, -h, H}));
    s.push_back(make_surface(id++, SurfaceKind::ceiling, {-h, -h, H}, {h, -h, H},
                             {h, h, H}, {-h, h, H}));
    s.push_back(make_surface(id++, SurfaceKind::floor, {-h, -h, 0}, {h, -h, 0},
                             {h, h, 0}, {-h, h, 0}));
    // Central wall with base along the x axis leans toward +y.
    s.push_back(make_surface(id++, SurfaceKind::central_wall, {-L, 0, 0}, {L, 0, 0},
                             {L, lean, H}, {-L, lean, H}));
    // Central wall with base along the y axis leans toward +x.
    s.push_back(make_surface(id++, SurfaceKind::central_wall, {0, -L, 0}, {0, L, 0},
                             {lean, L, H}, {lean, -L, H}));

    const Aabb bounds{{-h, -h, 0.0}, {h, h, H}};
    for (const Surface& surf : s) {
        for (const Vec3& c : surf.corners) {
            if (!bounds.contains(c)) {
                throw std::invalid_argument("build_arena: surface outside bounds");
            }
        }
    }
    return World(spec, std::move(s), bounds);
}

std::optional<double> intersect_surface(const Surface& s, const Vec3& origin,
                                        const UnitVec3& dir, double min_t) {
    const double denom = s.normal.dot(dir.vec());
    if (std::abs(denom) < 1e-15) return std::nullopt;
    const double t = (s.plane_d - s.normal.dot(origin)) / denom;
    if (t < min_t) return std::nullopt;
    const Vec3 p = origin + dir.vec() * t;
    // Inclusive edge test keeps the closed arena watertight at shared edges.
    for (int i = 0; i < 4; ++i) {
        if (s.edge_normals[i].dot(p - s.corners[i]) < -1e-9) return std::nullopt;
    }
    return t;
}

std::optional<Hit> ray_cast(const World& w, const Vec3& origin, const UnitVec3& dir) {
    double best = std::numeric_limits<double>::infinity();
    int best_id = -1;
    for (const Surface& s : w.surfaces()) {
        if (auto t = intersect_surface(s, origin, dir)) {
            if (*t < best) {
                best = *t;
                best_id = s.id;
            }
        }
    }
    if (best_id < 0) return std::nullopt;
    return Hit{best, best_id, origin + dir.vec() * best};
}

bool collision_check(const World& w, const Vec3& position, double heading,
                     double body_radius, double step_advance) {
    const UnitVec3 dir = UnitVec3::from_angles(heading, 0.0);
    const auto hit = ray_cast(w, position, dir);
    return hit && hit->distance < body_radius + step_advance;
}

void write_world_text(const World& w, std::ostream& os) {
    for (const Surface& s : w.surfaces()) {
        os << s.id << ' ' << surface_kind_name(s.kind);
        for (const Vec3& c : s.corners) {
            os << ' ' << c.x << ' ' << c.y << ' ' << c.z;
        }
        os << '\n';
    }
}

}  // namespace bvcsim

#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace boolvis {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    double angle() const { return std::atan2(y, x); }
    Vec2 rotated(double a) const {
        double c = std::cos(a), s = std::sin(a);
        return {c * x - s * y, s * x + c * y};
    }
    Vec2 perp() const { return {-y, x}; }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(Vec3 o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    Vec3 normalized() const {
        double n = norm();
        return {x / n, y / n, z / n};
    }
};

// Canonical wrap to [0, 2pi).  Single wrap function used everywhere so that
// interval arithmetic on the circle stays drift-free.
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0.0) a += kTwoPi;
    if (a >= kTwoPi) a = 0.0;  // fmod may round up to 2pi
    return a;
}

// Signed wrap to (-pi, pi].
inline double wrap_signed(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

// Closed angular interval on the unit circle: [center - half_width,
// center + half_width].  half_width == pi covers the whole circle.
struct ArcInterval {
    double center_angle = 0.0;  // in [0, 2pi)
    double half_width = 0.0;    // in [0, pi]
};

// Closed spherical cap {u : angle(u, axis) <= angular_radius}.
struct Cap {
    Vec3 axis;                   // unit vector
    double angular_radius = 0.0; // in [0, pi]
};

// Strictly convex polygon in grain-local coordinates.  Counterclockwise,
// at least 3 vertices, contains the local origin.  Collinear vertex triples
// are rejected at construction.
class ConvexPolygon {
public:
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    double diameter() const { return diameter_; }
    double circumradius() const { return circumradius_; }
    double perimeter() const { return perimeter_; }
    double area() const { return area_; }

    // Closed membership test.
    bool contains(Vec2 p) const;
    // Support function max_v <v, dir>.
    double support(Vec2 dir) const;

private:
    std::vector<Vec2> vertices_;
    double diameter_ = 0.0;
    double circumradius_ = 0.0;
    double perimeter_ = 0.0;
    double area_ = 0.0;
};

// Random convex grain: a disc of fixed radius, or a convex polygon rotated
// about its local origin (dimension 2 only).
class Grain {
public:
    static Grain disc(double radius);
    static Grain rotated_polygon(ConvexPolygon base, double rotation);

    bool is_disc() const { return is_disc_; }
    double radius() const;  // disc only
    const ConvexPolygon& base_polygon() const;
    double rotation() const;

    double diameter_bound() const { return diameter_bound_; }
    // Maximal distance from the local origin to the grain boundary.
    double circumradius() const { return circumradius_; }

    std::vector<Vec2> world_vertices(Vec2 center) const;

private:
    Grain() = default;
    bool is_disc_ = true;
    double radius_ = 0.0;
    double rotation_ = 0.0;
    double diameter_bound_ = 0.0;
    double circumradius_ = 0.0;
    std::shared_ptr<const ConvexPolygon> base_;  // null for discs
};

// A grain translated to a center.  The origin must lie strictly outside the
// translated grain (for a disc, |center| > radius); that is checked at
// construction.  3-d obstacles are balls; center.z is zero in dimension 2.
struct Obstacle {
    Obstacle(Vec2 center, Grain grain);
    Obstacle(Vec3 center, double ball_radius);

    int dimension = 2;
    Vec3 center;
    Grain grain;

    Vec2 center2() const { return {center.x, center.y}; }
    // Distance from the origin to the translated grain.
    double entry_distance() const;
};

// ---------------------------------------------------------------------------
// Shadow geometry of a disc obstacle.
//
// A disc of radius R centered at distance rho from the viewpoint blocks, on
// the circle of view radius r, a closed arc whose half-angle is
//   asin(R/rho)                          when rho^2 <= R^2 + r^2  (tangent regime)
//   acos((rho^2 + r^2 - R^2)/(2 r rho))  otherwise                (far regime)
// The two branches agree at rho^2 = R^2 + r^2.
// ---------------------------------------------------------------------------

// Unchecked kernel; assumes R > 0, rho > R, 0 < rho < r + R.
inline double shadow_half_angle_kernel(double rho, double R, double r) {
    if (rho * rho <= R * R + r * r) {
        double s = R / rho;
        if (s > 1.0) s = 1.0;
        return std::asin(s);
    }
    double c = (rho * rho + r * r - R * R) / (2.0 * r * rho);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return std::acos(c);
}

// Checked version; throws std::invalid_argument naming the violated bound.
double shadow_half_angle(double rho, double R, double r);

// Set of directions whose first hit on the obstacle is within distance r:
// a single closed arc (the obstacle is convex and excludes the origin), or
// nothing when the grain stays outside the ball of radius r.
std::optional<ArcInterval> blocked_interval(const Obstacle& obstacle, double r);

// 3-d analog for balls: the spherical cap of blocked directions.
std::optional<Cap> blocked_cap(const Obstacle& obstacle, double r);

// Smallest t > 0 with t*u inside the translated grain, if the ray hits.
std::optional<double> first_hit_distance(Vec2 u, const Obstacle& obstacle);
std::optional<double> first_hit_distance(Vec3 u, const Obstacle& obstacle);

// Full angular extent of the translated grain seen from the origin.
double vision_angle(const Obstacle& obstacle);

// Width of the grain measured orthogonally to the unit direction u,
// W_u = h(v) + h(-v) with v = perp(u) and h the support function.
double width_in_direction(const Grain& grain, Vec2 u);

// --- low-level polygon kernels (shared by the fast probing paths) ----------

// Distance from the origin to a convex polygon given by world vertices;
// 0 if the origin is inside or on the boundary.
double polygon_distance_to_origin(std::span<const Vec2> world);

bool polygon_contains_origin(std::span<const Vec2> world);

// First positive ray parameter at which dir (unit) enters the polygon.
std::optional<double> polygon_first_hit(Vec2 dir, std::span<const Vec2> world);

// Angular extent of (polygon intersected with the closed ball of radius r)
// as seen from the origin; assumes the origin lies strictly outside.
std::optional<ArcInterval> polygon_blocked_interval(std::span<const Vec2> world,
                                                    double r);

// Angular extent of the whole polygon seen from the origin.
ArcInterval polygon_vision_arc(std::span<const Vec2> world);

}  // namespace boolvis

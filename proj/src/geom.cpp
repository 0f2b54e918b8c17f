#include "boolvis/geom.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace boolvis {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

// --- ConvexPolygon ----------------------------------------------------------

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices)
    : vertices_(std::move(vertices)) {
    const std::size_t n = vertices_.size();
    if (n < 3) fail("ConvexPolygon: need at least 3 vertices, got " + std::to_string(n));

    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        area2 += vertices_[i].cross(vertices_[(i + 1) % n]);
    }
    if (area2 < 0.0) {  // normalize to counterclockwise
        std::reverse(vertices_.begin(), vertices_.end());
        area2 = -area2;
    }
    area_ = 0.5 * area2;

    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = vertices_[i];
        Vec2 b = vertices_[(i + 1) % n];
        Vec2 c = vertices_[(i + 2) % n];
        double turn = (b - a).cross(c - b);
        if (turn <= 0.0) {
            fail("ConvexPolygon: vertices must be strictly convex (collinear or "
                 "reflex turn at vertex " + std::to_string((i + 1) % n) + ")");
        }
    }
    if (!contains({0.0, 0.0})) {
        fail("ConvexPolygon: polygon must contain its local origin");
    }

    for (std::size_t i = 0; i < n; ++i) {
        circumradius_ = std::max(circumradius_, vertices_[i].norm());
        perimeter_ += (vertices_[(i + 1) % n] - vertices_[i]).norm();
        for (std::size_t j = i + 1; j < n; ++j) {
            diameter_ = std::max(diameter_, (vertices_[j] - vertices_[i]).norm());
        }
    }
}

bool ConvexPolygon::contains(Vec2 p) const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = vertices_[i];
        Vec2 b = vertices_[(i + 1) % n];
        if ((b - a).cross(p - a) < 0.0) return false;
    }
    return true;
}

double ConvexPolygon::support(Vec2 dir) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : vertices_) best = std::max(best, v.dot(dir));
    return best;
}

// --- Grain ------------------------------------------------------------------

Grain Grain::disc(double radius) {
    if (!(radius > 0.0)) fail("Grain::disc: require radius > 0, got " + num(radius));
    Grain g;
    g.is_disc_ = true;
    g.radius_ = radius;
    g.diameter_bound_ = 2.0 * radius;
    g.circumradius_ = radius;
    return g;
}

Grain Grain::rotated_polygon(ConvexPolygon base, double rotation) {
    Grain g;
    g.is_disc_ = false;
    g.rotation_ = rotation;
    g.diameter_bound_ = base.diameter();
    g.circumradius_ = base.circumradius();
    g.base_ = std::make_shared<const ConvexPolygon>(std::move(base));
    return g;
}

double Grain::radius() const {
    if (!is_disc_) fail("Grain::radius: not a disc grain");
    return radius_;
}

const ConvexPolygon& Grain::base_polygon() const {
    if (is_disc_) fail("Grain::base_polygon: disc grain has no polygon");
    return *base_;
}

double Grain::rotation() const { return rotation_; }

std::vector<Vec2> Grain::world_vertices(Vec2 center) const {
    std::vector<Vec2> out;
    if (!base_) return out;
    out.reserve(base_->vertices().size());
    for (Vec2 v : base_->vertices()) out.push_back(v.rotated(rotation_) + center);
    return out;
}

// --- Obstacle ---------------------------------------------------------------

Obstacle::Obstacle(Vec2 c, Grain g) : dimension(2), center{c.x, c.y, 0.0}, grain(std::move(g)) {
    if (grain.is_disc()) {
        if (!(c.norm() > grain.radius())) {
            fail("Obstacle: origin must lie strictly outside the grain "
                 "(require |center| > radius: |center|=" + num(c.norm()) +
                 ", radius=" + num(grain.radius()) + ")");
        }
    } else {
        auto w = grain.world_vertices(c);
        if (polygon_contains_origin(w)) {
            fail("Obstacle: origin must lie strictly outside the polygon grain");
        }
    }
}

Obstacle::Obstacle(Vec3 c, double ball_radius)
    : dimension(3), center(c), grain(Grain::disc(ball_radius)) {
    if (!(c.norm() > ball_radius)) {
        fail("Obstacle: origin must lie strictly outside the ball "
             "(require |center| > radius: |center|=" + num(c.norm()) +
             ", radius=" + num(ball_radius) + ")");
    }
}

double Obstacle::entry_distance() const {
    if (grain.is_disc()) return center.norm() - grain.radius();
    auto w = grain.world_vertices(center2());
    return polygon_distance_to_origin(w);
}

// --- shadow half-angle ------------------------------------------------------

double shadow_half_angle(double rho, double R, double r) {
    if (!(R > 0.0)) fail("shadow_half_angle: require R > 0, got R=" + num(R));
    if (!(rho > R)) fail("shadow_half_angle: require rho > R, got rho=" + num(rho) + ", R=" + num(R));
    if (!(r > 0.0)) fail("shadow_half_angle: require r > 0, got r=" + num(r));
    if (!(rho < r + R)) fail("shadow_half_angle: require rho < r + R, got rho=" + num(rho) + ", r+R=" + num(r + R));
    return shadow_half_angle_kernel(rho, R, r);
}

// --- blocked interval / cap -------------------------------------------------

std::optional<ArcInterval> blocked_interval(const Obstacle& obstacle, double r) {
    if (obstacle.dimension != 2) fail("blocked_interval: dimension 2 only");
    if (obstacle.grain.is_disc()) {
        const double rho = obstacle.center2().norm();
        const double R = obstacle.grain.radius();
        if (rho >= r + R) return std::nullopt;
        return ArcInterval{wrap_angle(obstacle.center2().angle()),
                           shadow_half_angle_kernel(rho, R, r)};
    }
    auto w = obstacle.grain.world_vertices(obstacle.center2());
    return polygon_blocked_interval(w, r);
}

std::optional<Cap> blocked_cap(const Obstacle& obstacle, double r) {
    if (obstacle.dimension != 3) fail("blocked_cap: dimension 3 only");
    const double rho = obstacle.center.norm();
    const double R = obstacle.grain.radius();
    if (rho >= r + R) return std::nullopt;
    return Cap{obstacle.center * (1.0 / rho), shadow_half_angle_kernel(rho, R, r)};
}

// --- ray intersection -------------------------------------------------------

namespace {

// Ray t*u against a disc (center c, radius R); smallest t > 0 or nothing.
std::optional<double> ray_disc_hit(double cu, double c2, double R) {
    // cu = <c,u>, c2 = |c|^2.  Roots of t^2 - 2 t cu + (c2 - R^2) = 0.
    const double disc = cu * cu - c2 + R * R;
    if (disc < 0.0 || cu <= 0.0) return std::nullopt;
    const double t = cu - std::sqrt(disc);
    if (t <= 0.0) return std::nullopt;  // origin inside (excluded by invariant)
    return t;
}

}  // namespace

std::optional<double> first_hit_distance(Vec2 u, const Obstacle& obstacle) {
    if (obstacle.dimension != 2) fail("first_hit_distance: expected a 2-d obstacle");
    if (obstacle.grain.is_disc()) {
        const Vec2 c = obstacle.center2();
        return ray_disc_hit(c.dot(u), c.norm2(), obstacle.grain.radius());
    }
    auto w = obstacle.grain.world_vertices(obstacle.center2());
    return polygon_first_hit(u, w);
}

std::optional<double> first_hit_distance(Vec3 u, const Obstacle& obstacle) {
    if (obstacle.dimension != 3) fail("first_hit_distance: expected a 3-d obstacle");
    const Vec3 c = obstacle.center;
    return ray_disc_hit(c.dot(u), c.dot(c), obstacle.grain.radius());
}

// --- vision angle and width -------------------------------------------------

double vision_angle(const Obstacle& obstacle) {
    if (obstacle.dimension != 2) fail("vision_angle: dimension 2 only");
    if (obstacle.grain.is_disc()) {
        const double rho = obstacle.center2().norm();
        const double R = obstacle.grain.radius();
        if (rho <= R) fail("vision_angle: origin inside grain");
        return 2.0 * std::asin(R / rho);
    }
    auto w = obstacle.grain.world_vertices(obstacle.center2());
    if (polygon_contains_origin(w)) fail("vision_angle: origin inside grain");
    return 2.0 * polygon_vision_arc(w).half_width;
}

double width_in_direction(const Grain& grain, Vec2 u) {
    if (grain.is_disc()) return 2.0 * grain.radius();
    const Vec2 v = u.perp();
    // Support evaluated in grain coordinates: rotate the query instead of
    // the vertices.
    const Vec2 vl = v.rotated(-grain.rotation());
    const ConvexPolygon& p = grain.base_polygon();
    return p.support(vl) + p.support({-vl.x, -vl.y});
}

// --- polygon kernels --------------------------------------------------------

bool polygon_contains_origin(std::span<const Vec2> world) {
    const std::size_t n = world.size();
    double orient = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        orient = (world[1] - world[0]).cross(world[2] - world[1]);
        if (orient != 0.0) break;
    }
    const bool ccw = orient >= 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = world[i];
        Vec2 b = world[(i + 1) % n];
        double s = (b - a).cross(Vec2{-a.x, -a.y});
        if (ccw ? s < 0.0 : s > 0.0) return false;
    }
    return true;
}

double polygon_distance_to_origin(std::span<const Vec2> world) {
    if (polygon_contains_origin(world)) return 0.0;
    const std::size_t n = world.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = world[i];
        Vec2 d = world[(i + 1) % n] - a;
        double len2 = d.norm2();
        double t = len2 > 0.0 ? std::clamp(-a.dot(d) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (a + d * t).norm());
    }
    return best;
}

std::optional<double> polygon_first_hit(Vec2 dir, std::span<const Vec2> world) {
    const std::size_t n = world.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = world[i];
        Vec2 b = world[(i + 1) % n];
        Vec2 e = b - a;
        double denom = dir.cross(e);
        if (denom == 0.0) continue;  // parallel edge
        // Solve t*dir = a + s*e.
        double t = a.cross(e) / denom;
        double s = a.cross(dir) / denom;
        if (t > 0.0 && s >= 0.0 && s <= 1.0) best = std::min(best, t);
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

namespace {

// Collects min/max polar angle offsets of candidate points relative to a
// reference direction; all offsets stay in (-pi, pi) because a convex set
// avoiding the origin subtends at most pi.
struct AngleSpread {
    double ref;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    explicit AngleSpread(double reference) : ref(reference) {}

    void add(Vec2 p) {
        double d = wrap_signed(p.angle() - ref);
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }

    ArcInterval arc() const {
        return ArcInterval{wrap_angle(ref + 0.5 * (lo + hi)), 0.5 * (hi - lo)};
    }
};

}  // namespace

std::optional<ArcInterval> polygon_blocked_interval(std::span<const Vec2> world,
                                                    double r) {
    const std::size_t n = world.size();
    // Reference direction: the closest point of the polygon (always part of
    // the clipped region when the clip is nonempty).
    Vec2 nearest{};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = world[i];
        Vec2 d = world[(i + 1) % n] - a;
        double len2 = d.norm2();
        double t = len2 > 0.0 ? std::clamp(-a.dot(d) / len2, 0.0, 1.0) : 0.0;
        Vec2 p = a + d * t;
        double dist = p.norm();
        if (dist < best) {
            best = dist;
            nearest = p;
        }
    }
    if (best > r) return std::nullopt;

    // Angular extrema of the convex clip polygon∩ball(0,r) are attained at
    // vertices inside the ball or at edge/circle crossings: the polar angle is
    // monotone along both straight edges and origin-centered arcs.
    AngleSpread spread(nearest.angle());
    bool any = false;
    const double r2 = r * r;
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 a = world[i];
        Vec2 b = world[(i + 1) % n];
        if (a.norm2() <= r2) {
            spread.add(a);
            any = true;
        }
        // Edge/circle crossings: |a + t(b-a)| = r with t in [0,1].
        Vec2 e = b - a;
        double A = e.norm2();
        if (A == 0.0) continue;
        double B = a.dot(e);
        double C = a.norm2() - r2;
        double disc = B * B - A * C;
        if (disc < 0.0) continue;
        double sq = std::sqrt(disc);
        for (double t : {(-B - sq) / A, (-B + sq) / A}) {
            if (t >= 0.0 && t <= 1.0) {
                spread.add(a + e * t);
                any = true;
            }
        }
    }
    if (!any) return std::nullopt;  // touching at isolated tangency of measure zero
    return spread.arc();
}

ArcInterval polygon_vision_arc(std::span<const Vec2> world) {
    // Tangent directions of a polygon are attained at vertices.
    Vec2 nearest{};
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& v : world) {
        double d = v.norm();
        if (d < best) {
            best = d;
            nearest = v;
        }
    }
    AngleSpread spread(nearest.angle());
    for (const Vec2& v : world) spread.add(v);
    return spread.arc();
}

}  // namespace boolvis

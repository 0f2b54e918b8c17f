#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "boolvis/coverage.hpp"
#include "boolvis/geom.hpp"

namespace boolvis {

struct RadiusAtom {
    double radius = 0.0;
    double prob = 0.0;
};

// Distribution of the random grain: a disc with constant or discrete random
// radius, or a fixed convex polygon under a uniform random rotation
// (dimension 2 only).
class GrainLaw {
public:
    static GrainLaw constant_disc(double R);
    static GrainLaw discrete_disc(std::vector<RadiusAtom> atoms);
    static GrainLaw rotated_polygon(ConvexPolygon base);

    bool is_disc() const { return is_disc_; }
    const std::vector<RadiusAtom>& atoms() const { return atoms_; }
    const ConvexPolygon& base_polygon() const;

    double moment(int p) const;  // E[R^p], disc laws
    double mean_radius() const { return moment(1); }
    double diameter_bound() const { return diameter_bound_; }
    double circumradius() const { return circumradius_; }
    // E[W(K)]: 2 E[R] for discs, perimeter/pi for rotated polygons (Cauchy).
    double mean_width() const;

    Grain make_grain(double shape_param) const;  // radius or rotation

private:
    bool is_disc_ = true;
    std::vector<RadiusAtom> atoms_;
    std::shared_ptr<const ConvexPolygon> base_;
    double diameter_bound_ = 0.0;
    double circumradius_ = 0.0;
};

// Full model parameters.  clearing == 0 is the plain origin-free
// conditioning; clearing == r0 > 0 conditions on an empty ball of radius r0
// around the origin (every grain at distance > r0).
struct ModelConfig {
    int dimension = 2;
    double intensity = 1.0;
    GrainLaw grain_law = GrainLaw::constant_disc(1.0);
    double clearing = 0.0;

    void validate() const;
};

// Seeding record: windows are the annular increments laid down by sample()
// and extend(); every obstacle stream is derived from (root, window salt,
// obstacle counter), so replication and extension are reproducible.
struct SeedRecord {
    std::uint64_t root = 0;
    std::vector<std::uint64_t> window_salts;
    std::vector<double> window_bounds;  // entry-distance upper bound per window
};

// A sampled configuration, complete for every grain that meets
// ball(0, reach) and respecting the conditioning.
struct ObstacleSet {
    ModelConfig config;
    double reach = 0.0;
    SeedRecord seed;
    std::vector<std::array<double, 3>> centers;
    std::vector<double> shape_param;  // radius (disc laws) / rotation (polygon law)
    std::vector<double> entry;        // distance from origin to the grain

    std::size_t size() const { return centers.size(); }
    Obstacle obstacle(std::size_t i) const;
};

// Expected intensity mass of grain centers whose grain meets ball(0, r)
// while respecting the conditioning.  Exact annulus volumes for disc laws;
// Monte-Carlo with a reported standard error for polygon laws.
McEstimate exclusion_volume(double r, const ModelConfig& config,
                            long mc_samples = 200000, std::uint64_t mc_seed = 0x45584Dull);

ObstacleSet sample(const ModelConfig& config, double reach, std::uint64_t seed);

// Samples only the increment region (grains meeting ball(0, new_reach) but
// not ball(0, set.reach)) and appends it; the union is distributed like a
// fresh sample at new_reach.
ObstacleSet extend(const ObstacleSet& set, double new_reach, std::uint64_t seed = 0);

// Spherical contact radius: distance from the origin to the occupied phase,
// capped at set.reach when no grain is closer.
double spherical_contact(const ObstacleSet& set);

// Exact homothety by s > 0 (test support: visibility and contact functionals
// of the scaled set equal s times the originals).
ObstacleSet scale_set(const ObstacleSet& set, double s);

std::string obstacle_set_to_json(const ObstacleSet& set);
ObstacleSet obstacle_set_from_json(const std::string& text);

}  // namespace boolvis

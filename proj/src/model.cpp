#include "boolvis/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "boolvis/rng.hpp"

namespace boolvis {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

constexpr std::uint64_t kCountStreamTag = 0xffffffffffffffffULL;

}  // namespace

// --- GrainLaw ---------------------------------------------------------------

GrainLaw GrainLaw::constant_disc(double R) {
    return discrete_disc({RadiusAtom{R, 1.0}});
}

GrainLaw GrainLaw::discrete_disc(std::vector<RadiusAtom> atoms) {
    if (atoms.empty()) fail("GrainLaw: need at least one radius atom");
    double tot = 0.0;
    GrainLaw law;
    for (const auto& a : atoms) {
        if (!(a.radius > 0.0)) fail("GrainLaw: radii must be positive");
        if (a.prob < 0.0) fail("GrainLaw: probabilities must be nonnegative");
        tot += a.prob;
        law.diameter_bound_ = std::max(law.diameter_bound_, 2.0 * a.radius);
        law.circumradius_ = std::max(law.circumradius_, a.radius);
    }
    if (std::fabs(tot - 1.0) > 1e-12) fail("GrainLaw: probabilities must sum to 1 (got " + std::to_string(tot) + ")");
    law.is_disc_ = true;
    law.atoms_ = std::move(atoms);
    return law;
}

GrainLaw GrainLaw::rotated_polygon(ConvexPolygon base) {
    GrainLaw law;
    law.is_disc_ = false;
    law.diameter_bound_ = base.diameter();
    law.circumradius_ = base.circumradius();
    law.base_ = std::make_shared<const ConvexPolygon>(std::move(base));
    return law;
}

const ConvexPolygon& GrainLaw::base_polygon() const {
    if (is_disc_) fail("GrainLaw: disc law has no base polygon");
    return *base_;
}

double GrainLaw::moment(int p) const {
    if (!is_disc_) fail("GrainLaw::moment: defined for disc laws only");
    double acc = 0.0;
    for (const auto& a : atoms_) acc += a.prob * std::pow(a.radius, p);
    return acc;
}

double GrainLaw::mean_width() const {
    if (is_disc_) return 2.0 * moment(1);
    return base_->perimeter() / kPi;
}

Grain GrainLaw::make_grain(double shape_param) const {
    if (is_disc_) return Grain::disc(shape_param);
    return Grain::rotated_polygon(*base_, shape_param);
}

// --- ModelConfig ------------------------------------------------------------

void ModelConfig::validate() const {
    if (dimension != 2 && dimension != 3) fail("ModelConfig: dimension must be 2 or 3");
    if (!(intensity > 0.0)) fail("ModelConfig: intensity must be positive");
    if (clearing < 0.0) fail("ModelConfig: clearing radius must be >= 0");
    if (!grain_law.is_disc() && dimension != 2) fail("ModelConfig: polygon grains require dimension 2");
}

// --- ObstacleSet ------------------------------------------------------------

Obstacle ObstacleSet::obstacle(std::size_t i) const {
    if (config.dimension == 3) {
        return Obstacle(Vec3{centers[i][0], centers[i][1], centers[i][2]}, shape_param[i]);
    }
    return Obstacle(Vec2{centers[i][0], centers[i][1]},
                    config.grain_law.make_grain(shape_param[i]));
}

// --- exclusion volume -------------------------------------------------------

namespace {

// Exact annulus mass for one disc radius: centers rho with
// max(a, r0) + R < rho <= b + R, times the intensity.
double disc_window_mass(double R, double a, double b, const ModelConfig& cfg) {
    const double lo = std::max(a, cfg.clearing) + R;
    const double hi = b + R;
    if (hi <= lo) return 0.0;
    return cfg.intensity * unit_ball_volume(cfg.dimension) *
           (std::pow(hi, cfg.dimension) - std::pow(lo, cfg.dimension));
}

}  // namespace

McEstimate exclusion_volume(double r, const ModelConfig& config, long mc_samples,
                            std::uint64_t mc_seed) {
    config.validate();
    if (r < 0.0) fail("exclusion_volume: require r >= 0");
    McEstimate out;
    if (r <= config.clearing) return out;  // conditioning empties the window
    if (config.grain_law.is_disc()) {
        for (const auto& atom : config.grain_law.atoms()) {
            out.value += atom.prob * disc_window_mass(atom.radius, 0.0, r, config);
        }
        return out;
    }
    // Polygon law: Monte-Carlo integration of the hit condition over the
    // bounding annulus, with the uniform rotation integrated by sampling.
    const ConvexPolygon& poly = config.grain_law.base_polygon();
    const double rc = poly.circumradius();
    const double lo = std::max(0.0, config.clearing - rc);
    const double hi = r + rc;
    const double area = kPi * (hi * hi - lo * lo);
    Rng rng(mc_seed);
    long hits = 0;
    std::vector<Vec2> world(poly.vertices().size());
    for (long i = 0; i < mc_samples; ++i) {
        const double rho = std::sqrt(rng.uniform(lo * lo, hi * hi));
        const double ang = rng.uniform(0.0, kTwoPi);
        const double rot = rng.uniform(0.0, kTwoPi);
        const Vec2 c{rho * std::cos(ang), rho * std::sin(ang)};
        const double cr = std::cos(rot), sr = std::sin(rot);
        for (std::size_t k = 0; k < world.size(); ++k) {
            Vec2 v = poly.vertices()[k];
            world[k] = Vec2{cr * v.x - sr * v.y, sr * v.x + cr * v.y} + c;
        }
        if (polygon_contains_origin(world)) continue;
        const double dist = polygon_distance_to_origin(world);
        if (dist <= r && dist > config.clearing) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(mc_samples);
    out.value = config.intensity * area * p;
    out.std_error = config.intensity * area *
                    std::sqrt(std::max(0.0, p * (1.0 - p) / static_cast<double>(mc_samples)));
    return out;
}

// --- sampling ---------------------------------------------------------------

namespace {

// Appends one window of obstacles with entry distance in (a, b] to the set.
void sample_window(ObstacleSet& set, double a, double b, std::uint64_t salt) {
    const ModelConfig& cfg = set.config;
    const int d = cfg.dimension;
    const std::uint64_t root = set.seed.root;

    if (cfg.grain_law.is_disc()) {
        const auto& atoms = cfg.grain_law.atoms();
        std::vector<double> mass(atoms.size());
        double total = 0.0;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            mass[i] = atoms[i].prob * disc_window_mass(atoms[i].radius, a, b, cfg);
            total += mass[i];
        }
        Rng count_rng = Rng::child(root, salt, kCountStreamTag);
        const long n = count_rng.poisson(total);
        for (long k = 0; k < n; ++k) {
            Rng rng = Rng::child(root, salt, static_cast<std::uint64_t>(k));
            // Radius atom proportional to its window mass, then the center
            // with rho^d uniform on the allowed shell (centers uniform on the
            // allowed region), then the direction.
            double pick = rng.uniform() * total;
            std::size_t ai = 0;
            for (; ai + 1 < atoms.size(); ++ai) {
                if (pick < mass[ai]) break;
                pick -= mass[ai];
            }
            const double R = atoms[ai].radius;
            const double lo = std::max(a, cfg.clearing) + R;
            const double hi = b + R;
            const double rho =
                std::pow(rng.uniform(std::pow(lo, d), std::pow(hi, d)), 1.0 / d);
            std::array<double, 3> c{0.0, 0.0, 0.0};
            if (d == 2) {
                const double ang = rng.uniform(0.0, kTwoPi);
                c = {rho * std::cos(ang), rho * std::sin(ang), 0.0};
            } else {
                const double z = rng.uniform(-1.0, 1.0);
                const double ang = rng.uniform(0.0, kTwoPi);
                const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
                c = {rho * s * std::cos(ang), rho * s * std::sin(ang), rho * z};
            }
            set.centers.push_back(c);
            set.shape_param.push_back(R);
            set.entry.push_back(rho - R);
        }
        return;
    }

    // Polygon law: Poisson candidates on the bounding annulus, thinned by the
    // exact entry-distance window and the strict origin-outside conditioning.
    // Thinning keeps the law exact without a closed-form exclusion volume.
    const ConvexPolygon& poly = cfg.grain_law.base_polygon();
    const double rc = poly.circumradius();
    const double lo = std::max(0.0, std::max(a, cfg.clearing) - rc);
    const double hi = b + rc;
    if (hi <= lo) return;
    const double mass = cfg.intensity * kPi * (hi * hi - lo * lo);
    Rng count_rng = Rng::child(root, salt, kCountStreamTag);
    const long n = count_rng.poisson(mass);
    std::vector<Vec2> world(poly.vertices().size());
    for (long k = 0; k < n; ++k) {
        Rng rng = Rng::child(root, salt, static_cast<std::uint64_t>(k));
        const double rho = std::sqrt(rng.uniform(lo * lo, hi * hi));
        const double ang = rng.uniform(0.0, kTwoPi);
        const double rot = rng.uniform(0.0, kTwoPi);
        const Vec2 c{rho * std::cos(ang), rho * std::sin(ang)};
        const double cr = std::cos(rot), sr = std::sin(rot);
        for (std::size_t j = 0; j < world.size(); ++j) {
            Vec2 v = poly.vertices()[j];
            world[j] = Vec2{cr * v.x - sr * v.y, sr * v.x + cr * v.y} + c;
        }
        if (polygon_contains_origin(world)) continue;
        const double dist = polygon_distance_to_origin(world);
        if (dist <= 0.0 || dist <= std::max(a, cfg.clearing) || dist > b) continue;
        set.centers.push_back({c.x, c.y, 0.0});
        set.shape_param.push_back(rot);
        set.entry.push_back(dist);
    }
}

}  // namespace

ObstacleSet sample(const ModelConfig& config, double reach, std::uint64_t seed) {
    config.validate();
    if (!(reach > 0.0)) fail("sample: require reach > 0");
    if (config.clearing > 0.0 && reach <= config.clearing) fail("sample: require reach > clearing radius");
    ObstacleSet set;
    set.config = config;
    set.reach = reach;
    set.seed.root = seed;
    set.seed.window_salts = {0};
    set.seed.window_bounds = {reach};
    sample_window(set, 0.0, reach, 0);
    return set;
}

ObstacleSet extend(const ObstacleSet& set, double new_reach, std::uint64_t seed) {
    if (!(new_reach > set.reach)) fail("extend: require new_reach > current reach");
    ObstacleSet out = set;
    const std::uint64_t salt =
        mix_seed(0x657874ULL, set.seed.window_salts.size(), seed);
    out.seed.window_salts.push_back(salt);
    out.seed.window_bounds.push_back(new_reach);
    sample_window(out, set.reach, new_reach, salt);
    out.reach = new_reach;
    return out;
}

double spherical_contact(const ObstacleSet& set) {
    double best = set.reach;
    for (double e : set.entry) best = std::min(best, e);
    return best;
}

ObstacleSet scale_set(const ObstacleSet& set, double s) {
    if (!(s > 0.0)) fail("scale_set: require s > 0");
    ObstacleSet out = set;
    out.reach *= s;
    out.config.clearing *= s;
    out.config.intensity /= std::pow(s, set.config.dimension);
    if (set.config.grain_law.is_disc()) {
        std::vector<RadiusAtom> atoms = set.config.grain_law.atoms();
        for (auto& a : atoms) a.radius *= s;
        out.config.grain_law = GrainLaw::discrete_disc(std::move(atoms));
    } else {
        std::vector<Vec2> verts = set.config.grain_law.base_polygon().vertices();
        for (auto& v : verts) v = v * s;
        out.config.grain_law = GrainLaw::rotated_polygon(ConvexPolygon(std::move(verts)));
    }
    for (auto& c : out.centers) {
        c[0] *= s;
        c[1] *= s;
        c[2] *= s;
    }
    for (std::size_t i = 0; i < out.shape_param.size(); ++i) {
        if (set.config.grain_law.is_disc()) out.shape_param[i] *= s;  // radii scale, rotations do not
    }
    for (auto& e : out.entry) e *= s;
    for (auto& b : out.seed.window_bounds) b *= s;
    return out;
}

// --- JSON -------------------------------------------------------------------

namespace {

nlohmann::json grain_law_to_json(const GrainLaw& law) {
    nlohmann::json j;
    if (law.is_disc()) {
        j["kind"] = "disc";
        auto arr = nlohmann::json::array();
        for (const auto& a : law.atoms()) arr.push_back({{"radius", a.radius}, {"prob", a.prob}});
        j["atoms"] = arr;
    } else {
        j["kind"] = "polygon";
        auto arr = nlohmann::json::array();
        for (const auto& v : law.base_polygon().vertices()) arr.push_back({v.x, v.y});
        j["vertices"] = arr;
    }
    return j;
}

GrainLaw grain_law_from_json(const nlohmann::json& j) {
    if (j.at("kind") == "disc") {
        std::vector<RadiusAtom> atoms;
        for (const auto& a : j.at("atoms")) {
            atoms.push_back({a.at("radius").get<double>(), a.at("prob").get<double>()});
        }
        return GrainLaw::discrete_disc(std::move(atoms));
    }
    std::vector<Vec2> verts;
    for (const auto& v : j.at("vertices")) verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    return GrainLaw::rotated_polygon(ConvexPolygon(std::move(verts)));
}

}  // namespace

std::string obstacle_set_to_json(const ObstacleSet& set) {
    nlohmann::json j;
    j["config"] = {{"dimension", set.config.dimension},
                   {"intensity", set.config.intensity},
                   {"clearing", set.config.clearing},
                   {"grain_law", grain_law_to_json(set.config.grain_law)}};
    j["reach"] = set.reach;
    j["seed"] = {{"root", set.seed.root},
                 {"window_salts", set.seed.window_salts},
                 {"window_bounds", set.seed.window_bounds}};
    auto obstacles = nlohmann::json::array();
    for (std::size_t i = 0; i < set.size(); ++i) {
        nlohmann::json o;
        if (set.config.dimension == 3) {
            o["center"] = {set.centers[i][0], set.centers[i][1], set.centers[i][2]};
        } else {
            o["center"] = {set.centers[i][0], set.centers[i][1]};
        }
        o[set.config.grain_law.is_disc() ? "radius" : "rotation"] = set.shape_param[i];
        obstacles.push_back(std::move(o));
    }
    j["obstacles"] = std::move(obstacles);
    return j.dump(2);
}

ObstacleSet obstacle_set_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ObstacleSet set;
    const auto& jc = j.at("config");
    set.config.dimension = jc.at("dimension").get<int>();
    set.config.intensity = jc.at("intensity").get<double>();
    set.config.clearing = jc.at("clearing").get<double>();
    set.config.grain_law = grain_law_from_json(jc.at("grain_law"));
    set.config.validate();
    set.reach = j.at("reach").get<double>();
    set.seed.root = j.at("seed").at("root").get<std::uint64_t>();
    set.seed.window_salts = j.at("seed").at("window_salts").get<std::vector<std::uint64_t>>();
    set.seed.window_bounds = j.at("seed").at("window_bounds").get<std::vector<double>>();
    const bool disc = set.config.grain_law.is_disc();
    for (const auto& o : j.at("obstacles")) {
        const auto& c = o.at("center");
        std::array<double, 3> center{c.at(0).get<double>(), c.at(1).get<double>(),
                                     set.config.dimension == 3 ? c.at(2).get<double>() : 0.0};
        set.centers.push_back(center);
        set.shape_param.push_back(o.at(disc ? "radius" : "rotation").get<double>());
        set.entry.push_back(set.obstacle(set.size() - 1).entry_distance());
    }
    return set;
}

}  // namespace boolvis

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boolvis/asymptotics.hpp"
#include "boolvis/experiments.hpp"
#include "boolvis/shadow_law.hpp"
#include "boolvis/visibility.hpp"

namespace py = pybind11;
using namespace boolvis;

namespace {

GrainLaw grain_from_dict(const py::dict& d) {
    const std::string kind = d["kind"].cast<std::string>();
    if (kind == "disc") {
        std::vector<RadiusAtom> atoms;
        for (auto item : d["atoms"]) {
            auto pair = item.cast<std::pair<double, double>>();
            atoms.push_back({pair.first, pair.second});
        }
        return GrainLaw::discrete_disc(std::move(atoms));
    }
    if (kind == "polygon") {
        std::vector<Vec2> verts;
        for (auto item : d["vertices"]) {
            auto p = item.cast<std::pair<double, double>>();
            verts.push_back({p.first, p.second});
        }
        return GrainLaw::rotated_polygon(ConvexPolygon(std::move(verts)));
    }
    throw std::invalid_argument("grain kind must be 'disc' or 'polygon'");
}

ModelConfig config_from_args(int dim, double intensity, const py::object& grain,
                             double clearing) {
    GrainLaw law = py::isinstance<py::float_>(grain) || py::isinstance<py::int_>(grain)
                       ? GrainLaw::constant_disc(grain.cast<double>())
                       : grain_from_dict(grain.cast<py::dict>());
    ModelConfig cfg{dim, intensity, std::move(law), clearing};
    cfg.validate();
    return cfg;
}

py::dict row_to_dict(const TailRow& row) {
    py::dict d;
    d["r"] = row.r;
    d["trials"] = row.trials;
    d["hits"] = row.hits;
    d["p_hat"] = row.p_hat;
    d["ci_lo"] = row.ci_lo;
    d["ci_hi"] = row.ci_hi;
    return d;
}

}  // namespace

PYBIND11_MODULE(_boolvis, m) {
    m.doc() = "Visibility in the Poisson Boolean model: coverage tests, "
              "covering-probability formulas, sampling and experiment drivers";

    // geometry
    m.def("shadow_half_angle", &shadow_half_angle, py::arg("rho"), py::arg("R"), py::arg("r"));
    m.def("wrap_angle", &wrap_angle);
    m.def(
        "blocked_interval",
        [](std::pair<double, double> center, double R, double r) -> py::object {
            Obstacle obs({center.first, center.second}, Grain::disc(R));
            auto arc = blocked_interval(obs, r);
            if (!arc) return py::none();
            return py::make_tuple(arc->center_angle, arc->half_width);
        },
        py::arg("center"), py::arg("R"), py::arg("r"),
        "Blocked (center_angle, half_width) of a disc obstacle, or None");
    m.def(
        "first_hit_distance",
        [](std::pair<double, double> u, std::pair<double, double> center, double R) -> py::object {
            Obstacle obs({center.first, center.second}, Grain::disc(R));
            auto t = first_hit_distance(Vec2{u.first, u.second}, obs);
            if (!t) return py::none();
            return py::float_(*t);
        },
        py::arg("u"), py::arg("center"), py::arg("R"));

    // coverage
    m.def(
        "circle_union",
        [](const std::vector<std::pair<double, double>>& arcs) {
            std::vector<ArcInterval> xs;
            xs.reserve(arcs.size());
            for (auto& [c, h] : arcs) xs.push_back({c, h});
            auto v = circle_union(xs);
            py::dict d;
            d["covered"] = v.covered();
            d["uncovered_measure"] = v.uncovered_measure;
            d["witness_angle"] = v.witness_angle;
            return d;
        },
        py::arg("arcs"), "Exact closed-arc union test; arcs are (center, half_width)");
    m.def(
        "sphere_coverage",
        [](const std::vector<std::tuple<double, double, double, double>>& caps,
           double resolution) {
            std::vector<Cap> xs;
            for (auto& [x, y, z, t] : caps) xs.push_back({Vec3{x, y, z}.normalized(), t});
            auto v = sphere_coverage(xs, resolution);
            py::dict d;
            d["covered"] = v.covered();
            d["uncovered"] = v.uncovered();
            d["unknown"] = v.unknown();
            d["witness"] = py::make_tuple(v.witness_dir.x, v.witness_dir.y, v.witness_dir.z);
            return d;
        },
        py::arg("caps"), py::arg("resolution"),
        "Certified sphere-coverage test; caps are (ax, ay, az, angular_radius)");
    m.def("stevens_cover_prob", &stevens_cover_prob, py::arg("a"), py::arg("n"));
    m.def("twoatom_uncover_prob", &twoatom_uncover_prob, py::arg("m"), py::arg("n"));
    m.def(
        "shepp_bound",
        [](double a, long n) {
            auto b = shepp_bound(a, n);
            return py::make_tuple(b.tight, b.simple);
        },
        py::arg("a"), py::arg("n"));
    m.def("cap_fraction", &cap_fraction, py::arg("theta"), py::arg("d"));
    m.def(
        "siegel_holst_cover_prob",
        [](double view_r, double R, long n, long samples, std::uint64_t seed) {
            auto est = siegel_holst_cover_prob(nu_r_law(GrainLaw::constant_disc(R), view_r), n,
                                               samples, seed);
            return py::make_tuple(est.value, est.std_error);
        },
        py::arg("view_r"), py::arg("R"), py::arg("n"), py::arg("samples") = 100000,
        py::arg("seed") = 1,
        "Covering probability of n shadow arcs at the given view radius");

    // shadow law
    m.def("shadow_length_map", &shadow_length_map, py::arg("R"), py::arg("r"), py::arg("U"));
    m.def("nu_r_pdf", &nu_r_pdf, py::arg("u"), py::arg("R"), py::arg("r"));
    m.def("nu_r_cdf", &nu_r_cdf, py::arg("u"), py::arg("R"), py::arg("r"));

    // model + visibility
    m.def(
        "sample_obstacles",
        [](int dim, double intensity, const py::object& grain, double clearing, double reach,
           std::uint64_t seed) {
            auto set = sample(config_from_args(dim, intensity, grain, clearing), reach, seed);
            return obstacle_set_to_json(set);
        },
        py::arg("dim"), py::arg("intensity"), py::arg("grain"), py::arg("clearing"),
        py::arg("reach"), py::arg("seed"), "Sample a configuration; returns its JSON document");
    m.def(
        "total_visibility",
        [](int dim, double intensity, const py::object& grain, double clearing,
           double initial_reach, double tol, std::uint64_t seed) {
            ObstacleSet set;
            auto res = resolve_total_visibility(config_from_args(dim, intensity, grain, clearing),
                                                initial_reach, tol, seed, &set);
            py::dict d;
            d["value"] = res.estimate();
            d["kind"] = res.kind == VisibilityResult::Kind::Exact      ? "exact"
                        : res.kind == VisibilityResult::Kind::Interval ? "interval"
                                                                       : "unbounded_beyond";
            d["reach"] = set.reach;
            d["obstacles"] = set.size();
            return d;
        },
        py::arg("dim") = 2, py::arg("intensity") = 1.0, py::arg("grain") = 1.0,
        py::arg("clearing") = 0.0, py::arg("initial_reach") = 6.0, py::arg("tol") = 1e-6,
        py::arg("seed") = 1);
    m.def(
        "total_visibility_of_discs",
        [](const std::vector<std::tuple<double, double, double>>& discs, double reach,
           double tol) {
            ObstacleSet set;
            set.config.dimension = 2;
            set.config.intensity = 1.0;
            double rmax = 0.0;
            for (auto& [x, y, R] : discs) rmax = std::max(rmax, R);
            set.config.grain_law = GrainLaw::constant_disc(std::max(rmax, 1e-9));
            set.reach = reach;
            for (auto& [x, y, R] : discs) {
                set.centers.push_back({x, y, 0.0});
                set.shape_param.push_back(R);
                set.entry.push_back(std::hypot(x, y) - R);
            }
            auto res = total_visibility_2d(set, tol);
            py::dict d;
            d["bounded"] = res.bounded();
            d["value"] = res.bounded() ? res.estimate() : res.guard;
            return d;
        },
        py::arg("discs"), py::arg("reach") = 100.0, py::arg("tol") = 1e-8,
        "Exact planar visibility of an explicit disc list ((x, y, R), ...)");

    // asymptotics
    m.def(
        "directional_tail",
        [](double r, int dim, double intensity, const py::object& grain) {
            return directional_tail(r, config_from_args(dim, intensity, grain, 0.0));
        },
        py::arg("r"), py::arg("dim") = 2, py::arg("intensity") = 1.0, py::arg("grain") = 1.0);
    m.def("mean_shadow",
          [](double r, double R) { return mean_shadow(r, GrainLaw::constant_disc(R)); },
          py::arg("r"), py::arg("R"));
    m.def(
        "tail_bounds",
        [](double r, double R) {
            auto tb = tail_bounds(r, GrainLaw::constant_disc(R));
            py::dict d;
            d["lower"] = tb.lower;
            d["upper"] = tb.upper;
            d["mean_arc"] = tb.mean_arc;
            d["upper_applicable"] = tb.upper_applicable;
            return d;
        },
        py::arg("r"), py::arg("R"));
    m.def(
        "gumbel_constants",
        [](int d, double R) {
            auto kc = gumbel_constants(d, GrainLaw::constant_disc(R));
            return py::make_tuple(kc.K_d, kc.K_prime_d);
        },
        py::arg("d"), py::arg("R") = 1.0);
    m.def("xi_transform", &xi_transform, py::arg("V"), py::arg("R"), py::arg("d") = 2);
    m.def("psi_transform",
          [](double V, double r, double R, int d) {
              return psi_transform(V, r, GrainLaw::constant_disc(R), d);
          },
          py::arg("V"), py::arg("r"), py::arg("R") = 1.0, py::arg("d") = 2);
    m.def("gumbel_cdf", &gumbel_cdf, py::arg("u"));
    m.def("coverage_gumbel_transform",
          [](double V, double R, double clearing) {
              return coverage_gumbel_transform(V, GrainLaw::constant_disc(R), clearing);
          },
          py::arg("V"), py::arg("R"), py::arg("clearing") = 0.0);
    m.def(
        "finger_lower_bound",
        [](double r, double R, double zeta) {
            auto fb = finger_lower_bound(r, R, zeta);
            py::dict d;
            d["first_term"] = fb.first_term;
            d["N_r"] = fb.geometry.N_r;
            d["theta_r"] = fb.geometry.theta_r;
            d["rho_r"] = fb.geometry.rho_r;
            d["kappa"] = fb.geometry.kappa;
            return d;
        },
        py::arg("r"), py::arg("R"), py::arg("zeta"));

    // experiments
    m.def(
        "estimate_tail",
        [](int dim, double intensity, const py::object& grain, std::vector<double> grid,
           long trials, std::uint64_t seed, int threads) {
            auto rows = estimate_tail(config_from_args(dim, intensity, grain, 0.0), grid, trials,
                                      seed, threads);
            py::list out;
            for (const auto& row : rows) out.append(row_to_dict(row));
            return out;
        },
        py::arg("dim"), py::arg("intensity"), py::arg("grain"), py::arg("r_grid"),
        py::arg("trials"), py::arg("seed") = 1, py::arg("threads") = 0);
    m.def(
        "fit_log_slope",
        [](const std::vector<py::dict>& rows, const std::string& model, std::uint64_t seed) {
            std::vector<TailRow> xs;
            for (const auto& d : rows) {
                TailRow row;
                row.r = d["r"].cast<double>();
                row.trials = d["trials"].cast<long>();
                row.hits = d["hits"].cast<long>();
                row.p_hat = d["p_hat"].cast<double>();
                xs.push_back(row);
            }
            auto fit = fit_log_slope(xs, model == "linear" ? SlopeModel::Linear
                                                           : SlopeModel::LinearPlusLog,
                                     seed);
            py::dict d;
            d["slope"] = fit.slope;
            d["std_error"] = fit.std_error;
            d["intercept"] = fit.intercept;
            d["log_coef"] = fit.log_coef;
            d["rows_used"] = fit.rows_used;
            return d;
        },
        py::arg("rows"), py::arg("model") = "linear-log", py::arg("seed") = 1);
    m.def("ks_distance",
          [](std::vector<double> xs, const std::function<double(double)>& cdf) {
              return ks_distance(std::move(xs), cdf);
          },
          py::arg("samples"), py::arg("cdf"));
    m.def("ks_distance_gumbel",
          [](std::vector<double> xs) { return ks_distance(std::move(xs), gumbel_cdf); },
          py::arg("samples"));
    m.def(
        "wilson_interval",
        [](long hits, long trials) {
            auto ci = wilson_interval(hits, trials);
            return py::make_tuple(ci.lo, ci.hi);
        },
        py::arg("hits"), py::arg("trials"));
    m.def(
        "gumbel_small_R",
        [](double R, int d, long samples, std::uint64_t seed, int threads) {
            auto run = gumbel_small_R(R, d, samples, seed, threads);
            py::dict out;
            out["xi"] = run.transformed;
            out["visibility"] = run.visibility;
            out["ks"] = run.ks;
            out["mean"] = run.mean;
            return out;
        },
        py::arg("R"), py::arg("d") = 2, py::arg("samples") = 100, py::arg("seed") = 1,
        py::arg("threads") = 0);
    m.def(
        "gumbel_clearing",
        [](double r, double R, int d, long samples, std::uint64_t seed, int threads) {
            auto run = gumbel_clearing(r, GrainLaw::constant_disc(R), d, samples, seed, threads);
            py::dict out;
            out["psi"] = run.transformed;
            out["visibility"] = run.visibility;
            out["ks"] = run.ks;
            out["mean"] = run.mean;
            return out;
        },
        py::arg("r"), py::arg("R") = 1.0, py::arg("d") = 2, py::arg("samples") = 100,
        py::arg("seed") = 1, py::arg("threads") = 0);

    m.attr("__version__") = "0.1.0";
}

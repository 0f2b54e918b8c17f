// boolvis command line: tail-curve estimation, slope regressions,
// extreme-value runs, bound checks and direct access to the covering
// probability formulas.  Exit codes: 0 success, 2 invalid configuration,
// 3 assertion failure in --assert mode.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "boolvis/asymptotics.hpp"
#include "boolvis/experiments.hpp"
#include "boolvis/rng.hpp"
#include "boolvis/shadow_law.hpp"
#include "boolvis/visibility.hpp"

using namespace boolvis;
using nlohmann::json;

namespace {

struct CommonOpts {
    int dim = 2;
    double intensity = 1.0;
    std::string grain = "const:1";
    std::uint64_t seed = 1;
    long trials = 10000;
    std::string r_spec;
    std::string out;
    std::string format = "csv";
    double tol = 1e-6;
    int threads = 0;
    bool assert_mode = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_grid) {
    cmd->add_option("--dim", o.dim, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
    cmd->add_option("--intensity", o.intensity, "Poisson intensity lambda");
    cmd->add_option("--grain", o.grain,
                    "Grain law: const:R | discrete:R1:p1,R2:p2 | polygon:file");
    cmd->add_option("--seed", o.seed, "Root seed");
    cmd->add_option("--trials", o.trials, "Replicates per estimate");
    if (with_grid) cmd->add_option("--r", o.r_spec, "Radius grid lo:hi:step");
    cmd->add_option("--out", o.out, "Output file (default stdout)");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tol", o.tol, "Bisection tolerance");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_flag("--assert", o.assert_mode, "Exit 3 when the declared check fails");
}

GrainLaw parse_grain(const std::string& spec) {
    if (spec.rfind("const:", 0) == 0) {
        return GrainLaw::constant_disc(std::stod(spec.substr(6)));
    }
    if (spec.rfind("discrete:", 0) == 0) {
        std::vector<RadiusAtom> atoms;
        std::stringstream ss(spec.substr(9));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw std::invalid_argument("grain: expected R:p pairs in " + spec);
            }
            atoms.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
        }
        return GrainLaw::discrete_disc(std::move(atoms));
    }
    if (spec.rfind("polygon:", 0) == 0) {
        std::ifstream in(spec.substr(8));
        if (!in) throw std::invalid_argument("grain: cannot open polygon file " + spec.substr(8));
        json j = json::parse(in);
        std::vector<Vec2> verts;
        for (const auto& v : j.at("vertices")) {
            verts.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }
        return GrainLaw::rotated_polygon(ConvexPolygon(std::move(verts)));
    }
    throw std::invalid_argument("grain: unrecognised spec '" + spec + "'");
}

std::vector<double> parse_grid(const std::string& spec) {
    double lo = 0, hi = 0, step = 0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo) {
        throw std::invalid_argument("--r: expected lo:hi:step with step > 0, got '" + spec + "'");
    }
    std::vector<double> grid;
    for (double r = lo; r <= hi + 1e-12 * (1 + std::fabs(hi)); r += step) grid.push_back(r);
    return grid;
}

std::ostream& open_out(const CommonOpts& o, std::ofstream& file) {
    if (o.out.empty()) return std::cout;
    file.open(o.out);
    if (!file) throw std::invalid_argument("cannot open output file " + o.out);
    return file;
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

int run_tail(const CommonOpts& o, bool with_fit, const std::string& model_name,
             std::optional<double> slope_min, std::optional<double> slope_max) {
    ModelConfig cfg{o.dim, o.intensity, parse_grain(o.grain), 0.0};
    auto grid = parse_grid(o.r_spec.empty() ? "1:5:1" : o.r_spec);
    auto rows = estimate_tail(cfg, grid, o.trials, o.seed, o.threads);
    std::ofstream file;
    auto& os = open_out(o, file);

    json summary;
    bool ok = true;
    if (with_fit) {
        auto model = model_name == "linear" ? SlopeModel::Linear : SlopeModel::LinearPlusLog;
        auto fit = fit_log_slope(rows, model, o.seed);
        summary = {{"slope", fit.slope},
                   {"std_error", fit.std_error},
                   {"intercept", fit.intercept},
                   {"log_coef", fit.log_coef},
                   {"rows_used", fit.rows_used},
                   {"model", model_name}};
        if (slope_min && fit.slope < *slope_min) ok = false;
        if (slope_max && fit.slope > *slope_max) ok = false;
    }
    if (o.format == "csv") {
        write_tail_csv(os, rows);
        if (with_fit) {
            os << "# slope=" << fmt9(summary["slope"].get<double>())
               << " std_error=" << fmt9(summary["std_error"].get<double>())
               << " model=" << model_name << "\n";
        }
    } else {
        json j;
        j["rows"] = json::parse(tail_rows_json(rows));
        if (with_fit) j["fit"] = summary;
        os << j.dump(2) << "\n";
    }
    return (o.assert_mode && !ok) ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visibility simulation in the planar/spatial Boolean model"};
    app.require_subcommand(1);

    CommonOpts tail_o, slope_o, gs_o, gc_o, d3_o, bc_o, fc_o, cp_o;

    auto* tail = app.add_subcommand("tail", "Estimate P(visibility >= r) over a grid");
    add_common(tail, tail_o, true);

    auto* slope = app.add_subcommand("slope", "Tail estimation plus log-slope regression");
    add_common(slope, slope_o, true);
    std::string slope_model = "linear-log";
    double slope_min = -1e300, slope_max = 1e300;
    slope->add_option("--model", slope_model, "linear | linear-log")
        ->check(CLI::IsMember({"linear", "linear-log"}));
    slope->add_option("--slope-min", slope_min, "Assert: minimum acceptable slope");
    slope->add_option("--slope-max", slope_max, "Assert: maximum acceptable slope");

    auto* gs = app.add_subcommand("gumbel-small", "Small-obstacle extreme-value run");
    add_common(gs, gs_o, false);
    double gs_R = 0.05;
    long gs_samples = 200;
    double gs_ks_max = 1.0;
    gs->add_option("--R", gs_R, "Obstacle radius (0 < R < 1)")->required();
    gs->add_option("--samples", gs_samples, "Number of visibility samples");
    gs->add_option("--ks-max", gs_ks_max, "Assert: maximum KS distance to Gumbel");

    auto* gc = app.add_subcommand("gumbel-clearing", "Large-clearing extreme-value run");
    add_common(gc, gc_o, false);
    double gc_r = 100.0, gc_ks_max = 1.0, gc_alpha = 0.0;
    long gc_samples = 200;
    gc->add_option("--clearing-r", gc_r, "Clearing radius r (> e)")->required();
    gc->add_option("--samples", gc_samples, "Number of visibility samples");
    gc->add_option("--ks-max", gc_ks_max, "Assert: maximum KS distance to Gumbel");
    gc->add_option("--conditional-alpha", gc_alpha,
                   "Also estimate P(V >= r + r^alpha | clearing),  alpha in (0,1)");

    auto* d3 = app.add_subcommand("d3-bracket", "Dimension-3 slope bracket experiment");
    add_common(d3, d3_o, true);
    double d3_R = 1.0;
    d3->add_option("--R", d3_R, "Ball radius");

    auto* bc = app.add_subcommand("bounds-check", "Tail bounds and covering-probability chains");
    add_common(bc, bc_o, true);
    long bc_sh_samples = 0;
    bc->add_option("--sh-samples", bc_sh_samples,
                   "Siegel-Holst samples for the mixture route (0 = skip)");

    auto* fc = app.add_subcommand("finger-check", "Discretised-direction lower-bound check");
    add_common(fc, fc_o, false);
    double fc_R = 0.5, fc_r = 8.0, fc_zeta = 1.0;
    fc->add_option("--R", fc_R, "Disc radius");
    fc->add_option("--target-r", fc_r, "Visibility threshold r");
    fc->add_option("--zeta", fc_zeta, "Direction density (0 < zeta < 2/R)");

    auto* cp = app.add_subcommand("cover-prob", "Direct access to coverage formulas");
    add_common(cp, cp_o, false);
    std::string formula = "stevens";
    double cp_a = 0.1, cp_m = 0.1, cp_theta = 0.5;
    long cp_n = 10, cp_samples = 100000;
    cp->add_option("--formula", formula,
                   "stevens | twoatom | shepp | siegel-holst | cap-fraction")
        ->check(CLI::IsMember({"stevens", "twoatom", "shepp", "siegel-holst", "cap-fraction"}));
    cp->add_option("--a", cp_a, "Arc length (stevens/shepp) or nu_r view radius");
    cp->add_option("--m", cp_m, "Two-atom mean");
    cp->add_option("--n", cp_n, "Number of arcs");
    cp->add_option("--theta", cp_theta, "Cap angular radius");
    cp->add_option("--samples", cp_samples, "Monte-Carlo samples (siegel-holst)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tail->parsed()) return run_tail(tail_o, false, "", {}, {});
        if (slope->parsed()) {
            return run_tail(slope_o, true, slope_model,
                            slope_min > -1e299 ? std::optional<double>(slope_min) : std::nullopt,
                            slope_max < 1e299 ? std::optional<double>(slope_max) : std::nullopt);
        }

        if (gs->parsed()) {
            auto run = gumbel_small_R(gs_R, gs_o.dim, gs_samples, gs_o.seed, gs_o.threads);
            std::ofstream file;
            auto& os = open_out(gs_o, file);
            if (gs_o.format == "csv") {
                os << "index,visibility,xi\n";
                for (std::size_t i = 0; i < run.transformed.size(); ++i) {
                    os << i << ',' << fmt9(run.visibility[i]) << ',' << fmt9(run.transformed[i])
                       << '\n';
                }
                os << "# ks=" << fmt9(run.ks) << " mean=" << fmt9(run.mean) << "\n";
            } else {
                json j{{"R", gs_R}, {"ks", run.ks}, {"mean", run.mean},
                       {"visibility", run.visibility}, {"xi", run.transformed}};
                os << j.dump(2) << "\n";
            }
            return (gs_o.assert_mode && run.ks > gs_ks_max) ? 3 : 0;
        }

        if (gc->parsed()) {
            auto law = parse_grain(gc_o.grain);
            auto run = gumbel_clearing(gc_r, law, gc_o.dim, gc_samples, gc_o.seed, gc_o.threads);
            std::ofstream file;
            auto& os = open_out(gc_o, file);
            if (gc_o.format == "csv") {
                os << "index,visibility,psi\n";
                for (std::size_t i = 0; i < run.transformed.size(); ++i) {
                    os << i << ',' << fmt9(run.visibility[i]) << ',' << fmt9(run.transformed[i])
                       << '\n';
                }
                os << "# ks=" << fmt9(run.ks) << " mean=" << fmt9(run.mean) << "\n";
            } else {
                json j{{"clearing_r", gc_r}, {"ks", run.ks}, {"mean", run.mean},
                       {"visibility", run.visibility}, {"psi", run.transformed}};
                os << j.dump(2) << "\n";
            }
            if (gc_alpha > 0.0) {
                auto ct = conditional_tail(gc_r, gc_alpha, law, gc_o.dim,
                                           std::max<long>(gc_o.trials, 100), gc_o.seed,
                                           gc_o.threads);
                std::cout << "conditional_tail(alpha=" << gc_alpha << ") = " << fmt9(ct.value)
                          << " +- " << fmt9(ct.std_error) << "\n";
            }
            return (gc_o.assert_mode && run.ks > gc_ks_max) ? 3 : 0;
        }

        if (d3->parsed()) {
            auto grid = parse_grid(d3_o.r_spec.empty() ? "2:5:0.5" : d3_o.r_spec);
            auto res = d3_slope_bracket(d3_R, grid, d3_o.trials, d3_o.seed, d3_o.threads);
            std::ofstream file;
            auto& os = open_out(d3_o, file);
            if (d3_o.format == "csv") {
                write_tail_csv(os, res.rows);
                os << "# slope=" << fmt9(res.fit.slope) << " std_error=" << fmt9(res.fit.std_error)
                   << " bracket=[" << fmt9(res.bracket_lo) << ',' << fmt9(res.bracket_hi)
                   << "] pass=" << (res.pass ? 1 : 0) << "\n";
            } else {
                json j;
                j["rows"] = json::parse(tail_rows_json(res.rows));
                j["fit"] = {{"slope", res.fit.slope}, {"std_error", res.fit.std_error}};
                j["bracket_lo"] = res.bracket_lo;
                j["bracket_hi"] = res.bracket_hi;
                j["pass"] = res.pass;
                os << j.dump(2) << "\n";
            }
            return (d3_o.assert_mode && !res.pass) ? 3 : 0;
        }

        if (bc->parsed()) {
            auto law = parse_grain(bc_o.grain);
            auto grid = parse_grid(bc_o.r_spec.empty() ? "3:5:1" : bc_o.r_spec);
            ModelConfig cfg{2, bc_o.intensity, law, 0.0};
            std::vector<TailRow> rows;
            if (bc_o.trials > 0) rows = estimate_tail(cfg, grid, bc_o.trials, bc_o.seed, bc_o.threads);
            std::ofstream file;
            auto& os = open_out(bc_o, file);
            bool ok = true;
            json out = json::array();
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double r = grid[i];
                auto tb = tail_bounds(r, law);
                json row{{"r", r},
                         {"mean_arc", tb.mean_arc},
                         {"lower", tb.lower},
                         {"upper", tb.upper},
                         {"stevens_chain", lawwithcover_eval(r, law, CoverModel::StevensAtMean)},
                         {"twoatom_chain", lawwithcover_eval(r, law, CoverModel::TwoAtomAtMean)}};
                if (bc_sh_samples > 0) {
                    row["siegel_holst_chain"] = lawwithcover_eval(
                        r, law, CoverModel::SiegelHolstMC, 1e-12, bc_sh_samples, bc_o.seed);
                }
                if (!rows.empty()) {
                    row["p_hat"] = rows[i].p_hat;
                    const double s3 =
                        3.0 * std::sqrt(rows[i].p_hat * (1 - rows[i].p_hat) / rows[i].trials);
                    if (rows[i].p_hat < tb.lower - s3 || rows[i].p_hat > tb.upper + s3) ok = false;
                }
                out.push_back(std::move(row));
            }
            if (bc_o.format == "json") {
                os << out.dump(2) << "\n";
            } else {
                os << "r,mean_arc,lower,upper,stevens_chain,twoatom_chain,p_hat\n";
                for (const auto& row : out) {
                    os << fmt9(row["r"].get<double>()) << ',' << fmt9(row["mean_arc"].get<double>())
                       << ',' << fmt9(row["lower"].get<double>()) << ','
                       << fmt9(row["upper"].get<double>()) << ','
                       << fmt9(row["stevens_chain"].get<double>()) << ','
                       << fmt9(row["twoatom_chain"].get<double>()) << ','
                       << (row.contains("p_hat") ? fmt9(row["p_hat"].get<double>()) : "") << '\n';
                }
            }
            return (bc_o.assert_mode && !ok) ? 3 : 0;
        }

        if (fc->parsed()) {
            auto fb = finger_lower_bound(fc_r, fc_R, fc_zeta);
            ModelConfig cfg{2, fc_o.intensity, GrainLaw::constant_disc(fc_R), 0.0};
            const long trials = fc_o.trials;
            const int workers = resolve_worker_count(fc_o.threads);
            std::vector<long> dirs(workers, 0), vis(workers, 0);
            parallel_replicates(trials, fc_o.threads, [&](int w, long rep) {
                auto set = sample(cfg, fc_r + 1e-9, mix_seed(fc_o.seed, 0xF1, rep));
                bool any = false;
                for (long k = 0; k < fb.geometry.N_r && !any; ++k) {
                    const double a = k * fb.geometry.theta_r;
                    if (!directional_visibility({{std::cos(a), std::sin(a), 0}, fc_r}, set))
                        any = true;
                }
                if (any) ++dirs[w];
                if (!ShadowProbe2D(set).covered_at(fc_r)) ++vis[w];
            });
            long dh = 0, vh = 0;
            for (int w = 0; w < workers; ++w) {
                dh += dirs[w];
                vh += vis[w];
            }
            const double pd = double(dh) / trials, pv = double(vh) / trials;
            const double slack = 3.0 * (std::sqrt(pd * (1 - pd) / trials) +
                                        std::sqrt(pv * (1 - pv) / trials));
            const bool ok = pd <= pv + slack && pd >= 0.75 * fb.first_term;
            std::ofstream file;
            auto& os = open_out(fc_o, file);
            json j{{"N_r", fb.geometry.N_r},       {"theta_r", fb.geometry.theta_r},
                   {"rho_r", fb.geometry.rho_r},   {"kappa", fb.geometry.kappa},
                   {"first_term", fb.first_term},  {"p_directions", pd},
                   {"p_visibility", pv},           {"pass", ok}};
            os << j.dump(2) << "\n";
            return (fc_o.assert_mode && !ok) ? 3 : 0;
        }

        if (cp->parsed()) {
            std::ofstream file;
            auto& os = open_out(cp_o, file);
            json j;
            if (formula == "stevens") {
                j = {{"formula", "stevens"}, {"a", cp_a}, {"n", cp_n},
                     {"value", stevens_cover_prob(cp_a, cp_n)}};
            } else if (formula == "twoatom") {
                j = {{"formula", "twoatom"}, {"m", cp_m}, {"n", cp_n},
                     {"value", twoatom_uncover_prob(cp_m, cp_n)}};
            } else if (formula == "shepp") {
                auto b = shepp_bound(cp_a, cp_n);
                j = {{"formula", "shepp"}, {"a", cp_a}, {"n", cp_n},
                     {"tight", b.tight}, {"simple", b.simple}};
            } else if (formula == "cap-fraction") {
                j = {{"formula", "cap-fraction"}, {"theta", cp_theta}, {"dim", cp_o.dim},
                     {"value", cap_fraction(cp_theta, cp_o.dim)}};
            } else {  // siegel-holst over the nu_r law of the configured grain
                auto law = parse_grain(cp_o.grain);
                auto est = siegel_holst_cover_prob(nu_r_law(law, cp_a), cp_n, cp_samples,
                                                   cp_o.seed);
                j = {{"formula", "siegel-holst"}, {"view_r", cp_a}, {"n", cp_n},
                     {"value", est.value}, {"std_error", est.std_error}};
            }
            os << j.dump(2) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

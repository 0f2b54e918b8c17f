#include "boolvis/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "boolvis/quadrature.hpp"

namespace boolvis {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

double directional_tail(double r, const ModelConfig& config) {
    config.validate();
    if (r < 0.0) fail("directional_tail: require r >= 0");
    double rate;
    if (config.grain_law.is_disc()) {
        rate = unit_ball_volume(config.dimension - 1) *
               config.grain_law.moment(config.dimension - 1);
    } else {
        // Rotation-invariant planar grains: the swept mass per unit length is
        // the mean width.
        rate = config.grain_law.mean_width();
    }
    return std::exp(-config.intensity * r * rate);
}

ArcLengthLaw nu_r_law(const GrainLaw& law, double r) {
    if (!law.is_disc()) fail("nu_r_law: disc laws only");
    std::vector<std::pair<double, double>> rw;
    for (const auto& a : law.atoms()) {
        rw.emplace_back(a.radius, a.prob * (2.0 * a.radius * r + r * r));
    }
    return ArcLengthLaw::nu_r(std::move(rw), r);
}

double mean_shadow(double r, const GrainLaw& law) {
    if (!law.is_disc()) fail("mean_shadow: disc laws only");
    if (!(r > 0.0)) fail("mean_shadow: require r > 0");
    double wsum = 0.0, acc = 0.0;
    for (const auto& a : law.atoms()) {
        const double w = a.prob * (2.0 * a.radius * r + r * r);
        acc += w * mean_shadow_constant(a.radius, r);
        wsum += w;
    }
    return acc / wsum;
}

namespace {

// E[l] over U in (U_lo, 1] for one radius, with the tangency end smoothed by
// the substitution 1 - U = (1 - U_lo) t^2 (the map has square-root behaviour
// there); the interior piece below the branch point is already smooth when
// U_lo > 0.
double mean_shadow_constant_shell(double R, double r, double inner) {
    if (inner <= 0.0) return mean_shadow_constant(R, r);
    const double denom = 2.0 * R * r + r * r;
    const double u_lo = ((inner + R) * (inner + R) - R * R) / denom;
    if (u_lo >= 1.0) return 0.0;
    const double bp = std::max(shadow_branch_u(R, r), u_lo);
    const auto& gl = gauss_legendre_128();
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double t = 0.5 * (gl.nodes[i] + 1.0);
        const double w = 0.5 * gl.weights[i];
        if (bp > u_lo) {
            acc += w * (bp - u_lo) * shadow_length_map(R, r, u_lo + (bp - u_lo) * t);
        }
        acc += w * shadow_length_map(R, r, 1.0 - (1.0 - bp) * t * t) * 2.0 * (1.0 - bp) * t;
    }
    return acc / (1.0 - u_lo);
}

}  // namespace

double mean_shadow_shell(double r, const GrainLaw& law, double inner) {
    if (!law.is_disc()) fail("mean_shadow_shell: disc laws only");
    if (!(r > inner)) fail("mean_shadow_shell: require r > inner");
    if (inner < 0.0) fail("mean_shadow_shell: require inner >= 0");
    double wsum = 0.0, acc = 0.0;
    for (const auto& a : law.atoms()) {
        const double w =
            a.prob * ((r + a.radius) * (r + a.radius) - (inner + a.radius) * (inner + a.radius));
        acc += w * mean_shadow_constant_shell(a.radius, r, inner);
        wsum += w;
    }
    return acc / wsum;
}

double coverage_gumbel_transform(double V, const GrainLaw& law, double clearing) {
    if (!law.is_disc()) fail("coverage_gumbel_transform: disc laws only");
    if (!(V > clearing)) fail("coverage_gumbel_transform: require V > clearing");
    double mass = 0.0;
    for (const auto& a : law.atoms()) {
        mass += a.prob * ((V + a.radius) * (V + a.radius) -
                          (clearing + a.radius) * (clearing + a.radius));
    }
    const double lambda_mass = kPi * mass;
    const double m = mean_shadow_shell(V, law, clearing);
    return lambda_mass * m - std::log(lambda_mass);
}

TailBounds tail_bounds(double r, const GrainLaw& law) {
    if (!law.is_disc()) fail("tail_bounds: disc laws only");
    TailBounds out;
    out.mean_arc = mean_shadow(r, law);
    out.poisson_mean = kPi * (2.0 * r * law.mean_radius() + r * r);
    const double g = out.poisson_mean, m = out.mean_arc;
    out.lower = 2.0 * g * m * std::exp(-g * m) + std::exp(-2.0 * g * m);
    out.upper_applicable = m <= 0.25;
    out.upper = out.upper_applicable
                    ? 2.0 * (g + 2.0) * std::exp(-g * m)
                    : std::numeric_limits<double>::infinity();
    if (out.upper_applicable && out.upper < out.lower) out.upper = out.lower;
    return out;
}

double lawwithcover_eval(double r, const GrainLaw& law, CoverModel model,
                         double trunc_eps, long mc_samples, std::uint64_t seed) {
    if (!law.is_disc()) fail("lawwithcover_eval: disc laws only");
    if (r < 0.0) fail("lawwithcover_eval: require r >= 0");
    if (r == 0.0) return 1.0;  // g = 0: empty shadow set never covers
    const double g = kPi * (2.0 * r * law.mean_radius() + r * r);

    // Truncation index from the Poisson tail: accumulate pmf mass until the
    // remainder is below trunc_eps (1 - P(., n) <= 1 keeps the series error
    // below the same bound).
    long n_max = static_cast<long>(std::ceil(g + 10.0 * std::sqrt(g) + 20.0));
    std::vector<double> log_pmf(n_max + 1);
    for (long n = 0; n <= n_max; ++n) {
        log_pmf[n] = -g + n * std::log(g) - std::lgamma(static_cast<double>(n) + 1.0);
    }
    double cum = 0.0;
    long n_cut = n_max;
    for (long n = 0; n <= n_max; ++n) {
        cum += std::exp(log_pmf[n]);
        if (1.0 - cum < trunc_eps) {
            n_cut = n;
            break;
        }
    }

    const double m = mean_shadow(r, law);
    std::vector<double> uncover(n_cut + 1, 1.0);  // 1 - P(., n); n = 0 never covers
    switch (model) {
        case CoverModel::StevensAtMean:
            for (long n = 1; n <= n_cut; ++n) uncover[n] = 1.0 - stevens_cover_prob(m, n);
            break;
        case CoverModel::TwoAtomAtMean:
            for (long n = 1; n <= n_cut; ++n) uncover[n] = twoatom_uncover_prob(m, n);
            break;
        case CoverModel::SiegelHolstMC: {
            auto est = siegel_holst_cover_prob_upto(nu_r_law(law, r), n_cut, mc_samples, seed);
            for (long n = 1; n <= n_cut; ++n) uncover[n] = 1.0 - est[n].value;
            break;
        }
    }
    double acc = 0.0;
    for (long n = 0; n <= n_cut; ++n) acc += std::exp(log_pmf[n]) * uncover[n];
    return std::clamp(acc, 0.0, 1.0);
}

GumbelConstants gumbel_constants(int d, const GrainLaw& law) {
    if (d < 2) fail("gumbel_constants: require d >= 2");
    GumbelConstants out;
    out.d = d;
    const double dd = d;
    // K_d = log( d^{2(d-1)} (d-1)^{3(d-1)-1} Gamma((d-1)/2)^{2d-2}
    //            / ((d-1)! pi^{((d-1)^2+1)/2} 2^{2d-3} Gamma(d/2)^{d-2}) )
    out.K_d = 2.0 * (dd - 1.0) * std::log(dd) +
              (3.0 * (dd - 1.0) - 1.0) * std::log(dd - 1.0) +
              (2.0 * dd - 2.0) * std::lgamma(0.5 * (dd - 1.0)) -
              std::lgamma(dd) -  // log (d-1)!
              0.5 * ((dd - 1.0) * (dd - 1.0) + 1.0) * std::log(kPi) -
              (2.0 * dd - 3.0) * std::log(2.0) -
              (dd - 2.0) * std::lgamma(0.5 * dd);
    // K'_d = log( (1/(d-1)!) (sqrt(pi) Gamma((d+1)/2)/Gamma(d/2))^{d-2}
    //             E[R^{d-2}]^{d-1} / E[R^{d-1}]^{d-2} )
    //        + (d-1) log(d-1) - log( omega_{d-1} E[R^{d-1}] / (d omega_d) )
    const double m1 = law.moment(d - 1);
    const double m2 = law.moment(d - 2);
    out.K_prime_d = -std::lgamma(dd) +
                    (dd - 2.0) * (0.5 * std::log(kPi) + std::lgamma(0.5 * (dd + 1.0)) -
                                  std::lgamma(0.5 * dd)) +
                    (dd - 1.0) * std::log(m2) - (dd - 2.0) * std::log(m1) +
                    (dd - 1.0) * std::log(dd - 1.0) -
                    std::log(unit_ball_volume(d - 1) * m1 / (dd * unit_ball_volume(d)));
    return out;
}

double xi_transform(double V, double R, int d) {
    if (d < 2) fail("xi_transform: require d >= 2");
    if (!(R > 0.0 && R < 1.0)) fail("xi_transform: require 0 < R < 1 (needs -log R > 0)");
    if (V < 0.0) fail("xi_transform: require V >= 0");
    const double dd = d;
    const GumbelConstants kc = gumbel_constants(d, GrainLaw::constant_disc(R));
    return unit_ball_volume(d - 1) * std::pow(R, dd - 1.0) * V +
           dd * (dd - 1.0) * std::log(R) -
           2.0 * (dd - 1.0) * std::log(-std::log(R)) - kc.K_d;
}

double psi_transform(double V, double r, const GrainLaw& law, int d) {
    if (d < 2) fail("psi_transform: require d >= 2");
    if (!(r > std::exp(1.0))) fail("psi_transform: require r > e (log log r must be defined)");
    if (V < r) fail("psi_transform: require V >= r");
    const double dd = d;
    const GumbelConstants kc = gumbel_constants(d, law);
    return unit_ball_volume(d - 1) * law.moment(d - 1) * (V - r) -
           (dd - 1.0) * std::log(r) - (dd - 1.0) * std::log(std::log(r)) -
           kc.K_prime_d;
}

double gumbel_cdf(double u) { return std::exp(-std::exp(-u)); }

FingerBound finger_lower_bound(double r, double R, double zeta) {
    if (!(R > 0.0)) fail("finger_lower_bound: require R > 0");
    if (!(zeta > 0.0 && zeta < 2.0 / R)) {
        fail("finger_lower_bound: require zeta in (0, 2/R), open interval");
    }
    if (!(r > R)) fail("finger_lower_bound: require r > R");
    FingerBound out;
    out.geometry.zeta = zeta;
    out.geometry.N_r = static_cast<long>(std::floor(zeta * r));
    if (out.geometry.N_r < 1) fail("finger_lower_bound: zeta * r must be >= 1");
    out.geometry.theta_r = kTwoPi / (zeta * r);
    out.geometry.rho_r = R / std::sin(0.5 * out.geometry.theta_r);
    if (!(out.geometry.rho_r < r)) {
        fail("finger_lower_bound: r too small (finger overlap radius rho_r must stay below r)");
    }
    out.geometry.kappa = R * zeta / kPi;
    out.geometry.area_G = 2.0 * R * r;
    out.first_term = static_cast<double>(out.geometry.N_r) * std::exp(-2.0 * R * r);
    return out;
}

}  // namespace boolvis

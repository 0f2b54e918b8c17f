#pragma once

#include <cstdint>

#include "boolvis/coverage.hpp"
#include "boolvis/model.hpp"
#include "boolvis/shadow_law.hpp"

namespace boolvis {

// P(V(u) > r): the swept-region mass of a single ray.  The exponent uses the
// (d-1)-volume of the grain projection, omega_{d-1} E[R^{d-1}] for balls
// (2 E[R] in dimension 2) and the mean width E[W(K)] for rotation-invariant
// planar grains; the two coincide in dimension 2.
double directional_tail(double r, const ModelConfig& config);

// Shadow-arc length law of the relevant obstacles at view radius r, with
// radii size-biased by their per-radius relevant-annulus mass.
ArcLengthLaw nu_r_law(const GrainLaw& law, double r);

// m_r = E[nu_r]: Gauss-Legendre over the pushforward map, mixed over radii.
double mean_shadow(double r, const GrainLaw& law);

// Mean normalised shadow length at view radius r of obstacles whose entry
// distance lies in (inner, r] (the relevant shell under a clearing of radius
// inner); inner = 0 recovers mean_shadow.
double mean_shadow_shell(double r, const GrainLaw& law, double inner);

// Exact finite-scale Gumbel normalisation from the Poisson gap count on the
// circle: with Lambda the relevant-obstacle mass at view radius V and m the
// mean normalised shadow length, the expected number of uncovered gaps is
// Lambda e^{-Lambda m}, so
//   u = Lambda m - log(Lambda)
// satisfies P(total visibility < V) ~ exp(-e^{-u}) with no adjustable
// constant.  Dimension 2, unit intensity.  This is the reference the
// linearised xi/psi transforms are compared against.
double coverage_gumbel_transform(double V, const GrainLaw& law, double clearing = 0.0);

// Two-sided bounds on P(total visibility >= r) at unit intensity in
// dimension 2:
//   lower = 2 g m_r exp(-g m_r) + exp(-2 g m_r)        (two-atom chain)
//   upper = 2 (g + 2) exp(-g m_r)                      (Shepp chain)
// with g = pi (2 r E[R] + r^2).  The upper bound requires m_r <= 1/4; below
// that threshold it is reported as not applicable.
struct TailBounds {
    double lower = 0.0;
    double upper = 1.0;
    double mean_arc = 0.0;  // m_r
    double poisson_mean = 0.0;  // g
    bool upper_applicable = true;
};
TailBounds tail_bounds(double r, const GrainLaw& law);

// Poisson mixture over the covering probability,
//   P(V >= r) = sum_n e^{-g} g^n / n! (1 - P(law, n)),
// truncated once the remaining Poisson tail is below trunc_eps.  The cover
// model selects P: Stevens at the mean arc length (upper-bound chain),
// the two-atom law at the mean (lower-bound chain), or the Siegel-Holst
// Monte-Carlo evaluation of the true nu_r law.
enum class CoverModel { StevensAtMean, TwoAtomAtMean, SiegelHolstMC };
double lawwithcover_eval(double r, const GrainLaw& law, CoverModel model,
                         double trunc_eps = 1e-12, long mc_samples = 100000,
                         std::uint64_t seed = 0x10071995ull);

// Constants of the two extreme-value normalisations; log-gamma evaluation,
// finite for d >= 2 and bounded radius laws.
struct GumbelConstants {
    int d = 2;
    double K_d = 0.0;
    double K_prime_d = 0.0;
};
GumbelConstants gumbel_constants(int d, const GrainLaw& law);

// Small-obstacle normalisation (constant radius R < 1):
//   xi = omega_{d-1} R^{d-1} V + d(d-1) log R - 2(d-1) log(-log R) - K_d.
double xi_transform(double V, double R, int d);

// Large-clearing normalisation (conditioned on an empty ball of radius r):
//   psi = omega_{d-1} E[R^{d-1}] (V - r) - (d-1) log r - (d-1) log log r - K'_d.
double psi_transform(double V, double r, const GrainLaw& law, int d);

// Standard Gumbel distribution function exp(-e^{-u}).
double gumbel_cdf(double u);

// Discretised-direction lower-bound construction: N_r = floor(zeta r)
// equally spaced target points at distance r, each visible when its
// stadium-shaped finger holds no grain center.  area(finger) = 2 R r
// exactly (stadium minus the conditioning disc), so the first Bonferroni
// term is N_r exp(-2 R r).
struct FingerGeometry {
    double zeta = 0.0;
    long N_r = 0;
    double theta_r = 0.0;  // angular spacing 2 pi / (zeta r)
    double rho_r = 0.0;    // max norm of a point shared by two fingers
    double kappa = 0.0;    // R zeta / pi
    double area_G = 0.0;   // 2 R r
};
struct FingerBound {
    double first_term = 0.0;
    FingerGeometry geometry;
};
FingerBound finger_lower_bound(double r, double R, double zeta);

}  // namespace boolvis

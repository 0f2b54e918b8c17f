#include <doctest.h>

#include <cmath>

#include "boolvis/asymptotics.hpp"
#include "boolvis/experiments.hpp"
#include "boolvis/quadrature.hpp"
#include "boolvis/shadow_law.hpp"
#include "oracles.hpp"

using namespace boolvis;

TEST_CASE("directional tail closed forms") {
    ModelConfig cfg{2, 1.0, GrainLaw::constant_disc(0.2), 0.0};
    CHECK(directional_tail(5.0, cfg) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(directional_tail(0.0, cfg) == doctest::Approx(1.0));
    ModelConfig d3{3, 1.0, GrainLaw::constant_disc(1.0), 0.0};
    CHECK(directional_tail(1.0, d3) == doctest::Approx(std::exp(-kPi)).epsilon(1e-12));
    // Rotation-invariant planar grains decay with the mean width.
    std::vector<Vec2> sq{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
    ModelConfig pc{2, 1.0, GrainLaw::rotated_polygon(ConvexPolygon(sq)), 0.0};
    CHECK(directional_tail(2.0, pc) == doctest::Approx(std::exp(-8.0 / kPi)).epsilon(1e-12));
}

TEST_CASE("directional tail is a lower bound for the total-visibility tail") {
    ModelConfig cfg{2, 1.0, GrainLaw::constant_disc(0.5), 0.0};
    std::vector<double> grid{2.0, 3.0};
    auto rows = estimate_tail(cfg, grid, 20000, 90210, 0);
    for (const auto& row : rows) {
        const double sigma = std::sqrt(row.p_hat * (1 - row.p_hat) / row.trials);
        CHECK(directional_tail(row.r, cfg) <= row.p_hat + 3.0 * sigma);
    }
}

TEST_CASE("mean shadow asymptotics") {
    auto law = GrainLaw::constant_disc(1.0);
    // r * m_r -> 2 E[R]/pi from below; the deficit decays like ~1.25/r, so
    // the gap is ~0.0125 at r = 100 and within 0.005 by r = 400.
    CHECK(std::fabs(100.0 * mean_shadow(100.0, law) - 2.0 / kPi) < 0.02);
    CHECK(std::fabs(400.0 * mean_shadow(400.0, law) - 2.0 / kPi) < 0.005);
    double prev = 0.0;
    for (double r : {400.0, 200.0, 100.0, 50.0}) {
        const double gap = 2.0 / kPi - r * mean_shadow(r, law);
        CHECK(gap > prev);  // monotone approach from below
        prev = gap;
    }
    // Mixture law: weights proportional to the per-radius annulus mass.
    auto mix = GrainLaw::discrete_disc({{0.5, 0.5}, {1.5, 0.5}});
    const double r = 7.0;
    const double w1 = 0.5 * (2 * 0.5 * r + r * r), w2 = 0.5 * (2 * 1.5 * r + r * r);
    const double expect = (w1 * mean_shadow_constant(0.5, r) + w2 * mean_shadow_constant(1.5, r)) /
                          (w1 + w2);
    CHECK(mean_shadow(r, mix) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(mean_shadow_shell(r, law, 0.0) == doctest::Approx(mean_shadow(r, law)).epsilon(1e-10));
}

TEST_CASE("mean shadow over a shell") {
    // Numerical cross-check against direct quadrature on rho^2.
    const double R = 1.0, V = 1006.0, inner = 1000.0;
    auto law = GrainLaw::constant_disc(R);
    const double lo = inner + R, hi = V + R;
    const double direct = gauss_legendre_integrate(
        [&](double s) { return shadow_half_angle_kernel(std::sqrt(s), R, V) / kPi; },
        lo * lo, hi * hi, 512) / (hi * hi - lo * lo);
    CHECK(mean_shadow_shell(V, law, inner) == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("tail bounds") {
    auto law = GrainLaw::constant_disc(1.0);
    auto tb5 = tail_bounds(5.0, law);
    CHECK(tb5.lower <= tb5.upper);
    CHECK(tb5.upper_applicable);

    // Both log-bounds approach -2 E[R] per unit r.
    auto law_half = GrainLaw::constant_disc(0.5);
    auto tb = tail_bounds(200.0, law_half);
    CHECK(std::fabs(std::log(tb.upper) / 200.0 - (-1.0)) < 0.1);
    CHECK(std::fabs(std::log(tb.lower) / 200.0 - (-1.0)) < 0.1);

    // m_r > 1/4 near the origin: the Shepp chain does not apply there.
    auto small_r = tail_bounds(0.2, law);
    CHECK(!small_r.upper_applicable);
    CHECK(std::isinf(small_r.upper));
}

TEST_CASE("lawwithcover") {
    auto law = GrainLaw::constant_disc(1.0);
    CHECK(lawwithcover_eval(0.0, law, CoverModel::StevensAtMean) == doctest::Approx(1.0));
    auto tb = tail_bounds(5.0, law);
    CHECK(lawwithcover_eval(5.0, law, CoverModel::TwoAtomAtMean) ==
          doctest::Approx(tb.lower).epsilon(1e-9));
    const double up_chain = lawwithcover_eval(5.0, law, CoverModel::StevensAtMean);
    CHECK(up_chain <= tb.upper + 1e-12);
    CHECK(tb.lower <= up_chain + 1e-12);

    // The Siegel-Holst route sits inside the convex-order sandwich.
    auto law_half = GrainLaw::constant_disc(0.5);
    auto tb3 = tail_bounds(3.0, law_half);
    const double sh = lawwithcover_eval(3.0, law_half, CoverModel::SiegelHolstMC, 1e-12, 20000, 5);
    CHECK(sh >= tb3.lower - 0.02);
    CHECK(sh <= tb3.upper + 0.02);
}

TEST_CASE("lawwithcover SiegelHolstMC matches full simulation") {
    ModelConfig cfg{2, 1.0, GrainLaw::constant_disc(0.5), 0.0};
    std::vector<double> grid{3.0};
    auto rows = estimate_tail(cfg, grid, 50000, 31415, 0);
    const double sh = lawwithcover_eval(3.0, cfg.grain_law, CoverModel::SiegelHolstMC, 1e-12, 50000, 7);
    const double sigma = std::sqrt(rows[0].p_hat * (1 - rows[0].p_hat) / rows[0].trials);
    // MC error on the SH side is a few 1e-3 here; allow both contributions.
    CHECK(std::fabs(sh - rows[0].p_hat) < 3.0 * sigma + 0.015);
}

TEST_CASE("gumbel constants") {
    auto law1 = GrainLaw::constant_disc(1.0);
    CHECK(gumbel_constants(2, law1).K_d == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(gumbel_constants(3, law1).K_d ==
          doctest::Approx(std::log(2592.0 / (8.0 * kPi * kPi * kPi))).epsilon(1e-12));
    CHECK(gumbel_constants(2, law1).K_prime_d == doctest::Approx(std::log(kPi)).epsilon(1e-12));
    auto law2 = GrainLaw::constant_disc(0.5);
    CHECK(gumbel_constants(2, law2).K_prime_d ==
          doctest::Approx(std::log(kPi / 0.5)).epsilon(1e-12));
    // Finite for higher dimensions (log-gamma evaluation).
    for (int d = 2; d <= 10; ++d) {
        auto kc = gumbel_constants(d, law1);
        CHECK(std::isfinite(kc.K_d));
        CHECK(std::isfinite(kc.K_prime_d));
    }
}

TEST_CASE("extreme value transforms") {
    // Direct arithmetic oracle for the d = 2 example.
    const double expect = 2.0 * 0.05 * 60.0 + 2.0 * std::log(0.05) -
                          2.0 * std::log(-std::log(0.05)) - std::log(2.0);
    CHECK(xi_transform(60.0, 0.05, 2) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(-2.878989).epsilon(1e-5));

    CHECK(gumbel_cdf(0.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

    auto law = GrainLaw::constant_disc(1.0);
    const double at_r = psi_transform(1000.0, 1000.0, law, 2);
    CHECK(at_r == doctest::Approx(-std::log(1000.0) - std::log(std::log(1000.0)) -
                                  std::log(kPi)).epsilon(1e-12));

    // Strictly increasing in V; gumbel_cdf is a CDF.
    double prev = -1e300;
    for (double v = 0.0; v < 100.0; v += 7.0) {
        const double x = xi_transform(v, 0.1, 2);
        CHECK(x > prev);
        prev = x;
    }
    prev = -1e300;
    for (double v = 1000.0; v < 1100.0; v += 9.0) {
        const double x = psi_transform(v, 1000.0, law, 2);
        CHECK(x > prev);
        prev = x;
    }
    prev = 0.0;
    for (double u = -5.0; u <= 8.0; u += 0.25) {
        const double c = gumbel_cdf(u);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(gumbel_cdf(-40.0) == doctest::Approx(0.0));
    CHECK(gumbel_cdf(40.0) == doctest::Approx(1.0));

    CHECK_THROWS_AS(xi_transform(1.0, 1.5, 2), std::invalid_argument);
    CHECK_THROWS_AS(psi_transform(3.0, 2.0, law, 2), std::invalid_argument);   // r <= e
    CHECK_THROWS_AS(psi_transform(90.0, 100.0, law, 2), std::invalid_argument); // V < r
}

TEST_CASE("finger construction") {
    auto fb = finger_lower_bound(10.0, 1.0, 0.5);
    CHECK(fb.geometry.N_r == 5);
    CHECK(fb.first_term == doctest::Approx(5.0 * std::exp(-20.0)).epsilon(1e-12));
    CHECK(fb.first_term == doctest::Approx(1.0306e-8).epsilon(1e-4));
    CHECK(fb.geometry.theta_r == doctest::Approx(kTwoPi / 5.0));
    CHECK(fb.geometry.rho_r == doctest::Approx(1.0 / std::sin(kPi / 5.0)).epsilon(1e-12));
    CHECK(fb.geometry.kappa == doctest::Approx(0.5 / kPi).epsilon(1e-12));
    CHECK(finger_lower_bound(9.99, 1.0, 0.5).geometry.N_r == 4);  // floor

    CHECK_THROWS_AS(finger_lower_bound(10.0, 1.0, 2.0), std::invalid_argument);  // zeta = 2/R
    CHECK_THROWS_AS(finger_lower_bound(10.0, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(finger_lower_bound(1.05, 1.0, 1.9), std::invalid_argument);  // rho_r >= r

    // area(finger) = 2 R r: Monte-Carlo point count over the bounding box of
    // the stadium minus the conditioning disc.
    const double R = 1.0, r = 10.0;
    Rng rng(271828);
    const long N = 2000000;
    long hits = 0;
    const double box = (r + 2 * R) * (2 * R) * 2;
    for (long i = 0; i < N; ++i) {
        const double x = rng.uniform(-R, r + 3 * R);
        const double y = rng.uniform(-2 * R, 2 * R);
        const double seg = std::clamp(x, 0.0, r);
        const double d2 = (x - seg) * (x - seg) + y * y;
        if (d2 <= R * R && x * x + y * y > R * R) ++hits;
    }
    const double area_box = (r + 4 * R) * (4 * R);
    const double p = static_cast<double>(hits) / N;
    const double mc = area_box * p;
    const double sd = area_box * std::sqrt(p * (1 - p) / N);
    CHECK(std::fabs(mc - 2.0 * R * r) < 3.0 * sd);
    (void)box;
}

TEST_CASE("exact coverage gumbel normalisation is calibrated") {
    // Zero-Monte-Carlo check: Poisson mixture of the Stevens formula at small
    // arc length a against exp(-e^{-u}) with u = Lambda a - log Lambda.
    const double a = 1e-4;
    for (double u : {-1.0, 0.0, 1.5}) {
        double L = std::log(1.0 / a) / a;
        for (int it = 0; it < 200; ++it) L = (u + std::log(L)) / a;
        const long n_lo = static_cast<long>(L - 10 * std::sqrt(L));
        const long n_hi = static_cast<long>(L + 10 * std::sqrt(L));
        double acc = 0.0;
        for (long n = std::max(0L, n_lo); n <= n_hi; ++n) {
            const double lp = -L + n * std::log(L) - std::lgamma(static_cast<double>(n) + 1.0);
            acc += std::exp(lp) * stevens_cover_prob(a, n);
        }
        CHECK(acc == doctest::Approx(gumbel_cdf(u)).epsilon(2e-4));
    }
}

TEST_CASE("nu_r law mass splits match the map branches") {
    auto law = GrainLaw::constant_disc(1.0);
    for (double r : {0.7, 2.0, 11.0}) {
        auto nur = nu_r_law(law, r);
        const double split = nu_r_branch_point(1.0, r);
        // P(l <= split) equals the probability the far branch fires.
        CHECK(nur.cdf(split) == doctest::Approx(2.0 / (r + 2.0)).epsilon(1e-8));
    }
}

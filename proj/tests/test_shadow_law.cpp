#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "boolvis/quadrature.hpp"
#include "boolvis/rng.hpp"
#include "boolvis/shadow_law.hpp"
#include "boolvis/geom.hpp"

using namespace boolvis;

TEST_CASE("map branch continuity at U = r/(r+2R)") {
    const double R = 1.0, r = 2.0;
    const double bp = shadow_branch_u(R, r);
    CHECK(bp == doctest::Approx(0.5));
    const double at_bp = shadow_length_map(R, r, bp);
    CHECK(at_bp == doctest::Approx(std::asin(1.0 / std::sqrt(5.0)) / kPi).epsilon(1e-12));
    CHECK(std::fabs(shadow_length_map(R, r, bp - 1e-13) -
                    shadow_length_map(R, r, bp + 1e-13)) < 1e-12);
    // The breakpoint value equals the pdf's arctan split point.
    CHECK(at_bp == doctest::Approx(nu_r_branch_point(R, r)).epsilon(1e-12));
}

TEST_CASE("map endpoints and monotonicity") {
    Rng rng(5);
    for (int it = 0; it < 50; ++it) {
        const double R = rng.uniform(0.05, 2.0);
        const double r = rng.uniform(0.1, 30.0);
        CHECK(shadow_length_map(R, r, 0.0) == doctest::Approx(0.5));
        CHECK(shadow_length_map(R, r, 1.0) == doctest::Approx(0.0).epsilon(1e-9));
        double prev = 1.0;
        for (int i = 0; i <= 100; ++i) {
            const double l = shadow_length_map(R, r, i / 100.0);
            CHECK(l <= prev + 1e-12);
            prev = l;
        }
    }
}

TEST_CASE("pdf normalises to 1 and carries the branch masses") {
    for (auto [R, r] : {std::pair{1.0, 2.0}, {0.5, 3.0}, {2.0, 1.0}, {1.0, 40.0}}) {
        const double ustar = nu_r_branch_point(R, r);
        auto pdf = [R = R, r = r](double u) { return nu_r_pdf(u, R, r); };
        const double lo_mass = adaptive_simpson(pdf, 0.0, ustar, 1e-11);
        const double hi_mass = adaptive_simpson(pdf, ustar, 0.5, 1e-11);
        CHECK(lo_mass + hi_mass == doctest::Approx(1.0).epsilon(1e-9));
        // Mass below the split equals the probability the far branch fires.
        CHECK(lo_mass == doctest::Approx(2.0 * R / (r + 2.0 * R)).epsilon(1e-7));
        CHECK(nu_r_pdf(-0.1, R, r) == 0.0);
        CHECK(nu_r_pdf(0.7, R, r) == 0.0);
    }
}

TEST_CASE("cdf is the integral of the pdf and inverts the map") {
    Rng rng(6);
    for (auto [R, r] : {std::pair{1.0, 3.0}, {0.5, 5.0}, {1.5, 0.8}}) {
        // F' = pdf by central differences.
        for (int i = 0; i < 40; ++i) {
            const double u = rng.uniform(0.01, 0.49);
            const double h = 1e-6;
            const double num = (nu_r_cdf(u + h, R, r) - nu_r_cdf(u - h, R, r)) / (2 * h);
            CHECK(num == doctest::Approx(nu_r_pdf(u, R, r)).epsilon(1e-4));
        }
        // F(map(U)) = 1 - U (the map pushes the uniform law to the cdf).
        for (int i = 0; i < 200; ++i) {
            const double U = rng.uniform(0.001, 0.999);
            CHECK(nu_r_cdf(shadow_length_map(R, r, U), R, r) ==
                  doctest::Approx(1.0 - U).epsilon(1e-9));
        }
    }
}

TEST_CASE("KS distance between mapped uniforms and the cdf") {
    const double R = 0.7, r = 4.0;
    const long N = 1000000;
    std::vector<double> xs(N);
    Rng rng(7);
    for (long i = 0; i < N; ++i) xs[i] = shadow_length_map(R, r, rng.uniform());
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    for (long i = 0; i < N; ++i) {
        const double F = nu_r_cdf(xs[i], R, r);
        ks = std::max(ks, std::fabs((i + 1.0) / N - F));
        ks = std::max(ks, std::fabs(static_cast<double>(i) / N - F));
    }
    CHECK(ks < 0.002);
}

TEST_CASE("mean shadow quadrature agrees with Monte Carlo") {
    const double R = 1.0, r = 1.0;
    const long N = 2000000;
    Rng rng(8);
    double acc = 0.0, acc2 = 0.0;
    for (long i = 0; i < N; ++i) {
        const double l = shadow_length_map(R, r, rng.uniform());
        acc += l;
        acc2 += l * l;
    }
    const double mc = acc / N;
    const double sd = std::sqrt((acc2 / N - mc * mc) / N);
    CHECK(std::fabs(mean_shadow_constant(R, r) - mc) < 3.0 * sd);
}

TEST_CASE("mean shadow range and monotonicity in r") {
    double prev = 1.0;
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
        const double m = mean_shadow_constant(1.0, r);
        CHECK(m > 0.0);
        CHECK(m <= 0.5);
        CHECK(m < prev);
        prev = m;
    }
}

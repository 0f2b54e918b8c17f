#include "boolvis/shadow_law.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "boolvis/geom.hpp"
#include "boolvis/quadrature.hpp"

namespace boolvis {

double shadow_branch_u(double R, double r) { return r / (r + 2.0 * R); }

double nu_r_branch_point(double R, double r) { return std::atan(R / r) / kPi; }

double shadow_length_map(double R, double r, double U) {
    if (!(R > 0.0) || !(r > 0.0)) throw std::invalid_argument("shadow_length_map: require R > 0 and r > 0");
    if (U < 0.0 || U > 1.0) throw std::invalid_argument("shadow_length_map: require U in [0,1]");
    const double q = r / R;
    const double c = q * (q + 2.0);
    if (U <= shadow_branch_u(R, r)) {
        return 0.5 - std::atan(std::sqrt(c * U)) / kPi;
    }
    double a = (q + (2.0 + q) * U) / (2.0 * std::sqrt(1.0 + c * U));
    if (a > 1.0) a = 1.0;
    return std::acos(a) / kPi;
}

double nu_r_pdf(double u, double R, double r) {
    if (u <= 0.0 || u >= 0.5) return 0.0;
    const double norm = r * R + 0.5 * r * r;  // (1/pi) x annulus measure / pi
    const double ustar = nu_r_branch_point(R, r);
    if (u <= ustar) {
        const double s = std::sin(kPi * u);
        const double root = std::sqrt(std::max(0.0, R * R - r * r * s * s));
        const double term =
            r * std::sin(kTwoPi * u) + s * (R * R + r * r * std::cos(kTwoPi * u)) / root;
        return kPi * r / norm * term;
    }
    const double s = std::sin(kPi * u);
    return kPi * R * R / norm * std::cos(kPi * u) / (s * s * s);
}

double nu_r_cdf(double u, double R, double r) {
    if (u <= 0.0) return 0.0;
    if (u >= 0.5) return 1.0;
    const double s = std::sin(kPi * u);
    double rho;
    if (u <= nu_r_branch_point(R, r)) {
        rho = r * std::cos(kPi * u) + std::sqrt(std::max(0.0, R * R - r * r * s * s));
    } else {
        rho = R / s;
    }
    const double denom = 2.0 * R * r + r * r;
    double f = ((R + r) * (R + r) - rho * rho) / denom;
    if (f < 0.0) f = 0.0;
    if (f > 1.0) f = 1.0;
    return f;
}

double mean_shadow_constant(double R, double r) {
    // The map has square-root behaviour at U = 0 (l -> 1/2) and U = 1
    // (tangency, l -> 0); substitute U = bp*s^2 resp. 1-U = (1-bp)*t^2 so the
    // Gauss-Legendre integrands are smooth.
    const double bp = shadow_branch_u(R, r);
    const auto& gl = gauss_legendre_128();
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double s = 0.5 * (gl.nodes[i] + 1.0);  // map [-1,1] -> [0,1]
        const double w = 0.5 * gl.weights[i];
        acc += w * shadow_length_map(R, r, bp * s * s) * 2.0 * bp * s;
        acc += w * shadow_length_map(R, r, 1.0 - (1.0 - bp) * s * s) * 2.0 * (1.0 - bp) * s;
    }
    return acc;
}

}  // namespace boolvis

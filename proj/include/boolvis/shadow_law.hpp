#pragma once

#include <cstdint>

namespace boolvis {

// Law of the normalised arc length shadowed on the view circle of radius r
// by a relevant disc obstacle of radius R (center with squared distance
// uniform on (R^2, (R+r)^2), i.e. uniform on the relevant annulus).
//
// With q = r/R and c = q(q+2), the normalised length is the image of a
// uniform variate U in [0,1]:
//   U <= q/(q+2):  l = 1/2 - atan(sqrt(c U))/pi            (tangent regime)
//   U >= q/(q+2):  l = acos((q+(2+q)U)/(2 sqrt(1+cU)))/pi  (far regime)
// The branches agree at the breakpoint, where l = atan(R/r)/pi.

// Branch point in U space, r/(r+2R).
double shadow_branch_u(double R, double r);

// Breakpoint of the density in l space, atan(R/r)/pi.
double nu_r_branch_point(double R, double r);

// Pushforward map U -> normalised length, decreasing in U.
double shadow_length_map(double R, double r, double U);

// Density of the normalised length on [0, 1/2]; 0 outside.
double nu_r_pdf(double u, double R, double r);

// Distribution function P(l <= u); exact closed form.
double nu_r_cdf(double u, double R, double r);

// E[l] for a constant radius, by Gauss-Legendre quadrature after smoothing
// substitutions on both branches (relative accuracy ~1e-12).
double mean_shadow_constant(double R, double r);

}  // namespace boolvis

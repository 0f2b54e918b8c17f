#pragma once

#include <functional>
#include <vector>

namespace boolvis {

struct GaussLegendreRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Rules are computed once (Newton iteration on the Legendre recurrence)
// and cached.
const GaussLegendreRule& gauss_legendre(int n);
const GaussLegendreRule& gauss_legendre_128();

double gauss_legendre_integrate(const std::function<double(double)>& f, double a,
                                double b, int n = 128);

// Adaptive Simpson with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

}  // namespace boolvis

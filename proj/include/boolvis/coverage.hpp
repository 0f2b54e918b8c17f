#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "boolvis/geom.hpp"

namespace boolvis {

// Outcome of a coverage test.  Uncovered always carries a witness direction
// that is verifiably outside every arc/cap; Unknown can only come from the
// sphere test at finite resolution.
struct CoverageVerdict {
    enum class Status { Covered, Uncovered, Unknown };

    Status status = Status::Unknown;
    // Total uncovered measure: exact radians for the circle test, a certified
    // lower bound in steradians for the sphere test.
    double uncovered_measure = 0.0;
    double witness_angle = 0.0;  // circle witness
    Vec3 witness_dir{};          // sphere witness
    double resolution = 0.0;     // set when status == Unknown

    bool covered() const { return status == Status::Covered; }
    bool uncovered() const { return status == Status::Uncovered; }
    bool unknown() const { return status == Status::Unknown; }
};

// Exact sweep over sorted arc endpoints.  Covered iff the closed union is the
// full circle; otherwise reports the total uncovered measure and a witness at
// the midpoint of the largest gap.  Never returns Unknown.  Gaps narrower
// than 1e-12 rad are treated as closed contact so that analytically-touching
// arcs register as covering.
CoverageVerdict circle_union(std::span<const ArcInterval> arcs);

// Certified two-sided sphere test by adaptive icosahedral subdivision.
// A triangle is accepted as covered when some cap contains its circumball;
// a triangle meeting no cap yields an uncovered witness.  Triangles are
// split until their circumradius falls below `resolution`; leaves that stay
// ambiguous make the verdict Unknown(resolution), which callers resolve by
// refining.
CoverageVerdict sphere_coverage(std::span<const Cap> caps, double resolution);

// --- covering probability formulas -----------------------------------------

// Probability that n i.i.d. uniform closed arcs of fixed normalised length a
// cover the circle of perimeter 1:
//   sum_k (-1)^k C(n,k) (1-ka)_+^{n-1},  with (x)_+^0 := 1 for x > 0.
// Alternating sum accumulated in extended precision; clamped to [0,1].
double stevens_cover_prob(double a, long n);

// Uncovering probability for the two-atom length law (1-2m) d_0 + 2m d_{1/2}:
//   2 n m (1-m)^{n-1} + (1-2m)^n.
double twoatom_uncover_prob(double m, long n);

// Upper bounds on the uncovering probability 1 - P(d_a, n), valid for
// a in [0, 1/4]:
//   tight  = 2(1-a)^{2n} / (I + (1/4-a)(1-2a)^n),
//            I = ((1-a)^{n+1} - (1-2a)^{n+1}) / (n+1)
//   simple = 2(n+1)(1-a)^{n-1}
// Either bound may exceed 1 (they are bounds, not probabilities).
struct SheppBounds {
    double tight = 0.0;
    double simple = 0.0;
};
SheppBounds shepp_bound(double a, long n);

// Fractional surface area of a spherical cap of angular radius theta on the
// unit sphere of R^d; closed forms for d = 2, 3, adaptive quadrature with
// absolute tolerance 1e-12 otherwise.
double cap_fraction(double theta, int d);

// Lebesgue measure of the unit ball in R^d.
double unit_ball_volume(int d);

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// --- arc length laws --------------------------------------------------------

// Law of the normalised arc length on [0, 1]; provides the distribution
// function F and its running integral G(u) = int_0^u F, the two ingredients
// of the Siegel-Holst evaluation.
class ArcLengthLaw {
public:
    static ArcLengthLaw deterministic(double a);
    static ArcLengthLaw two_atom(double m);
    // Piecewise-linear CDF through (x_i, F_i); must be monotone with F in [0,1].
    static ArcLengthLaw empirical(std::vector<double> x, std::vector<double> F);
    // Shadow law of disc obstacles at view radius r; radius_weights are
    // (radius, weight) pairs with weights proportional to the per-radius
    // relevant-annulus measure (normalised internally).
    static ArcLengthLaw nu_r(std::vector<std::pair<double, double>> radius_weights,
                             double r);

    double cdf(double u) const;
    double cdf_integral(double u) const;
    double mean() const;
    bool is_deterministic() const { return kind_ == Kind::Deterministic; }

private:
    enum class Kind { Deterministic, TwoAtom, Empirical, NuR };
    static constexpr int kIntegralCells = 16384;
    Kind kind_ = Kind::Deterministic;
    double param_ = 0.0;            // a or m
    std::vector<double> xs_, Fs_;   // empirical grid
    std::vector<double> Gs_;        // prefix integrals of F on a uniform [0,1] grid
    std::vector<std::pair<double, double>> radius_weights_;
    double view_r_ = 0.0;
    void build_integral_table();
    double raw_cdf(double u) const;
};

// Monte-Carlo evaluation of the Siegel-Holst covering probability for n
// i.i.d. isotropic arcs with the given length law; the k-th term integrates
// over the uniform simplex measure via normalised exponential spacings.
// Deterministic given the seed.  Deterministic laws with n > 100 are
// rejected (use stevens_cover_prob instead; the alternating sum is
// numerically hostile there).
McEstimate siegel_holst_cover_prob(const ArcLengthLaw& law, long n, long mc_samples,
                                   std::uint64_t seed);

// Batched variant: P(law, n) for every n in [0, n_max], sharing the per-k
// simplex sample pools across n.  Element n of the result is the estimate
// for n arcs.
std::vector<McEstimate> siegel_holst_cover_prob_upto(const ArcLengthLaw& law,
                                                     long n_max, long mc_samples,
                                                     std::uint64_t seed);

}  // namespace boolvis

#include "boolvis/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "boolvis/quadrature.hpp"
#include "boolvis/rng.hpp"
#include "boolvis/shadow_law.hpp"

namespace boolvis {

namespace {

constexpr double kGapEps = 1e-12;  // closed-contact slack for the circle sweep

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

// --- circle_union -----------------------------------------------------------

CoverageVerdict circle_union(std::span<const ArcInterval> arcs) {
    CoverageVerdict out;
    struct Ev {
        double start, len;
    };
    static thread_local std::vector<Ev> evs;
    evs.clear();
    for (const ArcInterval& a : arcs) {
        if (a.half_width >= kPi) {
            out.status = CoverageVerdict::Status::Covered;
            return out;
        }
        if (a.half_width <= 0.0) continue;
        evs.push_back({wrap_angle(a.center_angle - a.half_width), 2.0 * a.half_width});
    }
    if (evs.empty()) {
        out.status = CoverageVerdict::Status::Uncovered;
        out.uncovered_measure = kTwoPi;
        out.witness_angle = kPi;
        return out;
    }
    std::sort(evs.begin(), evs.end(),
              [](const Ev& a, const Ev& b) { return a.start < b.start; });

    // Walk once around starting at the first start; gaps of the closed union
    // are exactly the jumps where the next start exceeds the merged reach.
    const double base = evs[0].start;
    double reach = base + evs[0].len;
    double total_gap = 0.0, largest_gap = 0.0, largest_mid = 0.0;
    auto record_gap = [&](double lo, double hi) {
        double g = hi - lo;
        if (g <= kGapEps) return;
        total_gap += g;
        if (g > largest_gap) {
            largest_gap = g;
            largest_mid = 0.5 * (lo + hi);
        }
    };
    for (std::size_t i = 1; i < evs.size(); ++i) {
        if (evs[i].start > reach) record_gap(reach, evs[i].start);
        reach = std::max(reach, evs[i].start + evs[i].len);
    }
    if (reach < base + kTwoPi) record_gap(reach, base + kTwoPi);

    if (total_gap <= 0.0) {
        out.status = CoverageVerdict::Status::Covered;
        return out;
    }
    out.status = CoverageVerdict::Status::Uncovered;
    out.uncovered_measure = total_gap;
    out.witness_angle = wrap_angle(largest_mid);
    return out;
}

// --- sphere_coverage --------------------------------------------------------

namespace {

struct Tri {
    Vec3 a, b, c;
    std::uint32_t cand_begin, cand_end;
};

double tri_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    // Girard's excess via the robust l'Huilier-ish tangent formula.
    double num = std::fabs(a.dot(b.cross(c)));
    double den = 1.0 + a.dot(b) + b.dot(c) + a.dot(c);
    return 2.0 * std::atan2(num, den);
}

}  // namespace

CoverageVerdict sphere_coverage(std::span<const Cap> caps, double resolution) {
    CoverageVerdict out;
    if (resolution <= 0.0) fail("sphere_coverage: require resolution > 0");
    for (const Cap& c : caps) {
        if (c.angular_radius >= kPi) {
            out.status = CoverageVerdict::Status::Covered;
            return out;
        }
    }
    if (caps.empty()) {
        out.status = CoverageVerdict::Status::Uncovered;
        out.uncovered_measure = 4.0 * kPi;
        out.witness_dir = {0.0, 0.0, 1.0};
        return out;
    }

    const std::size_t m = caps.size();
    static thread_local std::vector<double> cos_t, sin_t;
    cos_t.resize(m);
    sin_t.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        cos_t[i] = std::cos(caps[i].angular_radius);
        sin_t[i] = std::sin(caps[i].angular_radius);
    }

    // Icosahedron vertices.
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p = p.normalized();
    static const int faces[20][3] = {
        {0, 11, 5},  {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},   {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},   {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},   {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    static thread_local std::vector<std::uint32_t> arena;
    static thread_local std::vector<Tri> stack;
    arena.clear();
    stack.clear();
    for (std::size_t i = 0; i < m; ++i) arena.push_back(static_cast<std::uint32_t>(i));
    for (auto& f : faces) {
        stack.push_back(Tri{v[f[0]], v[f[1]], v[f[2]], 0, static_cast<std::uint32_t>(m)});
    }

    bool any_unknown = false;
    bool have_witness = false;
    Vec3 witness{};
    double uncovered_area = 0.0;
    // Hard cap on work; deep, fully ambiguous refinements bail out as Unknown.
    std::size_t budget = 20'000'000;

    while (!stack.empty()) {
        if (budget-- == 0) {
            any_unknown = true;
            break;
        }
        Tri t = stack.back();
        stack.pop_back();

        Vec3 cc = (t.b - t.a).cross(t.c - t.a);
        double ccn = cc.norm();
        Vec3 centroid = (t.a + t.b + t.c) * (1.0 / 3.0);
        if (ccn < 1e-30) {
            cc = centroid.normalized();
        } else {
            cc = cc * (1.0 / ccn);
            if (cc.dot(centroid) < 0.0) cc = cc * -1.0;
        }
        double cosr = std::min({cc.dot(t.a), cc.dot(t.b), cc.dot(t.c)});
        cosr = std::clamp(cosr, -1.0, 1.0);
        const double rho = std::acos(cosr);
        const double cos_rho = std::cos(rho), sin_rho = std::sin(rho);

        // One pass: try to certify the circumball inside some cap, and filter
        // the candidate caps that can meet the triangle at all.
        bool covered = false;
        const std::uint32_t child_begin = static_cast<std::uint32_t>(arena.size());
        for (std::uint32_t idx = t.cand_begin; idx < t.cand_end; ++idx) {
            const std::uint32_t ci = arena[idx];
            const double d = cc.dot(caps[ci].axis);
            // cos(theta - rho), cos(theta + rho) without trig calls.  The
            // circumball fits inside the cap only when theta >= rho
            // (cos theta <= cos rho); without that guard a small cap sitting
            // inside the triangle would falsely certify it.
            const double cos_shrunk = cos_t[ci] * cos_rho + sin_t[ci] * sin_rho;
            if (cos_t[ci] <= cos_rho && d >= cos_shrunk) {
                covered = true;
                break;
            }
            // Keep caps that can meet the circumball: angle < theta + rho,
            // unconditionally when theta + rho wraps past pi.
            const double cos_grown = cos_t[ci] * cos_rho - sin_t[ci] * sin_rho;
            const bool wraps = caps[ci].angular_radius + rho >= kPi;
            if (wraps || d > cos_grown) arena.push_back(ci);
        }
        if (covered) {
            arena.resize(child_begin);
            continue;
        }
        const std::uint32_t child_end = static_cast<std::uint32_t>(arena.size());

        if (child_begin == child_end) {
            // No cap meets the triangle: certified uncovered region.
            uncovered_area += tri_area(t.a, t.b, t.c);
            if (!have_witness) {
                have_witness = true;
                witness = cc;
            }
            continue;
        }

        if (rho <= resolution) {
            // Size floor: exact point membership as a last chance for a witness.
            for (const Vec3& p : {cc, t.a, t.b, t.c}) {
                bool inside_some = false;
                for (std::uint32_t idx = child_begin; idx < child_end && !inside_some; ++idx) {
                    if (p.dot(caps[arena[idx]].axis) >= cos_t[arena[idx]]) inside_some = true;
                }
                if (!inside_some) {
                    have_witness = true;
                    witness = p;
                    break;
                }
            }
            if (!have_witness) any_unknown = true;
            if (have_witness) break;
            continue;
        }

        const Vec3 ab = (t.a + t.b).normalized();
        const Vec3 bc = (t.b + t.c).normalized();
        const Vec3 ca = (t.c + t.a).normalized();
        stack.push_back(Tri{t.a, ab, ca, child_begin, child_end});
        stack.push_back(Tri{ab, t.b, bc, child_begin, child_end});
        stack.push_back(Tri{ca, bc, t.c, child_begin, child_end});
        stack.push_back(Tri{ab, bc, ca, child_begin, child_end});
    }

    if (have_witness) {
        // The witness must be verifiable against the full cap list.
        for (std::size_t i = 0; i < m; ++i) {
            if (witness.dot(caps[i].axis) >= cos_t[i]) {
                // Filtering said this cannot happen; fall back to Unknown.
                out.status = CoverageVerdict::Status::Unknown;
                out.resolution = resolution;
                return out;
            }
        }
        out.status = CoverageVerdict::Status::Uncovered;
        out.uncovered_measure = uncovered_area;
        out.witness_dir = witness;
        return out;
    }
    if (any_unknown) {
        out.status = CoverageVerdict::Status::Unknown;
        out.resolution = resolution;
        return out;
    }
    out.status = CoverageVerdict::Status::Covered;
    return out;
}

// --- covering probability formulas -----------------------------------------

double stevens_cover_prob(double a, long n) {
    if (a < 0.0 || a >= 1.0) fail("stevens_cover_prob: require 0 <= a < 1, got a=" + std::to_string(a));
    if (n <= 0) return 0.0;
    if (static_cast<double>(n) * a < 1.0) return 0.0;  // total length below 1
    if (n == 1) return 0.0;                            // single arc, a < 1

    long double sum = 0.0L, comp = 0.0L;  // Neumaier compensation
    long double binom = 1.0L;
    const long kmax = std::min<long>(n, static_cast<long>(std::floor(1.0 / a)));
    long double peak = 0.0L;
    for (long k = 0; k <= kmax; ++k) {
        const long double pos = 1.0L - static_cast<long double>(k) * a;
        if (pos > 0.0L) {
            long double term = binom * powl(pos, static_cast<long double>(n - 1));
            const long double mag = fabsl(term);
            peak = std::max(peak, mag);
            // Term magnitudes are unimodal in k; once they have decayed far
            // below both the peak and the running sum they cannot matter.
            if (k > 8 && mag < 1e-25L * (peak + fabsl(sum))) break;
            if (k & 1) term = -term;
            long double t = sum + term;
            if (fabsl(sum) >= fabsl(term)) {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        binom *= static_cast<long double>(n - k) / static_cast<long double>(k + 1);
    }
    double p = static_cast<double>(sum + comp);
    return std::clamp(p, 0.0, 1.0);
}

double twoatom_uncover_prob(double m, long n) {
    if (m < 0.0 || m > 0.5) fail("twoatom_uncover_prob: require 0 <= m <= 1/2, got m=" + std::to_string(m));
    if (n < 0) fail("twoatom_uncover_prob: require n >= 0");
    const double x = static_cast<double>(n);
    return 2.0 * x * m * std::pow(1.0 - m, x - 1.0) + std::pow(1.0 - 2.0 * m, x);
}

SheppBounds shepp_bound(double a, long n) {
    if (a < 0.0 || a > 0.25) fail("shepp_bound: require 0 <= a <= 1/4, got a=" + std::to_string(a));
    if (n < 1) fail("shepp_bound: require n >= 1");
    const double nn = static_cast<double>(n);
    const double integral =
        (std::pow(1.0 - a, nn + 1.0) - std::pow(1.0 - 2.0 * a, nn + 1.0)) / (nn + 1.0);
    SheppBounds b;
    b.tight = 2.0 * std::pow(1.0 - a, 2.0 * nn) /
              (integral + (0.25 - a) * std::pow(1.0 - 2.0 * a, nn));
    b.simple = 2.0 * (nn + 1.0) * std::pow(1.0 - a, nn - 1.0);
    return b;
}

double unit_ball_volume(int d) {
    if (d < 0) fail("unit_ball_volume: require d >= 0");
    return std::exp(0.5 * d * std::log(kPi) - std::lgamma(0.5 * d + 1.0));
}

double cap_fraction(double theta, int d) {
    if (d < 2) fail("cap_fraction: require d >= 2");
    if (theta < 0.0 || theta > kPi) fail("cap_fraction: require 0 <= theta <= pi");
    if (theta == kPi) return 1.0;
    if (d == 2) return theta / kPi;
    if (d == 3) return 0.5 * (1.0 - std::cos(theta));
    const double coef =
        (d - 1) * unit_ball_volume(d - 1) / (d * unit_ball_volume(d));
    double integral = adaptive_simpson(
        [d](double t) { return std::pow(std::sin(t), d - 2); }, 0.0, theta, 1e-13);
    return std::clamp(coef * integral, 0.0, 1.0);
}

// --- ArcLengthLaw -----------------------------------------------------------

ArcLengthLaw ArcLengthLaw::deterministic(double a) {
    if (a < 0.0 || a > 1.0) fail("ArcLengthLaw::deterministic: require a in [0,1]");
    ArcLengthLaw law;
    law.kind_ = Kind::Deterministic;
    law.param_ = a;
    return law;
}

ArcLengthLaw ArcLengthLaw::two_atom(double m) {
    if (m < 0.0 || m > 0.5) fail("ArcLengthLaw::two_atom: require m in [0,1/2]");
    ArcLengthLaw law;
    law.kind_ = Kind::TwoAtom;
    law.param_ = m;
    return law;
}

ArcLengthLaw ArcLengthLaw::empirical(std::vector<double> x, std::vector<double> F) {
    if (x.size() != F.size() || x.size() < 2) fail("ArcLengthLaw::empirical: need matching grids with >= 2 points");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (F[i] < 0.0 || F[i] > 1.0) fail("ArcLengthLaw::empirical: cdf values must lie in [0,1]");
        if (i > 0 && (x[i] <= x[i - 1] || F[i] < F[i - 1])) fail("ArcLengthLaw::empirical: grid and cdf must be monotone");
    }
    if (x.front() < 0.0 || x.back() > 1.0) fail("ArcLengthLaw::empirical: support must lie in [0,1]");
    ArcLengthLaw law;
    law.kind_ = Kind::Empirical;
    law.xs_ = std::move(x);
    law.Fs_ = std::move(F);
    law.build_integral_table();
    return law;
}

ArcLengthLaw ArcLengthLaw::nu_r(std::vector<std::pair<double, double>> radius_weights,
                                double r) {
    if (radius_weights.empty()) fail("ArcLengthLaw::nu_r: need at least one radius");
    double tot = 0.0;
    for (auto& [R, w] : radius_weights) {
        if (R <= 0.0 || w < 0.0) fail("ArcLengthLaw::nu_r: radii must be positive, weights nonnegative");
        tot += w;
    }
    if (tot <= 0.0) fail("ArcLengthLaw::nu_r: weights must not all vanish");
    for (auto& [R, w] : radius_weights) w /= tot;
    ArcLengthLaw law;
    law.kind_ = Kind::NuR;
    law.radius_weights_ = std::move(radius_weights);
    law.view_r_ = r;
    law.build_integral_table();
    return law;
}

double ArcLengthLaw::raw_cdf(double u) const {
    switch (kind_) {
        case Kind::Deterministic:
            return u >= param_ ? 1.0 : 0.0;
        case Kind::TwoAtom:
            if (u < 0.0) return 0.0;
            return u >= 0.5 ? 1.0 : 1.0 - 2.0 * param_;
        case Kind::Empirical: {
            if (u < xs_.front()) return 0.0;
            if (u >= xs_.back()) return Fs_.back();
            auto it = std::upper_bound(xs_.begin(), xs_.end(), u);
            std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
            double t = (u - xs_[i]) / (xs_[i + 1] - xs_[i]);
            return Fs_[i] + t * (Fs_[i + 1] - Fs_[i]);
        }
        case Kind::NuR: {
            double acc = 0.0;
            for (const auto& [R, w] : radius_weights_) acc += w * nu_r_cdf(u, R, view_r_);
            return acc;
        }
    }
    return 0.0;
}

double ArcLengthLaw::cdf(double u) const {
    if (u < 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return raw_cdf(u);
}

void ArcLengthLaw::build_integral_table() {
    // Prefix integrals of F on a dense uniform grid over [0, 1], per-cell
    // 2-point Gauss (exact through cubics, so the table error is negligible
    // against the Monte-Carlo noise it feeds).
    const int cells = kIntegralCells;
    Gs_.assign(cells + 1, 0.0);
    const double h = 1.0 / cells;
    const double off = 0.5 / std::sqrt(3.0);
    for (int i = 0; i < cells; ++i) {
        double xm = (i + 0.5) * h;
        double g = 0.5 * (raw_cdf(xm - off * h) + raw_cdf(xm + off * h));
        Gs_[i + 1] = Gs_[i] + g * h;
    }
}

double ArcLengthLaw::cdf_integral(double u) const {
    if (u <= 0.0) return 0.0;
    switch (kind_) {
        case Kind::Deterministic:
            return u > param_ ? u - param_ : 0.0;
        case Kind::TwoAtom:
            // F = 1-2m on [0, 1/2), then 1.
            return (1.0 - 2.0 * param_) * std::min(u, 0.5) + std::max(0.0, u - 0.5);
        default: {
            if (u >= 1.0) return Gs_.back() + (u - 1.0);
            const int cells = kIntegralCells;
            const double h = 1.0 / cells;
            int i = std::min(static_cast<int>(u * cells), cells - 1);
            double x0 = i * h;
            // Trapezoid tail inside the cell keeps the error O(h^3).
            return Gs_[i] + 0.5 * (u - x0) * (raw_cdf(x0) + raw_cdf(u));
        }
    }
}

double ArcLengthLaw::mean() const {
    switch (kind_) {
        case Kind::Deterministic:
            return param_;
        case Kind::TwoAtom:
            return param_;
        case Kind::NuR: {
            double acc = 0.0;
            for (const auto& [R, w] : radius_weights_) acc += w * mean_shadow_constant(R, view_r_);
            return acc;
        }
        case Kind::Empirical:
            // mean = int (1 - F) over the support.
            return 1.0 - cdf_integral(1.0);
    }
    return 0.0;
}

// --- Siegel-Holst -----------------------------------------------------------

std::vector<McEstimate> siegel_holst_cover_prob_upto(const ArcLengthLaw& law,
                                                     long n_max, long mc_samples,
                                                     std::uint64_t seed) {
    if (n_max < 0) fail("siegel_holst_cover_prob: require n >= 0");
    if (mc_samples < 1) fail("siegel_holst_cover_prob: require mc_samples >= 1");
    if (law.is_deterministic() && n_max > 100) {
        fail("siegel_holst_cover_prob: deterministic laws with n > 100 are "
             "refused (cancellation); use stevens_cover_prob");
    }
    const long N = n_max;
    std::vector<McEstimate> out(static_cast<std::size_t>(N) + 1);
    if (N == 0) return out;  // zero arcs never cover

    // mean_kn[k][j]: simplex average of A * B^{n-k} for n = k + j.
    std::vector<std::vector<double>> mean_kn(N + 1), var_kn(N + 1);
    std::vector<double> u_buf;
    for (long k = 1; k <= N; ++k) {
        const std::size_t width = static_cast<std::size_t>(N - k) + 1;
        std::vector<double> sum(width, 0.0), sumsq(width, 0.0);
        Rng rng = Rng::child(seed, 0x5348ULL, static_cast<std::uint64_t>(k));
        u_buf.resize(k);
        for (long m = 0; m < mc_samples; ++m) {
            double tot = 0.0;
            for (long i = 0; i < k; ++i) {
                u_buf[i] = rng.exponential();
                tot += u_buf[i];
            }
            double A = 1.0, B = 0.0;
            for (long i = 0; i < k; ++i) {
                const double u = u_buf[i] / tot;
                A *= law.cdf(u);
                if (A == 0.0) break;
                B += law.cdf_integral(u);
            }
            if (A == 0.0) continue;  // contributes zero to every n
            double acc = A;
            sum[0] += acc;
            sumsq[0] += acc * acc;
            for (std::size_t j = 1; j < width; ++j) {
                acc *= B;
                sum[j] += acc;
                sumsq[j] += acc * acc;
            }
        }
        mean_kn[k].resize(width);
        var_kn[k].resize(width);
        const double M = static_cast<double>(mc_samples);
        for (std::size_t j = 0; j < width; ++j) {
            const double mu = sum[j] / M;
            double va = std::max(0.0, sumsq[j] / M - mu * mu);
            mean_kn[k][j] = mu;
            var_kn[k][j] = va / std::max(1.0, M - 1.0);  // variance of the mean
        }
    }

    for (long n = 1; n <= N; ++n) {
        long double acc = 1.0L;  // k = 0 term
        double var = 0.0;
        long double binom = static_cast<long double>(n);
        for (long k = 1; k <= n; ++k) {
            const long double term =
                binom * static_cast<long double>(mean_kn[k][static_cast<std::size_t>(n - k)]);
            acc += (k & 1) ? -term : term;
            const double b = static_cast<double>(binom);
            var += b * b * var_kn[k][static_cast<std::size_t>(n - k)];
            binom *= static_cast<long double>(n - k) / static_cast<long double>(k + 1);
        }
        McEstimate e;
        e.value = std::clamp(static_cast<double>(acc), 0.0, 1.0);
        e.std_error = std::sqrt(var);
        out[static_cast<std::size_t>(n)] = e;
    }
    return out;
}

McEstimate siegel_holst_cover_prob(const ArcLengthLaw& law, long n, long mc_samples,
                                   std::uint64_t seed) {
    auto all = siegel_holst_cover_prob_upto(law, n, mc_samples, seed);
    return all.back();
}

}  // namespace boolvis

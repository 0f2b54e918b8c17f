#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "boolvis/asymptotics.hpp"
#include "boolvis/model.hpp"
#include "boolvis/visibility.hpp"

namespace boolvis {

// Wilson 95% score interval (z = 1.96 by default); well-behaved at small hit
// counts, which matters for rare-event rows.
struct WilsonInterval {
    double lo = 0.0, hi = 0.0;
};
WilsonInterval wilson_interval(long hits, long trials, double z = 1.96);

struct TailRow {
    double r = 0.0;
    long trials = 0;
    long hits = 0;
    double p_hat = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;
};

// Estimates P(total visibility >= r) over an ascending grid.  One simulated
// configuration per replicate is reused across the whole grid: the coverage
// indicator is evaluated at each grid radius (ascending, with the sampling
// window grown lazily), which thresholds the same visibility value at every
// r and keeps the rows nested.  Deterministic per seed and independent of
// the worker count.
std::vector<TailRow> estimate_tail(const ModelConfig& config,
                                   std::span<const double> r_grid, long trials,
                                   std::uint64_t seed, int threads = 0);

enum class SlopeModel { Linear, LinearPlusLog };

// Least squares of log p_hat on r (Linear) or on (r, log r) (LinearPlusLog);
// rows with fewer than 10 hits are excluded.  The standard error is a
// bootstrap over row-level binomial resampling.
struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    double intercept = 0.0;
    double log_coef = 0.0;
    long rows_used = 0;
};
SlopeFit fit_log_slope(std::span<const TailRow> rows, SlopeModel model,
                       std::uint64_t seed = 0xb001ull, int bootstrap_rounds = 400);

// Kolmogorov-Smirnov statistic of samples against a reference CDF.
double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf);

// Small-obstacle extreme-value run: per replicate the total visibility of an
// origin-free unit-intensity configuration with constant radius R, mapped
// through xi_transform.  Reports the transformed samples (replicate order),
// their KS distance to the Gumbel CDF and the sample mean.
struct GumbelRun {
    std::vector<double> transformed;
    std::vector<double> visibility;
    double ks = 0.0;
    double mean = 0.0;
};
GumbelRun gumbel_small_R(double R, int d, long samples, std::uint64_t seed,
                         int threads = 0);

// Large-clearing extreme-value run: visibility conditioned on an empty ball
// of radius r, mapped through psi_transform.
GumbelRun gumbel_clearing(double r, const GrainLaw& law, int d, long samples,
                          std::uint64_t seed, int threads = 0);

// P(visibility >= r + r^alpha | clearing >= r) by Monte Carlo.
McEstimate conditional_tail(double r, double alpha, const GrainLaw& law, int d,
                            long trials, std::uint64_t seed, int threads = 0);

// Dimension-3 slope experiment: tail estimation over the grid, a
// LinearPlusLog fit, and the verdict whether the slope falls inside
// [-omega_2 R^2, -omega_2 R^2 / 3] widened by two fit standard errors.
struct BracketResult {
    std::vector<TailRow> rows;
    SlopeFit fit;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    bool pass = false;
};
BracketResult d3_slope_bracket(double R, std::span<const double> r_grid,
                               long trials, std::uint64_t seed, int threads = 0);

// Runs f(worker, replicate_index) over [0, n) on the given number of worker
// threads (0 = hardware concurrency).  Replicate work must depend only on
// the replicate index; the worker id is for slot-indexed tallies, whose sums
// are order-independent.
void parallel_replicates(long n, int threads,
                         const std::function<void(int, long)>& f);
int resolve_worker_count(int threads);

// --- reporting ---------------------------------------------------------------

// CSV with header r,trials,hits,p_hat,ci_lo,ci_hi; floats at 9 significant
// digits.  JSON mirrors the field names exactly.
void write_tail_csv(std::ostream& os, std::span<const TailRow> rows);
std::string tail_rows_json(std::span<const TailRow> rows);

}  // namespace boolvis

#include "boolvis/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "boolvis/rng.hpp"

namespace boolvis {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

int resolve_worker_count(int threads) {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_replicates(long n, int threads,
                         const std::function<void(int, long)>& f) {
    const int workers =
        static_cast<int>(std::min<long>(resolve_worker_count(threads), std::max<long>(1, n)));
    if (workers <= 1) {
        for (long i = 0; i < n; ++i) f(0, i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                const long i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= n) return;
                try {
                    f(w, i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

WilsonInterval wilson_interval(long hits, long trials, double z) {
    if (trials <= 0 || hits < 0 || hits > trials) fail("wilson_interval: require 0 <= hits <= trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

// --- estimate_tail ------------------------------------------------------------

std::vector<TailRow> estimate_tail(const ModelConfig& config,
                                   std::span<const double> r_grid, long trials,
                                   std::uint64_t seed, int threads) {
    config.validate();
    if (r_grid.empty()) fail("estimate_tail: empty r grid");
    for (std::size_t i = 1; i < r_grid.size(); ++i) {
        if (r_grid[i] <= r_grid[i - 1]) fail("estimate_tail: r grid must be ascending");
    }
    if (trials < 100) fail("estimate_tail: require trials >= 100");
    if (r_grid.front() <= config.clearing) fail("estimate_tail: grid must start above the clearing radius");

    const std::size_t G = r_grid.size();
    const int workers = resolve_worker_count(threads);
    std::vector<std::vector<long>> tally(workers, std::vector<long>(G, 0));

    auto run_replicate = [&](int worker, long rep) {
        auto& hits = tally[worker];
        const std::uint64_t rep_seed = mix_seed(seed, 0x7265ULL, static_cast<std::uint64_t>(rep));
        // Lazy window ladder: grow the window only while the configuration is
        // still uncovered (the indicator at smaller r decided everything else).
        const double guard = 1e-12 * (1.0 + r_grid.back());
        ObstacleSet set = sample(config, r_grid[0] + guard, rep_seed);
        for (std::size_t gi = 0; gi < G; ++gi) {
            if (set.reach < r_grid[gi]) set = extend(set, r_grid[gi] + guard);
            bool covered;
            if (config.dimension == 2) {
                covered = ShadowProbe2D(set).covered_at(r_grid[gi]);
            } else {
                covered = CapProbe3D(set).covered_at(r_grid[gi]);
            }
            if (covered) break;  // nested events: covered stays covered at larger r
            ++hits[gi];
        }
    };
    parallel_replicates(trials, threads, run_replicate);

    std::vector<TailRow> rows(G);
    for (std::size_t gi = 0; gi < G; ++gi) {
        long h = 0;
        for (const auto& t : tally) h += t[gi];
        TailRow& row = rows[gi];
        row.r = r_grid[gi];
        row.trials = trials;
        row.hits = h;
        row.p_hat = static_cast<double>(h) / static_cast<double>(trials);
        auto ci = wilson_interval(h, trials);
        row.ci_lo = ci.lo;
        row.ci_hi = ci.hi;
    }
    return rows;
}

// --- slope fit ------------------------------------------------------------------

namespace {

// Ordinary least squares for up to 3 regressors via normal equations.
struct Lsq {
    double slope = 0.0, intercept = 0.0, log_coef = 0.0;
};

Lsq solve_ls(const std::vector<double>& r, const std::vector<double>& y, bool with_log) {
    const std::size_t n = r.size();
    const int p = with_log ? 3 : 2;
    double A[3][3] = {{0}}, b[3] = {0};
    for (std::size_t i = 0; i < n; ++i) {
        const double x[3] = {1.0, r[i], with_log ? std::log(r[i]) : 0.0};
        for (int a = 0; a < p; ++a) {
            for (int c = 0; c < p; ++c) A[a][c] += x[a] * x[c];
            b[a] += x[a] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < p; ++col) {
        int piv = col;
        for (int rr = col + 1; rr < p; ++rr) {
            if (std::fabs(A[rr][col]) > std::fabs(A[piv][col])) piv = rr;
        }
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        for (int rr = col + 1; rr < p; ++rr) {
            const double f = A[rr][col] / A[col][col];
            for (int cc = col; cc < p; ++cc) A[rr][cc] -= f * A[col][cc];
            b[rr] -= f * b[col];
        }
    }
    double sol[3] = {0, 0, 0};
    for (int rr = p - 1; rr >= 0; --rr) {
        double s = b[rr];
        for (int cc = rr + 1; cc < p; ++cc) s -= A[rr][cc] * sol[cc];
        sol[rr] = s / A[rr][rr];
    }
    return Lsq{sol[1], sol[0], with_log ? sol[2] : 0.0};
}

}  // namespace

SlopeFit fit_log_slope(std::span<const TailRow> rows, SlopeModel model,
                       std::uint64_t seed, int bootstrap_rounds) {
    std::vector<double> r, y;
    std::vector<long> trials, hits;
    for (const TailRow& row : rows) {
        if (row.hits < 10) continue;  // unstable rows stay out of the regression
        r.push_back(row.r);
        y.push_back(std::log(row.p_hat));
        trials.push_back(row.trials);
        hits.push_back(row.hits);
    }
    if (r.size() < 4) fail("fit_log_slope: need at least 4 rows with >= 10 hits");
    const bool with_log = model == SlopeModel::LinearPlusLog;
    const Lsq base = solve_ls(r, y, with_log);

    Rng rng(mix_seed(seed, 0x626f6fULL, 0));
    std::vector<double> yb(y.size());
    std::vector<double> slopes;
    slopes.reserve(bootstrap_rounds);
    for (int round = 0; round < bootstrap_rounds; ++round) {
        bool ok = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            // Binomial resample of the row's hit count at its observed rate.
            const double p = static_cast<double>(hits[i]) / static_cast<double>(trials[i]);
            long h = 0;
            if (trials[i] > 1000) {
                // Normal approximation is fine at these counts.
                const double mu = trials[i] * p;
                const double sd = std::sqrt(trials[i] * p * (1.0 - p));
                h = std::lround(mu + sd * rng.normal());
                h = std::clamp<long>(h, 0, trials[i]);
            } else {
                for (long t = 0; t < trials[i]; ++t) h += rng.uniform() < p ? 1 : 0;
            }
            if (h < 1) {
                ok = false;
                break;
            }
            yb[i] = std::log(static_cast<double>(h) / static_cast<double>(trials[i]));
        }
        if (!ok) continue;
        slopes.push_back(solve_ls(r, yb, with_log).slope);
    }
    double mean = 0.0;
    for (double s : slopes) mean += s;
    mean /= std::max<std::size_t>(1, slopes.size());
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    if (slopes.size() > 1) var /= static_cast<double>(slopes.size() - 1);

    SlopeFit fit;
    fit.slope = base.slope;
    fit.intercept = base.intercept;
    fit.log_coef = base.log_coef;
    fit.std_error = std::sqrt(var);
    fit.rows_used = static_cast<long>(r.size());
    return fit;
}

// --- KS -------------------------------------------------------------------------

double ks_distance(std::vector<double> samples,
                   const std::function<double(double)>& cdf) {
    if (samples.empty()) fail("ks_distance: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max(d, std::fabs((i + 1.0) / n - F));
        d = std::max(d, std::fabs(static_cast<double>(i) / n - F));
    }
    return d;
}

// --- Gumbel experiments -----------------------------------------------------------

namespace {

// Visibility quantile guesses for the initial sampling window; the driver
// extends geometrically when they fall short.
double xi_initial_reach(double R, int d) {
    const double u = 8.0;  // Gumbel 0.99966 quantile
    const GumbelConstants kc = gumbel_constants(d, GrainLaw::constant_disc(R));
    const double dd = d;
    double v = (u + kc.K_d - dd * (dd - 1.0) * std::log(R) +
                2.0 * (dd - 1.0) * std::log(-std::log(R))) /
               (unit_ball_volume(d - 1) * std::pow(R, dd - 1.0));
    return 1.1 * v + 2.0 * R;
}

double psi_initial_reach(double r, const GrainLaw& law, int d) {
    const double u = 8.0;
    const GumbelConstants kc = gumbel_constants(d, law);
    const double dd = d;
    double f = (u + kc.K_prime_d + (dd - 1.0) * (std::log(r) + std::log(std::log(r)))) /
               (unit_ball_volume(d - 1) * law.moment(d - 1));
    return r + 1.2 * f + law.diameter_bound();
}

double bounded_value(const VisibilityResult& res) {
    if (!res.bounded()) fail("total visibility did not resolve to a bounded value");
    return res.estimate();
}

}  // namespace

GumbelRun gumbel_small_R(double R, int d, long samples, std::uint64_t seed,
                         int threads) {
    if (!(R > 0.0 && R < 1.0)) fail("gumbel_small_R: require 0 < R < 1");
    if (d != 2 && d != 3) fail("gumbel_small_R: dimension must be 2 or 3");
    if (samples < 1) fail("gumbel_small_R: require samples >= 1");
    ModelConfig config{d, 1.0, GrainLaw::constant_disc(R), 0.0};
    const double reach0 = xi_initial_reach(R, d);

    GumbelRun run;
    run.transformed.resize(samples);
    run.visibility.resize(samples);
    parallel_replicates(samples, threads, [&](int, long i) {
        const std::uint64_t rep_seed = mix_seed(seed, 0x78695fULL, static_cast<std::uint64_t>(i));
        VisibilityResult res = resolve_total_visibility(config, reach0, 1e-6, rep_seed);
        const double v = bounded_value(res);
        run.visibility[i] = v;
        run.transformed[i] = xi_transform(v, R, d);
    });
    run.ks = ks_distance(run.transformed, gumbel_cdf);
    double m = 0.0;
    for (double x : run.transformed) m += x;
    run.mean = m / static_cast<double>(samples);
    return run;
}

GumbelRun gumbel_clearing(double r, const GrainLaw& law, int d, long samples,
                          std::uint64_t seed, int threads) {
    if (!(r > std::exp(1.0))) fail("gumbel_clearing: require r > e");
    if (d != 2 && d != 3) fail("gumbel_clearing: dimension must be 2 or 3");
    ModelConfig config{d, 1.0, law, r};
    const double reach0 = psi_initial_reach(r, law, d);

    GumbelRun run;
    run.transformed.resize(samples);
    run.visibility.resize(samples);
    parallel_replicates(samples, threads, [&](int, long i) {
        const std::uint64_t rep_seed = mix_seed(seed, 0x7073695fULL, static_cast<std::uint64_t>(i));
        VisibilityResult res = resolve_total_visibility(config, reach0, 1e-6, rep_seed);
        const double v = bounded_value(res);
        run.visibility[i] = v;
        run.transformed[i] = psi_transform(v, r, law, d);
    });
    run.ks = ks_distance(run.transformed, gumbel_cdf);
    double m = 0.0;
    for (double x : run.transformed) m += x;
    run.mean = m / static_cast<double>(samples);
    return run;
}

McEstimate conditional_tail(double r, double alpha, const GrainLaw& law, int d,
                            long trials, std::uint64_t seed, int threads) {
    if (!(alpha > 0.0 && alpha < 1.0)) fail("conditional_tail: require alpha in (0,1)");
    if (!(r > 0.0)) fail("conditional_tail: require r > 0");
    ModelConfig config{d, 1.0, law, r};
    const double probe_r = r + std::pow(r, alpha);
    const double guard = 1e-12 * (1.0 + probe_r);

    const int workers = resolve_worker_count(threads);
    std::vector<long> tally(workers, 0);
    parallel_replicates(trials, threads, [&](int worker, long i) {
        const std::uint64_t rep_seed = mix_seed(seed, 0x636f6eULL, static_cast<std::uint64_t>(i));
        ObstacleSet set = sample(config, probe_r + guard, rep_seed);
        bool covered;
        if (d == 2) {
            covered = ShadowProbe2D(set).covered_at(probe_r);
        } else {
            covered = CapProbe3D(set).covered_at(probe_r);
        }
        if (!covered) ++tally[worker];
    });
    long hits = 0;
    for (long t : tally) hits += t;
    McEstimate out;
    out.value = static_cast<double>(hits) / static_cast<double>(trials);
    out.std_error = std::sqrt(std::max(0.0, out.value * (1.0 - out.value) / trials));
    return out;
}

BracketResult d3_slope_bracket(double R, std::span<const double> r_grid, long trials,
                               std::uint64_t seed, int threads) {
    ModelConfig config{3, 1.0, GrainLaw::constant_disc(R), 0.0};
    BracketResult out;
    out.rows = estimate_tail(config, r_grid, trials, seed, threads);
    out.fit = fit_log_slope(out.rows, SlopeModel::LinearPlusLog, seed);
    const double w2 = unit_ball_volume(2);  // omega_2 = pi
    out.bracket_lo = -w2 * R * R;
    out.bracket_hi = -w2 * R * R / 3.0;
    const double widen = 2.0 * out.fit.std_error;
    out.pass = out.fit.slope >= out.bracket_lo - widen &&
               out.fit.slope <= out.bracket_hi + widen;
    return out;
}

// --- reporting ---------------------------------------------------------------------

namespace {

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_tail_csv(std::ostream& os, std::span<const TailRow> rows) {
    os << "r,trials,hits,p_hat,ci_lo,ci_hi\n";
    for (const TailRow& row : rows) {
        os << fmt9(row.r) << ',' << row.trials << ',' << row.hits << ','
           << fmt9(row.p_hat) << ',' << fmt9(row.ci_lo) << ',' << fmt9(row.ci_hi)
           << '\n';
    }
}

std::string tail_rows_json(std::span<const TailRow> rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TailRow& row : rows) {
        arr.push_back({{"r", row.r},
                       {"trials", row.trials},
                       {"hits", row.hits},
                       {"p_hat", row.p_hat},
                       {"ci_lo", row.ci_lo},
                       {"ci_hi", row.ci_hi}});
    }
    return arr.dump(2);
}

}  // namespace boolvis

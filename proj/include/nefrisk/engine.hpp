#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "claims.hpp"
#include "counting.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace nefrisk {

/// N and the Y_k independent.
struct CompoundModel {
    CountingDist counting;
    ClaimDist claim;

    double mean() const { return mean_of(counting) * mean_of(claim); }
    double variance() const {
        const double my = mean_of(claim);
        return mean_of(counting) * variance_of(claim) + variance_of(counting) * my * my;
    }
};

enum class Method { mc, is };

inline std::string_view to_string(Method m) { return m == Method::mc ? "mc" : "is"; }

inline Method parse_method(std::string_view s) {
    if (s == "mc") return Method::mc;
    if (s == "is") return Method::is;
    throw std::invalid_argument("unknown method: " + std::string(s));
}

struct TiltPlan {
    double theta_star = 0.0;
    CountingDist tilted_counting;
    ClaimDist tilted_claim;
    double level_x = 0.0;
    std::string warning;
};

struct EstimateResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t M = 0;
    Method method = Method::mc;
    std::uint64_t seed = 0;
    double level_x = 0.0;
    double runtime_ms = 0.0;
    unsigned workers = 1;
    double theta_star = 0.0;
    double tweak_fraction = 0.0;
    std::uint64_t hits = 0;
    bool converged = true;

    double relative_error() const { return estimate > 0.0 ? std_error / estimate : kInf; }
};

/// Welford accumulator with Chan's pairwise merge.
struct RunningStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t tweaks = 0;

    void push(double v) {
        ++n;
        const double d = v - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (v - mean);
        if (v > 0.0) ++hits;
    }

    void merge(const RunningStats& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double tot = na + nb;
        mean += d * nb / tot;
        m2 += o.m2 + d * d * na * nb / tot;
        n += o.n;
        hits += o.hits;
        tweaks += o.tweaks;
    }

    double std_error() const {
        if (n < 2) return 0.0;
        const double var = m2 / static_cast<double>(n - 1);
        return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
    }
};

/// (N, S_N) with S = 0 when N = 0.
inline std::pair<count_t, double> sample_aggregate(const CompoundModel& model, Rng& rng) {
    const count_t n = sample(model.counting, rng);
    if (n == 0) {
        return {0, 0.0};
    }
    return {n, sample_claim_sum(model.claim, n, rng)};
}

inline constexpr double kMaxLogWeight = 700.0;

/// Common tilt theta* with m_N(theta_N + theta*) m_Y(theta_Y + theta*) = x.
inline TiltPlan solve_tilt(const CompoundModel& model, double x) {
    TiltPlan plan{0.0, model.counting, model.claim, x, {}};
    if (!(x > model.mean())) {
        plan.warning = "level at or below E[S_N]; no tilt applied";
        return plan;
    }
    const NefCurve cn = curve_of(model.counting);
    const NefCurve cy = curve_of(model.claim);
    const double tn = theta_of(model.counting);
    const double ty = theta_of(model.claim);
    const double room_n = cn.theta_domain.hi - tn;
    const double room_y = cy.theta_domain.hi - ty;
    const double t_max = std::min(room_n, room_y);
    if (!std::isfinite(t_max) || !(t_max > 0.0)) {
        throw SimulationError("infeasible tilt: natural-parameter domains leave no room (" +
                              std::string(room_n <= room_y ? cn.family : cy.family) + ")");
    }
    auto product = [&](double t) {
        return mean_from_theta(cn, tn + t) * mean_from_theta(cy, ty + t);
    };
    double lo = 0.0;
    double hi = t_max;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        if (!cn.theta_domain.contains(tn + mid) || !cy.theta_domain.contains(ty + mid)) {
            hi = mid;
            continue;
        }
        if (product(mid) < x) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double t = lo;
    const double achieved = product(t);
    if (!(std::abs(achieved - x) <= 1e-6 * x)) {
        throw SimulationError("infeasible tilt: saddlepoint not reached below the " +
                              std::string(room_n <= room_y ? cn.family : cy.family) +
                              " domain boundary (product " + std::to_string(achieved) + ")");
    }
    plan.theta_star = t;
    plan.tilted_counting = with_theta(model.counting, tn + t);
    plan.tilted_claim = with_theta(model.claim, ty + t);
    return plan;
}

/// Everything about one importance-sampling replication; exposed for tests.
struct IsReplication {
    count_t n = 0;
    double s = 0.0;
    double log_weight = 0.0;
    bool tweak = false;
    double value = 0.0;
};

inline IsReplication is_replicate(const CompoundModel& model, const TiltPlan& plan, double x, Rng& rng) {
    IsReplication r;
    r.n = sample(plan.tilted_counting, rng);
    r.log_weight = (theta_of(model.counting) - theta_of(plan.tilted_counting)) * static_cast<double>(r.n) -
                   kappa_of(model.counting) + kappa_of(plan.tilted_counting);
    if (r.n > 0) {
        if (static_cast<double>(r.n) * mean_of(model.claim) > x) {
            r.tweak = true;
            r.s = sample_claim_sum(model.claim, r.n, rng);
        } else {
            r.s = sample_claim_sum(plan.tilted_claim, r.n, rng);
            r.log_weight += log_density_ratio_sum(model.claim, plan.tilted_claim, r.n, r.s);
        }
    }
    if (r.log_weight > kMaxLogWeight) {
        throw SimulationError("importance weight overflow: log-weight " + std::to_string(r.log_weight) +
                              " at n=" + std::to_string(r.n));
    }
    r.value = r.s > x ? std::exp(r.log_weight) : 0.0;
    return r;
}

namespace detail {

// Streams per adaptive batch; worker w of batch b uses stream b * this + w.
inline constexpr std::uint64_t kStreamsPerBatch = 1u << 16;

// Contiguous blocks of M over the workers, merged in worker order so the
// result depends only on (seed, M, workers).
template <class Body>
RunningStats run_blocks(std::uint64_t M, std::uint64_t seed, std::uint64_t stream_base, unsigned workers,
                        const Body& body) {
    workers = std::max(1u, workers);
    std::vector<RunningStats> parts(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](unsigned w) {
        try {
            const std::uint64_t share = M / workers + (w < M % workers ? 1 : 0);
            Rng rng(seed, stream_base + w);
            RunningStats& st = parts[w];
            for (std::uint64_t i = 0; i < share; ++i) {
                body(rng, st);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w);
        }
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    RunningStats total;
    for (const auto& p : parts) total.merge(p);
    return total;
}

inline RunningStats run_batch(const CompoundModel& model, const TiltPlan* plan, double x, std::uint64_t M,
                              std::uint64_t seed, std::uint64_t stream_base, unsigned workers) {
    if (plan == nullptr) {
        return run_blocks(M, seed, stream_base, workers, [&](Rng& rng, RunningStats& st) {
            const auto [n, s] = sample_aggregate(model, rng);
            st.push(s > x ? 1.0 : 0.0);
        });
    }
    return run_blocks(M, seed, stream_base, workers, [&](Rng& rng, RunningStats& st) {
        const IsReplication r = is_replicate(model, *plan, x, rng);
        if (r.tweak) ++st.tweaks;
        st.push(r.value);
    });
}

inline EstimateResult to_result(const RunningStats& st, Method method, std::uint64_t seed, double x,
                                unsigned workers, double theta_star,
                                std::chrono::steady_clock::time_point t0) {
    EstimateResult r;
    r.estimate = st.mean;
    r.std_error = st.std_error();
    r.M = st.n;
    r.method = method;
    r.seed = seed;
    r.level_x = x;
    r.workers = std::max(1u, workers);
    r.theta_star = theta_star;
    r.tweak_fraction = st.n ? static_cast<double>(st.tweaks) / static_cast<double>(st.n) : 0.0;
    r.hits = st.hits;
    r.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline void check_run_args(double x, std::uint64_t M) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument("level x must be finite and >= 0");
    }
    if (M < 1) {
        throw std::invalid_argument("sample size M must be >= 1");
    }
}

} // namespace detail

inline EstimateResult mc_estimate(const CompoundModel& model, double x, std::uint64_t M, std::uint64_t seed,
                                  unsigned workers = 1) {
    detail::check_run_args(x, M);
    const auto t0 = std::chrono::steady_clock::now();
    const RunningStats st = detail::run_batch(model, nullptr, x, M, seed, 0, workers);
    return detail::to_result(st, Method::mc, seed, x, workers, 0.0, t0);
}

inline EstimateResult is_estimate(const CompoundModel& model, double x, std::uint64_t M, std::uint64_t seed,
                                  unsigned workers = 1) {
    detail::check_run_args(x, M);
    const auto t0 = std::chrono::steady_clock::now();
    const TiltPlan plan = solve_tilt(model, x);
    const RunningStats st = detail::run_batch(model, &plan, x, M, seed, 0, workers);
    return detail::to_result(st, Method::is, seed, x, workers, plan.theta_star, t0);
}

inline EstimateResult estimate(const CompoundModel& model, double x, std::uint64_t M, Method method,
                               std::uint64_t seed, unsigned workers = 1) {
    return method == Method::mc ? mc_estimate(model, x, M, seed, workers)
                                : is_estimate(model, x, M, seed, workers);
}

struct AdaptiveOptions {
    std::uint64_t initial = 1000;
    std::uint64_t budget = std::uint64_t{1} << 24;
    unsigned workers = 1;
};

/// Doubles M (1000, 2000, 4000, ...) until std_error / estimate <= target or
/// the next doubling would exceed the budget. Earlier batches are kept.
inline EstimateResult adaptive_sample_size(const CompoundModel& model, double x, double target_rel_se,
                                           Method method, std::uint64_t seed, AdaptiveOptions opt = {}) {
    if (!(target_rel_se > 0.0 && target_rel_se < 1.0)) {
        throw std::invalid_argument("target relative standard error must lie in (0,1)");
    }
    detail::check_run_args(x, std::max<std::uint64_t>(opt.initial, 1));
    const auto t0 = std::chrono::steady_clock::now();
    std::optional<TiltPlan> plan;
    if (method == Method::is) {
        plan = solve_tilt(model, x);
    }
    const TiltPlan* pp = plan ? &*plan : nullptr;
    RunningStats total;
    std::uint64_t batch_size = std::max<std::uint64_t>(opt.initial, 1);
    bool converged = false;
    for (std::uint64_t b = 0;; ++b) {
        total.merge(detail::run_batch(model, pp, x, batch_size, seed, b * detail::kStreamsPerBatch, opt.workers));
        if (total.mean > 0.0 && total.std_error() <= target_rel_se * total.mean) {
            converged = true;
            break;
        }
        batch_size = total.n;
        if (total.n + batch_size > opt.budget) break;
    }
    EstimateResult r =
        detail::to_result(total, method, seed, x, opt.workers, plan ? plan->theta_star : 0.0, t0);
    r.converged = converged;
    return r;
}

} // namespace nefrisk

#include <catch_amalgamated.hpp>

#include <cstring>
#include <vector>

#include <nefrisk/case_study.hpp>
#include <nefrisk/engine.hpp>

#include "oracles.hpp"

using namespace nefrisk;
using Catch::Approx;

namespace {

CompoundModel abel_ig() { return case_study::model(CountingFamily::abel, ClaimFamily::inverse_gaussian); }

double ig_log_pdf(double mu, double lambda, double s) {
    return 0.5 * std::log(lambda / (2.0 * std::numbers::pi * s * s * s)) - lambda * (s - mu) * (s - mu) / (2.0 * mu * mu * s);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("compound mean and variance identities") {
    const auto m = abel_ig();
    const double my = mean_of(m.claim), vy = variance_of(m.claim);
    CHECK(m.mean() == Approx(70.60 * my));
    CHECK(m.mean() == Approx(329.22).epsilon(2e-3));
    CHECK(m.variance() == Approx(70.60 * vy + variance_of(m.counting) * my * my));
    // p is rounded to 6 decimals
    CHECK(variance_of(m.counting) == Approx(52181.52).epsilon(5e-4));
}

TEST_CASE("aggregate draws: mean near 329 and the variance identity") {
    const auto model = abel_ig();
    Rng rng(2024);
    const int N = 1'000'000;
    std::vector<double> s(N);
    for (auto& x : s) x = sample_aggregate(model, rng).second;
    const auto mo = oracle::moments(s);
    CHECK(std::abs(mo.mean - model.mean()) <= 3.0 * std::sqrt(model.variance() / N));
    CHECK(mo.var == Approx(model.variance()).epsilon(0.10));
}

TEST_CASE("a counting law stuck at zero gives empty sums") {
    const CompoundModel m{AbelDist(2.0, 1e-13), case_study::claim(ClaimFamily::gamma)};
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        const auto [n, s] = sample_aggregate(m, rng);
        CHECK(n == 0);
        CHECK(s == 0.0);
    }
}

TEST_CASE("mc at x = 0 estimates 1 - P(N = 0)") {
    const auto model = abel_ig();
    const auto r = mc_estimate(model, 0.0, 200000, 3);
    const double f0 = std::get<AbelDist>(model.counting).f0();
    CHECK(std::abs(r.estimate - (1.0 - f0)) <= 3.0 * std::sqrt(f0 * (1 - f0) / 200000));
    CHECK(r.std_error == Approx(std::sqrt(r.estimate * (1 - r.estimate) / (r.M - 1))).epsilon(1e-9));
    CHECK(r.estimate <= 1.0);
    CHECK(r.M == 200000);
}

TEST_CASE("tilt: no tilt at or below the mean") {
    const auto model = abel_ig();
    const auto plan = solve_tilt(model, model.mean());
    CHECK(plan.theta_star == 0.0);
    CHECK_FALSE(plan.warning.empty());
    CHECK(mean_of(plan.tilted_counting) == mean_of(model.counting));
    CHECK(mean_of(plan.tilted_claim) == mean_of(model.claim));
}

TEST_CASE("tilt: saddlepoint residual, domains and monotonicity") {
    for (auto cf : case_study::kCountingFamilies) {
        for (auto yf : case_study::kClaimFamilies) {
            const auto model = case_study::model(cf, yf);
            double prev = 0.0;
            for (double x = 5000; x <= 50000; x += 5000) {
                INFO(to_string(cf) << "+" << to_string(yf) << " x=" << x);
                const auto plan = solve_tilt(model, x);
                CHECK(plan.theta_star > 0.0);
                CHECK(plan.theta_star >= prev);
                prev = plan.theta_star;
                CHECK(std::abs(mean_of(plan.tilted_counting) * mean_of(plan.tilted_claim) - x) <= 1e-6 * x);
                CHECK(curve_of(model.counting).theta_domain.contains(theta_of(plan.tilted_counting)));
                CHECK(curve_of(model.claim).theta_domain.contains(theta_of(plan.tilted_claim)));
                CHECK(dispersion_of(plan.tilted_counting) == dispersion_of(model.counting));
                CHECK(dispersion_of(plan.tilted_claim) == dispersion_of(model.claim));
            }
        }
    }
}

TEST_CASE("IS weights equal the explicit likelihood ratio") {
    // counting ratio from pmf evaluations, claim ratio from the IG density
    const auto model = abel_ig();
    const double x = 25000;
    const auto plan = solve_tilt(model, x);
    const auto& ig = std::get<InverseGaussianClaim>(model.claim);
    const auto& tig = std::get<InverseGaussianClaim>(plan.tilted_claim);
    Rng rng(77);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        const auto r = is_replicate(model, plan, x, rng);
        double lw = log_pmf(model.counting, r.n) - log_pmf(plan.tilted_counting, r.n);
        if (r.n > 0 && !r.tweak) {
            const double nn = static_cast<double>(r.n);
            lw += ig_log_pdf(nn * ig.mean(), nn * nn / ig.p, r.s) - ig_log_pdf(nn * tig.mean(), nn * nn / tig.p, r.s);
        }
        REQUIRE(r.log_weight == Approx(lw).margin(1e-8 * std::max(1.0, std::abs(lw))));
        ++checked;
    }
    CHECK(checked == 3000);
}

TEST_CASE("IS weights on the event are bounded by the weight at s = x") {
    for (auto yf : case_study::kClaimFamilies) {
        const auto model = case_study::model(CountingFamily::abel, yf);
        const double x = 5000;
        const auto plan = solve_tilt(model, x);
        const double t = plan.theta_star;
        const double dk_y = kappa_of(plan.tilted_claim) - kappa_of(model.claim);
        const double dk_n = kappa_of(plan.tilted_counting) - kappa_of(model.counting);
        Rng rng(11);
        int hits = 0;
        for (int i = 0; i < 3000; ++i) {
            const auto r = is_replicate(model, plan, x, rng);
            if (r.tweak || r.s <= x) continue;
            ++hits;
            const double nn = static_cast<double>(r.n);
            const double bound = -t * x + nn * (dk_y - t) + dk_n;
            INFO(to_string(yf));
            REQUIRE(r.log_weight <= bound + 1e-9 * std::abs(bound));
            REQUIRE(r.value > 0.0);
        }
        CHECK(hits > 0);  // most hits come through the untilted branch
    }
}

TEST_CASE("bitwise determinism for fixed seed, M and workers") {
    const auto model = abel_ig();
    for (unsigned w : {1u, 3u}) {
        const auto a = is_estimate(model, 15000, 3000, 99, w);
        const auto b = is_estimate(model, 15000, 3000, 99, w);
        CHECK(same_bits(a.estimate, b.estimate));
        CHECK(same_bits(a.std_error, b.std_error));
        CHECK(a.M == 3000);
        CHECK(a.workers == w);
        const auto c = mc_estimate(model, 2000, 5000, 99, w);
        const auto d = mc_estimate(model, 2000, 5000, 99, w);
        CHECK(same_bits(c.estimate, d.estimate));
    }
    const auto e = is_estimate(model, 15000, 3000, 100, 1);
    CHECK_FALSE(same_bits(e.estimate, is_estimate(model, 15000, 3000, 99, 1).estimate));
}

TEST_CASE("below the mean IS has unit weights and agrees with MC") {
    const auto model = abel_ig();
    const double x = 200.0;
    const auto mc = mc_estimate(model, x, 100000, 5);
    const auto is = is_estimate(model, x, 100000, 6);
    CHECK(is.theta_star == 0.0);
    CHECK(std::abs(mc.estimate - is.estimate) <= 3.0 * std::hypot(mc.std_error, is.std_error));
}

TEST_CASE("mc and is agree at a moderate level") {
    const auto model = abel_ig();
    const auto mc = mc_estimate(model, 5000, 100000, 21);
    const auto is = is_estimate(model, 5000, 20000, 22);
    CHECK(std::abs(mc.estimate - is.estimate) <= 3.0 * std::hypot(mc.std_error, is.std_error));
}

TEST_CASE("adaptive: converges in the low thousands for IS at x = 5000") {
    const auto r = adaptive_sample_size(abel_ig(), 5000, 0.10, Method::is, 1);
    CHECK(r.converged);
    CHECK(r.M >= 1000);
    CHECK(r.M <= 32000);
    CHECK(r.std_error <= 0.10 * r.estimate);
}

TEST_CASE("adaptive: all-zero batches do not divide by zero") {
    AdaptiveOptions opt;
    opt.budget = 16000;
    const auto r = adaptive_sample_size(abel_ig(), 1e7, 0.10, Method::mc, 1, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.estimate == 0.0);
    CHECK(r.M <= 16000);
    CHECK(r.M >= 8000);
    CHECK(std::isinf(r.relative_error()));
}

TEST_CASE("bad run arguments") {
    const auto model = abel_ig();
    CHECK_THROWS_AS(mc_estimate(model, -1.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(mc_estimate(model, 10.0, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(adaptive_sample_size(model, 10.0, 1.5, Method::mc, 1), std::invalid_argument);
    CHECK_THROWS_AS(parse_method("qmc"), std::invalid_argument);
}

TEST_CASE("Welford merge equals a single pass") {
    Rng rng(3);
    std::vector<double> xs(10001);
    for (auto& x : xs) x = rng.uniform() < 0.1 ? rng.exponential() * 1e-3 : 0.0;
    RunningStats whole, a, b, c;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        whole.push(xs[i]);
        (i < 17 ? a : i < 6000 ? b : c).push(xs[i]);
    }
    RunningStats merged;
    merged.merge(a);
    merged.merge(b);
    merged.merge(RunningStats{});
    merged.merge(c);
    const auto mo = oracle::moments(xs);
    CHECK(merged.n == whole.n);
    CHECK(merged.hits == whole.hits);
    CHECK(merged.mean == Approx(mo.mean).epsilon(1e-12));
    CHECK(merged.std_error() == Approx(std::sqrt(mo.var / xs.size())).epsilon(1e-10));
    CHECK(whole.std_error() == Approx(std::sqrt(mo.var / xs.size())).epsilon(1e-10));
}

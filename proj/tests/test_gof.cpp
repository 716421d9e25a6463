#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include <nefrisk/gof.hpp>
#include <nefrisk/random.hpp>

#include "oracles.hpp"

using namespace nefrisk;
using Catch::Approx;

TEST_CASE("a sample against itself has statistic 0 and p = 1") {
    Rng rng(1);
    std::vector<double> xs(500);
    for (auto& x : xs) x = rng.exponential();
    const auto r = chi_square_two_sample(xs, xs);
    CHECK(r.statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(r.dof == static_cast<int>(r.bins.size()) - 1);
}

TEST_CASE("hand-computed two-bin example") {
    // pooled: 110 ones and 90 twos -> one interior edge at 1;
    // observed (60, 40), expected (50, 50), X^2 = 4 on 1 dof
    std::vector<double> data(60, 1.0), sim(50, 1.0);
    data.resize(100, 2.0);
    sim.resize(100, 2.0);
    const auto r = chi_square_two_sample(data, sim, 3);
    REQUIRE(r.bins.size() == 2);
    CHECK(r.bins[0].observed == 60);
    CHECK(r.bins[0].expected == 50);
    CHECK(r.statistic == Approx(4.0));
    CHECK(r.dof == 1);
    CHECK(r.p_value == Approx(oracle::chi2_sf(4.0, 1)).epsilon(1e-12));
    CHECK(r.p_value == Approx(std::erfc(std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("expected counts are at least 5 and scale with the sample sizes") {
    Rng rng(2);
    std::vector<double> data(60), sim(5000);
    for (auto& x : data) x = rng.gamma(0.3);
    for (auto& x : sim) x = rng.gamma(0.3);
    const auto r = chi_square_two_sample(data, sim, 40);
    double obs = 0, ex = 0;
    for (const auto& b : r.bins) {
        CHECK(b.expected >= 5.0);
        obs += b.observed;
        ex += b.expected;
    }
    CHECK(obs == 60);
    CHECK(ex == Approx(60.0));
    CHECK(std::isinf(r.bins.back().upper));
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
}

TEST_CASE("permuting either sample changes nothing") {
    Rng rng(3);
    std::vector<double> a(300), b(900);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal() + 0.2;
    const auto r1 = chi_square_two_sample(a, b);
    std::mt19937 g(4);
    std::shuffle(a.begin(), a.end(), g);
    std::shuffle(b.begin(), b.end(), g);
    const auto r2 = chi_square_two_sample(a, b);
    CHECK(r1.statistic == r2.statistic);
    CHECK(r1.p_value == r2.p_value);
}

TEST_CASE("a clear shift is rejected, a same-law sample is not") {
    Rng rng(5);
    std::vector<double> a(1000), b(4000), c(1000);
    for (auto& x : a) x = rng.exponential();
    for (auto& x : b) x = rng.exponential();
    for (auto& x : c) x = 1.5 * rng.exponential();
    CHECK(chi_square_two_sample(a, b).p_value > 0.001);
    CHECK(chi_square_two_sample(c, b).p_value < 1e-6);
}

TEST_CASE("argument errors") {
    std::vector<double> same(100, 3.0), few(10, 1.0), ok(100);
    for (std::size_t i = 0; i < ok.size(); ++i) ok[i] = static_cast<double>(i);
    CHECK_THROWS_AS(chi_square_two_sample(same, same), std::invalid_argument);
    CHECK_THROWS_AS(chi_square_two_sample(few, ok), std::invalid_argument);
    CHECK_THROWS_AS(chi_square_two_sample(ok, ok, 2), std::invalid_argument);
}

TEST_CASE("normalized histogram") {
    const std::vector<double> xs = {0.1, 0.2, 1.5, 2.0, 7.0};
    const std::vector<double> edges = {0.0, 1.0, 2.0};
    const auto h = normalized_histogram(xs, edges);
    REQUIRE(h.size() == 2);
    CHECK(h[0] == Approx(0.4));
    CHECK(h[1] == Approx(0.4));  // 2.0 sits on the closed right edge; 7.0 is outside
    CHECK_THROWS_AS(normalized_histogram(xs, std::vector<double>{1.0}), std::invalid_argument);
}

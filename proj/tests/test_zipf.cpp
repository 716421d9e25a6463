#include <catch_amalgamated.hpp>

#include <vector>

#include <nefrisk/zipf.hpp>

#include "oracles.hpp"

using namespace nefrisk;
using namespace nefrisk::zipf;
using Catch::Approx;

TEST_CASE("floor(U^-2) on fixed uniforms") {
    CHECK(proposal_from_uniform(0.5) == 4);
    CHECK(proposal_from_uniform(0.9) == 1);
    CHECK(proposal_from_uniform(1e-300) == kMaxProposal);
}

TEST_CASE("double zipf on fixed uniforms") {
    CHECK(double_zipf_from_uniforms(0.5, 0.3) == 8);
    CHECK(double_zipf_from_uniforms(0.5, 0.7) == 9);
}

TEST_CASE("proposal pmf values") {
    CHECK(proposal_pmf(1) == Approx(1.0 - 1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(proposal_pmf(3) == Approx(1.0 / std::sqrt(3.0) - 0.5).epsilon(1e-13));
    CHECK(double_zipf_pmf(2) == Approx(0.5 * (1.0 - 1.0 / std::sqrt(2.0))).epsilon(1e-14));
    CHECK(double_zipf_pmf(3) == double_zipf_pmf(2));
    CHECK(std::exp(log_proposal_pmf(17)) == Approx(proposal_pmf(17)).epsilon(1e-13));
    CHECK(std::exp(log_double_zipf_pmf(17)) == Approx(double_zipf_pmf(17)).epsilon(1e-13));
}

TEST_CASE("pmf arguments out of range") {
    CHECK_THROWS_AS(proposal_pmf(0), DomainError);
    CHECK_THROWS_AS(log_proposal_pmf(-3), DomainError);
    CHECK_THROWS_AS(double_zipf_pmf(1), DomainError);
}

TEST_CASE("telescoping sums") {
    // Sum in reverse to keep the rounding error small.
    double s = 0.0;
    const std::int64_t N = 1'000'000;
    for (std::int64_t n = N; n >= 1; --n) s += proposal_pmf(n);
    CHECK(std::abs(s - (1.0 - 1.0 / std::sqrt(double(N) + 1.0))) <= 1e-12);

    double s2 = 0.0;
    const std::int64_t K = 4'000'000;
    for (std::int64_t n = 2 * K + 1; n >= 2; --n) s2 += double_zipf_pmf(n);
    // the pairs k = 1..K carry 1 - (K+1)^{-1/2}
    CHECK(std::abs(s2 - (1.0 - 1.0 / std::sqrt(double(K) + 1.0))) <= 1e-10);
}

TEST_CASE("large-n evaluation does not cancel") {
    const std::int64_t n = 1'000'000'000'000LL;
    const double x = static_cast<double>(n);
    // b(n) ~ 1/(2 n^{3/2}) (1 - 3/(4n))
    CHECK(proposal_pmf(n) == Approx(0.5 / (x * std::sqrt(x)) * (1.0 - 0.75 / x)).epsilon(1e-9));
}

TEST_CASE("pmf is positive and strictly decreasing") {
    double prev = 1.0;
    for (std::int64_t n = 1; n <= 100000; ++n) {
        const double b = proposal_pmf(n);
        REQUIRE(b > 0.0);
        REQUIRE(b < prev);
        prev = b;
    }
}

TEST_CASE("zipf(3/2) is dominated by c b(n)") {
    for (std::int64_t n = 1; n <= 100000; ++n) {
        REQUIRE(zipf_pmf(n) <= kZipfDominance * proposal_pmf(n) * (1.0 + 1e-12));
    }
    // n^{-3/2} <= sqrt2/(sqrt2-1) b(n), used by all counting samplers
    for (std::int64_t n = 1; n <= 100000; ++n) {
        const double x = static_cast<double>(n);
        REQUIRE(1.0 / (x * std::sqrt(x)) <= kPowerToProposal * proposal_pmf(n) * (1.0 + 1e-12));
    }
}

TEST_CASE("zeta constants") {
    double z2 = 0.0;
    for (int k = 100000; k >= 1; --k) z2 += 1.0 / (double(k) * k);
    CHECK(z2 + 1.0 / 100000.5 == Approx(kZeta2).epsilon(1e-12));
    double z32 = 0.0;
    const double N = 1e6;
    for (int k = 1000000; k >= 1; --k) z32 += 1.0 / (double(k) * std::sqrt(double(k)));
    // Euler-Maclaurin tail: 2/sqrt(N) - 1/(2 N^{3/2})
    z32 += 2.0 / std::sqrt(N) - 0.5 / (N * std::sqrt(N));
    CHECK(z32 == Approx(kZeta3Over2).epsilon(1e-10));
}

TEST_CASE("empirical proposal pmf matches b(n) within 3 sigma") {
    Rng rng(7);
    const int N = 1'000'000;
    std::vector<int> cnt(11, 0);
    std::vector<int> cnt2(22, 0);
    for (int i = 0; i < N; ++i) {
        const auto n = sample_proposal(rng);
        if (n <= 10) ++cnt[n];
        const auto m = sample_double_zipf(rng);
        REQUIRE(m >= 2);
        if (m <= 21) ++cnt2[m];
    }
    for (int n = 1; n <= 10; ++n) {
        const double p = proposal_pmf(n);
        INFO("n=" << n);
        CHECK(std::abs(cnt[n] - N * p) <= 3.0 * std::sqrt(N * p * (1 - p)));
    }
    for (int n = 2; n <= 21; ++n) {
        const double p = double_zipf_pmf(n);
        INFO("n=" << n);
        CHECK(std::abs(cnt2[n] - N * p) <= 3.0 * std::sqrt(N * p * (1 - p)));
    }
}

TEST_CASE("sampler and pmf agree by chi-square") {
    Rng rng(11);
    std::vector<std::int64_t> d(200000);
    for (auto& x : d) x = sample_proposal(rng) - 1;  // shift to start at 0
    const double pv = oracle::discrete_gof_pvalue(d, [](std::int64_t k) { return proposal_pmf(k + 1); }, 200);
    CHECK(pv > 0.001);
}

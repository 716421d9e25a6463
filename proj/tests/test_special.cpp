#include <catch_amalgamated.hpp>

#include <complex>

#include <nefrisk/special.hpp>

using namespace nefrisk::special;
using Catch::Approx;

namespace {

// Re log Gamma(x+iy) - log Gamma(x) by the product formula
// |Gamma(x+iy)/Gamma(x)|^2 = prod_k 1/(1 + y^2/(x+k)^2), truncated with an
// integral tail estimate.
double shift_by_product(double x, double y) {
    double s = 0.0;
    const int K = 2'000'000;
    for (int k = K - 1; k >= 0; --k) {
        const double t = y / (x + k);
        s -= 0.5 * std::log1p(t * t);
    }
    // tail sum_{k>=K} y^2/(2 (x+k)^2) ~ y^2 / (2 (x+K-0.5))
    s -= y * y / (2.0 * (x + K - 0.5));
    return s;
}

} // namespace

TEST_CASE("complex log-gamma shift against the infinite product") {
    for (double x : {0.5, 1.0, 2.5, 7.0, 19.5, 40.0, 300.0}) {
        for (double y : {0.1, 1.3, 2.6}) {
            INFO("x=" << x << " y=" << y);
            CHECK(log_abs_gamma_shift(x, y) == Approx(shift_by_product(x, y)).margin(1e-9));
        }
    }
}

TEST_CASE("complex log-gamma shift at y = 0 is zero") {
    CHECK(log_abs_gamma_shift(3.0, 0.0) == Approx(0.0).margin(1e-15));
    CHECK(log_abs_gamma_shift(3000.0, 0.0) == Approx(0.0).margin(1e-15));
}

TEST_CASE("|Gamma(1+iy)|^2 = pi y / sinh(pi y)") {
    const double pi = std::numbers::pi;
    for (double y : {0.3, 1.0, 2.5}) {
        CHECK(2.0 * log_abs_gamma_shift(1.0, y) == Approx(std::log(pi * y / std::sinh(pi * y))).epsilon(1e-12));
    }
}

TEST_CASE("half-step log-gamma difference") {
    for (double x : {0.5, 1.0, 5.0, 19.9, 20.0, 123.25, 1e5}) {
        INFO("x=" << x);
        const double ref = std::lgamma(x + 0.5) - std::lgamma(x);
        CHECK(log_gamma_half_step(x) == Approx(ref).margin(1e-11 * std::max(1.0, std::abs(std::lgamma(x)))));
    }
    // large x: compare to the asymptotic 0.5 log x - 1/(8x)
    const double x = 1e12;
    CHECK(log_gamma_half_step(x) == Approx(0.5 * std::log(x) - 1.0 / (8.0 * x)).epsilon(1e-14));
}

TEST_CASE("log sinh and log cosh without overflow") {
    CHECK(log_sinh(0.5) == Approx(std::log(std::sinh(0.5))));
    CHECK(log_sinh(3.0) == Approx(std::log(std::sinh(3.0))));
    CHECK(log_cosh(3.0) == Approx(std::log(std::cosh(3.0))));
    CHECK(log_sinh(1000.0) == Approx(1000.0 - std::log(2.0)));
    CHECK(log_cosh(-1000.0) == Approx(1000.0 - std::log(2.0)));
}

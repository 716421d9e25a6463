#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace nefrisk::special {

namespace detail {

// B_{2k} / (2k (2k-1)), k = 1..7
inline constexpr std::array<double, 7> kStirling = {
    1.0 / 12.0,        -1.0 / 360.0,  1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0, 1.0 / 156.0};

inline constexpr double kShift = 20.0;

} // namespace detail

/// Re log Gamma(x + i y) - log Gamma(x) for x > 0, without forming either
/// log-gamma value (both grow like x log x and cancel).
inline double log_abs_gamma_shift(double x, double y) {
    double acc = 0.0;
    while (x < detail::kShift) {
        const double t = y / x;
        acc -= 0.5 * std::log1p(t * t);
        x += 1.0;
    }
    const double t = y / x;
    double val = (x - 0.5) * 0.5 * std::log1p(t * t) - y * std::atan(t);
    const std::complex<double> z(x, y);
    const std::complex<double> zinv = 1.0 / z;
    const std::complex<double> zinv2 = zinv * zinv;
    const double xinv = 1.0 / x;
    const double xinv2 = xinv * xinv;
    std::complex<double> zp = zinv;
    double xp = xinv;
    for (double c : detail::kStirling) {
        val += c * (zp.real() - xp);
        zp *= zinv2;
        xp *= xinv2;
    }
    return acc + val;
}

/// log Gamma(x + 1/2) - log Gamma(x) for x > 0.
inline double log_gamma_half_step(double x) {
    if (x < detail::kShift) {
        return std::lgamma(x + 0.5) - std::lgamma(x);
    }
    // Stirling difference; n log1p(1/2n) - 1/2 is O(1/n) and carries no
    // large cancellation.
    double val = x * std::log1p(0.5 / x) - 0.5 + 0.5 * std::log(x);
    const double a = 1.0 / (x + 0.5);
    const double b = 1.0 / x;
    double ap = a;
    double bp = b;
    for (double c : detail::kStirling) {
        val += c * (ap - bp);
        ap *= a * a;
        bp *= b * b;
    }
    return val;
}

/// log sinh(t) for t > 0, overflow-free.
inline double log_sinh(double t) {
    if (t < 1.0) {
        return std::log(std::sinh(t));
    }
    return t + std::log1p(-std::exp(-2.0 * t)) - std::numbers::ln2;
}

/// log cosh(t), overflow-free.
inline double log_cosh(double t) {
    t = std::abs(t);
    return t + std::log1p(std::exp(-2.0 * t)) - std::numbers::ln2;
}

} // namespace nefrisk::special

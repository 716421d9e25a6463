#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "random.hpp"

namespace nefrisk::zipf {

inline constexpr double kZeta3Over2 = 2.612375348685488343348567567924071630570800652;
inline constexpr double kZeta2 = std::numbers::pi * std::numbers::pi / 6.0;

/// Devroye's constant for z(n) <= c b(n), z the Zipf(3/2) pmf.
inline const double kZipfDominance =
    std::numbers::sqrt2 / (kZeta3Over2 * (std::numbers::sqrt2 - 1.0));

/// n^{-3/2} <= kPowerToProposal * b(n) for all n >= 1.
inline const double kPowerToProposal = std::numbers::sqrt2 / (std::numbers::sqrt2 - 1.0);

// Proposals above this are clamped; the mass beyond it is below 5e-10 and a
// clamped value is always rejected by the counting samplers (theta < 0).
inline constexpr std::int64_t kMaxProposal = std::int64_t{1} << 62;

inline double zipf_pmf(std::int64_t n) {
    const double x = static_cast<double>(n);
    return 1.0 / (kZeta3Over2 * x * std::sqrt(x));
}

/// b(n) = P(floor(U^-2) = n) = n^{-1/2} - (n+1)^{-1/2}, written without the
/// subtraction.
inline double proposal_pmf(std::int64_t n) {
    if (n < 1) {
        throw DomainError("proposal_pmf: n must be >= 1, got " + std::to_string(n));
    }
    const double a = std::sqrt(static_cast<double>(n));
    const double b = std::sqrt(static_cast<double>(n) + 1.0);
    return 1.0 / (a * b * (a + b));
}

inline double log_proposal_pmf(std::int64_t n) {
    if (n < 1) {
        throw DomainError("log_proposal_pmf: n must be >= 1, got " + std::to_string(n));
    }
    const double a = std::sqrt(static_cast<double>(n));
    const double b = std::sqrt(static_cast<double>(n) + 1.0);
    return -(std::log(a) + std::log(b) + std::log(a + b));
}

/// floor(u^-2) for a given uniform; exposed for deterministic tests.
inline std::int64_t proposal_from_uniform(double u) {
    const double v = 1.0 / (u * u);
    if (!(v < static_cast<double>(kMaxProposal))) {
        return kMaxProposal;
    }
    return static_cast<std::int64_t>(std::floor(v));
}

inline std::int64_t sample_proposal(Rng& rng) { return proposal_from_uniform(rng.uniform()); }

/// b2(2k) = b2(2k+1) = b(k) / 2 for k >= 1.
inline double double_zipf_pmf(std::int64_t n) {
    if (n < 2) {
        throw DomainError("double_zipf_pmf: n must be >= 2, got " + std::to_string(n));
    }
    return 0.5 * proposal_pmf(n / 2);
}

inline double log_double_zipf_pmf(std::int64_t n) {
    if (n < 2) {
        throw DomainError("log_double_zipf_pmf: n must be >= 2, got " + std::to_string(n));
    }
    return log_proposal_pmf(n / 2) - std::numbers::ln2;
}

inline std::int64_t double_zipf_from_uniforms(double u_base, double u_coin) {
    const std::int64_t y = std::min(proposal_from_uniform(u_base), kMaxProposal / 2);
    return u_coin < 0.5 ? 2 * y : 2 * y + 1;
}

inline std::int64_t sample_double_zipf(Rng& rng) {
    const double u_base = rng.uniform();
    const double u_coin = rng.uniform();
    return double_zipf_from_uniforms(u_base, u_coin);
}

} // namespace nefrisk::zipf

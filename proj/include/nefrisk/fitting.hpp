#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>

#include "claims.hpp"
#include "counting.hpp"
#include "errors.hpp"

namespace nefrisk {

struct SampleMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t count = 0;
};

/// Sample mean and unbiased (n-1) variance.
inline SampleMoments moments_of(std::span<const double> xs) {
    if (xs.size() < 2) {
        throw std::invalid_argument("moments_of: need at least 2 observations");
    }
    double mean = 0.0;
    double m2 = 0.0;
    std::uint64_t n = 0;
    for (double x : xs) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    return {mean, m2 / static_cast<double>(n - 1), n};
}

/// Dispersion p of the counting family whose mean-m member has variance v.
inline double fit_counting_dispersion(CountingFamily family, const SampleMoments& mo) {
    const double m = mo.mean;
    const double v = mo.variance;
    if (!(m > 0.0) || !std::isfinite(m) || !std::isfinite(v)) {
        throw FitError("counting fit: mean must be positive and moments finite");
    }
    const std::string name(to_string(family));
    if (family == CountingFamily::poisson) {
        return 0.0;
    }
    if (!(v > m)) {
        throw FitError(name + " family requires overdispersion (variance " + std::to_string(v) +
                       " <= mean " + std::to_string(m) + ")");
    }
    const double sm = std::sqrt(m);
    switch (family) {
    case CountingFamily::abel:
        return m * sm / (std::sqrt(v) - sm);
    case CountingFamily::arcsine:
        return m * sm / std::sqrt(v - m);
    case CountingFamily::takacs:
        return 4.0 * m * sm / (std::sqrt(m + 8.0 * v) - 3.0 * sm);
    case CountingFamily::poisson:
        break;
    }
    return 0.0;
}

inline CountingDist fit_counting(CountingFamily family, const SampleMoments& mo) {
    return make_counting(family, fit_counting_dispersion(family, mo), mo.mean);
}

/// Claim-size moments from count and aggregate moments via
/// Var(S) = E[N] Var(Y) + Var(N) E[Y]^2.
inline SampleMoments recover_claim_moments(const SampleMoments& count_moments,
                                           const SampleMoments& aggregate_moments, double total_claims,
                                           double total_payment) {
    if (!(total_claims > 0.0)) {
        throw DataError("recover_claim_moments: total claim count must be positive");
    }
    if (!(count_moments.mean > 0.0)) {
        throw DataError("recover_claim_moments: mean claim count must be positive");
    }
    const double my = total_payment / total_claims;
    const double vy = (aggregate_moments.variance - count_moments.variance * my * my) / count_moments.mean;
    if (!(vy > 0.0)) {
        throw DataError("recover_claim_moments: implied claim-size variance " + std::to_string(vy) +
                        " is not positive; count and aggregate moments are inconsistent");
    }
    return {my, vy, aggregate_moments.count};
}

/// Fitted compound model plus the moments it came from.
struct FittedModel {
    CountingFamily counting_family = CountingFamily::abel;
    double p_N = 0.0;
    double m_N = 0.0;
    ClaimFamily claim_family = ClaimFamily::gamma;
    /// Gamma: (p, theta); IG: (p, theta); stable: (alpha, theta).
    double claim_dispersion = 0.0;
    double claim_theta = 0.0;
    SampleMoments count_moments;
    SampleMoments claim_moments;
    std::string source;

    CountingDist counting() const { return make_counting(counting_family, p_N, m_N); }
    ClaimDist claim() const {
        switch (claim_family) {
        case ClaimFamily::gamma: return GammaClaim(claim_dispersion, claim_theta);
        case ClaimFamily::inverse_gaussian: return InverseGaussianClaim(claim_dispersion, claim_theta);
        case ClaimFamily::positive_stable: return PositiveStableClaim(claim_dispersion, claim_theta);
        }
        throw std::invalid_argument("FittedModel: bad claim family");
    }
};

inline FittedModel fit_model(CountingFamily cf, ClaimFamily yf, const SampleMoments& count_moments,
                             const SampleMoments& claim_moments, std::string source = {}) {
    FittedModel f;
    f.counting_family = cf;
    f.p_N = fit_counting_dispersion(cf, count_moments);
    f.m_N = count_moments.mean;
    f.claim_family = yf;
    const ClaimDist c = claim_from_moments(yf, claim_moments.mean, claim_moments.variance);
    f.claim_dispersion = dispersion_of(c);
    f.claim_theta = theta_of(c);
    f.count_moments = count_moments;
    f.claim_moments = claim_moments;
    f.source = std::move(source);
    return f;
}

} // namespace nefrisk

#pragma once

#include <array>
#include <cstdint>

#include "claims.hpp"
#include "counting.hpp"
#include "engine.hpp"
#include "fitting.hpp"

// Swedish motor third-party data, larger-cities subset (630 cells): summary
// statistics and the two-moment fits used throughout the examples and tests.
namespace nefrisk::case_study {

inline constexpr double kCountMean = 70.60;
inline constexpr double kCountVariance = 52181.52;
inline constexpr double kAggregateMean = 329.22;
inline constexpr double kAggregateVariance = 1153532.32;
inline constexpr double kClaimMean = 4.66;
inline constexpr double kClaimVariance = 265.34;
inline constexpr std::uint64_t kRows = 630;

inline constexpr double kAbelP = 2.695844;
inline constexpr double kArcsineP = 2.598444;
inline constexpr double kTakacsP = 3.821015;

inline constexpr double kGammaTheta = 0.982425;
inline constexpr double kGammaP = 0.081960;
inline constexpr double kIgTheta = -0.008788;
inline constexpr double kIgP = 2.616360;
inline constexpr double kStableTheta = -0.015496;
inline constexpr double kStableP = 2.134192;
inline constexpr double kStableAlpha = 0.118315;

inline SampleMoments count_moments() { return {kCountMean, kCountVariance, kRows}; }
inline SampleMoments aggregate_moments() { return {kAggregateMean, kAggregateVariance, kRows}; }
inline SampleMoments claim_moments() { return {kClaimMean, kClaimVariance, kRows}; }

inline double counting_p(CountingFamily f) {
    switch (f) {
    case CountingFamily::abel: return kAbelP;
    case CountingFamily::arcsine: return kArcsineP;
    case CountingFamily::takacs: return kTakacsP;
    case CountingFamily::poisson: return 0.0;
    }
    return 0.0;
}

inline CountingDist counting(CountingFamily f) { return make_counting(f, counting_p(f), kCountMean); }

inline ClaimDist claim(ClaimFamily f) {
    switch (f) {
    case ClaimFamily::gamma: return GammaClaim(kGammaP, kGammaTheta);
    case ClaimFamily::inverse_gaussian: return InverseGaussianClaim(kIgP, kIgTheta);
    case ClaimFamily::positive_stable: return PositiveStableClaim(kStableAlpha, kStableTheta);
    }
    throw std::invalid_argument("case_study::claim: bad family");
}

inline CompoundModel model(CountingFamily n, ClaimFamily y) { return {counting(n), claim(y)}; }

inline constexpr std::array<CountingFamily, 3> kCountingFamilies = {
    CountingFamily::abel, CountingFamily::arcsine, CountingFamily::takacs};
inline constexpr std::array<ClaimFamily, 3> kClaimFamilies = {
    ClaimFamily::gamma, ClaimFamily::inverse_gaussian, ClaimFamily::positive_stable};

/// One row of a published estimate table.
struct TableRow {
    double x;
    std::uint64_t M;
    double estimate;
};

// Abel + inverse Gaussian, plain Monte Carlo.
inline constexpr std::array<TableRow, 5> kAbelIgMc = {{
    {5000, 9000, 1.08e-2},
    {10000, 37000, 2.59e-3},
    {15000, 150000, 6.47e-4},
    {20000, 410000, 2.37e-4},
    {25000, 1020000, 9.51e-5},
}};

// Abel + inverse Gaussian, importance sampling.
inline constexpr std::array<TableRow, 10> kAbelIgIs = {{
    {5000, 4000, 1.01e-2},
    {10000, 6000, 2.46e-3},
    {15000, 10000, 7.18e-4},
    {20000, 14000, 2.22e-4},
    {25000, 16000, 8.48e-5},
    {30000, 20000, 3.59e-5},
    {35000, 26000, 1.29e-5},
    {40000, 34000, 4.42e-6},
    {45000, 34000, 2.18e-6},
    {50000, 40000, 7.68e-7},
}};

// Arcsine + positive stable, plain Monte Carlo.
inline constexpr std::array<TableRow, 5> kArcsineStableMc = {{
    {5000, 10000, 1.02e-2},
    {10000, 46000, 2.11e-3},
    {15000, 128000, 7.64e-4},
    {20000, 394000, 2.49e-4},
    {25000, 1360000, 7.13e-5},
}};

// Arcsine + positive stable, importance sampling.
inline constexpr std::array<TableRow, 10> kArcsineStableIs = {{
    {5000, 4000, 9.89e-3},
    {10000, 7000, 2.23e-3},
    {15000, 9000, 8.12e-4},
    {20000, 14000, 2.21e-4},
    {25000, 16000, 8.37e-5},
    {30000, 20000, 4.18e-5},
    {35000, 24000, 1.42e-5},
    {40000, 30000, 5.10e-6},
    {45000, 36000, 2.31e-6},
    {50000, 38000, 1.08e-6},
}};

/// The tables report M chosen for roughly 10% relative standard error.
inline constexpr double kTableRelativeError = 0.10;

} // namespace nefrisk::case_study

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace nefrisk {

struct GofBin {
    /// Upper edge of the bin; the last bin is open (+inf).
    double upper = 0.0;
    double observed = 0.0;
    double expected = 0.0;
};

struct GofResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::vector<GofBin> bins;
};

inline constexpr double kMinExpected = 5.0;

/// Chi-square comparison of `data` against a simulated reference.
///
/// Bin edges are equal-probability quantiles of the pooled sample (ties
/// collapse edges). Expected counts are n_data * sim_count / n_sim; bins are
/// merged left to right until each expects at least 5.
inline GofResult chi_square_two_sample(std::span<const double> data, std::span<const double> simulated,
                                       int target_bins = 20) {
    if (data.size() < 50 || simulated.size() < 50) {
        throw std::invalid_argument("chi_square_two_sample: need at least 50 values per sample");
    }
    if (target_bins < 3) {
        throw std::invalid_argument("chi_square_two_sample: target_bins must be >= 3");
    }
    std::vector<double> pooled(data.begin(), data.end());
    pooled.insert(pooled.end(), simulated.begin(), simulated.end());
    std::sort(pooled.begin(), pooled.end());
    if (pooled.front() == pooled.back()) {
        throw std::invalid_argument("chi_square_two_sample: degenerate samples (all values equal)");
    }

    std::vector<double> edges;
    for (int k = 1; k < target_bins; ++k) {
        const std::size_t idx = static_cast<std::size_t>(
            std::ceil(static_cast<double>(k) * static_cast<double>(pooled.size()) / target_bins)) - 1;
        const double e = pooled[std::min(idx, pooled.size() - 1)];
        if (e < pooled.back() && (edges.empty() || e > edges.back())) {
            edges.push_back(e);
        }
    }
    edges.push_back(std::numeric_limits<double>::infinity());

    auto counts = [&](std::span<const double> xs) {
        std::vector<double> c(edges.size(), 0.0);
        for (double x : xs) {
            const auto it = std::lower_bound(edges.begin(), edges.end(), x);
            ++c[static_cast<std::size_t>(it - edges.begin())];
        }
        return c;
    };
    const std::vector<double> obs = counts(data);
    const std::vector<double> sim = counts(simulated);
    const double ratio = static_cast<double>(data.size()) / static_cast<double>(simulated.size());

    GofResult r;
    GofBin cur{};
    for (std::size_t i = 0; i < edges.size(); ++i) {
        cur.observed += obs[i];
        cur.expected += ratio * sim[i];
        cur.upper = edges[i];
        if (cur.expected >= kMinExpected) {
            r.bins.push_back(cur);
            cur = GofBin{};
        }
    }
    if (cur.observed > 0.0 || cur.expected > 0.0) {
        if (r.bins.empty()) {
            r.bins.push_back(cur);
        } else {
            r.bins.back().observed += cur.observed;
            r.bins.back().expected += cur.expected;
            r.bins.back().upper = cur.upper;
        }
    }
    for (const auto& b : r.bins) {
        r.statistic += (b.observed - b.expected) * (b.observed - b.expected) / b.expected;
    }
    r.dof = static_cast<int>(r.bins.size()) - 1;
    if (r.dof < 1) {
        r.p_value = 1.0;
    } else if (r.statistic <= 0.0) {
        r.p_value = 1.0;
    } else {
        r.p_value = boost::math::gamma_q(0.5 * r.dof, 0.5 * r.statistic);
    }
    return r;
}

/// Histogram of values over fixed edges, normalized to unit mass.
inline std::vector<double> normalized_histogram(std::span<const double> xs, std::span<const double> edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("normalized_histogram: need at least two edges");
    }
    std::vector<double> h(edges.size() - 1, 0.0);
    for (double x : xs) {
        if (x < edges.front() || x > edges.back()) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        std::size_t i = static_cast<std::size_t>(it - edges.begin());
        i = i == 0 ? 0 : std::min(i - 1, h.size() - 1);
        h[i] += 1.0;
    }
    if (!xs.empty()) {
        for (double& v : h) v /= static_cast<double>(xs.size());
    }
    return h;
}

} // namespace nefrisk

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>

#include "errors.hpp"
#include "nef_core.hpp"
#include "random.hpp"

namespace nefrisk {

enum class ClaimFamily { gamma, inverse_gaussian, positive_stable };

inline std::string_view to_string(ClaimFamily f) {
    switch (f) {
    case ClaimFamily::gamma: return "gamma";
    case ClaimFamily::inverse_gaussian: return "inverse_gaussian";
    case ClaimFamily::positive_stable: return "positive_stable";
    }
    return "?";
}

inline ClaimFamily parse_claim_family(std::string_view s) {
    if (s == "gamma") return ClaimFamily::gamma;
    if (s == "ig" || s == "inverse_gaussian") return ClaimFamily::inverse_gaussian;
    if (s == "stable" || s == "positive_stable") return ClaimFamily::positive_stable;
    throw std::invalid_argument("unknown claim family: " + std::string(s));
}

inline constexpr std::uint64_t kStableArCap = 10'000'000;
inline constexpr double kMinStableAlpha = 0.01;

// ---------------------------------------------------------------------------

/// Gamma with shape p and rate 1 - theta.
struct GammaClaim {
    double p;
    double theta;

    GammaClaim(double p_, double theta_) : p(p_), theta(theta_) {
        require_positive(p, "Gamma shape p");
        if (!(theta < 1.0)) {
            throw DomainError("Gamma natural parameter must be < 1");
        }
    }

    double mean() const { return p / (1.0 - theta); }
    double variance() const { return p / ((1.0 - theta) * (1.0 - theta)); }
    double kappa() const { return kappa_at(theta); }
    double kappa_at(double t) const { return -p * std::log1p(-t); }
    double dispersion() const { return p; }
    NefCurve curve() const { return gamma_curve(p); }
    ReproMap repro() const { return gamma_repro(); }
    GammaClaim with_theta(double t) const { return GammaClaim(p, t); }

    double sample(Rng& rng) const { return rng.gamma(p) / (1.0 - theta); }
    double sample_sum(std::int64_t n, Rng& rng) const {
        return rng.gamma(static_cast<double>(n) * p) / (1.0 - theta);
    }
};

/// Inverse Gaussian: mean 1/sqrt(-2 p theta), shape lambda = 1/p.
struct InverseGaussianClaim {
    double p;
    double theta;

    InverseGaussianClaim(double p_, double theta_) : p(p_), theta(theta_) {
        require_positive(p, "inverse Gaussian dispersion p");
        if (!(theta < 0.0)) {
            throw DomainError("inverse Gaussian natural parameter must be < 0");
        }
    }

    double delta() const { return 1.0 / std::sqrt(p); }
    double gamma_par() const { return std::sqrt(-2.0 * theta); }
    double mean() const { return 1.0 / std::sqrt(-2.0 * p * theta); }
    double variance() const {
        const double m = mean();
        return p * m * m * m;
    }
    double kappa() const { return kappa_at(theta); }
    double kappa_at(double t) const { return -std::sqrt(-2.0 * t / p); }
    double dispersion() const { return p; }
    NefCurve curve() const { return inverse_gaussian_curve(p); }
    ReproMap repro() const { return inverse_gaussian_repro(); }
    InverseGaussianClaim with_theta(double t) const { return InverseGaussianClaim(p, t); }

    /// Density of the n-fold sum (dispersion p/n^2, same theta).
    double log_density_sum(std::int64_t n, double s) const {
        const double pn = p / (static_cast<double>(n) * static_cast<double>(n));
        const double mu = 1.0 / std::sqrt(-2.0 * pn * theta);
        const double lambda = 1.0 / pn;
        return 0.5 * (std::log(lambda) - std::log(2.0 * std::numbers::pi) - 3.0 * std::log(s)) -
               lambda * (s - mu) * (s - mu) / (2.0 * mu * mu * s);
    }

    double sample(Rng& rng) const { return draw(mean(), 1.0 / p, rng); }
    double sample_sum(std::int64_t n, Rng& rng) const {
        const double nn = static_cast<double>(n);
        return draw(nn * mean(), nn * nn / p, rng);
    }

    // Michael, Schucany and Haas transformation with root selection.
    static double draw(double mu, double lambda, Rng& rng) {
        const double z = rng.normal();
        const double a = mu * z * z / (2.0 * lambda);
        const double x = mu / (1.0 + a + std::sqrt(a * (2.0 + a)));
        if (rng.uniform() * (mu + x) <= mu) {
            return x;
        }
        return mu * mu / x;
    }
};

/// Positive alpha-stable kernel (Laplace transform exp(-s^alpha)) tilted by theta <= 0.
struct PositiveStableClaim {
    double alpha;
    double theta;

    PositiveStableClaim(double alpha_, double theta_) : alpha(alpha_), theta(theta_) {
        if (!(alpha >= kMinStableAlpha && alpha < 1.0)) {
            throw DomainError("stable index alpha must lie in [0.01, 1)");
        }
        if (!(theta <= 0.0)) {
            throw DomainError("stable natural parameter must be <= 0");
        }
    }

    double sigma() const { return std::pow(std::cos(std::numbers::pi * alpha / 2.0), 1.0 / alpha); }
    double vf_power() const { return (2.0 - alpha) / (1.0 - alpha); }
    double vf_coef() const { return (1.0 - alpha) * std::pow(alpha, 1.0 / (alpha - 1.0)); }

    double mean() const { return alpha * std::pow(-theta, alpha - 1.0); }
    double variance() const { return alpha * (1.0 - alpha) * std::pow(-theta, alpha - 2.0); }
    double kappa() const { return kappa_at(theta); }
    double kappa_at(double t) const { return -std::pow(-t, alpha); }
    double dispersion() const { return alpha; }
    NefCurve curve() const { return positive_stable_curve(alpha); }
    ReproMap repro() const { return positive_stable_repro(alpha); }
    PositiveStableClaim with_theta(double t) const { return PositiveStableClaim(alpha, t); }

    /// log of one untilted draw sigma X, X ~ S_alpha(1,1,0), built in log
    /// space since small alpha produces values far outside double range.
    static double log_kernel_draw(double alpha, Rng& rng) {
        const double u = std::numbers::pi * rng.uniform();
        const double w = rng.exponential();
        return std::log(std::sin(alpha * u)) - std::log(std::sin(u)) / alpha +
               (1.0 - alpha) / alpha * (std::log(std::sin((1.0 - alpha) * u)) - std::log(w));
    }

    /// Accept-reject draw from the kernel tilted by t: propose sigma X,
    /// accept with probability exp(t Y).
    static double tilted_draw(double alpha, double t, Rng& rng, ArStats* stats = nullptr) {
        for (std::uint64_t it = 0; it < kStableArCap; ++it) {
            const double log_y = log_kernel_draw(alpha, rng);
            const double y = std::exp(log_y);
            if (stats) ++stats->proposals;
            if (t == 0.0 || std::log(rng.uniform()) < t * y) {
                if (stats) ++stats->accepted;
                return y;
            }
        }
        throw SimulationError("positive stable: accept-reject exceeded iteration cap");
    }

    double sample(Rng& rng, ArStats* stats = nullptr) const { return tilted_draw(alpha, theta, rng, stats); }

    /// n-fold sum. The sum of n kernels is n^{1/alpha} times one kernel; it is
    /// drawn as k pieces of (n/k)^{1/alpha} T_i with T_i tilted by
    /// theta (n/k)^{1/alpha}, where k >= n (-theta)^alpha keeps each piece's
    /// acceptance probability at least 1/e.
    double sample_sum(std::int64_t n, Rng& rng, ArStats* stats = nullptr) const {
        const double nn = static_cast<double>(n);
        const double load = nn * std::pow(-theta, alpha);
        const std::int64_t k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(load)));
        const double scale = std::pow(nn / static_cast<double>(k), 1.0 / alpha);
        const double t = theta * scale;
        double s = 0.0;
        for (std::int64_t i = 0; i < k; ++i) {
            s += tilted_draw(alpha, t, rng, stats);
        }
        return scale * s;
    }
};

using ClaimDist = std::variant<GammaClaim, InverseGaussianClaim, PositiveStableClaim>;

inline ClaimFamily family_of(const ClaimDist& d) { return static_cast<ClaimFamily>(d.index()); }

inline double mean_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.mean(); }, d);
}
inline double variance_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.variance(); }, d);
}
inline double theta_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.theta; }, d);
}
inline double kappa_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.kappa(); }, d);
}
/// Gamma shape, IG dispersion or stable index: whatever tilting leaves alone.
inline double dispersion_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.dispersion(); }, d);
}
inline NefCurve curve_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.curve(); }, d);
}
inline ReproMap repro_of(const ClaimDist& d) {
    return std::visit([](const auto& c) { return c.repro(); }, d);
}
inline ClaimDist with_theta(const ClaimDist& d, double theta) {
    return std::visit([theta](const auto& c) -> ClaimDist { return c.with_theta(theta); }, d);
}

inline double sample_claim(const ClaimDist& d, Rng& rng) {
    return std::visit([&rng](const auto& c) { return c.sample(rng); }, d);
}

/// One draw of Y_1 + ... + Y_n as a single variate (n >= 1).
inline double sample_claim_sum(const ClaimDist& d, std::int64_t n, Rng& rng) {
    if (n < 1) {
        throw DomainError("sample_claim_sum: n must be >= 1");
    }
    return std::visit([&](const auto& c) { return c.sample_sum(n, rng); }, d);
}

/// log f_{S_n}(s) / f~_{S_n}(s) for two members differing only in theta.
inline double log_density_ratio_sum(const ClaimDist& d, const ClaimDist& tilted, std::int64_t n, double s) {
    if (d.index() != tilted.index()) {
        throw std::invalid_argument("log_density_ratio_sum: claim families differ");
    }
    if (dispersion_of(d) != dispersion_of(tilted)) {
        throw std::invalid_argument("log_density_ratio_sum: dispersions differ");
    }
    const double dtheta = theta_of(d) - theta_of(tilted);
    return dtheta * s - static_cast<double>(n) * (kappa_of(d) - kappa_of(tilted));
}

// ---------------------------------------------------------------------------
// Two-moment fits
// ---------------------------------------------------------------------------

namespace detail {

inline double stable_vf_at(double alpha, double m) {
    const double power = (2.0 - alpha) / (1.0 - alpha);
    return (1.0 - alpha) * std::pow(alpha, 1.0 / (alpha - 1.0)) * std::pow(m, power);
}

// a(alpha) m^{P(alpha)} is U-shaped in alpha for the means of interest, so
// there can be two roots. We take the one closest to alpha = 0 (scan upward
// then bisect); the other root sits near alpha = 1 and has a mean that is
// extremely sensitive to theta.
inline double solve_stable_alpha(double m, double v) {
    auto g = [&](double a) { return std::log(stable_vf_at(a, m)) - std::log(v); };
    double lo = kMinStableAlpha;
    if (g(lo) < 0.0) {
        throw FitError("positive stable: variance " + std::to_string(v) +
                       " below the family's range at alpha=0.01 for this mean");
    }
    const double step = 1e-3;
    double hi = lo;
    while (true) {
        hi = lo + step;
        if (hi >= 1.0 - 1e-9) {
            throw FitError("positive stable: no alpha in (0,1) matches the requested variance");
        }
        if (g(hi) <= 0.0) break;
        lo = hi;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Member of the family with exactly the given mean and variance.
inline ClaimDist claim_from_moments(ClaimFamily family, double mean, double variance) {
    if (!(mean > 0.0) || !std::isfinite(mean)) {
        throw FitError("claim fit: mean must be positive");
    }
    if (!(variance > 0.0) || !std::isfinite(variance)) {
        throw FitError("claim fit: variance must be positive");
    }
    switch (family) {
    case ClaimFamily::gamma: {
        const double p = mean * mean / variance;
        return GammaClaim(p, 1.0 - p / mean);
    }
    case ClaimFamily::inverse_gaussian: {
        const double p = variance / (mean * mean * mean);
        return InverseGaussianClaim(p, -1.0 / (2.0 * p * mean * mean));
    }
    case ClaimFamily::positive_stable: {
        const double alpha = detail::solve_stable_alpha(mean, variance);
        const double theta = -std::pow(mean / alpha, 1.0 / (alpha - 1.0));
        return PositiveStableClaim(alpha, theta);
    }
    }
    throw std::invalid_argument("claim_from_moments: bad family");
}

} // namespace nefrisk

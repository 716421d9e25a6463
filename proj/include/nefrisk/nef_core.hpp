#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace nefrisk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
    double lo = -kInf;
    double hi = kInf;

    bool contains(double v) const { return v > lo && v < hi; }
};

/// One natural exponential family written in its mean parameterization.
///
/// theta_of_mean and kappa_of_mean are the normalized functions used in the
/// probability formulas of each family (integration constants already fixed),
/// so exp(theta(m) n - kappa(m)) times the family kernel is a probability.
/// mean_of_theta is optional; when empty, mean_from_theta falls back to
/// bisection on theta_of_mean.
struct NefCurve {
    std::string family;
    std::function<double(double)> theta_of_mean;
    std::function<double(double)> kappa_of_mean;
    std::function<double(double)> variance_of_mean;
    Interval mean_domain{0.0, kInf};
    Interval theta_domain;
    std::function<double(double)> mean_of_theta;
    /// Optional: theta_of_mean minus a constant. Used for finite differences
    /// when the constant would cancel most digits (Takacs, theta near -ln 4).
    std::function<double(double)> theta_shape;
};

/// c_n S_n ~ F_{g_n(theta)}.
struct ReproMap {
    std::function<double(std::int64_t)> scale;
    std::function<double(std::int64_t, double)> param_map;
};

namespace detail {

// Geometric bisection on a strictly increasing theta_of_mean. The bracket is
// grown by doubling/halving from m = 1 and then shrunk until it collapses in
// double precision.
inline double bisect_mean(const NefCurve& curve, double theta) {
    const auto& th = curve.theta_of_mean;
    const double dom_lo = curve.mean_domain.lo;
    const double dom_hi = curve.mean_domain.hi;
    double lo = 1.0;
    double hi = 1.0;
    if (!curve.mean_domain.contains(1.0)) {
        lo = hi = std::isfinite(dom_hi) ? 0.5 * (std::max(dom_lo, 0.0) + dom_hi) : dom_lo + 1.0;
    }
    int guard = 0;
    while (th(hi) < theta) {
        lo = hi;
        hi = std::isfinite(dom_hi) ? 0.5 * (hi + dom_hi) : 2.0 * hi;
        if (++guard > 4000) {
            throw DomainError(curve.family + ": cannot bracket mean for theta=" + std::to_string(theta));
        }
    }
    while (th(lo) > theta) {
        hi = lo;
        lo = 0.5 * (lo + std::max(dom_lo, 0.0));
        if (++guard > 8000) {
            throw DomainError(curve.family + ": cannot bracket mean for theta=" + std::to_string(theta));
        }
    }
    for (int it = 0; it < 400; ++it) {
        double mid = (lo > 0.0) ? std::sqrt(lo) * std::sqrt(hi) : 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) {
            mid = 0.5 * (lo + hi);
            if (!(mid > lo && mid < hi)) {
                break;
            }
        }
        if (th(mid) < theta) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double dlo = std::abs(th(lo) - theta);
    const double dhi = std::abs(th(hi) - theta);
    return dlo <= dhi ? lo : hi;
}

} // namespace detail

/// Inverse of theta_of_mean. Uses the registered closed form when there is
/// one, otherwise monotone bisection.
inline double mean_from_theta(const NefCurve& curve, double theta) {
    if (!curve.theta_domain.contains(theta)) {
        throw DomainError(curve.family + ": theta " + std::to_string(theta) +
                          " outside natural-parameter domain");
    }
    if (curve.mean_of_theta) {
        return curve.mean_of_theta(theta);
    }
    return detail::bisect_mean(curve, theta);
}

/// Checks theta'(m) = 1/V(m) and kappa'(m) = m/V(m) by central differences
/// with step 1e-6 m at every grid point.
inline bool check_curve_consistency(const NefCurve& curve, std::span<const double> m_grid, double tol) {
    if (m_grid.empty()) {
        throw std::invalid_argument("check_curve_consistency: empty mean grid");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("check_curve_consistency: tolerance must be positive");
    }
    for (double m : m_grid) {
        if (!curve.mean_domain.contains(m)) {
            throw DomainError(curve.family + ": grid point outside mean domain");
        }
        const double h = 1e-6 * m;
        const auto& th = curve.theta_shape ? curve.theta_shape : curve.theta_of_mean;
        const double dtheta = (th(m + h) - th(m - h)) / (2.0 * h);
        const double dkappa = (curve.kappa_of_mean(m + h) - curve.kappa_of_mean(m - h)) / (2.0 * h);
        const double inv_v = 1.0 / curve.variance_of_mean(m);
        if (!(std::abs(dtheta - inv_v) <= tol * inv_v)) {
            return false;
        }
        if (!(std::abs(dkappa - m * inv_v) <= tol * m * inv_v)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// The six families. Counting curves use the pmf-normalized theta and kappa:
// Abel drops A = -1 and B = p, arcsine and Takacs have A = B = 0.
// ---------------------------------------------------------------------------

inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

inline NefCurve abel_curve(double p) {
    require_positive(p, "Abel dispersion p");
    NefCurve c;
    c.family = "abel";
    c.theta_of_mean = [p](double m) {
        const double u = p / (m + p);
        return std::log1p(-u) + u;
    };
    c.kappa_of_mean = [p](double m) { return -p * p / (m + p); };
    c.variance_of_mean = [p](double m) {
        const double r = 1.0 + m / p;
        return m * r * r;
    };
    c.theta_domain = Interval{-kInf, 0.0};
    return c;
}

inline NefCurve arcsine_curve(double p) {
    require_positive(p, "arcsine dispersion p");
    NefCurve c;
    c.family = "arcsine";
    c.theta_of_mean = [p](double m) { return -0.5 * std::log1p((p / m) * (p / m)); };
    c.kappa_of_mean = [p](double m) { return p * std::atan(m / p); };
    c.variance_of_mean = [p](double m) { return m * (1.0 + (m / p) * (m / p)); };
    c.theta_domain = Interval{-kInf, 0.0};
    c.mean_of_theta = [p](double theta) { return p / std::sqrt(std::expm1(-2.0 * theta)); };
    return c;
}

inline NefCurve takacs_curve(double p) {
    require_positive(p, "Takacs dispersion p");
    NefCurve c;
    c.family = "takacs";
    // m(p+m)/(p+2m)^2 = (1 - (p/(p+2m))^2)/4
    c.theta_of_mean = [p](double m) {
        const double r = p / (p + 2.0 * m);
        return std::log1p(-r * r) - 2.0 * std::numbers::ln2;
    };
    c.theta_shape = [p](double m) {
        const double r = p / (p + 2.0 * m);
        return std::log1p(-r * r);
    };
    c.kappa_of_mean = [p](double m) { return p * std::log1p(m / (p + m)); };
    c.variance_of_mean = [p](double m) { return m * (1.0 + m / p) * (1.0 + 2.0 * m / p); };
    c.theta_domain = Interval{-kInf, -2.0 * std::numbers::ln2};
    c.mean_of_theta = [p](double theta) {
        const double one_minus_4t = -std::expm1(theta + 2.0 * std::numbers::ln2);
        return 0.5 * p * (1.0 / std::sqrt(one_minus_4t) - 1.0);
    };
    return c;
}

inline NefCurve poisson_curve() {
    NefCurve c;
    c.family = "poisson";
    c.theta_of_mean = [](double m) { return std::log(m); };
    c.kappa_of_mean = [](double m) { return m; };
    c.variance_of_mean = [](double m) { return m; };
    c.mean_of_theta = [](double theta) { return std::exp(theta); };
    return c;
}

inline NefCurve gamma_curve(double p) {
    require_positive(p, "Gamma dispersion p");
    NefCurve c;
    c.family = "gamma";
    c.theta_of_mean = [p](double m) { return 1.0 - p / m; };
    c.kappa_of_mean = [p](double m) { return p * std::log(m / p); };
    c.variance_of_mean = [p](double m) { return m * m / p; };
    c.theta_domain = Interval{-kInf, 1.0};
    c.mean_of_theta = [p](double theta) { return p / (1.0 - theta); };
    return c;
}

inline NefCurve inverse_gaussian_curve(double p) {
    require_positive(p, "inverse Gaussian dispersion p");
    NefCurve c;
    c.family = "inverse_gaussian";
    c.theta_of_mean = [p](double m) { return -1.0 / (2.0 * p * m * m); };
    c.kappa_of_mean = [p](double m) { return -1.0 / (p * m); };
    c.variance_of_mean = [p](double m) { return p * m * m * m; };
    c.theta_domain = Interval{-kInf, 0.0};
    c.mean_of_theta = [p](double theta) { return 1.0 / std::sqrt(-2.0 * p * theta); };
    return c;
}

inline NefCurve positive_stable_curve(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("stable index alpha must lie in (0,1)");
    }
    NefCurve c;
    c.family = "positive_stable";
    c.theta_of_mean = [alpha](double m) { return -std::pow(m / alpha, 1.0 / (alpha - 1.0)); };
    c.kappa_of_mean = [alpha](double m) { return -std::pow(m / alpha, alpha / (alpha - 1.0)); };
    c.variance_of_mean = [alpha](double m) {
        const double power = (2.0 - alpha) / (1.0 - alpha);
        const double coef = (1.0 - alpha) * std::pow(alpha, 1.0 / (alpha - 1.0));
        return coef * std::pow(m, power);
    };
    c.theta_domain = Interval{-kInf, 0.0};
    c.mean_of_theta = [alpha](double theta) { return alpha * std::pow(-theta, alpha - 1.0); };
    return c;
}

inline ReproMap gamma_repro() {
    // Not reproducible in the strict sense: the n-fold sum keeps theta and
    // multiplies the shape by n.
    return {[](std::int64_t) { return 1.0; }, [](std::int64_t, double theta) { return theta; }};
}

inline ReproMap inverse_gaussian_repro() {
    return {[](std::int64_t n) { return 1.0 / (static_cast<double>(n) * static_cast<double>(n)); },
            [](std::int64_t n, double theta) { return static_cast<double>(n) * static_cast<double>(n) * theta; }};
}

inline ReproMap positive_stable_repro(double alpha) {
    return {[alpha](std::int64_t n) { return std::pow(static_cast<double>(n), -1.0 / alpha); },
            [alpha](std::int64_t n, double theta) { return theta * std::pow(static_cast<double>(n), 1.0 / alpha); }};
}

} // namespace nefrisk

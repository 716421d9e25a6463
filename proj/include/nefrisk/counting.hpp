#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "errors.hpp"
#include "nef_core.hpp"
#include "random.hpp"
#include "special.hpp"
#include "zipf.hpp"

namespace nefrisk {

using count_t = std::int64_t;

/// Per-draw cap on accept-reject rounds. The expected number of rounds is the
/// dominating constant C (single digits at case-study parameters).
inline constexpr std::uint64_t kCountingArCap = 1'000'000;

// Above this C the conditional pmf is sampled by sequential search instead of
// accept-reject. Only reached for degenerate means (f(0) ~ 1).
inline constexpr double kInversionFallbackC = 1.0e4;

// Slack allowed on accept-reject ratios before the dominance is declared broken.
inline constexpr double kDominanceSlack = 1e-9;

enum class CountingFamily { abel, arcsine, takacs, poisson };

inline std::string_view to_string(CountingFamily f) {
    switch (f) {
    case CountingFamily::abel: return "abel";
    case CountingFamily::arcsine: return "arcsine";
    case CountingFamily::takacs: return "takacs";
    case CountingFamily::poisson: return "poisson";
    }
    return "?";
}

inline CountingFamily parse_counting_family(std::string_view s) {
    if (s == "abel") return CountingFamily::abel;
    if (s == "arcsine") return CountingFamily::arcsine;
    if (s == "takacs") return CountingFamily::takacs;
    if (s == "poisson") return CountingFamily::poisson;
    throw std::invalid_argument("unknown counting family: " + std::string(s));
}

namespace detail {

inline void check_count(count_t n, const char* who) {
    if (n < 0) {
        throw DomainError(std::string(who) + ": count must be >= 0, got " + std::to_string(n));
    }
}

inline void check_mean(double m, const char* who) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw DomainError(std::string(who) + ": mean must be positive and finite");
    }
}

// Sequential search on f(n | n >= first) for degenerate means.
template <class LogPmf>
count_t conditional_inversion(const LogPmf& log_pmf, count_t first, double log_tail_mass, Rng& rng) {
    double u = rng.uniform();
    for (count_t n = first; n < first + 100'000'000; ++n) {
        u -= std::exp(log_pmf(n) - log_tail_mass);
        if (u <= 0.0) {
            return n;
        }
    }
    throw SimulationError("conditional inversion did not terminate");
}

// One accept-reject draw from f(. | n >= first) with a Zipf-type proposal.
template <class LogPmf, class Propose, class LogProposalPmf>
count_t ar_loop(const LogPmf& log_pmf, double log_tail_mass, double log_c, const Propose& propose,
                const LogProposalPmf& log_proposal, Rng& rng, ArStats* stats, const char* family) {
    for (std::uint64_t it = 0; it < kCountingArCap; ++it) {
        const count_t n = propose(rng);
        const double log_ratio = log_pmf(n) - log_tail_mass - log_c - log_proposal(n);
        const double ratio = std::exp(log_ratio);
        if (ratio > 1.0 + kDominanceSlack) {
            throw InvariantViolation(std::string(family) + ": accept-reject ratio " +
                                     std::to_string(ratio) + " > 1 at n=" + std::to_string(n));
        }
        if (stats) ++stats->proposals;
        if (rng.uniform() < ratio) {
            if (stats) ++stats->accepted;
            return n;
        }
    }
    throw SimulationError(std::string(family) + ": accept-reject exceeded iteration cap");
}

} // namespace detail

// ===========================================================================
// Abel
// ===========================================================================

/// Abel NEF, V(m) = m (1 + m/p)^2, kernel p (p+n)^{n-1} / n!.
class AbelDist {
public:
    AbelDist(double p, double m) : p_(p), m_(m) {
        require_positive(p, "Abel dispersion p");
        detail::check_mean(m, "AbelDist");
        const double u = p / (m + p);
        theta_ = std::log1p(-u) + u;
        kappa_ = -p * p / (m + p);
        log_f0_ = -p - kappa_;
        f0_ = std::exp(log_f0_);
        log_one_minus_f0_ = std::log(-std::expm1(log_f0_));
        // C = p e^{-kappa} / ((1 - f0) sqrt(pi) (sqrt2 - 1))
        log_c_ = std::log(p) - kappa_ - log_one_minus_f0_ -
                 std::log(std::sqrt(std::numbers::pi) * (std::numbers::sqrt2 - 1.0));
    }

    double p() const { return p_; }
    double mean() const { return m_; }
    double theta() const { return theta_; }
    double kappa() const { return kappa_; }
    double variance() const { return m_ * (1.0 + m_ / p_) * (1.0 + m_ / p_); }
    double f0() const { return f0_; }
    double dominating_constant() const { return std::exp(log_c_); }
    NefCurve curve() const { return abel_curve(p_); }
    AbelDist with_mean(double m) const { return AbelDist(p_, m); }

    /// log of the modified kernel nu0(n) = nu(n) e^{-n-p}.
    double log_kernel0(count_t n) const {
        detail::check_count(n, "abel_log_kernel");
        if (n == 0) {
            return -p_;
        }
        const double x = static_cast<double>(n);
        return std::log(p_) + (x - 1.0) * std::log(p_ + x) - std::lgamma(x + 1.0) - x - p_;
    }

    double log_pmf(count_t n) const {
        return log_kernel0(n) + static_cast<double>(n) * theta_ - kappa_;
    }
    double pmf(count_t n) const { return std::exp(log_pmf(n)); }

    count_t sample(Rng& rng, ArStats* stats = nullptr) const {
        if (rng.uniform() < f0_) {
            return 0;
        }
        auto lp = [this](count_t n) { return log_pmf(n); };
        if (log_c_ > std::log(kInversionFallbackC)) {
            return detail::conditional_inversion(lp, 1, log_one_minus_f0_, rng);
        }
        return detail::ar_loop(lp, log_one_minus_f0_, log_c_, zipf::sample_proposal,
                               zipf::log_proposal_pmf, rng, stats, "abel");
    }

private:
    double p_, m_;
    double theta_, kappa_;
    double log_f0_, f0_, log_one_minus_f0_;
    double log_c_;
};

/// Constant C with f(n | n >= 1) <= C b(n).
inline double abel_dominating_constant(const AbelDist& d) { return d.dominating_constant(); }

// ===========================================================================
// Arcsine
// ===========================================================================

/// Which bound on nu(2n) n^{3/2} beyond the threshold i*.
enum class ArcsineBoundVariant {
    /// K1 from the plain harmonic-sum bound H_{n-1} >= log n.
    basic,
    /// Same derivation keeping Euler's constant in the harmonic-sum bound:
    /// H_{n-1} >= log n + gamma - 1/(2n) - 1/(12 n^2).
    harmonic_refined,
};

struct ArcsineBound {
    int i_star = 0;
    double G = 0.0;
    double K0 = 0.0;
    double K1 = 0.0;
    double K = 0.0;
    /// sup over n > i* of nu(2n+1)/nu(2n); tends to coth(pi p/2) > 1.
    double odd_ratio = 0.0;
    /// nu(2n+1) <= K_odd n^{-3/2} for n >= 1.
    double K_odd = 0.0;
    ArcsineBoundVariant variant = ArcsineBoundVariant::basic;
};

namespace arcsine_detail {

inline double epsilon(double p, double i) {
    const double p2 = p * p;
    return (9.0 + p2) / (4.0 * i * i) - 3.0 * p2 / (8.0 * i * i * i) + 9.0 * p2 / (4.0 * i * i * i * i);
}

inline double rho(double p, double i) {
    return (4.0 * i * i + p * p) / (4.0 * i * i + 6.0 * i + 2.0);
}

// nu(2n+1) / nu(2n-1) for n >= 1
inline double odd_step(double p, double n) {
    const double a = 2.0 * n - 1.0;
    return (a * a + p * p) / ((2.0 * n) * (2.0 * n + 1.0));
}

} // namespace arcsine_detail

/// Threshold and constants giving nu(2n), nu(2n+1) <= K n^{-3/2} for n >= 1.
///
/// i* is the smallest index >= 5 with 3/(2i) - eps_i > 0 for every i > i*.
/// i * eps_i is strictly decreasing in i (its derivative has a negative
/// discriminant), so checking i = i*+1 suffices.
inline ArcsineBound arcsine_bound_constants(double p,
                                            ArcsineBoundVariant variant = ArcsineBoundVariant::basic) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
        throw DomainError("arcsine_bound_constants: p must be >= 0");
    }
    using namespace arcsine_detail;
    ArcsineBound b;
    b.variant = variant;
    int i = 5;
    while (!(1.5 / (i + 1.0) - epsilon(p, i + 1.0) > 0.0)) {
        ++i;
    }
    b.i_star = i;

    double g = 1.0;
    double harmonic = 0.0;
    double harmonic2 = 0.0;
    for (int j = 0; j <= b.i_star; ++j) {
        g *= rho(p, j);
    }
    for (int j = 1; j <= b.i_star; ++j) {
        harmonic += 1.0 / j;
        harmonic2 += 1.0 / (static_cast<double>(j) * j);
    }
    b.G = g;
    double log_k1 = 1.5 * harmonic + (9.0 + p * p) / 4.0 * (zipf::kZeta2 - harmonic2);
    if (variant == ArcsineBoundVariant::harmonic_refined) {
        const double first = b.i_star + 1.0;
        log_k1 -= 1.5 * (std::numbers::egamma - 1.0 / (2.0 * first) - 1.0 / (12.0 * first * first));
    }
    b.K1 = g * std::exp(log_k1);

    double even = 1.0;  // nu(0)
    double odd = p;     // nu(1)
    double k0 = 0.0;
    for (int n = 1; n <= b.i_star; ++n) {
        even *= rho(p, n - 1.0);
        odd *= odd_step(p, n);
        const double w = std::pow(static_cast<double>(n), 1.5);
        k0 = std::max(k0, std::max(even, odd) * w);
    }
    b.K0 = k0;
    b.K = std::max(b.K0, b.K1);

    // r_n = nu(2n+1)/nu(2n) satisfies r_{n+1}/r_n > 1 iff 6n + 1 > 2p^2, so
    // past that point it increases to its limit coth(pi p/2).
    if (p > 0.0) {
        const double turn = std::max<double>(b.i_star + 1, std::ceil((2.0 * p * p - 1.0) / 6.0) + 1.0);
        double r = p;  // r_0
        double sup = 0.0;
        for (int n = 0; n < static_cast<int>(turn); ++n) {
            const double x = n;
            r *= ((2 * x + 1) * (2 * x + 1) + p * p) * (2 * x + 1) / ((4 * x * x + p * p) * (2 * x + 3));
            if (n + 1 >= b.i_star + 1) sup = std::max(sup, r);
        }
        b.odd_ratio = std::max(sup, 1.0 / std::tanh(0.5 * std::numbers::pi * p));
    }
    b.K_odd = std::max(b.K0, b.K1 * b.odd_ratio);
    return b;
}

/// Strict arcsine NEF, V(m) = m (1 + m^2/p^2), generating function e^{p arcsin z}.
class ArcsineDist {
public:
    ArcsineDist(double p, double m,
                ArcsineBoundVariant variant = ArcsineBoundVariant::harmonic_refined)
        : p_(p), m_(m), variant_(variant) {
        require_positive(p, "arcsine dispersion p");
        detail::check_mean(m, "ArcsineDist");
        theta_ = -0.5 * std::log1p((p / m) * (p / m));
        kappa_ = p * std::atan(m / p);
        const double y = 0.5 * p;
        log_even_const_ = std::log(y) + special::log_sinh(std::numbers::pi * y) -
                          0.5 * std::log(std::numbers::pi);
        log_odd_const_ = std::log(p) + special::log_cosh(std::numbers::pi * y) -
                         0.5 * std::log(std::numbers::pi);
        f0_ = std::exp(-kappa_);
        f1_ = std::exp(std::log(p) + theta_ - kappa_);
        log_tail_ = std::log1p(-(f0_ + f1_));
        bound_ = arcsine_bound_constants(p, variant);
        // C = 2 K e^{-kappa} sqrt2 / ((1 - f0 - f1)(sqrt2 - 1)). Odd terms
        // past i* are within e^theta * odd_ratio of the even ones; when that
        // exceeds 1 (small p, theta near 0) K is raised to cover them.
        const double k_eff = std::max(bound_.K, bound_.K1 * bound_.odd_ratio * std::exp(theta_));
        log_c_ = std::log(2.0 * k_eff) - kappa_ - log_tail_ + std::log(zipf::kPowerToProposal);
    }

    double p() const { return p_; }
    double mean() const { return m_; }
    double theta() const { return theta_; }
    double kappa() const { return kappa_; }
    double variance() const { return m_ * (1.0 + (m_ / p_) * (m_ / p_)); }
    double f0() const { return f0_; }
    double f1() const { return f1_; }
    const ArcsineBound& bound() const { return bound_; }
    double dominating_constant() const { return std::exp(log_c_); }
    NefCurve curve() const { return arcsine_curve(p_); }
    ArcsineDist with_mean(double m) const { return ArcsineDist(p_, m, variant_); }

    /// log nu(n) through |Gamma(k + i p/2)|^2 products; no O(n) loop.
    double log_kernel(count_t n) const {
        detail::check_count(n, "arcsine_log_kernel");
        if (n == 0) return 0.0;
        if (n == 1) return std::log(p_);
        const double y = 0.5 * p_;
        const double k = static_cast<double>(n / 2);
        if (n % 2 == 0) {
            // nu(2k) = sqrt(pi) Gamma(k) |Gamma(k+iy)/Gamma(k)|^2 y sinh(pi y) / (pi k Gamma(k+1/2))
            return 2.0 * special::log_abs_gamma_shift(k, y) - special::log_gamma_half_step(k) -
                   std::log(k) + log_even_const_;
        }
        return 2.0 * special::log_abs_gamma_shift(k + 0.5, y) + special::log_gamma_half_step(k) -
               std::log(2.0 * k + 1.0) - std::log(k) + log_odd_const_;
    }

    double log_pmf(count_t n) const {
        return log_kernel(n) + static_cast<double>(n) * theta_ - kappa_;
    }
    double pmf(count_t n) const { return std::exp(log_pmf(n)); }

    count_t sample(Rng& rng, ArStats* stats = nullptr) const {
        const double u = rng.uniform();
        if (u < f0_) return 0;
        if (u < f0_ + f1_) return 1;
        auto lp = [this](count_t n) { return log_pmf(n); };
        if (log_c_ > std::log(kInversionFallbackC)) {
            return detail::conditional_inversion(lp, 2, log_tail_, rng);
        }
        return detail::ar_loop(lp, log_tail_, log_c_, zipf::sample_double_zipf,
                               zipf::log_double_zipf_pmf, rng, stats, "arcsine");
    }

private:
    double p_, m_;
    ArcsineBoundVariant variant_;
    double theta_, kappa_;
    double log_even_const_, log_odd_const_;
    double f0_, f1_, log_tail_;
    ArcsineBound bound_;
    double log_c_;
};

// ===========================================================================
// Takacs
// ===========================================================================

struct TakacsBound {
    double K0 = 0.0;
    double K1 = 0.0;
    double K = 0.0;
    /// False when p <= 1: K then comes from a finite scan and is not a proof.
    bool certified = true;
    count_t scan_horizon = 0;
};

inline double takacs_log_kernel(double p, count_t n) {
    detail::check_count(n, "takacs_log_kernel");
    if (n == 0) return 0.0;
    const double x = static_cast<double>(n);
    return std::log(p) - std::log(x + p) + std::lgamma(2.0 * x + p) - std::lgamma(x + 1.0) -
           std::lgamma(x + p);
}

inline constexpr count_t kTakacsFallbackHorizon = 100'000;

/// K with nu0(n) = nu(n) e^{theta(m) n} <= K n^{-3/2}, n >= 1.
inline TakacsBound takacs_bound_constant(double p, double m,
                                         count_t fallback_horizon = kTakacsFallbackHorizon) {
    require_positive(p, "Takacs dispersion p");
    detail::check_mean(m, "takacs_bound_constant");
    const double theta = takacs_curve(p).theta_of_mean(m);
    auto scaled = [&](count_t n) {
        const double x = static_cast<double>(n);
        return std::exp(takacs_log_kernel(p, n) + theta * x + 1.5 * std::log(x));
    };
    TakacsBound b;
    if (p > 1.0) {
        b.K1 = p * std::exp(1.0 / 12.0) / std::sqrt(2.0 * std::numbers::pi) * std::numbers::sqrt2 *
               std::pow(2.0, p - 1.0);
        b.scan_horizon = static_cast<count_t>(std::ceil(m));
        b.certified = true;
    } else {
        b.scan_horizon = std::max<count_t>(fallback_horizon, 10 * static_cast<count_t>(std::ceil(m)));
        b.certified = false;
    }
    for (count_t n = 1; n <= b.scan_horizon; ++n) {
        b.K0 = std::max(b.K0, scaled(n));
    }
    b.K = std::max(b.K0, b.K1);
    return b;
}

/// Takacs NEF, V(m) = m (1 + m/p)(1 + 2m/p).
class TakacsDist {
public:
    TakacsDist(double p, double m) : p_(p), m_(m) {
        require_positive(p, "Takacs dispersion p");
        detail::check_mean(m, "TakacsDist");
        const NefCurve c = takacs_curve(p);
        theta_ = c.theta_of_mean(m);
        kappa_ = c.kappa_of_mean(m);
        f0_ = std::exp(-kappa_);
        log_one_minus_f0_ = std::log(-std::expm1(-kappa_));
        bound_ = takacs_bound_constant(p, m);
        // C = K e^{-kappa} sqrt2 / ((1 - f0)(sqrt2 - 1))
        log_c_ = std::log(bound_.K) - kappa_ - log_one_minus_f0_ + std::log(zipf::kPowerToProposal);
    }

    double p() const { return p_; }
    double mean() const { return m_; }
    double theta() const { return theta_; }
    double kappa() const { return kappa_; }
    double variance() const { return m_ * (1.0 + m_ / p_) * (1.0 + 2.0 * m_ / p_); }
    double f0() const { return f0_; }
    const TakacsBound& bound() const { return bound_; }
    double dominating_constant() const { return std::exp(log_c_); }
    NefCurve curve() const { return takacs_curve(p_); }
    TakacsDist with_mean(double m) const { return TakacsDist(p_, m); }

    double log_kernel(count_t n) const { return takacs_log_kernel(p_, n); }
    double log_pmf(count_t n) const {
        return log_kernel(n) + static_cast<double>(n) * theta_ - kappa_;
    }
    double pmf(count_t n) const { return std::exp(log_pmf(n)); }

    count_t sample(Rng& rng, ArStats* stats = nullptr) const {
        if (rng.uniform() < f0_) {
            return 0;
        }
        auto lp = [this](count_t n) { return log_pmf(n); };
        if (log_c_ > std::log(kInversionFallbackC)) {
            return detail::conditional_inversion(lp, 1, log_one_minus_f0_, rng);
        }
        return detail::ar_loop(lp, log_one_minus_f0_, log_c_, zipf::sample_proposal,
                               zipf::log_proposal_pmf, rng, stats, "takacs");
    }

private:
    double p_, m_;
    double theta_, kappa_;
    double f0_, log_one_minus_f0_;
    TakacsBound bound_;
    double log_c_;
};

// ===========================================================================
// Poisson reference (baseline for goodness of fit and tail comparisons)
// ===========================================================================

class PoissonDist {
public:
    explicit PoissonDist(double m) : m_(m) { detail::check_mean(m, "PoissonDist"); }

    double p() const { return 0.0; }
    double mean() const { return m_; }
    double theta() const { return std::log(m_); }
    double kappa() const { return m_; }
    double variance() const { return m_; }
    double f0() const { return std::exp(-m_); }
    NefCurve curve() const { return poisson_curve(); }
    PoissonDist with_mean(double m) const { return PoissonDist(m); }

    double log_pmf(count_t n) const {
        detail::check_count(n, "poisson_log_pmf");
        const double x = static_cast<double>(n);
        return x * std::log(m_) - m_ - std::lgamma(x + 1.0);
    }
    double pmf(count_t n) const { return std::exp(log_pmf(n)); }

    count_t sample(Rng& rng, ArStats* = nullptr) const {
        return static_cast<count_t>(rng.poisson(m_));
    }

private:
    double m_;
};

// ===========================================================================
// Type-erased counting distribution
// ===========================================================================

using CountingDist = std::variant<AbelDist, ArcsineDist, TakacsDist, PoissonDist>;

inline CountingDist make_counting(CountingFamily family, double p, double m) {
    switch (family) {
    case CountingFamily::abel: return AbelDist(p, m);
    case CountingFamily::arcsine: return ArcsineDist(p, m);
    case CountingFamily::takacs: return TakacsDist(p, m);
    case CountingFamily::poisson: return PoissonDist(m);
    }
    throw std::invalid_argument("make_counting: bad family");
}

inline CountingFamily family_of(const CountingDist& d) {
    return static_cast<CountingFamily>(d.index());
}

inline double mean_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.mean(); }, d);
}
inline double variance_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.variance(); }, d);
}
inline double theta_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.theta(); }, d);
}
inline double kappa_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.kappa(); }, d);
}
inline double dispersion_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.p(); }, d);
}
inline NefCurve curve_of(const CountingDist& d) {
    return std::visit([](const auto& x) { return x.curve(); }, d);
}
inline double log_pmf(const CountingDist& d, count_t n) {
    return std::visit([n](const auto& x) { return x.log_pmf(n); }, d);
}
inline count_t sample(const CountingDist& d, Rng& rng, ArStats* stats = nullptr) {
    return std::visit([&](const auto& x) { return x.sample(rng, stats); }, d);
}
inline CountingDist with_mean(const CountingDist& d, double m) {
    return std::visit([m](const auto& x) -> CountingDist { return x.with_mean(m); }, d);
}

/// Member of the same family with natural parameter theta (dispersion kept).
inline CountingDist with_theta(const CountingDist& d, double theta) {
    return with_mean(d, mean_from_theta(curve_of(d), theta));
}

inline std::optional<double> dominating_constant_of(const CountingDist& d) {
    return std::visit(
        [](const auto& x) -> std::optional<double> {
            if constexpr (requires { x.dominating_constant(); }) {
                return x.dominating_constant();
            } else {
                return std::nullopt;
            }
        },
        d);
}

// Named entry points matching the per-family operations.
inline double abel_log_pmf(const AbelDist& d, count_t n) { return d.log_pmf(n); }
inline double arcsine_log_pmf(const ArcsineDist& d, count_t n) { return d.log_pmf(n); }
inline double takacs_log_pmf(const TakacsDist& d, count_t n) { return d.log_pmf(n); }
inline count_t sample_abel(const AbelDist& d, Rng& rng, ArStats* s = nullptr) { return d.sample(rng, s); }
inline count_t sample_arcsine(const ArcsineDist& d, Rng& rng, ArStats* s = nullptr) { return d.sample(rng, s); }
inline count_t sample_takacs(const TakacsDist& d, Rng& rng, ArStats* s = nullptr) { return d.sample(rng, s); }

} // namespace nefrisk

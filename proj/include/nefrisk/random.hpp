#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace nefrisk {

/// Caller-owned random stream. Every sampler in the library takes one of
/// these by reference; streams are never shared between threads.
class Rng {
public:
    using engine_type = std::mt19937_64;

    explicit Rng(std::uint64_t seed) : engine_(make_seq(seed, 0)) {}
    Rng(std::uint64_t seed, std::uint64_t stream) : engine_(make_seq(seed, stream)) {}

    /// Uniform on the open interval (0,1); 53 random bits, never 0 or 1.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    double normal() { return normal_(engine_); }

    double gamma(double shape) {
        using param = std::gamma_distribution<double>::param_type;
        return gamma_(engine_, param(shape, 1.0));
    }

    std::uint64_t poisson(double mean) {
        using param = std::poisson_distribution<std::uint64_t>::param_type;
        return poisson_(engine_, param(mean));
    }

    engine_type& engine() { return engine_; }

private:
    static engine_type make_seq(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream),
                          static_cast<std::uint32_t>(stream >> 32), 0x6e6566u};
        return engine_type(seq);
    }

    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::gamma_distribution<double> gamma_;
    std::poisson_distribution<std::uint64_t> poisson_;
};

/// Accept-reject bookkeeping shared by all rejection samplers.
struct ArStats {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;

    double acceptance_rate() const {
        return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    }
    ArStats& operator+=(const ArStats& o) {
        proposals += o.proposals;
        accepted += o.accepted;
        return *this;
    }
};

} // namespace nefrisk

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fbmdd::rng {

/// splitmix64 step (Steele, Lea, Vigna). Advances state and returns the
/// mixed output. Used only to derive stream seeds and generator state.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// xoshiro256++ (Blackman, Vigna) with splittable stream derivation:
/// stream k of master seed s is seeded from splitmix64 started at
/// s + (k+1) * 0x9E3779B97F4A7C15 (the splitmix golden gamma), so any
/// number of parallel streams can be drawn independently of scheduling.
class Xoshiro256pp {
public:
    Xoshiro256pp(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next();

    /// Uniform double strictly inside (0,1), 53-bit resolution.
    double uniform01();

private:
    std::array<std::uint64_t, 4> state_;
};

/// Inverse standard normal CDF (Wichura's AS 241, double precision).
/// Requires 0 < p < 1.
double inverse_normal_cdf(double p);

/// Stream of standard normal variates: xoshiro256++ uniforms mapped
/// through the inverse CDF. One instance per Monte Carlo path.
class GaussianStream {
public:
    GaussianStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : gen_(master_seed, stream_id) {}

    double next() { return inverse_normal_cdf(gen_.uniform01()); }

    void fill(std::span<double> out) {
        for (double& x : out) {
            x = next();
        }
    }

private:
    Xoshiro256pp gen_;
};

} // namespace fbmdd::rng

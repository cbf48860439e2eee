#pragma once

/**
 * Deterministic random number generation with per-stream derivation.
 *
 * Every consumer draws from a CounterRng constructed from (seed, stream_id).
 * The stream key is derived by hashing both values through splitmix64, so
 * replica i can use stream_id = i and obtain a generator that is independent
 * of scheduling order: parallel runs produce bit-identical results no matter
 * how replicas are assigned to threads.
 *
 * All distributions are implemented locally on top of raw 64-bit draws.
 * The standard library distribution objects are deliberately avoided: their
 * algorithms are implementation-defined, which would silently break the
 * reproducibility contract across toolchains.
 */

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace kpzlab {

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class CounterRng {
  public:
    explicit CounterRng(RngSpec spec)
        : engine_(splitmix64(splitmix64(spec.seed) ^ splitmix64(~spec.stream_id))) {}

    CounterRng(std::uint64_t seed, std::uint64_t stream_id)
        : CounterRng(RngSpec{seed, stream_id}) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0,1], safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform_pos();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Gamma(alpha, 1) via Marsaglia-Tsang squeeze; alpha < 1 handled with the
    /// usual boost by one and a uniform power.
    double gamma(double alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("CounterRng::gamma: alpha must be positive");
        if (alpha < 1.0) {
            const double u = uniform_pos();
            return gamma(alpha + 1.0) * std::pow(u, 1.0 / alpha);
        }
        const double d = alpha - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Inverse-gamma(theta): reciprocal of a gamma(theta, 1) draw.
    double inverse_gamma(double theta) { return 1.0 / gamma(theta); }

  private:
    std::mt19937_64 engine_;  // fully specified by the standard, portable
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace kpzlab

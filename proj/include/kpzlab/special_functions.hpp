#pragma once

/**
 * Digamma family on the positive half line, plus the inverse of trigamma.
 *
 * Each evaluation shifts the argument upward with the recurrence until the
 * Bernoulli asymptotic series converges at full double precision, then sums
 * the series; this keeps 12+ significant digits over the whole domain.
 * invert_trigamma exploits that trigamma decreases strictly from +inf to 0
 * on (0, inf): a Newton iteration is safeguarded by a bracket that shrinks
 * with every step, so it cannot escape or cycle.
 */

#include <cmath>
#include <stdexcept>
#include <string>

namespace kpzlab {

namespace detail {

// Above this the z^{-14} tail of each series is below double precision.
constexpr double sf_series_threshold = 12.0;

inline void require_positive(double z, const char* who) {
    if (!(z > 0.0))
        throw std::domain_error(std::string(who) + ": argument must be positive");
}

}  // namespace detail

inline double digamma(double z) {
    detail::require_positive(z, "digamma");
    double acc = 0.0;
    while (z < detail::sf_series_threshold) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double u = inv * inv;
    const double tail =
        u * (1.0 / 12.0 +
             u * (-1.0 / 120.0 +
                  u * (1.0 / 252.0 +
                       u * (-1.0 / 240.0 +
                            u * (1.0 / 132.0 +
                                 u * (-691.0 / 32760.0 + u * (1.0 / 12.0)))))));
    return acc + std::log(z) - 0.5 * inv - tail;
}

inline double trigamma(double z) {
    detail::require_positive(z, "trigamma");
    double acc = 0.0;
    while (z < detail::sf_series_threshold) {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double u = inv * inv;
    const double tail =
        inv * u *
        (1.0 / 6.0 +
         u * (-1.0 / 30.0 +
              u * (1.0 / 42.0 +
                   u * (-1.0 / 30.0 +
                        u * (5.0 / 66.0 +
                             u * (-691.0 / 2730.0 + u * (7.0 / 6.0)))))));
    return acc + inv + 0.5 * u + tail;
}

inline double tetragamma(double z) {
    detail::require_positive(z, "tetragamma");
    double acc = 0.0;
    while (z < detail::sf_series_threshold) {
        acc -= 2.0 / (z * z * z);
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double u = inv * inv;
    const double tail =
        u * u *
        (-0.5 + u * (1.0 / 6.0 +
                     u * (-1.0 / 6.0 +
                          u * (3.0 / 10.0 +
                               u * (-5.0 / 6.0 + u * (691.0 / 210.0))))));
    return acc - u - inv * u + tail;
}

/// Solves trigamma(theta) = kappa for theta > 0.
inline double invert_trigamma(double kappa) {
    detail::require_positive(kappa, "invert_trigamma");
    // Seed from trigamma(z) ~ 1/z + 1/(2 z^2): the positive root of
    // 2 kappa z^2 - 2 z - 1 = 0. Exact for large theta, close enough to
    // bracket quickly for small theta.
    double theta = (1.0 + std::sqrt(1.0 + 2.0 * kappa)) / (2.0 * kappa);
    double lo = theta, hi = theta;  // invariant: trigamma(lo) >= kappa >= trigamma(hi)
    while (trigamma(lo) < kappa) lo *= 0.5;
    while (trigamma(hi) > kappa) hi *= 2.0;
    theta = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = trigamma(theta) - kappa;
        if (f >= 0.0) lo = theta;
        if (f <= 0.0) hi = theta;
        double next = theta - f / tetragamma(theta);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - theta) <= 1e-15 * next || next == theta) return next;
        theta = next;
    }
    return theta;
}

}  // namespace kpzlab

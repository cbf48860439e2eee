#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpzlab {

// Marker for "no path / empty set" in max-plus fields. Plain IEEE -inf so that
// max() and exp() behave correctly without special cases.
inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double v) { return std::isinf(v) && v < 0; }
inline bool is_finite(double v) { return std::isfinite(v); }

// log(exp(a) + exp(b)) with the running-max guard; tolerates -inf operands.
inline double log_add_exp(double a, double b) {
    if (is_neg_inf(a)) return b;
    if (is_neg_inf(b)) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log of a sum of exponentials over a range; -inf for an empty range.
inline double log_sum_exp(const std::vector<double>& xs) {
    double m = neg_inf;
    for (double x : xs) m = std::max(m, x);
    if (is_neg_inf(m)) return neg_inf;
    double s = 0.0;
    for (double x : xs)
        if (!is_neg_inf(x)) s += std::exp(x - m);
    return m + std::log(s);
}

// Order-insensitive pairwise summation. Used wherever aggregate statistics
// must not depend on accumulation order (replica reductions in particular).
inline double pairwise_sum(const double* xs, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xs[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs, half) + pairwise_sum(xs + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(xs.data(), xs.size());
}

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;   // unbiased
    double skewness = 0.0;   // standardized third moment
    std::size_t count = 0;
};

// Deterministic two-pass moments over a fixed-order array.
inline SampleStats compute_stats(const std::vector<double>& xs) {
    SampleStats st;
    st.count = xs.size();
    if (xs.empty()) return st;
    st.mean = pairwise_sum(xs) / static_cast<double>(xs.size());
    std::vector<double> d2(xs.size()), d3(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - st.mean;
        d2[i] = d * d;
        d3[i] = d * d * d;
    }
    const auto n = static_cast<double>(xs.size());
    const double m2 = pairwise_sum(d2) / n;
    const double m3 = pairwise_sum(d3) / n;
    st.variance = (xs.size() > 1) ? pairwise_sum(d2) / (n - 1.0) : 0.0;
    st.skewness = (m2 > 0.0) ? m3 / std::pow(m2, 1.5) : 0.0;
    return st;
}

// Snap a real coordinate onto an equispaced grid, rejecting off-grid input.
// Tolerance is absolute in index units, generous enough for round-trips of
// x0 + i*dx arithmetic but tight enough to catch genuinely misaligned probes.
inline std::size_t grid_index(double x, double x0, double dx, std::size_t num_points,
                              const char* what) {
    const double fi = (x - x0) / dx;
    const auto i = static_cast<long long>(std::llround(fi));
    if (i < 0 || static_cast<std::size_t>(i) >= num_points ||
        std::abs(fi - static_cast<double>(i)) > 1e-6) {
        throw std::domain_error(std::string(what) + ": coordinate " + std::to_string(x) +
                                " is not on the grid");
    }
    return static_cast<std::size_t>(i);
}

}  // namespace kpzlab

#pragma once

// Compactified hypograph geometry for upper semicontinuous data. A sampled
// function is mapped through the arctan compactification
//   Phi(x, y) = (arctan x, 2 arctan(y) / (pi (1 + x^2)))
// into the compact set K = {|z| < pi/2, |w| <= cos^2 z} plus the two poles
// (+-pi/2, 0). A hypograph becomes a union of vertical fibers reaching from
// the lower boundary of K up to the mapped sample, discretized at a fixed
// vertical step, and convergence questions reduce to Hausdorff distances
// between the resulting point clouds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kpzlab/numeric.hpp"

namespace kpzlab {

struct PlanarPoint {
    double z = 0.0;
    double w = 0.0;
};

namespace detail {
constexpr double hypo_pi = 3.141592653589793;
constexpr double hypo_half_pi = 1.5707963267948966;
}  // namespace detail

/// Phi(x, y) with arctan(+-inf) = +-pi/2. An infinite abscissa lands on the
/// matching pole (+-pi/2, 0) regardless of y.
inline PlanarPoint phi_map(double x, double y) {
    const double z = std::atan(x);
    if (std::isinf(x)) return {z, 0.0};
    const double w = 2.0 * std::atan(y) / (detail::hypo_pi * (1.0 + x * x));
    return {z, w};
}

/// Vertical-fiber discretization of a mapped hypograph. Fiber i sits at
/// z[i] = arctan(x_i) and carries the points top[i], top[i] - step, ... down
/// to the lower boundary lo[i] = -cos^2 z[i], with the boundary point itself
/// always included. The two poles complete the cloud.
struct HypographCloud {
    std::vector<double> z;
    std::vector<double> lo;
    std::vector<double> top;
    double step = 1e-3;

    std::size_t num_fibers() const { return z.size(); }

    /// Lattice points strictly above the lower boundary on fiber i.
    std::size_t fiber_rungs(std::size_t i) const {
        return static_cast<std::size_t>(std::floor((top[i] - lo[i]) / step)) + 1;
    }
};

inline HypographCloud make_hypograph_cloud(const std::vector<double>& x,
                                           const std::vector<double>& f,
                                           double step = 1e-3) {
    if (x.empty()) throw std::invalid_argument("make_hypograph_cloud: empty sample set");
    if (x.size() != f.size())
        throw std::invalid_argument("make_hypograph_cloud: abscissae and values differ in size");
    if (!(step > 0.0)) throw std::invalid_argument("make_hypograph_cloud: step must be positive");

    HypographCloud cloud;
    cloud.step = step;
    cloud.z.reserve(x.size());
    cloud.lo.reserve(x.size());
    cloud.top.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw std::invalid_argument("make_hypograph_cloud: abscissae must be finite");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw std::invalid_argument("make_hypograph_cloud: abscissae must increase");
        if (std::isnan(f[i]))
            throw std::invalid_argument("make_hypograph_cloud: sample values must not be NaN");
        const double scale = 1.0 / (1.0 + x[i] * x[i]);  // cos^2(arctan x)
        const double hi = scale;
        const double lo = -scale;
        double top = 2.0 * std::atan(f[i]) * scale / detail::hypo_pi;
        top = std::min(std::max(top, lo), hi);
        cloud.z.push_back(std::atan(x[i]));
        cloud.lo.push_back(lo);
        cloud.top.push_back(top);
    }
    return cloud;
}

/// Every point of the cloud in a flat list: fiber lattices from the top down,
/// the boundary point of each fiber, then the two poles.
inline std::vector<PlanarPoint> cloud_points(const HypographCloud& cloud) {
    std::vector<PlanarPoint> pts;
    for (std::size_t i = 0; i < cloud.num_fibers(); ++i) {
        const std::size_t rungs = cloud.fiber_rungs(i);
        for (std::size_t j = 0; j < rungs; ++j)
            pts.push_back({cloud.z[i], cloud.top[i] - double(j) * cloud.step});
        const double last = cloud.top[i] - double(rungs - 1) * cloud.step;
        if (last > cloud.lo[i]) pts.push_back({cloud.z[i], cloud.lo[i]});
    }
    pts.push_back({detail::hypo_half_pi, 0.0});
    pts.push_back({-detail::hypo_half_pi, 0.0});
    return pts;
}

namespace detail {

/// Squared distance from p to the nearest cloud point, found per fiber by
/// snapping to the nearest lattice rung (checking its neighbours and the
/// boundary point), then against the poles.
inline double point_to_cloud_sq(PlanarPoint p, const HypographCloud& c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < c.num_fibers(); ++i) {
        const double dz = p.z - c.z[i];
        const double dz2 = dz * dz;
        if (dz2 >= best) continue;
        const long long rungs = static_cast<long long>(c.fiber_rungs(i));
        long long j = std::llround((c.top[i] - p.w) / c.step);
        j = std::max(0LL, std::min(j, rungs - 1));
        for (long long jj = std::max(0LL, j - 1); jj <= std::min(rungs - 1, j + 1); ++jj) {
            const double dw = p.w - (c.top[i] - double(jj) * c.step);
            best = std::min(best, dz2 + dw * dw);
        }
        const double dwb = p.w - c.lo[i];
        best = std::min(best, dz2 + dwb * dwb);
    }
    for (const double pole : {hypo_half_pi, -hypo_half_pi}) {
        const double dz = p.z - pole;
        best = std::min(best, dz * dz + p.w * p.w);
    }
    return best;
}

inline double directed_hausdorff_sq(const HypographCloud& a, const HypographCloud& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.num_fibers(); ++i) {
        const std::size_t rungs = a.fiber_rungs(i);
        for (std::size_t j = 0; j < rungs; ++j) {
            const PlanarPoint p{a.z[i], a.top[i] - double(j) * a.step};
            worst = std::max(worst, point_to_cloud_sq(p, b));
        }
        const double last = a.top[i] - double(rungs - 1) * a.step;
        if (last > a.lo[i])
            worst = std::max(worst, point_to_cloud_sq({a.z[i], a.lo[i]}, b));
    }
    worst = std::max(worst, point_to_cloud_sq({hypo_half_pi, 0.0}, b));
    worst = std::max(worst, point_to_cloud_sq({-hypo_half_pi, 0.0}, b));
    return worst;
}

}  // namespace detail

/// Hausdorff distance between two fiber clouds.
inline double hypograph_distance(const HypographCloud& a, const HypographCloud& b) {
    if (a.num_fibers() == 0 || b.num_fibers() == 0)
        throw std::invalid_argument("hypograph_distance: empty sample set");
    return std::sqrt(std::max(detail::directed_hausdorff_sq(a, b),
                              detail::directed_hausdorff_sq(b, a)));
}

/// Convenience form for two functions sampled on one grid.
inline double hypograph_distance(const std::vector<double>& x, const std::vector<double>& f,
                                 const std::vector<double>& g, double step = 1e-3) {
    return hypograph_distance(make_hypograph_cloud(x, f, step),
                              make_hypograph_cloud(x, g, step));
}

// ---------------------------------------------------------------------------
// window suprema along a sequence
// ---------------------------------------------------------------------------

struct UcLimitReport {
    double closed_slack = 0.0;  // tail sup over the closed window minus the limit's sup
    double open_slack = 0.0;    // limit's sup over the open window minus the tail inf of sups
};

namespace detail {

inline double window_sup(const std::vector<double>& x, const std::vector<double>& v,
                         double lo, double hi, bool open) {
    double best = neg_inf;
    bool seen = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool inside = open ? (x[i] > lo && x[i] < hi) : (x[i] >= lo && x[i] <= hi);
        if (!inside) continue;
        seen = true;
        best = std::max(best, v[i]);
    }
    if (!seen) throw std::domain_error("uc_limit_check: window outside the sampled grid");
    return best;
}

inline double inf_aware_diff(double a, double b) {
    if (is_neg_inf(a) && is_neg_inf(b)) return 0.0;
    return a - b;
}

}  // namespace detail

/// Tail check of the two one-sided supremum bounds that characterize
/// convergence of upper semicontinuous data: over a closed window the tail
/// sups must not exceed the limit's sup, over an open window they must not
/// fall below it. Positive slacks flag a violation.
inline UcLimitReport uc_limit_check(const std::vector<std::vector<double>>& seq,
                                    const std::vector<double>& limit,
                                    const std::vector<double>& x, double closed_lo,
                                    double closed_hi, double open_lo, double open_hi,
                                    std::size_t tail_start = 0) {
    if (seq.empty()) throw std::invalid_argument("uc_limit_check: empty sequence");
    if (x.empty()) throw std::invalid_argument("uc_limit_check: empty sample set");
    if (limit.size() != x.size())
        throw std::invalid_argument("uc_limit_check: limit and grid differ in size");
    for (const auto& fn : seq)
        if (fn.size() != x.size())
            throw std::invalid_argument("uc_limit_check: sequence entry and grid differ in size");
    if (!(closed_lo <= closed_hi))
        throw std::invalid_argument("uc_limit_check: closed window must be ordered");
    if (!(open_lo < open_hi))
        throw std::invalid_argument("uc_limit_check: open window must be nonempty");
    if (tail_start >= seq.size())
        throw std::invalid_argument("uc_limit_check: tail starts past the sequence");

    const double limit_closed = detail::window_sup(x, limit, closed_lo, closed_hi, false);
    const double limit_open = detail::window_sup(x, limit, open_lo, open_hi, true);

    double tail_closed = neg_inf;
    double tail_open = std::numeric_limits<double>::infinity();
    for (std::size_t n = tail_start; n < seq.size(); ++n) {
        tail_closed =
            std::max(tail_closed, detail::window_sup(x, seq[n], closed_lo, closed_hi, false));
        tail_open = std::min(tail_open, detail::window_sup(x, seq[n], open_lo, open_hi, true));
    }

    UcLimitReport report;
    report.closed_slack = detail::inf_aware_diff(tail_closed, limit_closed);
    report.open_slack = detail::inf_aware_diff(limit_open, tail_open);
    return report;
}

}  // namespace kpzlab

#pragma once

/**
 * Geodesic extraction from max-plus action fields. The jump map F_T picks,
 * for a point (x,k), the rightmost grid point y <= x whose level-(k+1)
 * value transports to T(x,k); backtracking iterates it to assemble a
 * directed path on which T increments exactly match passage values. A
 * geodesic in turn induces its own action field, and the shallow slice of
 * the original field decomposes over those induced fields.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "actionfield.hpp"
#include "environment.hpp"
#include "lastpassage.hpp"
#include "numeric.hpp"

namespace kpzlab {

inline constexpr double geodesic_tol = 1e-9;

enum class Termination { edge_hit, bottomed_out, f_neg_inf };

inline const char* termination_name(Termination t) {
    switch (t) {
        case Termination::edge_hit: return "edge_hit";
        case Termination::bottomed_out: return "bottomed_out";
        default: return "f_neg_inf";
    }
}

/// Working state of a backtrack in progress. Entries accumulate from the
/// shallow end, so the finished path reverses them.
struct BacktrackState {
    Point current{0.0, 1};
    std::vector<double> entries_rev;
    Termination termination = Termination::f_neg_inf;
    bool done = false;
};

struct BacktrackResult {
    GeodesicPath path;
    Termination termination = Termination::f_neg_inf;
};

namespace detail {

inline void require_maxplus_on_grid(const ActionField& field, const GridEnvironment& env,
                                    const char* who) {
    if (field.kind() != FieldKind::max_plus)
        throw std::invalid_argument(std::string(who) + ": field must be max-plus kind");
    if (!field.same_grid(env)) throw std::domain_error(std::string(who) + ": grid mismatch");
}

}  // namespace detail

/// Rightmost grid point y <= x whose jump value reaches T(x,k) within the
/// tolerance; NEG_INF when no grid point qualifies (in particular whenever
/// the level below is absent).
inline double f_map(const ActionField& field, const GridEnvironment& env, double x, int k) {
    detail::require_maxplus_on_grid(field, env, "f_map");
    if (k < 1 || k > field.num_levels()) throw std::domain_error("f_map: invalid level");
    const std::size_t ix = env.index_of(x);
    if (k == field.num_levels()) return neg_inf;
    const double target = field.at(ix, k) - geodesic_tol;
    for (std::size_t i = ix + 1; i-- > 0;) {
        const double lifted = field.at(i, k + 1) + env.at(ix, k) - env.at(i, k);
        if (lifted >= target) return env.x(i);
    }
    return neg_inf;
}

/// Follows f_map from q: each found point is a level jump, and when no jump
/// exists the path runs left along its level for as long as the transported
/// value keeps matching, then stops. The flag records why it stopped.
inline BacktrackResult backtrack_geodesic(const ActionField& field, const GridEnvironment& env,
                                          Point q) {
    detail::require_maxplus_on_grid(field, env, "backtrack_geodesic");
    if (q.k < 1 || q.k > field.num_levels())
        throw std::domain_error("backtrack_geodesic: invalid level");
    const std::size_t iq = env.index_of(q.x);
    if (is_neg_inf(field.at(iq, q.k)))
        throw std::domain_error("backtrack_geodesic: field is empty at the query point");

    BacktrackState state;
    state.current = Point{env.x(iq), q.k};
    state.entries_rev.push_back(env.x(iq));
    while (!state.done) {
        const std::size_t ix = env.index_of(state.current.x);
        const int k = state.current.k;
        const double y = f_map(field, env, state.current.x, k);
        if (!is_neg_inf(y)) {
            state.entries_rev.push_back(y);
            if (env.index_of(y) == 0) {
                // the jump landed on the window edge: anything further left
                // is cut off, so stop with a degenerate deepest segment
                state.entries_rev.push_back(y);
                state.termination = Termination::edge_hit;
                state.done = true;
            } else {
                state.current = Point{y, k + 1};
            }
            continue;
        }
        // no jump: extend left while the level transports the value exactly
        const double gauge = field.at(ix, k) - env.at(ix, k);
        std::size_t left = ix;
        while (left > 0 && !is_neg_inf(field.at(left - 1, k)) &&
               std::abs(field.at(left - 1, k) - env.at(left - 1, k) - gauge) <= geodesic_tol)
            --left;
        state.entries_rev.push_back(env.x(left));
        state.termination = k == field.num_levels() ? Termination::bottomed_out
                                                    : Termination::f_neg_inf;
        state.done = true;
    }

    BacktrackResult result;
    result.termination = state.termination;
    result.path.k_bot = q.k;
    result.path.k_top = q.k + static_cast<int>(state.entries_rev.size()) - 2;
    result.path.entries.assign(state.entries_rev.rbegin(), state.entries_rev.rend());
    result.path.validate();
    return result;
}

/// Worst |T(q2) - T(q1) - passage(q1 -> q2)| over all ordered pairs of grid
/// points lying on the path.
inline double geodesic_consistency(const ActionField& field, const GridEnvironment& env,
                                   const GeodesicPath& path) {
    detail::require_maxplus_on_grid(field, env, "geodesic_consistency");
    path.validate();
    if (path.k_bot < 1 || path.k_top > field.num_levels())
        throw std::domain_error("geodesic_consistency: path leaves the field's levels");
    std::vector<Point> points;
    for (int j = path.k_top; j >= path.k_bot; --j) {
        const std::size_t lo = env.index_of(path.z(j + 1));
        const std::size_t hi = env.index_of(path.z(j));
        for (std::size_t i = lo; i <= hi; ++i) points.push_back(Point{env.x(i), j});
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < points.size(); ++a)
        for (std::size_t b = a; b < points.size(); ++b) {
            const double t1 = field.at(env.index_of(points[a].x), points[a].k);
            const double t2 = field.at(env.index_of(points[b].x), points[b].k);
            const double passage = lpp_value(env, points[a], points[b]);
            worst = std::max(worst, std::abs(t2 - t1 - passage));
        }
    return worst;
}

/// Finite-depth action induced by a geodesic: passage value from the path's
/// entry point into the requested level, recentred so the path's shallow
/// endpoint sits at zero.
inline ActionField geodesic_action(const GridEnvironment& env, const GeodesicPath& path,
                                   int depth) {
    path.validate();
    if (depth < path.k_bot || depth > path.k_top)
        throw std::domain_error("geodesic_action: depth outside the path's levels");
    if (path.k_top > env.num_levels())
        throw std::domain_error("geodesic_action: path leaves the environment's levels");
    const Point base{path.z(depth + 1), depth};
    const Point anchor{path.end_x(), path.k_bot};
    auto field = action_from_point(env, base);
    const double recentre = lpp_value(env, base, anchor);
    return shift_finite(field, -recentre);
}

struct DecompositionReport {
    double sup_value = neg_inf;
    double gap = 0.0;
};

/// Variational form of the shallow slice: T(y,1) against the sup over x of
/// geodesic_action(path through (x,1))(y,1) + T(x,1). The x = y term makes
/// the two sides meet, and no term may overshoot.
inline DecompositionReport decomposition_check(const ActionField& field,
                                               const GridEnvironment& env, double y,
                                               const std::vector<double>& x_grid, int depth) {
    detail::require_maxplus_on_grid(field, env, "decomposition_check");
    if (depth < 1) throw std::invalid_argument("decomposition_check: depth must be >= 1");
    const std::size_t iy = env.index_of(y);
    bool found = false;
    for (double x : x_grid) found = found || env.index_of(x) == iy;
    if (!found) throw std::domain_error("decomposition_check: y must belong to x_grid");

    DecompositionReport report;
    for (double x : x_grid) {
        const std::size_t ix = env.index_of(x);
        if (is_neg_inf(field.at(ix, 1)))
            throw std::domain_error("decomposition_check: field is empty at an x_grid point");
        const auto traced = backtrack_geodesic(field, env, Point{x, 1});
        const int d = std::min(depth, traced.path.k_top);
        const auto induced = geodesic_action(env, traced.path, d);
        const double term = induced.at(iy, 1);
        if (!is_neg_inf(term))
            report.sup_value = std::max(report.sup_value, term + field.at(ix, 1));
    }
    report.gap = field.at(iy, 1) - report.sup_value;
    return report;
}

/// CSV rows `level,entry_x,termination_flag`: one row per stored entry z_j,
/// labelled by j, deep end first.
inline std::string geodesic_to_csv(const GeodesicPath& path, Termination termination) {
    path.validate();
    std::string out = "level,entry_x,termination_flag\n";
    char buf[64];
    for (int j = path.k_top + 1; j >= path.k_bot; --j) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%s\n", j, path.z(j),
                      termination_name(termination));
        out += buf;
    }
    return out;
}

}  // namespace kpzlab

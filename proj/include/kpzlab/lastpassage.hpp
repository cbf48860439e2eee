#pragma once

/**
 * Last passage values, polymer free energies, and the metric inequalities
 * they satisfy.
 *
 * A directed path runs from a deeper level k_top to a shallower level k_bot
 * while moving right. It is recorded by its jump vector
 * (z_{k_top+1}, ..., z_{k_bot}): z_{k_top+1} is the start abscissa,
 * z_{k_bot} the end abscissa, and level j is occupied on [z_{j+1}, z_j].
 *
 * Every supremum over a continuous variable is evaluated at grid points
 * only; under the piecewise-linear reading of the environment this is exact,
 * not an approximation.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "environment.hpp"
#include "numeric.hpp"

namespace kpzlab {

struct Point {
    double x;
    int k;
};

/// q1 precedes q2 when a directed path can join them: x1 <= x2 and k1 >= k2.
inline bool precedes(const Point& q1, const Point& q2) {
    return q1.x <= q2.x && q1.k >= q2.k;
}

inline void require_order(const Point& q1, const Point& q2, const char* who) {
    if (!precedes(q1, q2))
        throw std::domain_error(std::string(who) + ": endpoints are not in path order");
}

struct GeodesicPath {
    int k_top = 1;                // deepest level, where the path starts
    int k_bot = 1;                // shallowest level, where it ends
    std::vector<double> entries;  // (z_{k_top+1}, ..., z_{k_bot}), nondecreasing

    /// z_j for j in [k_bot, k_top+1].
    double z(int j) const {
        if (j < k_bot || j > k_top + 1)
            throw std::domain_error("GeodesicPath: level outside [k_bot, k_top+1]");
        return entries[static_cast<std::size_t>(k_top + 1 - j)];
    }

    double start_x() const { return entries.front(); }
    double end_x() const { return entries.back(); }

    void validate() const {
        if (k_top < k_bot) throw std::runtime_error("GeodesicPath: k_top below k_bot");
        if (entries.size() != static_cast<std::size_t>(k_top - k_bot) + 2)
            throw std::runtime_error("GeodesicPath: entry count does not match level span");
        for (std::size_t i = 1; i < entries.size(); ++i)
            if (entries[i] < entries[i - 1])
                throw std::runtime_error("GeodesicPath: entries must be nondecreasing");
    }
};

/// Sum over occupied levels of the environment increment collected there:
/// sum_j A(z_j, j) - A(z_{j+1}, j).
inline double path_length(const GridEnvironment& env, const GeodesicPath& path) {
    path.validate();
    double total = 0.0;
    for (int j = path.k_bot; j <= path.k_top; ++j) {
        const std::size_t right = env.index_of(path.z(j));
        const std::size_t left = env.index_of(path.z(j + 1));
        total += env.at(right, j) - env.at(left, j);
    }
    return total;
}

/// Max of path_length over all grid jump vectors from q1 to q2, by a
/// level-by-level running-max sweep.
inline double lpp_value(const GridEnvironment& env, Point q1, Point q2) {
    require_order(q1, q2, "lpp_value");
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    const std::size_t m = i2 - i1 + 1;
    std::vector<double> v(m);
    for (std::size_t i = 0; i < m; ++i) v[i] = env.at(i1 + i, q1.k) - env.at(i1, q1.k);
    for (int k = q1.k - 1; k >= q2.k; --k) {
        double best = neg_inf;
        for (std::size_t i = 0; i < m; ++i) {
            best = std::max(best, v[i] - env.at(i1 + i, k));
            v[i] = env.at(i1 + i, k) + best;
        }
    }
    return v[m - 1];
}

/// log_w of the integral of w^(path length) over ordered jump vectors,
/// by the same level sweep with the running max replaced by a cumulative
/// trapezoid integral, accumulated in log space.
inline double polymer_free_energy(const GridEnvironment& env, Point q1, Point q2, double w) {
    require_order(q1, q2, "polymer_free_energy");
    if (!(w > 1.0)) throw std::invalid_argument("polymer_free_energy: w must exceed 1");
    const double s = std::log(w);
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    const std::size_t m = i2 - i1 + 1;
    const double log_half_dx = std::log(env.dx() / 2.0);
    // g holds s * (free energy) so the accumulation stays in natural log space
    std::vector<double> g(m);
    for (std::size_t i = 0; i < m; ++i)
        g[i] = s * (env.at(i1 + i, q1.k) - env.at(i1, q1.k));
    std::vector<double> h(m);
    for (int k = q1.k - 1; k >= q2.k; --k) {
        for (std::size_t i = 0; i < m; ++i) h[i] = g[i] - s * env.at(i1 + i, k);
        double integral = neg_inf;  // log of the cumulative trapezoid sum
        g[0] = neg_inf;
        for (std::size_t i = 1; i < m; ++i) {
            integral = log_add_exp(integral, log_half_dx + log_add_exp(h[i - 1], h[i]));
            g[i] = s * env.at(i1 + i, k) + integral;
        }
    }
    return g[m - 1] / s;
}

namespace detail {

inline void require_left_margin(std::size_t i1, const char* who) {
    if (i1 == 0)
        throw std::domain_error(std::string(who) +
                                ": start column needs a neighbour to its left");
}

}  // namespace detail

/// Log of the sum over directed lattice paths of exp(sum of per-site
/// increments); a path collects the increment of every site it touches,
/// including both endpoints.
inline double lattice_partition_dp(const LatticeEnvironment& env, Point q1, Point q2) {
    require_order(q1, q2, "lattice_partition_dp");
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    detail::require_left_margin(i1, "lattice_partition_dp");
    const std::size_t m = i2 - i1 + 1;
    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = env.at(i1 + i, q1.k) - env.at(i1 - 1, q1.k);
    for (int k = q1.k - 1; k >= q2.k; --k) {
        z[0] += env.increment(i1, k);
        for (std::size_t i = 1; i < m; ++i)
            z[i] = log_add_exp(z[i - 1], z[i]) + env.increment(i1 + i, k);
    }
    return z[m - 1];
}

/// Max-path companion of lattice_partition_dp (same site-sum convention).
inline double lattice_lpp_dp(const LatticeEnvironment& env, Point q1, Point q2) {
    require_order(q1, q2, "lattice_lpp_dp");
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    detail::require_left_margin(i1, "lattice_lpp_dp");
    const std::size_t m = i2 - i1 + 1;
    std::vector<double> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = env.at(i1 + i, q1.k) - env.at(i1 - 1, q1.k);
    for (int k = q1.k - 1; k >= q2.k; --k) {
        z[0] += env.increment(i1, k);
        for (std::size_t i = 1; i < m; ++i)
            z[i] = std::max(z[i - 1], z[i]) + env.increment(i1 + i, k);
    }
    return z[m - 1];
}

// ---------------------------------------------------------------------------
// multi-path optimum (enumeration; intended for small oracle instances)
// ---------------------------------------------------------------------------

namespace detail {

/// Enumerate all nondecreasing index vectors of length m with values in
/// [i1, i2]; each is the free part (z_{k1}, ..., z_{k2+1}) of a jump vector.
inline void enumerate_jump_vectors(std::size_t i1, std::size_t i2, std::size_t m,
                                   std::vector<std::size_t>& work,
                                   std::vector<std::vector<std::size_t>>& out) {
    if (work.size() == m) {
        out.push_back(work);
        return;
    }
    const std::size_t lo = work.empty() ? i1 : work.back();
    for (std::size_t j = lo; j <= i2; ++j) {
        work.push_back(j);
        enumerate_jump_vectors(i1, i2, m, work, out);
        work.pop_back();
    }
}

/// Occupied index interval of level k1 - t for the jump vector v.
inline std::pair<std::size_t, std::size_t> level_interval(
    const std::vector<std::size_t>& v, std::size_t i1, std::size_t i2, std::size_t t) {
    const std::size_t lo = (t == 0) ? i1 : v[t - 1];
    const std::size_t hi = (t == v.size()) ? i2 : v[t];
    return {lo, hi};
}

/// Interiors of the occupied intervals must not overlap on any level.
inline bool interiors_disjoint(const std::vector<std::vector<std::size_t>>& paths,
                               std::size_t i1, std::size_t i2, std::size_t num_spans) {
    for (std::size_t t = 0; t < num_spans; ++t) {
        for (std::size_t a = 0; a < paths.size(); ++a) {
            const auto ia = level_interval(paths[a], i1, i2, t);
            if (ia.first == ia.second) continue;  // degenerate, empty interior
            for (std::size_t b = a + 1; b < paths.size(); ++b) {
                const auto ib = level_interval(paths[b], i1, i2, t);
                if (ib.first == ib.second) continue;
                if (std::max(ia.first, ib.first) < std::min(ia.second, ib.second))
                    return false;
            }
        }
    }
    return true;
}

template <typename Value>
inline double best_disjoint_tuple(const std::vector<std::vector<std::size_t>>& all,
                                  int k_paths, std::size_t i1, std::size_t i2,
                                  std::size_t num_spans, Value&& value) {
    std::vector<std::vector<std::size_t>> tuple;
    double best = neg_inf;
    bool found = false;
    // lexicographically nondecreasing tuples cover every multiset once
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
        if (static_cast<int>(tuple.size()) == k_paths) {
            if (interiors_disjoint(tuple, i1, i2, num_spans)) {
                found = true;
                best = std::max(best, value(tuple));
            }
            return;
        }
        for (std::size_t p = from; p < all.size(); ++p) {
            tuple.push_back(all[p]);
            rec(p);
            tuple.pop_back();
        }
    };
    rec(0);
    if (!found)
        throw std::invalid_argument("multi_path_lpp: no admissible path configuration");
    return best;
}

}  // namespace detail

/// Max over k_paths pairwise interior-disjoint directed paths q1 -> q2 of
/// the total collected weight. Grid version: sum of path lengths.
inline double multi_path_lpp(const GridEnvironment& env, int k_paths, Point q1, Point q2) {
    require_order(q1, q2, "multi_path_lpp");
    if (k_paths < 1) throw std::invalid_argument("multi_path_lpp: k_paths must be >= 1");
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    const std::size_t m = static_cast<std::size_t>(q1.k - q2.k);
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> work;
    detail::enumerate_jump_vectors(i1, i2, m, work, all);
    return detail::best_disjoint_tuple(
        all, k_paths, i1, i2, m + 1, [&](const std::vector<std::vector<std::size_t>>& tuple) {
            double total = 0.0;
            for (const auto& v : tuple)
                for (std::size_t t = 0; t <= m; ++t) {
                    const auto iv = detail::level_interval(v, i1, i2, t);
                    const int k = q1.k - static_cast<int>(t);
                    total += env.at(iv.second, k) - env.at(iv.first, k);
                }
            return total;
        });
}

/// Lattice version: paths may share interval endpoints, and a site shared
/// that way is counted once, so the value is the increment sum over the
/// union of occupied sites.
inline double multi_path_lpp(const LatticeEnvironment& env, int k_paths, Point q1, Point q2) {
    require_order(q1, q2, "multi_path_lpp");
    if (k_paths < 1) throw std::invalid_argument("multi_path_lpp: k_paths must be >= 1");
    const std::size_t i1 = env.index_of(q1.x);
    const std::size_t i2 = env.index_of(q2.x);
    detail::require_left_margin(i1, "multi_path_lpp");
    const std::size_t m = static_cast<std::size_t>(q1.k - q2.k);
    std::vector<std::vector<std::size_t>> all;
    std::vector<std::size_t> work;
    detail::enumerate_jump_vectors(i1, i2, m, work, all);
    return detail::best_disjoint_tuple(
        all, k_paths, i1, i2, m + 1, [&](const std::vector<std::vector<std::size_t>>& tuple) {
            std::set<std::pair<int, std::size_t>> sites;
            for (const auto& v : tuple)
                for (std::size_t t = 0; t <= m; ++t) {
                    const auto iv = detail::level_interval(v, i1, i2, t);
                    const int k = q1.k - static_cast<int>(t);
                    for (std::size_t i = iv.first; i <= iv.second; ++i) sites.insert({k, i});
                }
            double total = 0.0;
            for (const auto& site : sites) total += env.increment(site.second, site.first);
            return total;
        });
}

// ---------------------------------------------------------------------------
// metric inequalities
// ---------------------------------------------------------------------------

/// Slack of the concatenation bound: lpp(q1,q3) - lpp(q1,q2) - lpp(q2,q3).
/// Nonnegative (up to float error) because joined paths form a valid path.
inline double check_triangle(const GridEnvironment& env, Point q1, Point q2, Point q3) {
    require_order(q1, q2, "check_triangle");
    require_order(q2, q3, "check_triangle");
    return lpp_value(env, q1, q3) - lpp_value(env, q1, q2) - lpp_value(env, q2, q3);
}

/// Slack of the crossing-swap bound for sources x <= xp on level m and sinks
/// y <= yp on level k: lpp(x,y) + lpp(xp,yp) - lpp(x,yp) - lpp(xp,y).
inline double check_quadrangle(const GridEnvironment& env, double x, double xp, double y,
                               double yp, int k, int m) {
    if (!(x <= xp && xp <= y && y <= yp))
        throw std::domain_error("check_quadrangle: abscissas must satisfy x <= x' <= y <= y'");
    if (k > m) throw std::domain_error("check_quadrangle: need sink level <= source level");
    const Point sx{x, m}, sxp{xp, m}, ty{y, k}, typ{yp, k};
    return lpp_value(env, sx, ty) + lpp_value(env, sxp, typ) - lpp_value(env, sx, typ) -
           lpp_value(env, sxp, ty);
}

}  // namespace kpzlab

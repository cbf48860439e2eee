#pragma once

/**
 * Melons: ordered line ensembles built from an environment so that passage
 * values through the lines reproduce passage values through the source.
 *
 * The max-plus ensemble is defined directly by its line sums: the first k
 * lines at y add up to the best total weight of k disjoint staircases from
 * the left corner to (y, .). Those multi-path values are computed exactly
 * by a column DP over level subsets (one level per path per column, levels
 * never increase along a path, paths stay strictly ordered), and the lines
 * are their successive differences. Two-line sorting words are not used
 * here: on a grid they fail to commute and do not reproduce the line sums
 * in general, because the sorted lines of a piecewise-linear environment
 * have kinks strictly inside cells that a grid cannot carry.
 *
 * The geometric ensembles replace max with a smoothed sum, which is exact
 * on the grid, so they are built by the word of adjacent sorts
 *   [s_{n-1} ... s_1][s_{n-1} ... s_2] ... [s_{n-1}],
 * where s_j resorts lines j and j+1 with
 *
 *   geometric  top(y) = f(y) + (1/s) log int_0^y e^{s (g - f)}        (s = ln w)
 *   lattice    top(y) = f(y) + log sum_{z=1..y} e^{g(z) - f(z-1)}     (w = e)
 *
 * and bot = f + g - top. Lines are anchored to zero at the origin before
 * sorting. The integral forms are empty at the origin, so transformed lines
 * are undefined on a wedge near it: the grid ensemble drops those columns,
 * and the lattice ensemble zeroes line k on 0 <= x <= k-1, which is exactly
 * the undefined wedge.
 */

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "environment.hpp"
#include "numeric.hpp"
#include "rng.hpp"

namespace kpzlab {

enum class MelonKind { brownian, oy, log_gamma };

inline const char* melon_kind_name(MelonKind k) {
    switch (k) {
        case MelonKind::brownian: return "brownian";
        case MelonKind::oy: return "oy";
        default: return "log_gamma";
    }
}

struct Melon {
    MelonKind kind;
    RngSpec source;
    std::variant<GridEnvironment, LatticeEnvironment> lines;

    Melon(MelonKind kind_, GridEnvironment lines_, RngSpec source_)
        : kind(kind_), source(source_), lines(std::move(lines_)) {}
    Melon(MelonKind kind_, LatticeEnvironment lines_, RngSpec source_)
        : kind(kind_), source(source_), lines(std::move(lines_)) {}

    const GridEnvironment& grid() const {
        if (const auto* g = std::get_if<GridEnvironment>(&lines)) return *g;
        throw std::domain_error("Melon: this melon is lattice-backed");
    }
    const LatticeEnvironment& lattice() const {
        if (const auto* l = std::get_if<LatticeEnvironment>(&lines)) return *l;
        throw std::domain_error("Melon: this melon is grid-backed");
    }
};

namespace detail {

// values that poison an exponential sum: the undefined wedge shows up as
// +inf or nan, while -inf is just an absent contribution
inline bool summable(double v) { return !std::isnan(v) && v < std::numeric_limits<double>::infinity(); }

// Multi-path passage values B[k-1][i]: best total weight of k disjoint
// staircases from the left corner to grid point i, for every i at once.
// State: the set of levels the k paths occupy in the current column. A
// step from mask S to mask T is allowed when, pairing off the sorted
// members, every path moves to an equal or higher line (smaller level).
inline std::vector<std::vector<double>> multi_path_values(const GridEnvironment& src) {
    const int n = src.num_levels();
    const std::size_t m = src.num_points();
    const unsigned full = (n >= 31) ? 0u : (1u << n);
    if (full == 0) throw std::invalid_argument("multi_path_values: too many levels");

    std::vector<int> levels_a, levels_b;
    auto unpack = [n](unsigned mask, std::vector<int>& out) {
        out.clear();
        for (int b = 0; b < n; ++b)
            if (mask & (1u << b)) out.push_back(b);
    };
    std::vector<std::vector<unsigned>> preds(full);  // same popcount, componentwise <=
    for (unsigned t = 1; t < full; ++t) {
        unpack(t, levels_a);
        for (unsigned s = 1; s < full; ++s) {
            if (std::popcount(s) != std::popcount(t)) continue;
            unpack(s, levels_b);
            bool ok = true;
            for (std::size_t j = 0; j < levels_a.size(); ++j)
                if (levels_a[j] > levels_b[j]) { ok = false; break; }
            if (ok) preds[t].push_back(s);
        }
    }

    std::vector<std::vector<double>> best(static_cast<std::size_t>(n),
                                          std::vector<double>(m, neg_inf));
    for (int k = 0; k < n; ++k) best[static_cast<std::size_t>(k)][0] = 0.0;
    std::vector<double> dp(full, neg_inf), next(full, neg_inf);
    for (std::size_t i = 1; i < m; ++i) {
        for (unsigned t = 1; t < full; ++t) {
            double inc = 0.0;
            for (int b = 0; b < n; ++b)
                if (t & (1u << b)) inc += src.at(i, b + 1) - src.at(i - 1, b + 1);
            double acc = (i == 1) ? 0.0 : neg_inf;
            for (unsigned s : preds[t]) acc = std::max(acc, dp[s]);
            next[t] = acc + inc;
        }
        dp.swap(next);
        for (unsigned t = 1; t < full; ++t) {
            auto& row = best[static_cast<std::size_t>(std::popcount(t)) - 1];
            row[i] = std::max(row[i], dp[t]);
        }
    }
    return best;
}

inline void geometric_sort(std::vector<double>& f, std::vector<double>& g, double s,
                           double dx) {
    const double log_half_dx = std::log(dx / 2.0);
    const std::size_t n = f.size();
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = s * (g[i] - f[i]);
    f[0] = neg_inf;  // empty integral
    g[0] = std::numeric_limits<double>::infinity();
    double acc = neg_inf;
    for (std::size_t i = 1; i < n; ++i) {
        if (summable(h[i - 1]) && summable(h[i]))
            acc = log_add_exp(acc, log_half_dx + log_add_exp(h[i - 1], h[i]));
        const double fi = f[i], gi = g[i];
        const double top = is_neg_inf(acc) ? neg_inf : fi + acc / s;
        f[i] = top;
        g[i] = fi + gi - top;
    }
}

inline void lattice_sort(std::vector<double>& f, std::vector<double>& g) {
    const std::size_t n = f.size();
    double prev_f = f[0];  // original f(z-1) for the running sum
    f[0] = neg_inf;        // empty sum
    g[0] = std::numeric_limits<double>::infinity();
    double acc = neg_inf;  // log sum over z of e^{g(z) - f(z-1)}
    for (std::size_t i = 1; i < n; ++i) {
        const double fi = f[i], gi = g[i];
        const double term = gi - prev_f;
        if (summable(term)) acc = log_add_exp(acc, term);
        const double top = is_neg_inf(acc) ? neg_inf : fi + acc;
        f[i] = top;
        g[i] = fi + gi - top;
        prev_f = fi;
    }
}

template <class Sort>
void apply_ladder_word(std::vector<std::vector<double>>& lines, Sort&& sort) {
    const int n = static_cast<int>(lines.size());
    for (int r = 1; r <= n - 1; ++r)
        for (int j = n - 1; j >= r; --j)
            sort(lines[static_cast<std::size_t>(j - 1)], lines[static_cast<std::size_t>(j)]);
}

inline std::vector<std::vector<double>> anchored_lines(const GridEnvironment& src) {
    std::vector<std::vector<double>> lines(static_cast<std::size_t>(src.num_levels()),
                                           std::vector<double>(src.num_points()));
    for (int k = 1; k <= src.num_levels(); ++k)
        for (std::size_t i = 0; i < src.num_points(); ++i)
            lines[static_cast<std::size_t>(k - 1)][i] = src.at(i, k) - src.at(0, k);
    return lines;
}

}  // namespace detail

/// Max-plus melon of a grid environment on [0, L]. The first k lines at
/// any grid point add up to the k-path disjoint passage value from the
/// left corner, so the top line carries the full passage value.
inline Melon brownian_melon(const GridEnvironment& src, RngSpec provenance = RngSpec{0, 0}) {
    if (src.x0() != 0.0) throw std::domain_error("brownian_melon: domain must start at 0");
    const auto values = detail::multi_path_values(src);
    GridEnvironment out(0.0, src.dx(), src.num_points(), src.num_levels());
    for (int k = 1; k <= src.num_levels(); ++k)
        for (std::size_t i = 0; i < src.num_points(); ++i) {
            const double below = (k == 1) ? 0.0 : values[static_cast<std::size_t>(k - 2)][i];
            out.set(i, k, values[static_cast<std::size_t>(k - 1)][i] - below);
        }
    return Melon(MelonKind::brownian, std::move(out), provenance);
}

/// Geometric melon of a grid environment on [0, L]: same word with the
/// log-integral sort at weight w. Transformed lines are undefined on the
/// first n-1 columns, which the output grid drops.
inline Melon oy_ensemble(const GridEnvironment& src, double w = std::exp(1.0),
                         RngSpec provenance = RngSpec{0, 0}) {
    if (src.x0() != 0.0) throw std::domain_error("oy_ensemble: domain must start at 0");
    if (!(w > 1.0)) throw std::invalid_argument("oy_ensemble: w must exceed 1");
    const double s = std::log(w);
    auto lines = detail::anchored_lines(src);
    detail::apply_ladder_word(lines, [&](std::vector<double>& f, std::vector<double>& g) {
        detail::geometric_sort(f, g, s, src.dx());
    });
    std::size_t offset = 0;
    for (const auto& line : lines)
        for (std::size_t i = 0; i < line.size(); ++i)
            if (!std::isfinite(line[i])) offset = std::max(offset, i + 1);
    if (src.num_points() < offset + 2)
        throw std::domain_error("oy_ensemble: grid too small for this many lines");
    GridEnvironment out(src.x(offset), src.dx(), src.num_points() - offset,
                        src.num_levels());
    for (int k = 1; k <= src.num_levels(); ++k)
        for (std::size_t i = offset; i < src.num_points(); ++i)
            out.set(i - offset, k, lines[static_cast<std::size_t>(k - 1)][i]);
    return Melon(MelonKind::oy, std::move(out), provenance);
}

/// Lattice melon of cumulative log-gamma data: ladder word with the
/// lattice sum sort at w = e, then line k is zeroed on 0 <= x <= k-1.
inline Melon lg_ensemble(const LatticeEnvironment& src, RngSpec provenance = RngSpec{0, 0}) {
    if (src.x0() != 0.0 || src.delta() != 1.0)
        throw std::domain_error("lg_ensemble: lattice must start at 0 with unit spacing");
    std::vector<std::vector<double>> lines(static_cast<std::size_t>(src.num_levels()),
                                           std::vector<double>(src.num_points()));
    for (int k = 1; k <= src.num_levels(); ++k)
        for (std::size_t i = 0; i < src.num_points(); ++i)
            lines[static_cast<std::size_t>(k - 1)][i] = src.at(i, k) - src.at(0, k);
    detail::apply_ladder_word(lines, detail::lattice_sort);
    LatticeEnvironment out(0.0, 1.0, src.num_points(), src.num_levels());
    for (int k = 1; k <= src.num_levels(); ++k)
        for (std::size_t i = 0; i < src.num_points(); ++i) {
            const bool padded = i + 1 <= static_cast<std::size_t>(k);  // x <= k-1
            out.set(i, k, padded ? 0.0 : lines[static_cast<std::size_t>(k - 1)][i]);
        }
    return Melon(MelonKind::log_gamma, std::move(out), provenance);
}

/// CSV rows in the environment layout plus a provenance column:
/// `x,level,value,provenance` (grid) or `i,level,value,provenance` (lattice).
inline std::string melon_to_csv(const Melon& melon) {
    char buf[96];
    std::string out;
    const char* tag = melon_kind_name(melon.kind);
    if (const auto* g = std::get_if<GridEnvironment>(&melon.lines)) {
        out = "x,level,value,provenance\n";
        for (int k = 1; k <= g->num_levels(); ++k)
            for (std::size_t i = 0; i < g->num_points(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%s\n", g->x(i), k,
                              g->at(i, k), tag);
                out += buf;
            }
    } else {
        const auto& l = melon.lattice();
        out = "i,level,value,provenance\n";
        for (int k = 1; k <= l.num_levels(); ++k)
            for (std::size_t i = 0; i < l.num_points(); ++i) {
                std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%s\n", i, k, l.at(i, k), tag);
                out += buf;
            }
    }
    return out;
}

}  // namespace kpzlab

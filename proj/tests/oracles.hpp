#pragma once

/**
 * Independent reference implementations used only by the tests.
 *
 * Everything in here is written against textbook definitions (series
 * expansions, brute-force enumeration, dense quadrature) with no reuse of the
 * library's own recursions, so a bug in the library cannot cancel against a
 * bug in its oracle.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracles {

// ---------------------------------------------------------------------------
// special-function references
// ---------------------------------------------------------------------------

/// Regularized lower incomplete gamma P(a,x) by series expansion.
inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Regularized upper incomplete gamma Q(a,x) by Lentz continued fraction.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

inline double gamma_q(double a, double x) { return 1.0 - gamma_p(a, x); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// CDF of W = 1/G with G ~ Gamma(theta, 1):  P(W <= w) = Q(theta, 1/w).
inline double inverse_gamma_cdf(double theta, double w) {
    if (w <= 0.0) return 0.0;
    return gamma_q(theta, 1.0 / w);
}

// ---------------------------------------------------------------------------
// one-sample Kolmogorov-Smirnov statistic against an exact CDF
// ---------------------------------------------------------------------------

inline double ks_against_cdf(std::vector<double> samples,
                             const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_against_cdf: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

// ---------------------------------------------------------------------------
// simple sample statistics (independent of the library's versions)
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double correlation_of(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = mean_of(a), mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// ---------------------------------------------------------------------------
// brute-force path functionals
// ---------------------------------------------------------------------------

/// All nondecreasing index vectors of length m with entries in [i1, i2].
inline std::vector<std::vector<std::size_t>> nondecreasing_tuples(std::size_t i1,
                                                                  std::size_t i2,
                                                                  std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> work;
    std::function<void()> rec = [&] {
        if (work.size() == m) {
            out.push_back(work);
            return;
        }
        for (std::size_t j = work.empty() ? i1 : work.back(); j <= i2; ++j) {
            work.push_back(j);
            rec();
            work.pop_back();
        }
    };
    rec();
    return out;
}

/// Direct evaluation of one grid path's collected weight: jump vector v is
/// (z_{k1}, ..., z_{k2+1}) as indices, start i1 on level k1, end i2 on k2.
template <typename Env>
inline double grid_path_weight(const Env& env, const std::vector<std::size_t>& v,
                               std::size_t i1, std::size_t i2, int k1) {
    double total = 0.0;
    for (std::size_t t = 0; t <= v.size(); ++t) {
        const std::size_t lo = (t == 0) ? i1 : v[t - 1];
        const std::size_t hi = (t == v.size()) ? i2 : v[t];
        const int k = k1 - static_cast<int>(t);
        total += env.at(hi, k) - env.at(lo, k);
    }
    return total;
}

/// Max over all grid jump vectors, by full enumeration.
template <typename Env>
inline double lpp_enumerate(const Env& env, std::size_t i1, int k1, std::size_t i2, int k2) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_v;
    for (const auto& v : nondecreasing_tuples(i1, i2, static_cast<std::size_t>(k1 - k2)))
        best = std::max(best, grid_path_weight(env, v, i1, i2, k1));
    return best;
}

/// Argmax version; ties resolved toward the lexicographically smallest
/// (leftmost) jump vector to match the library's sweep convention.
template <typename Env>
inline std::vector<std::size_t> lpp_enumerate_argmax(const Env& env, std::size_t i1, int k1,
                                                     std::size_t i2, int k2) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_v;
    for (const auto& v : nondecreasing_tuples(i1, i2, static_cast<std::size_t>(k1 - k2))) {
        const double len = grid_path_weight(env, v, i1, i2, k1);
        if (len > best) {
            best = len;
            best_v = v;
        }
    }
    return best_v;
}

/// Defining trapezoid recursion for the polymer free energy evaluated
/// naively in linear space with extended precision (small instances only).
template <typename Env>
inline double polymer_naive(const Env& env, std::size_t i1, int k1, std::size_t i2, int k2,
                            double w) {
    const long double s = std::log(static_cast<long double>(w));
    const std::size_t m = i2 - i1 + 1;
    std::vector<long double> f(m);  // w^(free energy), linear space
    for (std::size_t i = 0; i < m; ++i)
        f[i] = std::exp(s * static_cast<long double>(env.at(i1 + i, k1) - env.at(i1, k1)));
    for (int k = k1 - 1; k >= k2; --k) {
        std::vector<long double> g(m, 0.0L);
        long double integral = 0.0L;
        for (std::size_t i = 1; i < m; ++i) {
            const long double a = f[i - 1] * std::exp(-s * static_cast<long double>(env.at(i1 + i - 1, k)));
            const long double b = f[i] * std::exp(-s * static_cast<long double>(env.at(i1 + i, k)));
            integral += static_cast<long double>(env.dx()) / 2.0L * (a + b);
            g[i] = std::exp(s * static_cast<long double>(env.at(i1 + i, k))) * integral;
        }
        f = g;
    }
    return static_cast<double>(std::log(f[m - 1]) / s);
}

/// Log-partition over vertex-disjoint lattice path pairs: the first path runs
/// (ia1, ka1) -> (ia2, ka2), the second (ib1, kb1) -> (ib2, kb2). Each path
/// collects every site it touches (both endpoints included) and the two site
/// sets must not intersect.
template <typename Env>
inline double lattice_disjoint_pair_partition(const Env& env, std::size_t ia1, int ka1,
                                              std::size_t ia2, int ka2, std::size_t ib1,
                                              int kb1, std::size_t ib2, int kb2) {
    auto collect = [&](const std::vector<std::size_t>& v, std::size_t i1, int k1,
                       std::size_t i2, std::set<std::pair<int, std::size_t>>& sites) {
        long double weight = 0.0L;
        for (std::size_t t = 0; t <= v.size(); ++t) {
            const std::size_t lo = (t == 0) ? i1 : v[t - 1];
            const std::size_t hi = (t == v.size()) ? i2 : v[t];
            const int k = k1 - static_cast<int>(t);
            weight += static_cast<long double>(env.at(hi, k) - env.at(lo - 1, k));
            for (std::size_t i = lo; i <= hi; ++i) sites.insert({k, i});
        }
        return weight;
    };
    long double total = 0.0L;
    for (const auto& va : nondecreasing_tuples(ia1, ia2, static_cast<std::size_t>(ka1 - ka2)))
        for (const auto& vb : nondecreasing_tuples(ib1, ib2, static_cast<std::size_t>(kb1 - kb2))) {
            std::set<std::pair<int, std::size_t>> sa, sb;
            const long double wa = collect(va, ia1, ka1, ia2, sa);
            const long double wb = collect(vb, ib1, kb1, ib2, sb);
            bool disjoint = true;
            for (const auto& s : sa)
                if (sb.count(s) != 0) {
                    disjoint = false;
                    break;
                }
            if (disjoint) total += std::exp(wa + wb);
        }
    return static_cast<double>(std::log(total));
}

/// Lattice partition function by full path enumeration: each path collects
/// the increment of every site it touches (both endpoints included), and the
/// weights are summed in linear space with extended precision.
template <typename Env>
inline double lattice_partition_enumerate(const Env& env, std::size_t i1, int k1,
                                          std::size_t i2, int k2) {
    long double total = 0.0L;
    for (const auto& v : nondecreasing_tuples(i1, i2, static_cast<std::size_t>(k1 - k2))) {
        long double weight = 0.0L;
        for (std::size_t t = 0; t <= v.size(); ++t) {
            const std::size_t lo = (t == 0) ? i1 : v[t - 1];
            const std::size_t hi = (t == v.size()) ? i2 : v[t];
            const int k = k1 - static_cast<int>(t);
            weight += static_cast<long double>(env.at(hi, k) - env.at(lo - 1, k));
        }
        total += std::exp(weight);
    }
    return static_cast<double>(std::log(total));
}

// ---------------------------------------------------------------------------
// planar Hausdorff distance by double loop
// ---------------------------------------------------------------------------

/// Hausdorff distance between two finite planar point sets, straight from the
/// max-min definition. Quadratic in the set sizes.
template <typename P>
inline double hausdorff_brute(const std::vector<P>& a, const std::vector<P>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("hausdorff_brute: empty point set");
    auto directed = [](const std::vector<P>& from, const std::vector<P>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                const double dz = p.z - q.z;
                const double dw = p.w - q.w;
                best = std::min(best, dz * dz + dw * dw);
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

}  // namespace oracles

#pragma once

// Action representations: a melon line ensemble Z(0,.,.) together with the
// family of passage/partition fields Z(x,.,.) grown from points on the top
// level. The class stores both parts on a common window, checks the defining
// axioms numerically, and applies affine changes of variables such as the
// 1:2:3 rescalings that send each model toward its fixed point.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kpzlab/actionfield.hpp"
#include "kpzlab/environment.hpp"
#include "kpzlab/lastpassage.hpp"
#include "kpzlab/melons.hpp"
#include "kpzlab/numeric.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/special_functions.hpp"

namespace kpzlab {

// ---------------------------------------------------------------------------
// model tags
// ---------------------------------------------------------------------------

enum class RepModel { bl, oy, lg, kpz };

inline const char* rep_model_name(RepModel m) {
    switch (m) {
        case RepModel::bl: return "bl";
        case RepModel::oy: return "oy";
        case RepModel::lg: return "lg";
        case RepModel::kpz: return "kpz";
    }
    return "unknown";
}

inline RepModel rep_model_from_name(const std::string& name) {
    if (name == "bl") return RepModel::bl;
    if (name == "oy") return RepModel::oy;
    if (name == "lg") return RepModel::lg;
    if (name == "kpz") return RepModel::kpz;
    throw std::invalid_argument("rep_model_from_name: unknown model '" + name + "'");
}

// ---------------------------------------------------------------------------
// scaling parameter packs
// ---------------------------------------------------------------------------

/// Coefficients of the affine substitution
///   x -> a2 x, y -> a2 y + a3, value -> a1 value + a4 (y - x) + a5.
/// A per-level table a5k may replace the single constant a5 on the melon
/// lines; growth fields always use the level-one constant.
struct ScalingParams {
    RepModel model = RepModel::bl;
    double a1 = 1.0;
    double a2 = 1.0;
    double a3 = 0.0;
    double a4 = 0.0;
    double a5 = 0.0;
    std::vector<double> a5k;  // optional per-level constants, entry k-1 for level k

    double a5_for(int k) const {
        if (a5k.empty()) return a5;
        if (k < 1 || static_cast<std::size_t>(k) > a5k.size())
            throw std::domain_error("ScalingParams: no a5 entry for requested level");
        return a5k[static_cast<std::size_t>(k - 1)];
    }
};

inline void require_scaling(const ScalingParams& p, const char* who) {
    if (!(p.a1 > 0.0)) throw std::invalid_argument(std::string(who) + ": a1 must be positive");
    if (!(p.a2 > 0.0)) throw std::invalid_argument(std::string(who) + ": a2 must be positive");
    for (double c : {p.a3, p.a4, p.a5})
        if (!std::isfinite(c))
            throw std::invalid_argument(std::string(who) + ": shift constants must be finite");
    for (double c : p.a5k)
        if (!std::isfinite(c))
            throw std::invalid_argument(std::string(who) + ": a5 table must be finite");
}

/// Constants for the semidiscrete polymer at inverse temperature kappa:
/// theta solves trigamma(theta) = kappa, c is the cube root of
/// -tetragamma(theta)/2, and f = theta kappa - digamma(theta).
inline ScalingParams oy_scaling_constants(double kappa) {
    if (!(kappa > 0.0))
        throw std::domain_error("oy_scaling_constants: kappa must be positive");
    const double theta = invert_trigamma(kappa);
    const double c = std::cbrt(-0.5 * tetragamma(theta));
    const double f = theta * kappa - digamma(theta);
    ScalingParams p;
    p.model = RepModel::oy;
    p.a1 = 1.0 / c;
    p.a2 = 2.0 * c * c;
    p.a3 = kappa;
    p.a4 = -2.0 * theta * c;
    p.a5 = -f / c;
    return p;
}

/// Centering and scale data for the inverse-gamma lattice polymer. The
/// values h(1), h'(1), d(1) come from the stationary polymer literature and
/// are supplied through a data file rather than being fixed here.
struct LgScalingConfig {
    double theta = 2.0;
    double h1 = 0.0;
    double h1_prime = 0.0;
    double d1 = 1.0;
};

inline LgScalingConfig load_lg_scaling(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_lg_scaling: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("load_lg_scaling: invalid JSON in " + path + ": " + e.what());
    }
    LgScalingConfig cfg;
    for (const char* key : {"theta", "h1", "h1_prime", "d1"})
        if (!j.contains(key) || !j[key].is_number())
            throw std::runtime_error("load_lg_scaling: missing numeric field '" +
                                     std::string(key) + "' in " + path);
    cfg.theta = j["theta"].get<double>();
    cfg.h1 = j["h1"].get<double>();
    cfg.h1_prime = j["h1_prime"].get<double>();
    cfg.d1 = j["d1"].get<double>();
    if (!(cfg.theta > 0.0))
        throw std::runtime_error("load_lg_scaling: theta must be positive in " + path);
    if (!(cfg.d1 > 0.0))
        throw std::runtime_error("load_lg_scaling: d1 must be positive in " + path);
    return cfg;
}

inline ScalingParams lg_scaling_constants(const LgScalingConfig& cfg) {
    if (!(cfg.theta > 0.0))
        throw std::domain_error("lg_scaling_constants: theta must be positive");
    if (!(cfg.d1 > 0.0))
        throw std::domain_error("lg_scaling_constants: d1 must be positive");
    const double sigma_sq = trigamma(cfg.theta / 2.0);
    ScalingParams p;
    p.model = RepModel::lg;
    p.a1 = 1.0 / cfg.d1;
    p.a2 = 2.0 * cfg.d1 * cfg.d1 / sigma_sq;
    p.a3 = 1.0;
    p.a4 = -2.0 * cfg.d1 * cfg.h1_prime / sigma_sq;
    p.a5 = cfg.h1 / cfg.d1;
    return p;
}

/// The displayed rescaling of the Brownian model at n lines:
/// value -> n^{1/6} value, x -> 2 n^{-1/3} x, y -> 2 n^{-1/3} y + 1.
inline ScalingParams bl_fixed_point_params(int n) {
    if (n < 1) throw std::invalid_argument("bl_fixed_point_params: need n >= 1");
    const double n13 = std::cbrt(static_cast<double>(n));
    ScalingParams p;
    p.model = RepModel::bl;
    p.a1 = std::sqrt(n13);
    p.a2 = 2.0 / n13;
    p.a3 = 1.0;
    p.a4 = -2.0 * n13;
    p.a5 = -2.0 * n13 * n13;
    return p;
}

/// Applies the 1:2:3 powers of n to a base constant pack: a1 n^{-1/3},
/// a2 n^{2/3}, a3 n, a4 n^{1/3}, a5 n^{2/3}.
inline ScalingParams fixed_point_params(const ScalingParams& base, int n) {
    require_scaling(base, "fixed_point_params");
    if (n < 1) throw std::invalid_argument("fixed_point_params: need n >= 1");
    const double n13 = std::cbrt(static_cast<double>(n));
    ScalingParams p = base;
    p.a1 = base.a1 / n13;
    p.a2 = base.a2 * n13 * n13;
    p.a3 = base.a3 * n;
    p.a4 = base.a4 * n13;
    p.a5 = base.a5 * n13 * n13;
    p.a5k.clear();
    return p;
}

/// Centering constants of the semidiscrete-to-stochastic-heat comparison at
/// time t with n lines.
struct KpzConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> c3;  // entry k-1 for level k
};

inline KpzConstants kpz_constants(double t, int n) {
    if (!(t > 0.0)) throw std::invalid_argument("kpz_constants: t must be positive");
    if (n < 1) throw std::invalid_argument("kpz_constants: need n >= 1");
    const double nd = static_cast<double>(n);
    KpzConstants c;
    c.c1 = std::sqrt(nd / t) + 0.5;
    c.c2 = nd + 0.5 * std::sqrt(nd * t) - (nd - 1.0) * std::log(std::sqrt(nd / t));
    c.c3.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k)
        c.c3.push_back(-(k - 1) * std::log(t) + std::lgamma(static_cast<double>(k)));
    return c;
}

// ---------------------------------------------------------------------------
// growth fields rooted at a point
// ---------------------------------------------------------------------------

/// T(y,k) = polymer free energy from q0 = (x, k0) through the environment,
/// -inf off the forward cone. Level k0 carries the increments of line k0
/// from x; lower levels come from the trapezoid reflection with an empty
/// left edge.
inline ActionField polymer_from_point(const GridEnvironment& env, double w, Point q0) {
    const std::size_t i0 = env.index_of(q0.x);
    if (q0.k < 1 || q0.k > env.num_levels())
        throw std::domain_error("polymer_from_point: source level outside environment");
    if (!(w > 1.0)) throw std::invalid_argument("polymer_from_point: w must exceed 1");
    ActionField field(env.x0(), env.dx(), env.num_points(), env.num_levels(),
                      FieldKind::w_polymer, w);
    std::vector<double> slice(env.num_points(), neg_inf);
    for (std::size_t i = i0; i < env.num_points(); ++i)
        slice[i] = env.at(i, q0.k) - env.at(i0, q0.k);
    for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, q0.k, slice[i]);
    for (int k = q0.k - 1; k >= 1; --k) {
        slice = polymer_reflect(env, w, k, slice, neg_inf);
        for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, k, slice[i]);
    }
    return field;
}

/// Lattice counterpart: T(y,k) = partition sum from q0 = (x, k0), anchored
/// so that the site at q0 itself is included, -inf off the cone. The source
/// column needs a left neighbour because lattice increments look one column
/// back.
inline ActionField discrete_polymer_from_point(const LatticeEnvironment& env, double w,
                                               Point q0) {
    const std::size_t i0 = env.index_of(q0.x);
    if (q0.k < 1 || q0.k > env.num_levels())
        throw std::domain_error("discrete_polymer_from_point: source level outside environment");
    if (i0 == 0)
        throw std::domain_error(
            "discrete_polymer_from_point: source column needs a left neighbour");
    if (!(w > 1.0))
        throw std::invalid_argument("discrete_polymer_from_point: w must exceed 1");
    const double s = std::log(w);
    ActionField field(env.x0(), env.delta(), env.num_points(), env.num_levels(),
                      FieldKind::discrete_polymer, w);
    for (std::size_t i = i0; i < env.num_points(); ++i)
        field.set(i, q0.k, env.at(i, q0.k) - env.at(i0 - 1, q0.k));
    for (int k = q0.k - 1; k >= 1; --k) {
        for (std::size_t i = 1; i < env.num_points(); ++i) {
            const double a = field.at(i - 1, k);
            const double b = field.at(i, k + 1);
            if (is_neg_inf(a) && is_neg_inf(b)) continue;
            const double combined = log_add_exp(is_neg_inf(a) ? neg_inf : s * a,
                                                is_neg_inf(b) ? neg_inf : s * b) /
                                    s;
            field.set(i, k, combined + env.increment(i, k));
        }
    }
    return field;
}

// ---------------------------------------------------------------------------
// the representation object
// ---------------------------------------------------------------------------

/// Melon lines plus growth fields on a common window. Values follow the
/// convention Z(0,y,k) = line k of the melon and Z(x,y,k) = growth field of
/// the slice rooted over x, for the slice positions chosen at build time.
/// Immutable after construction; readers may share it across threads.
struct ActionRepresentation {
    RepModel model;
    FieldKind kind;
    double weight;  // polymer weight, 0 for max-plus kinds
    double alpha;   // the sheet is real on y >= x - alpha
    int levels;     // number of melon lines n; the size pair is (alpha, n + 1)
    Melon melon;
    std::vector<double> slice_x;              // ascending positions, all > 0
    std::vector<ActionField> slices;          // one field per position
    std::vector<int> slice_source_level;      // boundary-data level of each slice

    ActionRepresentation(RepModel model_, FieldKind kind_, double weight_, double alpha_,
                         int levels_, Melon melon_, std::vector<double> slice_x_,
                         std::vector<ActionField> slices_, std::vector<int> source_levels_)
        : model(model_),
          kind(kind_),
          weight(weight_),
          alpha(alpha_),
          levels(levels_),
          melon(std::move(melon_)),
          slice_x(std::move(slice_x_)),
          slices(std::move(slices_)),
          slice_source_level(std::move(source_levels_)) {
        if (levels < 1)
            throw std::invalid_argument("ActionRepresentation: need at least one line");
        if (slice_x.size() != slices.size() || slice_x.size() != slice_source_level.size())
            throw std::invalid_argument("ActionRepresentation: slice table size mismatch");
        if (!std::is_sorted(slice_x.begin(), slice_x.end()))
            throw std::invalid_argument("ActionRepresentation: slice positions must ascend");
        for (double x : slice_x)
            if (!(x > 0.0))
                throw std::invalid_argument("ActionRepresentation: slice positions must be positive");
        if (kind_is_polymer(kind) && !(weight > 1.0))
            throw std::invalid_argument("ActionRepresentation: polymer weight must exceed 1");
    }

    bool discrete() const {
        return kind == FieldKind::discrete || kind == FieldKind::discrete_polymer;
    }
    int size_j() const { return levels + 1; }
    std::size_t num_slices() const { return slices.size(); }

    double y0() const { return discrete() ? melon.lattice().x0() : melon.grid().x0(); }
    double spacing() const { return discrete() ? melon.lattice().delta() : melon.grid().dx(); }
    std::size_t num_points() const {
        return discrete() ? melon.lattice().num_points() : melon.grid().num_points();
    }
    double y_at(std::size_t i) const { return discrete() ? melon.lattice().x(i) : melon.grid().x(i); }

    double line_at(std::size_t i, int k) const {
        return discrete() ? melon.lattice().at(i, k) : melon.grid().at(i, k);
    }

    std::size_t y_index(double y) const {
        return discrete() ? melon.lattice().index_of(y) : melon.grid().index_of(y);
    }

    /// Index of the slice rooted at x, matched up to a small multiple of the
    /// spacing; throws when no slice was built there.
    std::size_t slice_index(double x) const {
        const auto it = std::lower_bound(slice_x.begin(), slice_x.end(), x);
        const double tol = 1e-6 * spacing();
        if (it != slice_x.end() && std::abs(*it - x) <= tol)
            return static_cast<std::size_t>(it - slice_x.begin());
        if (it != slice_x.begin() && std::abs(*(it - 1) - x) <= tol)
            return static_cast<std::size_t>(it - slice_x.begin() - 1);
        throw std::domain_error("ActionRepresentation: no slice at x = " + std::to_string(x));
    }

    /// Z(x,y,k) by coordinates. x = 0 reads the melon lines, x > 0 the slice
    /// rooted there; anything else is outside the stored window.
    double value(double x, double y, int k) const {
        if (k < 1 || k > levels)
            throw std::domain_error("ActionRepresentation: level out of range");
        if (x < 0.0)
            throw std::domain_error("ActionRepresentation: x must be nonnegative");
        if (x == 0.0) return line_at(y_index(y), k);
        const std::size_t j = slice_index(x);
        return slices[j].at(y_index(y), k);
    }
};

/// Z(x,y,1) viewed as a two-parameter sheet.
inline double sheet_value(const ActionRepresentation& rep, double x, double y) {
    return rep.value(x, y, 1);
}

/// Quadrangle combination Z(x1,y1,1) + Z(x2,y2,1) - Z(x1,y2,1) - Z(x2,y1,1),
/// which the axioms require to be nonnegative for x1 <= x2, y1 <= y2.
inline double quadrangle_residual(const ActionRepresentation& rep, double x1, double x2,
                                  double y1, double y2) {
    if (!(x1 <= x2) || !(y1 <= y2))
        throw std::domain_error("quadrangle_residual: need x1 <= x2 and y1 <= y2");
    return rep.value(x1, y1, 1) + rep.value(x2, y2, 1) - rep.value(x1, y2, 1) -
           rep.value(x2, y1, 1);
}

// ---------------------------------------------------------------------------
// axiom labels
// ---------------------------------------------------------------------------

inline const char* line_axiom_label(FieldKind kind) {
    return (kind == FieldKind::discrete || kind == FieldKind::discrete_polymer) ? "(Zd2)"
                                                                                : "(Z1)";
}

inline const char* recursion_axiom_label(FieldKind kind) {
    switch (kind) {
        case FieldKind::max_plus: return "(Z2)";
        case FieldKind::w_polymer: return "(Z2')";
        case FieldKind::discrete: return "(Zd1)";
        case FieldKind::discrete_polymer: return "(Zd1')";
    }
    return "(Z2)";
}

inline const char* sheet_axiom_label(FieldKind kind) {
    return (kind == FieldKind::discrete || kind == FieldKind::discrete_polymer) ? "(Zd2)"
                                                                                : "(Z3)";
}

inline const char* quadrangle_axiom_label(FieldKind kind) {
    return (kind == FieldKind::discrete || kind == FieldKind::discrete_polymer) ? "(Zd3)"
                                                                                : "(Z4)";
}

// ---------------------------------------------------------------------------
// axiom measurement and validation
// ---------------------------------------------------------------------------

struct ValidationOptions {
    std::size_t recursion_samples = 2000;
    std::size_t quadrangle_samples = 10000;
    double recursion_tol = 1e-8;
    double quadrangle_tol = 1e-9;
};

struct AxiomReport {
    double worst_recursion = 0.0;    // max |residual| over sampled triples
    double worst_quadrangle = 0.0;   // most negative quadrangle combination
    double worst_monotone = 0.0;     // most negative step of Z(x,.,1) - Z(0,.,1)
    std::size_t recursion_samples = 0;
    std::size_t quadrangle_samples = 0;
};

namespace detail {

inline std::size_t pick(CounterRng& rng, std::size_t n) {
    const auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
}

}  // namespace detail

/// Samples the recursion and quadrangle axioms and scans the structural
/// ones. Non-finite line or sheet values throw immediately; the returned
/// magnitudes let callers apply their own tolerances.
inline AxiomReport measure_axioms(const ActionRepresentation& rep, RngSpec rng_spec,
                                  const ValidationOptions& opt = {}) {
    AxiomReport report;
    const std::size_t m = rep.num_points();

    // line data must be real on the whole window
    for (int k = 1; k <= rep.levels; ++k)
        for (std::size_t i = 0; i < m; ++i)
            if (!std::isfinite(rep.line_at(i, k)))
                throw std::runtime_error(
                    std::string("action representation axiom ") + line_axiom_label(rep.kind) +
                    " violated: line value not finite at (y = " + std::to_string(rep.y_at(i)) +
                    ", k = " + std::to_string(k) + ")");

    // the sheet must be real on y >= x - alpha
    const double geom_tol = 1e-9 * std::max(1.0, std::abs(rep.alpha));
    for (std::size_t j = 0; j < rep.num_slices(); ++j) {
        const double x = rep.slice_x[j];
        for (std::size_t i = 0; i < m; ++i) {
            if (rep.y_at(i) < x - rep.alpha - geom_tol) continue;
            if (!std::isfinite(rep.slices[j].at(i, 1)))
                throw std::runtime_error(
                    std::string("action representation axiom ") + sheet_axiom_label(rep.kind) +
                    " violated: sheet value not finite at (x = " + std::to_string(x) +
                    ", y = " + std::to_string(rep.y_at(i)) + ")");
        }
    }

    CounterRng rng(rng_spec);

    // recursion residuals of the growth fields against the melon
    if (rep.levels >= 2 && rep.num_slices() > 0) {
        for (std::size_t t = 0; t < opt.recursion_samples; ++t) {
            const std::size_t j = detail::pick(rng, rep.num_slices());
            const int k = 1 + static_cast<int>(detail::pick(
                                  rng, static_cast<std::size_t>(rep.levels - 1)));
            if (k == rep.slice_source_level[j]) continue;
            std::size_t ix = detail::pick(rng, m);
            std::size_t iy = detail::pick(rng, m);
            if (ix > iy) std::swap(ix, iy);
            double r = 0.0;
            switch (rep.kind) {
                case FieldKind::max_plus:
                    r = maxplus_recursion_residual(rep.slices[j], rep.melon.grid(), ix, iy, k);
                    break;
                case FieldKind::w_polymer:
                    r = polymer_recursion_residual(rep.slices[j], rep.melon.grid(), ix, iy, k);
                    break;
                case FieldKind::discrete:
                    r = discrete_recursion_residual(rep.slices[j], rep.melon.lattice(), ix, iy,
                                                   k);
                    break;
                case FieldKind::discrete_polymer:
                    r = discrete_polymer_recursion_residual(rep.slices[j], rep.melon.lattice(),
                                                            ix, iy, k);
                    break;
            }
            if (std::isnan(r) || std::isinf(r))
                throw std::runtime_error(
                    std::string("action representation axiom ") +
                    recursion_axiom_label(rep.kind) +
                    " violated: one-sided recursion value at (x = " +
                    std::to_string(rep.y_at(ix)) + ", y = " + std::to_string(rep.y_at(iy)) +
                    ", k = " + std::to_string(k) + ")");
            report.worst_recursion = std::max(report.worst_recursion, std::abs(r));
            ++report.recursion_samples;
        }
    }

    // quadrangle combinations of the sheet, melon included as x = 0
    if (rep.num_slices() > 0) {
        const std::size_t num_positions = rep.num_slices() + 1;  // melon plus slices
        for (std::size_t t = 0; t < opt.quadrangle_samples; ++t) {
            std::size_t u = detail::pick(rng, num_positions);
            std::size_t v = detail::pick(rng, num_positions);
            if (u > v) std::swap(u, v);
            const double x2 = v == 0 ? 0.0 : rep.slice_x[v - 1];
            std::size_t i1 = detail::pick(rng, m);
            std::size_t i2 = detail::pick(rng, m);
            if (i1 > i2) std::swap(i1, i2);
            if (rep.y_at(i1) < x2 - rep.alpha - geom_tol) continue;
            auto at = [&](std::size_t pos, std::size_t i) {
                return pos == 0 ? rep.line_at(i, 1) : rep.slices[pos - 1].at(i, 1);
            };
            const double r = at(u, i1) + at(v, i2) - at(u, i2) - at(v, i1);
            report.worst_quadrangle = std::min(report.worst_quadrangle, r);
            ++report.quadrangle_samples;
        }
    }

    // difference profile against the top line, a consequence of the
    // quadrangle with x1 = 0 that is cheap to scan exhaustively
    for (std::size_t j = 0; j < rep.num_slices(); ++j) {
        const double x = rep.slice_x[j];
        bool have_prev = false;
        double prev = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (rep.y_at(i) < x - rep.alpha - geom_tol) continue;
            const double d = rep.slices[j].at(i, 1) - rep.line_at(i, 1);
            if (!std::isfinite(d)) continue;
            if (have_prev) report.worst_monotone = std::min(report.worst_monotone, d - prev);
            prev = d;
            have_prev = true;
        }
    }

    return report;
}

/// Throws a construction error naming the first violated axiom.
inline void validate_representation(const ActionRepresentation& rep, RngSpec rng_spec,
                                    const ValidationOptions& opt = {}) {
    const AxiomReport report = measure_axioms(rep, rng_spec, opt);
    if (report.worst_recursion > opt.recursion_tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "action representation axiom %s violated: recursion residual %.3e "
                      "exceeds %.3e",
                      recursion_axiom_label(rep.kind), report.worst_recursion,
                      opt.recursion_tol);
        throw std::runtime_error(buf);
    }
    if (report.worst_quadrangle < -opt.quadrangle_tol) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "action representation axiom %s violated: quadrangle combination %.3e "
                      "below -%.3e",
                      quadrangle_axiom_label(rep.kind), report.worst_quadrangle,
                      opt.quadrangle_tol);
        throw std::runtime_error(buf);
    }
}

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

/// Build request for one representation instance. The window is [0, length]
/// for the continuum models and the columns 0..num_points-1 for the lattice
/// one. An empty slice_positions list asks for every admissible position.
struct RepresentationSpec {
    RepModel model = RepModel::bl;
    int levels = 2;
    std::size_t num_points = 41;
    double length = 1.0;
    double weight = std::exp(1.0);  // semidiscrete polymer weight
    double theta = 2.0;             // inverse-gamma shape for the lattice model
    std::vector<double> slice_positions;
};

inline ValidationOptions default_validation(RepModel) {
    // Every model passes the strict tolerances: the quadrangle combinations
    // compare passage values inside one fixed discretized environment, where
    // the crossing-swap argument is exact, so violations can only be
    // rounding noise.
    return ValidationOptions{};
}

namespace detail {

inline std::vector<std::size_t> slice_indices_for(const RepresentationSpec& spec,
                                                  double grid_x0, double grid_dx,
                                                  std::size_t grid_points,
                                                  std::size_t first_admissible) {
    std::vector<std::size_t> idx;
    if (spec.slice_positions.empty()) {
        for (std::size_t i = first_admissible; i < grid_points; ++i) idx.push_back(i);
    } else {
        for (double x : spec.slice_positions) {
            const std::size_t i = grid_index(x, grid_x0, grid_dx, grid_points,
                                             "build_representation slice position");
            if (i < first_admissible)
                throw std::domain_error(
                    "build_representation: slice position too close to the window edge");
            idx.push_back(i);
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }
    if (idx.empty())
        throw std::invalid_argument("build_representation: no admissible slice positions");
    return idx;
}

}  // namespace detail

/// Samples an environment with the given stream, melonizes it, and grows one
/// field per slice position. Rebuilding with the same spec and stream
/// reproduces the object bit for bit. The result is checked against the
/// axioms before it is returned.
inline ActionRepresentation build_representation(const RepresentationSpec& spec, RngSpec rng,
                                                 const ValidationOptions& opt) {
    if (spec.levels < 1)
        throw std::invalid_argument("build_representation: need at least one line");
    if (spec.num_points < 2)
        throw std::invalid_argument("build_representation: need at least two grid points");

    std::optional<ActionRepresentation> out;

    switch (spec.model) {
        case RepModel::bl: {
            if (!(spec.length > 0.0))
                throw std::invalid_argument("build_representation: length must be positive");
            const double dx = spec.length / static_cast<double>(spec.num_points - 1);
            const GridEnvironment src =
                sample_brownian(spec.levels, 0.0, dx, spec.num_points, rng);
            Melon melon = brownian_melon(src, rng);
            const GridEnvironment& g = melon.grid();
            const auto idx = detail::slice_indices_for(spec, g.x0(), g.dx(), g.num_points(), 1);
            std::vector<double> xs(idx.size());
            std::vector<int> src_levels(idx.size(), spec.levels);
            std::vector<std::optional<ActionField>> tmp(idx.size());
            parallel_for(idx.size(), [&](std::size_t j) {
                xs[j] = g.x(idx[j]);
                tmp[j] = action_from_point(g, Point{xs[j], spec.levels});
            });
            std::vector<ActionField> slices;
            slices.reserve(tmp.size());
            for (auto& f : tmp) slices.push_back(std::move(*f));
            out.emplace(RepModel::bl, FieldKind::max_plus, 0.0, 0.0, spec.levels,
                        std::move(melon), std::move(xs), std::move(slices),
                        std::move(src_levels));
            break;
        }
        case RepModel::oy: {
            if (!(spec.length > 0.0))
                throw std::invalid_argument("build_representation: length must be positive");
            if (!(spec.weight > 1.0))
                throw std::invalid_argument("build_representation: weight must exceed 1");
            const double dx = spec.length / static_cast<double>(spec.num_points - 1);
            const GridEnvironment src =
                sample_brownian(spec.levels, 0.0, dx, spec.num_points, rng);
            Melon melon = oy_ensemble(src, spec.weight, rng);
            const GridEnvironment& g = melon.grid();
            // the leftmost melon point only sees the zero-width degenerate
            // path, so growth fields start one cell in
            const auto idx = detail::slice_indices_for(spec, g.x0(), g.dx(), g.num_points(), 1);
            std::vector<double> xs(idx.size());
            std::vector<int> src_levels(idx.size(), spec.levels);
            std::vector<std::optional<ActionField>> tmp(idx.size());
            parallel_for(idx.size(), [&](std::size_t j) {
                xs[j] = g.x(idx[j]);
                tmp[j] = polymer_from_point(g, spec.weight, Point{xs[j], spec.levels});
            });
            std::vector<ActionField> slices;
            slices.reserve(tmp.size());
            for (auto& f : tmp) slices.push_back(std::move(*f));
            out.emplace(RepModel::oy, FieldKind::w_polymer, spec.weight, 0.0, spec.levels,
                        std::move(melon), std::move(xs), std::move(slices),
                        std::move(src_levels));
            break;
        }
        case RepModel::lg: {
            if (!(spec.theta > 0.0))
                throw std::invalid_argument("build_representation: theta must be positive");
            const LatticeEnvironment src = sample_inverse_gamma_lattice(
                spec.theta, spec.num_points - 1, spec.levels, rng);
            Melon melon = lg_ensemble(src, rng);
            const LatticeEnvironment& l = melon.lattice();
            // a slice at column x roots its field at column x + 1, which must
            // still lie inside the window
            if (l.num_points() < 3)
                throw std::invalid_argument(
                    "build_representation: lattice window too narrow for slices");
            std::vector<std::size_t> idx = detail::slice_indices_for(
                spec, l.x0(), l.delta(), l.num_points() - 1, 1);
            const double e = std::exp(1.0);
            std::vector<double> xs(idx.size());
            std::vector<int> src_levels(idx.size());
            std::vector<std::optional<ActionField>> tmp(idx.size());
            parallel_for(idx.size(), [&](std::size_t j) {
                xs[j] = l.x(idx[j]);
                const int k0 = std::min(spec.levels, static_cast<int>(idx[j]) + 1);
                src_levels[j] = k0;
                tmp[j] = discrete_polymer_from_point(l, e, Point{xs[j] + 1.0, k0});
            });
            std::vector<ActionField> slices;
            slices.reserve(tmp.size());
            for (auto& f : tmp) slices.push_back(std::move(*f));
            out.emplace(RepModel::lg, FieldKind::discrete_polymer, e, -1.0, spec.levels,
                        std::move(melon), std::move(xs), std::move(slices),
                        std::move(src_levels));
            break;
        }
        case RepModel::kpz:
            throw std::invalid_argument(
                "build_representation: the prelimit comes from rescaling an oy build");
    }

    validate_representation(*out, RngSpec{rng.seed, rng.stream_id ^ 0x5a5a5a5a5a5a5a5aULL},
                            opt);
    return std::move(*out);
}

inline ActionRepresentation build_representation(const RepresentationSpec& spec, RngSpec rng) {
    return build_representation(spec, rng, default_validation(spec.model));
}

// ---------------------------------------------------------------------------
// change of variables
// ---------------------------------------------------------------------------

/// Applies the affine substitution to every stored value and coordinate:
///   Z'(x,y,k) = a1 Z(a2 x, a2 y + a3, k) + a4 (y - x) + a5(k or 1) + level
/// The level correction keeps the growth-field recursion closed under the
/// substitution and depends on the kind. For the continuum polymer the
/// intermediate integrals change volume element, giving (k-1) a1 log_w a2 on
/// lines and slices alike. For the lattice kinds a level descent counts its
/// column at both levels, so the spanned increment gains a4 dx' per descent;
/// the compensating -(k-1) a4 dx' lives on the slice rows only, leaving the
/// lines and the k = 1 sheet on the plain displayed map. The weight becomes
/// w^{1/a1} and the size pair becomes ((alpha + a3)/a2, j).
inline ActionRepresentation change_of_variables(const ActionRepresentation& rep,
                                                const ScalingParams& p) {
    require_scaling(p, "change_of_variables");
    if (p.model != rep.model)
        throw std::invalid_argument("change_of_variables: params target model '" +
                                    std::string(rep_model_name(p.model)) +
                                    "' but the representation is '" +
                                    std::string(rep_model_name(rep.model)) + "'");
    if (!p.a5k.empty() && p.a5k.size() < static_cast<std::size_t>(rep.levels))
        throw std::invalid_argument("change_of_variables: need one a5 entry per level");

    const bool polymer = kind_is_polymer(rep.kind);
    const double new_weight = polymer ? std::exp(std::log(rep.weight) / p.a1) : 0.0;
    const double new_alpha = (rep.alpha + p.a3) / p.a2;

    const double x0p = (rep.y0() - p.a3) / p.a2;
    const double dxp = rep.spacing() / p.a2;
    const std::size_t m = rep.num_points();

    const double volume_unit = (rep.kind == FieldKind::w_polymer)
                                   ? p.a1 * std::log(p.a2) / std::log(rep.weight)
                                   : 0.0;
    const double slice_unit = rep.discrete() ? -p.a4 * dxp : volume_unit;

    auto line_map = [&](std::size_t i, int k) {
        const double v = rep.line_at(i, k);
        if (is_neg_inf(v)) return neg_inf;
        const double yp = x0p + static_cast<double>(i) * dxp;
        return p.a1 * v + p.a4 * yp + p.a5_for(k) + (k - 1) * volume_unit;
    };

    std::optional<Melon> new_melon;
    if (rep.discrete()) {
        LatticeEnvironment lines(x0p, dxp, m, rep.levels);
        for (int k = 1; k <= rep.levels; ++k)
            for (std::size_t i = 0; i < m; ++i) lines.set(i, k, line_map(i, k));
        new_melon.emplace(rep.melon.kind, std::move(lines), rep.melon.source);
    } else {
        GridEnvironment lines(x0p, dxp, m, rep.levels);
        for (int k = 1; k <= rep.levels; ++k)
            for (std::size_t i = 0; i < m; ++i) lines.set(i, k, line_map(i, k));
        new_melon.emplace(rep.melon.kind, std::move(lines), rep.melon.source);
    }

    std::vector<double> new_x(rep.num_slices());
    std::vector<std::optional<ActionField>> tmp(rep.num_slices());
    parallel_for(rep.num_slices(), [&](std::size_t j) {
        new_x[j] = rep.slice_x[j] / p.a2;
        const ActionField& f = rep.slices[j];
        ActionField g(x0p, dxp, m, rep.levels, rep.kind, polymer ? new_weight : 0.0);
        const double a51 = p.a5_for(1);
        for (int k = 1; k <= rep.levels; ++k) {
            for (std::size_t i = 0; i < m; ++i) {
                const double v = f.at(i, k);
                if (is_neg_inf(v)) continue;
                const double yp = x0p + static_cast<double>(i) * dxp;
                g.set(i, k, p.a1 * v + p.a4 * (yp - new_x[j]) + a51 + (k - 1) * slice_unit);
            }
        }
        tmp[j] = std::move(g);
    });
    std::vector<ActionField> new_slices;
    new_slices.reserve(tmp.size());
    for (auto& f : tmp) new_slices.push_back(std::move(*f));

    return ActionRepresentation(rep.model, rep.kind, new_weight, new_alpha, rep.levels,
                                std::move(*new_melon), std::move(new_x),
                                std::move(new_slices),
                                std::vector<int>(rep.slice_source_level));
}

// ---------------------------------------------------------------------------
// fixed point rescalings
// ---------------------------------------------------------------------------

/// 1:2:3 rescaling of a Brownian build at its own line count.
inline ActionRepresentation scale_to_fixed_point(const ActionRepresentation& rep, int n) {
    if (rep.model != RepModel::bl)
        throw std::invalid_argument(
            "scale_to_fixed_point: the parameter-free form applies to bl builds");
    if (n != rep.levels)
        throw std::invalid_argument(
            "scale_to_fixed_point: n must match the number of lines");
    return change_of_variables(rep, bl_fixed_point_params(n));
}

/// 1:2:3 rescaling of a polymer build with model constants supplied.
inline ActionRepresentation scale_to_fixed_point(const ActionRepresentation& rep,
                                                 const ScalingParams& base, int n) {
    if (rep.model != base.model)
        throw std::invalid_argument("scale_to_fixed_point: constants target a different model");
    if (n != rep.levels)
        throw std::invalid_argument(
            "scale_to_fixed_point: n must match the number of lines");
    return change_of_variables(rep, fixed_point_params(base, n));
}

/// Recenters a semidiscrete polymer build into the prelimit of the stochastic
/// heat comparison at time t: y -> y + sqrt(t n), value minus C1 (y - x),
/// minus C2, minus the per-level C3. This is a change of variables with
/// a1 = a2 = 1, so the weight and spacing survive unchanged.
inline ActionRepresentation scale_oy_to_kpz(const ActionRepresentation& rep, double t) {
    if (rep.model != RepModel::oy)
        throw std::invalid_argument("scale_oy_to_kpz: needs an oy representation");
    const KpzConstants c = kpz_constants(t, rep.levels);
    ScalingParams p;
    p.model = RepModel::oy;
    p.a1 = 1.0;
    p.a2 = 1.0;
    p.a3 = std::sqrt(t * static_cast<double>(rep.levels));
    p.a4 = -c.c1;
    p.a5k.reserve(c.c3.size());
    for (double c3 : c.c3) p.a5k.push_back(-(c.c2 + c3));
    p.a5 = p.a5k.front();
    ActionRepresentation out = change_of_variables(rep, p);
    out.model = RepModel::kpz;
    return out;
}

// ---------------------------------------------------------------------------
// scaled sheets straight from the source environment
// ---------------------------------------------------------------------------

/// n^{1/6} B((2 n^{-1/3} x, n) -> (1 + 2 n^{-1/3} y, 1)) - 2 n^{1/3} (y - x)
/// - 2 n^{2/3}, evaluated in the unmelonized source. Keeps large n cheap.
inline double bl_sheet_to_fixed_point(const GridEnvironment& src, int n, double x, double y) {
    if (n < 1 || n > src.num_levels())
        throw std::invalid_argument("bl_sheet_to_fixed_point: n outside the environment");
    const double n13 = std::cbrt(static_cast<double>(n));
    const double xs = 2.0 * x / n13;
    const double ys = 1.0 + 2.0 * y / n13;
    const double v = lpp_value(src, Point{xs, n}, Point{ys, 1});
    return std::sqrt(n13) * v - 2.0 * n13 * (y - x) - 2.0 * n13 * n13;
}

/// Same shape for the semidiscrete polymer with supplied constants.
inline double oy_sheet_to_fixed_point(const GridEnvironment& src, const ScalingParams& base,
                                      int n, double x, double y,
                                      double w = std::exp(1.0)) {
    if (n < 1 || n > src.num_levels())
        throw std::invalid_argument("oy_sheet_to_fixed_point: n outside the environment");
    const ScalingParams fp = fixed_point_params(base, n);
    const double v =
        polymer_free_energy(src, Point{fp.a2 * x, n}, Point{fp.a2 * y + fp.a3, 1}, w);
    return fp.a1 * v + fp.a4 * (y - x) + fp.a5;
}

/// Lattice version: the scaled start sits one column right of a2 n^{2/3} x.
inline double lg_sheet_to_fixed_point(const LatticeEnvironment& src,
                                      const ScalingParams& base, int n, double x, double y) {
    if (n < 1 || n > src.num_levels())
        throw std::invalid_argument("lg_sheet_to_fixed_point: n outside the environment");
    const ScalingParams fp = fixed_point_params(base, n);
    const double v =
        lattice_partition_dp(src, Point{fp.a2 * x + 1.0, n}, Point{fp.a2 * y + fp.a3, 1});
    return fp.a1 * v + fp.a4 * (y - x) + fp.a5;
}

// ---------------------------------------------------------------------------
// reports and serialization
// ---------------------------------------------------------------------------

/// Most negative forward step of y -> Z(x,y,1) - Z(0,y,1) for one slice;
/// the quadrangle forces this profile to be nondecreasing, so a clean build
/// returns a value no smaller than rounding noise.
inline double monotone_difference_defect(const ActionRepresentation& rep, std::size_t slice) {
    if (slice >= rep.num_slices())
        throw std::domain_error("monotone_difference_defect: slice index out of range");
    const double x = rep.slice_x[slice];
    double worst = 0.0;
    bool have_prev = false;
    double prev = 0.0;
    for (std::size_t i = 0; i < rep.num_points(); ++i) {
        if (rep.y_at(i) < x - rep.alpha - 1e-9) continue;
        const double d = rep.slices[slice].at(i, 1) - rep.line_at(i, 1);
        if (!std::isfinite(d)) continue;
        if (have_prev) worst = std::min(worst, d - prev);
        prev = d;
        have_prev = true;
    }
    return worst;
}

/// Plain table of every stored value, melon lines first as x = 0, then the
/// slices in ascending position. Columns are x,y,level,value with -inf
/// spelled literally.
inline std::string representation_to_csv(const ActionRepresentation& rep) {
    std::string out = "x,y,level,value\n";
    char buf[160];
    auto emit = [&](double x, double y, int k, double v) {
        if (is_neg_inf(v))
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,-inf\n", x, y, k);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", x, y, k, v);
        out += buf;
    };
    for (int k = 1; k <= rep.levels; ++k)
        for (std::size_t i = 0; i < rep.num_points(); ++i)
            emit(0.0, rep.y_at(i), k, rep.line_at(i, k));
    for (std::size_t j = 0; j < rep.num_slices(); ++j)
        for (int k = 1; k <= rep.levels; ++k)
            for (std::size_t i = 0; i < rep.num_points(); ++i)
                emit(rep.slice_x[j], rep.y_at(i), k, rep.slices[j].at(i, k));
    return out;
}

}  // namespace kpzlab

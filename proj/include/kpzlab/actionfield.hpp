#pragma once

/**
 * Action fields: multi-level value functions T(y,k) coupled to an
 * environment through one of four recursions.
 *
 *   max-plus          T(y,k) = (T(x,k)+dA) v sup_z (T(z,k+1)+A(y,k)-A(z,k))
 *   w-polymer         w^T(y,k) = w^(T(x,k)+dA) + int w^(T(z,k+1)+A(y,k)-A(z,k)) dz
 *   discrete          T(y,k) = (T(y-d,k) v T(y,k+1)) + A(y,k)-A(y-d,k)
 *   discrete-polymer  w^T(y,k) = (w^T(y-d,k) + w^T(y,k+1)) * w^(A(y,k)-A(y-d,k))
 *
 * The deepest stored level is boundary data; every shallower level is
 * computed from it left-to-right, so the recursions hold at all grid pairs
 * by construction. Integrals use trapezoid cells on the grid and every
 * polymer accumulation runs in log space. Values live in R u {-inf};
 * +inf is rejected because no finite-grid evolution can produce it and
 * admitting it would poison the max-plus sweeps.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "environment.hpp"
#include "lastpassage.hpp"
#include "numeric.hpp"

namespace kpzlab {

enum class FieldKind { max_plus, w_polymer, discrete, discrete_polymer };

inline bool kind_is_polymer(FieldKind k) {
    return k == FieldKind::w_polymer || k == FieldKind::discrete_polymer;
}

class ActionField {
  public:
    ActionField(double x0, double spacing, std::size_t num_points, int num_levels,
                FieldKind kind, double w = 0.0)
        : x0_(x0), spacing_(spacing), num_points_(num_points), num_levels_(num_levels),
          kind_(kind), w_(kind_is_polymer(kind) ? w : 0.0),
          values_(num_points * static_cast<std::size_t>(num_levels), neg_inf) {
        if (spacing <= 0.0) throw std::invalid_argument("ActionField: spacing must be positive");
        if (num_points < 2) throw std::invalid_argument("ActionField: need >= 2 grid points");
        if (num_levels < 1) throw std::invalid_argument("ActionField: need >= 1 level");
        if (kind_is_polymer(kind) && !(w > 1.0))
            throw std::invalid_argument("ActionField: polymer kinds need w > 1");
    }

    double x0() const { return x0_; }
    double spacing() const { return spacing_; }
    std::size_t num_points() const { return num_points_; }
    int num_levels() const { return num_levels_; }
    FieldKind kind() const { return kind_; }
    double w() const { return w_; }

    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * spacing_; }

    std::size_t index_of(double xq) const {
        return grid_index(xq, x0_, spacing_, num_points_, "ActionField");
    }

    double at(std::size_t i, int k) const { return values_[offset(i, k)]; }

    void set(std::size_t i, int k, double v) {
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw std::invalid_argument("ActionField: values must be finite or -inf");
        values_[offset(i, k)] = v;
    }

    bool same_grid(const GridEnvironment& env) const {
        return x0_ == env.x0() && spacing_ == env.dx() && num_points_ == env.num_points();
    }
    bool same_grid(const LatticeEnvironment& env) const {
        return x0_ == env.x0() && spacing_ == env.delta() && num_points_ == env.num_points();
    }
    bool same_grid(const ActionField& o) const {
        return x0_ == o.x0_ && spacing_ == o.spacing_ && num_points_ == o.num_points_ &&
               num_levels_ == o.num_levels_;
    }

  private:
    std::size_t offset(std::size_t i, int k) const {
        if (i >= num_points_ || k < 1 || k > num_levels_)
            throw std::domain_error("ActionField: index out of range");
        return static_cast<std::size_t>(k - 1) * num_points_ + i;
    }

    double x0_, spacing_;
    std::size_t num_points_;
    int num_levels_;
    FieldKind kind_;
    double w_;
    std::vector<double> values_;
};

inline std::vector<double> neg_inf_slice(std::size_t n) {
    return std::vector<double>(n, neg_inf);
}

namespace detail {

inline void require_slice(const std::vector<double>& slice, std::size_t n, const char* who) {
    if (slice.size() != n)
        throw std::domain_error(std::string(who) + ": slice size does not match grid");
    for (double v : slice)
        if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
            throw std::invalid_argument(std::string(who) + ": slice values must be finite or -inf");
}

inline void require_init(double init, const char* who) {
    if (std::isnan(init) || init == std::numeric_limits<double>::infinity())
        throw std::invalid_argument(std::string(who) + ": init must be finite or -inf");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// max-plus evolution
// ---------------------------------------------------------------------------

/// One level of the max-plus recursion, left to right: the output is the
/// reflection of the driver A(.,k) off the barrier slice, started from the
/// given value at the left grid edge. Grid-exact for piecewise-linear data.
inline std::vector<double> skorokhod_reflect(const GridEnvironment& env, int k,
                                             const std::vector<double>& barrier, double init) {
    detail::require_slice(barrier, env.num_points(), "skorokhod_reflect");
    detail::require_init(init, "skorokhod_reflect");
    std::vector<double> out(env.num_points());
    // running = max(init - A(x0,k), max_{z<=y} (barrier(z) - A(z,k)))
    double running = is_neg_inf(init) ? neg_inf : init - env.at(0, k);
    for (std::size_t i = 0; i < env.num_points(); ++i) {
        if (!is_neg_inf(barrier[i])) running = std::max(running, barrier[i] - env.at(i, k));
        out[i] = is_neg_inf(running) ? neg_inf : env.at(i, k) + running;
    }
    return out;
}

/// Full max-plus field: the deepest level holds top_boundary as data, and
/// each shallower level k reflects off the one below with left_inits[k-1]
/// at the edge.
inline ActionField evolve_action(const GridEnvironment& env,
                                 const std::vector<double>& top_boundary,
                                 const std::vector<double>& left_inits) {
    detail::require_slice(top_boundary, env.num_points(), "evolve_action");
    if (left_inits.size() + 1 != static_cast<std::size_t>(env.num_levels()))
        throw std::domain_error("evolve_action: need one left init per computed level");
    ActionField field(env.x0(), env.dx(), env.num_points(), env.num_levels(),
                      FieldKind::max_plus);
    std::vector<double> slice = top_boundary;
    for (std::size_t i = 0; i < env.num_points(); ++i)
        field.set(i, env.num_levels(), slice[i]);
    for (int k = env.num_levels() - 1; k >= 1; --k) {
        slice = skorokhod_reflect(env, k, slice, left_inits[static_cast<std::size_t>(k - 1)]);
        for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, k, slice[i]);
    }
    return field;
}

/// T(p) = lpp_value(q0 -> p) on the forward cone of q0, -inf elsewhere.
inline ActionField action_from_point(const GridEnvironment& env, Point q0) {
    const std::size_t i0 = env.index_of(q0.x);
    if (q0.k < 1 || q0.k > env.num_levels())
        throw std::domain_error("action_from_point: source level outside environment");
    ActionField field(env.x0(), env.dx(), env.num_points(), env.num_levels(),
                      FieldKind::max_plus);
    std::vector<double> slice(env.num_points(), neg_inf);
    for (std::size_t i = i0; i < env.num_points(); ++i)
        slice[i] = env.at(i, q0.k) - env.at(i0, q0.k);
    for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, q0.k, slice[i]);
    for (int k = q0.k - 1; k >= 1; --k) {
        slice = skorokhod_reflect(env, k, slice, neg_inf);
        for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, k, slice[i]);
    }
    return field;
}

/// Pointwise maximum of max-plus fields on a common grid.
inline ActionField sup_of_actions(const std::vector<ActionField>& fields) {
    if (fields.empty()) throw std::invalid_argument("sup_of_actions: empty family");
    const ActionField& first = fields.front();
    for (const auto& f : fields) {
        if (f.kind() != FieldKind::max_plus)
            throw std::invalid_argument("sup_of_actions: only max-plus fields can be joined");
        if (!f.same_grid(first)) throw std::domain_error("sup_of_actions: grid mismatch");
    }
    ActionField out(first.x0(), first.spacing(), first.num_points(), first.num_levels(),
                    FieldKind::max_plus);
    for (int k = 1; k <= first.num_levels(); ++k)
        for (std::size_t i = 0; i < first.num_points(); ++i) {
            double v = neg_inf;
            for (const auto& f : fields) v = std::max(v, f.at(i, k));
            out.set(i, k, v);
        }
    return out;
}

/// Adds c to every finite entry; a constant shift preserves all recursions.
inline ActionField shift_finite(const ActionField& field, double c) {
    ActionField out = field;
    for (int k = 1; k <= field.num_levels(); ++k)
        for (std::size_t i = 0; i < field.num_points(); ++i)
            if (!is_neg_inf(field.at(i, k))) out.set(i, k, field.at(i, k) + c);
    return out;
}

/// Grid-scale upper closure. The recursion forces T - A to be nondecreasing
/// along each level; a stored value sitting below the level carried over
/// from its left neighbour is an isolated downward defect, and the envelope
/// lifts it to that one-sided limit. Valid fields pass through unchanged
/// and the sweep is idempotent.
inline ActionField usc_envelope(const ActionField& field, const GridEnvironment& env) {
    if (!field.same_grid(env)) throw std::domain_error("usc_envelope: grid mismatch");
    ActionField out = field;
    for (int k = 1; k <= field.num_levels(); ++k) {
        double running = neg_inf;  // sup of T(z,k) - A(z,k) over z to the left
        for (std::size_t i = 0; i < field.num_points(); ++i) {
            const double v = field.at(i, k);
            const double gauge = is_neg_inf(v) ? neg_inf : v - env.at(i, k);
            if (gauge >= running) {
                running = gauge;  // value already dominates: keep it untouched
            } else if (!is_neg_inf(running)) {
                out.set(i, k, env.at(i, k) + running);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// w-polymer evolution
// ---------------------------------------------------------------------------

/// One level of the w-polymer recursion in log space:
///   s T(y,k) = s A(y,k) + log( e^{s(init - A(x0,k))} + I(y) )
/// where s = ln w and I is the cumulative trapezoid integral of
/// e^{s(barrier(z) - A(z,k))}.
inline std::vector<double> polymer_reflect(const GridEnvironment& env, double w, int k,
                                           const std::vector<double>& barrier, double init) {
    detail::require_slice(barrier, env.num_points(), "polymer_reflect");
    detail::require_init(init, "polymer_reflect");
    if (!(w > 1.0)) throw std::invalid_argument("polymer_reflect: w must exceed 1");
    const double s = std::log(w);
    const double log_half_dx = std::log(env.dx() / 2.0);
    std::vector<double> out(env.num_points());
    std::vector<double> h(env.num_points());
    for (std::size_t i = 0; i < env.num_points(); ++i)
        h[i] = is_neg_inf(barrier[i]) ? neg_inf : s * (barrier[i] - env.at(i, k));
    double acc = is_neg_inf(init) ? neg_inf : s * (init - env.at(0, k));
    out[0] = is_neg_inf(acc) ? neg_inf : env.at(0, k) + acc / s;
    for (std::size_t i = 1; i < env.num_points(); ++i) {
        acc = log_add_exp(acc, log_half_dx + log_add_exp(h[i - 1], h[i]));
        out[i] = is_neg_inf(acc) ? neg_inf : env.at(i, k) + acc / s;
    }
    return out;
}

inline ActionField polymer_evolve(const GridEnvironment& env, double w,
                                  const std::vector<double>& top_boundary,
                                  const std::vector<double>& left_inits) {
    detail::require_slice(top_boundary, env.num_points(), "polymer_evolve");
    if (left_inits.size() + 1 != static_cast<std::size_t>(env.num_levels()))
        throw std::domain_error("polymer_evolve: need one left init per computed level");
    if (!(w > 1.0)) throw std::invalid_argument("polymer_evolve: w must exceed 1");
    ActionField field(env.x0(), env.dx(), env.num_points(), env.num_levels(),
                      FieldKind::w_polymer, w);
    std::vector<double> slice = top_boundary;
    for (std::size_t i = 0; i < env.num_points(); ++i)
        field.set(i, env.num_levels(), slice[i]);
    for (int k = env.num_levels() - 1; k >= 1; --k) {
        slice = polymer_reflect(env, w, k, slice, left_inits[static_cast<std::size_t>(k - 1)]);
        for (std::size_t i = 0; i < env.num_points(); ++i) field.set(i, k, slice[i]);
    }
    return field;
}

// ---------------------------------------------------------------------------
// discrete evolutions
// ---------------------------------------------------------------------------

/// Lattice max-plus field: T(y,k) = (T(y-d,k) v T(y,k+1)) + increment(y,k).
/// The deepest level and the left edge column hold data.
inline ActionField discrete_evolve(const LatticeEnvironment& env,
                                   const std::vector<double>& top_boundary,
                                   const std::vector<double>& left_inits) {
    detail::require_slice(top_boundary, env.num_points(), "discrete_evolve");
    if (left_inits.size() + 1 != static_cast<std::size_t>(env.num_levels()))
        throw std::domain_error("discrete_evolve: need one left init per computed level");
    ActionField field(env.x0(), env.delta(), env.num_points(), env.num_levels(),
                      FieldKind::discrete);
    for (std::size_t i = 0; i < env.num_points(); ++i)
        field.set(i, env.num_levels(), top_boundary[i]);
    for (int k = env.num_levels() - 1; k >= 1; --k) {
        detail::require_init(left_inits[static_cast<std::size_t>(k - 1)], "discrete_evolve");
        field.set(0, k, left_inits[static_cast<std::size_t>(k - 1)]);
        for (std::size_t i = 1; i < env.num_points(); ++i) {
            const double prev = std::max(field.at(i - 1, k), field.at(i, k + 1));
            field.set(i, k, is_neg_inf(prev) ? neg_inf : prev + env.increment(i, k));
        }
    }
    return field;
}

/// Lattice polymer field: w^T(y,k) = (w^T(y-d,k) + w^T(y,k+1)) w^increment.
inline ActionField discrete_polymer_evolve(const LatticeEnvironment& env, double w,
                                           const std::vector<double>& top_boundary,
                                           const std::vector<double>& left_inits) {
    detail::require_slice(top_boundary, env.num_points(), "discrete_polymer_evolve");
    if (left_inits.size() + 1 != static_cast<std::size_t>(env.num_levels()))
        throw std::domain_error("discrete_polymer_evolve: need one left init per computed level");
    if (!(w > 1.0)) throw std::invalid_argument("discrete_polymer_evolve: w must exceed 1");
    const double s = std::log(w);
    ActionField field(env.x0(), env.delta(), env.num_points(), env.num_levels(),
                      FieldKind::discrete_polymer, w);
    for (std::size_t i = 0; i < env.num_points(); ++i)
        field.set(i, env.num_levels(), top_boundary[i]);
    for (int k = env.num_levels() - 1; k >= 1; --k) {
        detail::require_init(left_inits[static_cast<std::size_t>(k - 1)],
                             "discrete_polymer_evolve");
        field.set(0, k, left_inits[static_cast<std::size_t>(k - 1)]);
        for (std::size_t i = 1; i < env.num_points(); ++i) {
            const double a = field.at(i - 1, k);
            const double b = field.at(i, k + 1);
            const double combined =
                (is_neg_inf(a) && is_neg_inf(b))
                    ? neg_inf
                    : log_add_exp(is_neg_inf(a) ? neg_inf : s * a,
                                  is_neg_inf(b) ? neg_inf : s * b) /
                          s;
            field.set(i, k,
                      is_neg_inf(combined) ? neg_inf : combined + env.increment(i, k));
        }
    }
    return field;
}

// ---------------------------------------------------------------------------
// recursion residuals
// ---------------------------------------------------------------------------

/// T(y,k) minus the max-plus right side over the pair (x,y); 0 when both
/// sides are -inf, +/-inf when exactly one side is.
inline double maxplus_recursion_residual(const ActionField& field, const GridEnvironment& env,
                                         std::size_t ix, std::size_t iy, int k) {
    if (!field.same_grid(env))
        throw std::domain_error("maxplus_recursion_residual: grid mismatch");
    if (ix > iy) throw std::domain_error("maxplus_recursion_residual: need x <= y");
    if (k < 1 || k > field.num_levels())
        throw std::domain_error("maxplus_recursion_residual: level out of range");
    double rhs = neg_inf;
    if (!is_neg_inf(field.at(ix, k)))
        rhs = field.at(ix, k) + env.at(iy, k) - env.at(ix, k);
    if (k < field.num_levels())  // absent level below acts as -inf
        for (std::size_t z = ix; z <= iy; ++z)
            if (!is_neg_inf(field.at(z, k + 1)))
                rhs = std::max(rhs, field.at(z, k + 1) + env.at(iy, k) - env.at(z, k));
    const double lhs = field.at(iy, k);
    if (is_neg_inf(lhs) && is_neg_inf(rhs)) return 0.0;
    if (is_neg_inf(lhs)) return neg_inf;
    if (is_neg_inf(rhs)) return std::numeric_limits<double>::infinity();
    return lhs - rhs;
}

/// Log_w-space residual of the integral recursion over the pair (x,y),
/// recomputed from the same trapezoid cells.
inline double polymer_recursion_residual(const ActionField& field, const GridEnvironment& env,
                                         std::size_t ix, std::size_t iy, int k) {
    if (!field.same_grid(env))
        throw std::domain_error("polymer_recursion_residual: grid mismatch");
    if (ix > iy) throw std::domain_error("polymer_recursion_residual: need x <= y");
    if (k < 1 || k > field.num_levels())
        throw std::domain_error("polymer_recursion_residual: level out of range");
    const double s = std::log(field.w());
    const double log_half_dx = std::log(env.dx() / 2.0);
    double acc = is_neg_inf(field.at(ix, k)) ? neg_inf
                                             : s * (field.at(ix, k) - env.at(ix, k));
    auto h = [&](std::size_t z) {
        if (k >= field.num_levels()) return neg_inf;  // absent level below
        const double b = field.at(z, k + 1);
        return is_neg_inf(b) ? neg_inf : s * (b - env.at(z, k));
    };
    for (std::size_t z = ix + 1; z <= iy; ++z)
        acc = log_add_exp(acc, log_half_dx + log_add_exp(h(z - 1), h(z)));
    const double lhs = field.at(iy, k);
    if (is_neg_inf(lhs) && is_neg_inf(acc)) return 0.0;
    if (is_neg_inf(lhs)) return neg_inf;
    if (is_neg_inf(acc)) return std::numeric_limits<double>::infinity();
    return lhs - (env.at(iy, k) + acc / s);
}

/// Residual of the closed-form lattice recursion: T(y,k) against the max of
/// the horizontal branch from x and all shifted jump terms over (x,y].
inline double discrete_recursion_residual(const ActionField& field,
                                          const LatticeEnvironment& env, std::size_t ix,
                                          std::size_t iy, int k) {
    if (!field.same_grid(env))
        throw std::domain_error("discrete_recursion_residual: grid mismatch");
    if (ix > iy) throw std::domain_error("discrete_recursion_residual: need x <= y");
    if (k < 1 || k > field.num_levels())
        throw std::domain_error("discrete_recursion_residual: level out of range");
    double rhs = neg_inf;
    if (!is_neg_inf(field.at(ix, k)))
        rhs = field.at(ix, k) + env.at(iy, k) - env.at(ix, k);
    if (k < field.num_levels())
        for (std::size_t z = ix + 1; z <= iy; ++z)
            if (!is_neg_inf(field.at(z, k + 1)))
                rhs = std::max(rhs, field.at(z, k + 1) + env.at(iy, k) - env.at(z - 1, k));
    const double lhs = field.at(iy, k);
    if (is_neg_inf(lhs) && is_neg_inf(rhs)) return 0.0;
    if (is_neg_inf(lhs)) return neg_inf;
    if (is_neg_inf(rhs)) return std::numeric_limits<double>::infinity();
    return lhs - rhs;
}

/// Same for the lattice polymer sum form, in log_w units.
inline double discrete_polymer_recursion_residual(const ActionField& field,
                                                  const LatticeEnvironment& env,
                                                  std::size_t ix, std::size_t iy, int k) {
    if (!field.same_grid(env))
        throw std::domain_error("discrete_polymer_recursion_residual: grid mismatch");
    if (ix > iy) throw std::domain_error("discrete_polymer_recursion_residual: need x <= y");
    if (k < 1 || k > field.num_levels())
        throw std::domain_error("discrete_polymer_recursion_residual: level out of range");
    const double s = std::log(field.w());
    double acc = is_neg_inf(field.at(ix, k))
                     ? neg_inf
                     : s * (field.at(ix, k) + env.at(iy, k) - env.at(ix, k));
    if (k < field.num_levels())
        for (std::size_t z = ix + 1; z <= iy; ++z)
            if (!is_neg_inf(field.at(z, k + 1)))
                acc = log_add_exp(acc,
                                  s * (field.at(z, k + 1) + env.at(iy, k) - env.at(z - 1, k)));
    const double lhs = field.at(iy, k);
    if (is_neg_inf(lhs) && is_neg_inf(acc)) return 0.0;
    if (is_neg_inf(lhs)) return neg_inf;
    if (is_neg_inf(acc)) return std::numeric_limits<double>::infinity();
    return lhs - acc / s;
}

// ---------------------------------------------------------------------------
// Euler-Lagrange sandwich
// ---------------------------------------------------------------------------

struct ElBoundsReport {
    double upper_worst = 0.0;      // violation of the entropy-padded upper bound
    double lower_one_worst = 0.0;  // violation of the horizontal lower bound
    double lower_two_worst = 0.0;  // violation of the jump lower bound
    double m_delta = 0.0;          // largest one-sided modulus used
    double maxplus_gap = 0.0;      // sup |polymer - max-plus| over finite entries

    double worst_violation() const {
        return std::max(upper_worst, std::max(lower_one_worst, lower_two_worst));
    }
};

/// Checks the three sandwich bounds linking a w-polymer field to the
/// max-plus recursion, over every grid pair on every computed level.
/// delta must be a whole number of grid cells.
inline ElBoundsReport el_bounds_check(const ActionField& poly, const ActionField& maxplus,
                                      const GridEnvironment& env, double delta) {
    if (poly.kind() != FieldKind::w_polymer)
        throw std::invalid_argument("el_bounds_check: first field must be w-polymer");
    if (!poly.same_grid(env) || !maxplus.same_grid(env))
        throw std::domain_error("el_bounds_check: grid mismatch");
    const double s = std::log(poly.w());
    const std::size_t steps = static_cast<std::size_t>(std::llround(delta / env.dx()));
    if (steps < 1 || std::abs(delta - static_cast<double>(steps) * env.dx()) > 1e-9 * env.dx())
        throw std::invalid_argument("el_bounds_check: delta must be a multiple of the grid step");
    const std::size_t n = env.num_points();
    ElBoundsReport report;
    for (int k = 1; k < poly.num_levels(); ++k) {
        // one-sided modulus between levels k and k+1 at separations <= delta
        double m_delta = 0.0;
        for (std::size_t z = 0; z < n; ++z)
            for (std::size_t zp = z + 1; zp <= std::min(n - 1, z + steps); ++zp)
                m_delta = std::max(m_delta, env.at(zp, k) - env.at(z, k) -
                                                env.at(zp, k + 1) + env.at(z, k + 1));
        report.m_delta = std::max(report.m_delta, m_delta);

        for (std::size_t ix = 0; ix < n; ++ix) {
            if (is_neg_inf(poly.at(ix, k))) continue;
            double jump_sup = neg_inf;  // sup over z in [x,y] of T(z,k+1)+A(y,k)-A(z,k)
            for (std::size_t iy = ix + 1; iy < n; ++iy) {
                const double lhs = poly.at(iy, k);
                if (!is_neg_inf(poly.at(iy - 1, k + 1)))
                    jump_sup = std::max(jump_sup, poly.at(iy - 1, k + 1) - env.at(iy - 1, k));
                if (is_neg_inf(lhs)) continue;
                const double span = static_cast<double>(iy - ix) * env.dx();
                double rhs = poly.at(ix, k) - env.at(ix, k);
                if (!is_neg_inf(poly.at(iy, k + 1)))
                    rhs = std::max(rhs, std::max(jump_sup, poly.at(iy, k + 1) - env.at(iy, k)));
                else
                    rhs = std::max(rhs, jump_sup);
                report.upper_worst =
                    std::max(report.upper_worst,
                             lhs - (env.at(iy, k) + rhs + std::log1p(span) / s));
                report.lower_one_worst =
                    std::max(report.lower_one_worst,
                             poly.at(ix, k) + env.at(iy, k) - env.at(ix, k) - lhs);
                if (iy >= ix + steps) {
                    double zsup = neg_inf;
                    for (std::size_t z = ix; z + steps <= iy; ++z)
                        if (!is_neg_inf(poly.at(z, k + 1)))
                            zsup = std::max(zsup,
                                            poly.at(z, k + 1) + env.at(iy, k) - env.at(z, k));
                    if (!is_neg_inf(zsup))
                        report.lower_two_worst =
                            std::max(report.lower_two_worst,
                                     zsup + std::log(delta) / s - m_delta - lhs);
                }
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!is_neg_inf(poly.at(i, k)) && !is_neg_inf(maxplus.at(i, k)))
                report.maxplus_gap =
                    std::max(report.maxplus_gap, std::abs(poly.at(i, k) - maxplus.at(i, k)));
    }
    return report;
}

/// Discrete counterpart at lattice nodes: the closed-form sum gives the
/// upper bound with log_w(1 + (y-x)/delta) padding and both lower bounds
/// with no modulus term.
inline ElBoundsReport discrete_el_bounds_check(const ActionField& poly,
                                               const ActionField& maxplus,
                                               const LatticeEnvironment& env) {
    if (poly.kind() != FieldKind::discrete_polymer)
        throw std::invalid_argument("discrete_el_bounds_check: first field must be discrete-polymer");
    if (!poly.same_grid(env) || !maxplus.same_grid(env))
        throw std::domain_error("discrete_el_bounds_check: grid mismatch");
    const double s = std::log(poly.w());
    const std::size_t n = env.num_points();
    ElBoundsReport report;
    for (int k = 1; k < poly.num_levels(); ++k) {
        for (std::size_t ix = 0; ix < n; ++ix) {
            if (is_neg_inf(poly.at(ix, k))) continue;
            double jump_sup = neg_inf;  // sup over z in (x,y] of T(z,k+1)+A(y,k)-A(z-1,k)
            for (std::size_t iy = ix + 1; iy < n; ++iy) {
                const double lhs = poly.at(iy, k);
                if (!is_neg_inf(poly.at(iy, k + 1)))
                    jump_sup = std::max(jump_sup, poly.at(iy, k + 1) - env.at(iy - 1, k));
                if (is_neg_inf(lhs)) continue;
                const double terms = 1.0 + static_cast<double>(iy - ix);
                const double rhs =
                    std::max(poly.at(ix, k) - env.at(ix, k), jump_sup);
                report.upper_worst = std::max(
                    report.upper_worst, lhs - (env.at(iy, k) + rhs + std::log(terms) / s));
                report.lower_one_worst =
                    std::max(report.lower_one_worst,
                             poly.at(ix, k) + env.at(iy, k) - env.at(ix, k) - lhs);
                if (!is_neg_inf(jump_sup))
                    report.lower_two_worst = std::max(
                        report.lower_two_worst, jump_sup + env.at(iy, k) - lhs);
            }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!is_neg_inf(poly.at(i, k)) && !is_neg_inf(maxplus.at(i, k)))
                report.maxplus_gap =
                    std::max(report.maxplus_gap, std::abs(poly.at(i, k) - maxplus.at(i, k)));
    }
    return report;
}

}  // namespace kpzlab

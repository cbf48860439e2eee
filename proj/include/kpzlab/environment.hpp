#pragma once

/**
 * Environments: the per-level driving functions through which directed paths
 * collect weight.
 *
 * GridEnvironment holds A(y,k) on a uniform grid and is interpreted
 * piecewise-linearly between grid points. Under that interpretation every
 * supremum over an interval that appears in the recursions is attained at a
 * grid point, so the dynamic programs downstream are exact for the
 * discretized model rather than approximate.
 *
 * LatticeEnvironment holds cumulative values D(x,k) on a lattice with spacing
 * delta; increments D(x,k) - D(x-delta,k) are the per-site log-weights.
 *
 * Levels are 1-based: k = 1 is the top line, k = num_levels the deepest.
 */

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "numeric.hpp"
#include "rng.hpp"

namespace kpzlab {

class GridEnvironment {
  public:
    GridEnvironment(double x0, double dx, std::size_t num_points, int num_levels)
        : x0_(x0), dx_(dx), num_points_(num_points), num_levels_(num_levels),
          values_(num_points * static_cast<std::size_t>(num_levels), 0.0) {
        if (dx <= 0.0) throw std::invalid_argument("GridEnvironment: dx must be positive");
        if (num_points < 2) throw std::invalid_argument("GridEnvironment: need >= 2 grid points");
        if (num_levels < 1) throw std::invalid_argument("GridEnvironment: need >= 1 level");
    }

    double x0() const { return x0_; }
    double dx() const { return dx_; }
    std::size_t num_points() const { return num_points_; }
    int num_levels() const { return num_levels_; }

    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * dx_; }

    std::size_t index_of(double xq) const {
        return grid_index(xq, x0_, dx_, num_points_, "GridEnvironment");
    }

    /// A at (grid index i, level k), k in [1, num_levels].
    double at(std::size_t i, int k) const { return values_[offset(i, k)]; }

    void set(std::size_t i, int k, double v) {
        if (!is_finite(v))
            throw std::invalid_argument("GridEnvironment: values must be finite");
        values_[offset(i, k)] = v;
    }

    bool same_grid(const GridEnvironment& o) const {
        return x0_ == o.x0_ && dx_ == o.dx_ && num_points_ == o.num_points_;
    }

  private:
    std::size_t offset(std::size_t i, int k) const {
        if (i >= num_points_ || k < 1 || k > num_levels_)
            throw std::domain_error("GridEnvironment: index out of range");
        return static_cast<std::size_t>(k - 1) * num_points_ + i;
    }

    double x0_, dx_;
    std::size_t num_points_;
    int num_levels_;
    std::vector<double> values_;
};

class LatticeEnvironment {
  public:
    LatticeEnvironment(double x0, double delta, std::size_t num_points, int num_levels)
        : x0_(x0), delta_(delta), num_points_(num_points), num_levels_(num_levels),
          values_(num_points * static_cast<std::size_t>(num_levels), 0.0) {
        if (delta <= 0.0) throw std::invalid_argument("LatticeEnvironment: delta must be positive");
        if (num_points < 2) throw std::invalid_argument("LatticeEnvironment: need >= 2 sites");
        if (num_levels < 1) throw std::invalid_argument("LatticeEnvironment: need >= 1 level");
    }

    double x0() const { return x0_; }
    double delta() const { return delta_; }
    std::size_t num_points() const { return num_points_; }
    int num_levels() const { return num_levels_; }

    double x(std::size_t i) const { return x0_ + static_cast<double>(i) * delta_; }

    std::size_t index_of(double xq) const {
        return grid_index(xq, x0_, delta_, num_points_, "LatticeEnvironment");
    }

    double at(std::size_t i, int k) const { return values_[offset(i, k)]; }

    /// Per-site log-weight: D(x_i,k) - D(x_{i-1},k), defined for i >= 1.
    double increment(std::size_t i, int k) const {
        if (i == 0) throw std::domain_error("LatticeEnvironment: no increment at left edge");
        return at(i, k) - at(i - 1, k);
    }

    void set(std::size_t i, int k, double v) {
        if (!is_finite(v))
            throw std::invalid_argument("LatticeEnvironment: values must be finite");
        values_[offset(i, k)] = v;
    }

    bool same_grid(const LatticeEnvironment& o) const {
        return x0_ == o.x0_ && delta_ == o.delta_ && num_points_ == o.num_points_;
    }

  private:
    std::size_t offset(std::size_t i, int k) const {
        if (i >= num_points_ || k < 1 || k > num_levels_)
            throw std::domain_error("LatticeEnvironment: index out of range");
        return static_cast<std::size_t>(k - 1) * num_points_ + i;
    }

    double x0_, delta_;
    std::size_t num_points_;
    int num_levels_;
    std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// samplers and deterministic fixtures
// ---------------------------------------------------------------------------

/// Independent per-level random walks with N(0, dx) increments, each level
/// anchored to 0 at the grid point nearest the origin.
inline GridEnvironment sample_brownian(int num_levels, double x0, double dx,
                                       std::size_t num_points, RngSpec rng_spec) {
    GridEnvironment env(x0, dx, num_points, num_levels);
    CounterRng rng(rng_spec);
    // grid point nearest 0, clamped into the window
    std::size_t anchor = 0;
    double best = std::abs(env.x(0));
    for (std::size_t i = 1; i < num_points; ++i) {
        const double d = std::abs(env.x(i));
        if (d < best) {
            best = d;
            anchor = i;
        }
    }
    const double sd = std::sqrt(dx);
    std::vector<double> walk(num_points);
    for (int k = 1; k <= num_levels; ++k) {
        walk[0] = 0.0;
        for (std::size_t i = 1; i < num_points; ++i)
            walk[i] = walk[i - 1] + sd * rng.normal();
        const double shift = walk[anchor];
        for (std::size_t i = 0; i < num_points; ++i)
            env.set(i, k, walk[i] - shift);
    }
    return env;
}

/// Log-gamma lattice: cumulative D with D(0,k)=0 and i.i.d. increments
/// log(W), W inverse-gamma(theta). Columns are 0..width, delta = 1.
inline LatticeEnvironment sample_inverse_gamma_lattice(double theta, std::size_t width,
                                                       int num_levels, RngSpec rng_spec) {
    if (!(theta > 0.0))
        throw std::invalid_argument("sample_inverse_gamma_lattice: theta must be positive");
    LatticeEnvironment env(0.0, 1.0, width + 1, num_levels);
    CounterRng rng(rng_spec);
    for (int k = 1; k <= num_levels; ++k) {
        double cum = 0.0;
        env.set(0, k, 0.0);
        for (std::size_t i = 1; i <= width; ++i) {
            cum += std::log(rng.inverse_gamma(theta));
            env.set(i, k, cum);
        }
    }
    return env;
}

inline GridEnvironment constant_environment(double c, int num_levels, double x0, double dx,
                                            std::size_t num_points) {
    GridEnvironment env(x0, dx, num_points, num_levels);
    for (int k = 1; k <= num_levels; ++k)
        for (std::size_t i = 0; i < num_points; ++i) env.set(i, k, c);
    return env;
}

/// A(y,k) = slopes[k-1] * y exactly at grid points.
inline GridEnvironment linear_environment(const std::vector<double>& slopes, double x0,
                                          double dx, std::size_t num_points) {
    const int num_levels = static_cast<int>(slopes.size());
    GridEnvironment env(x0, dx, num_points, num_levels);
    for (int k = 1; k <= num_levels; ++k)
        for (std::size_t i = 0; i < num_points; ++i)
            env.set(i, k, slopes[static_cast<std::size_t>(k - 1)] * env.x(i));
    return env;
}

/// Reinterpret grid samples as a lattice with spacing dx (used by the
/// discrete recursions when the lattice carries real-valued coordinates).
inline LatticeEnvironment lattice_from_grid(const GridEnvironment& g) {
    LatticeEnvironment env(g.x0(), g.dx(), g.num_points(), g.num_levels());
    for (int k = 1; k <= g.num_levels(); ++k)
        for (std::size_t i = 0; i < g.num_points(); ++i) env.set(i, k, g.at(i, k));
    return env;
}

}  // namespace kpzlab

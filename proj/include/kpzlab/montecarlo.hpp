#pragma once

// Replica orchestration and distributional diagnostics. An experiment draws
// independent environments (replica i always uses rng stream i), evaluates
// scaled or unscaled sheet observables at fixed probe points, and reduces
// them with order-insensitive statistics so results are identical for any
// thread count. Reference-distribution comparison is a sup-norm distance
// against a tabulated CDF loaded from disk.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "environment.hpp"
#include "lastpassage.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "representations.hpp"
#include "rng.hpp"

namespace kpzlab {

namespace detail {

/// Recursive pairwise sum. The bracketing depends only on the element count,
/// never on thread scheduling, so reductions are bitwise reproducible.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += v[i];
        return s;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// reference distribution table
// ---------------------------------------------------------------------------

/// Tabulated CDF of the GUE Tracy-Widom distribution, ingested from a CSV
/// with header `value,cdf` and strictly increasing values.
struct TWReference {
    std::vector<double> values;
    std::vector<double> cdfs;
    std::string source;

    /// Piecewise-linear interpolation, clamped to the end table entries.
    double cdf(double v) const {
        if (v <= values.front()) return cdfs.front();
        if (v >= values.back()) return cdfs.back();
        const auto it = std::upper_bound(values.begin(), values.end(), v);
        const std::size_t i = static_cast<std::size_t>(it - values.begin());
        const double t = (v - values[i - 1]) / (values[i] - values[i - 1]);
        return cdfs[i - 1] + t * (cdfs[i] - cdfs[i - 1]);
    }

    /// Piecewise-linear inverse of cdf(); u outside the tabulated range
    /// clamps to the end values.
    double quantile(double u) const {
        if (u <= cdfs.front()) return values.front();
        if (u >= cdfs.back()) return values.back();
        const auto it = std::upper_bound(cdfs.begin(), cdfs.end(), u);
        std::size_t i = static_cast<std::size_t>(it - cdfs.begin());
        while (i > 0 && cdfs[i] == cdfs[i - 1]) --i;
        if (i == 0) return values.front();
        const double t = (u - cdfs[i - 1]) / (cdfs[i] - cdfs[i - 1]);
        return values[i - 1] + t * (values[i] - values[i - 1]);
    }
};

inline TWReference load_tw_reference(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("tw reference: cannot open " + path);
    TWReference ref;
    ref.source = path;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("tw reference: malformed line " + std::to_string(line_no));
        char* end = nullptr;
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        const double v = std::strtod(a.c_str(), &end);
        if (end == a.c_str()) {
            if (line_no == 1) continue;  // header row
            throw std::runtime_error("tw reference: malformed line " + std::to_string(line_no));
        }
        const double c = std::strtod(b.c_str(), &end);
        if (end == b.c_str())
            throw std::runtime_error("tw reference: malformed line " + std::to_string(line_no));
        ref.values.push_back(v);
        ref.cdfs.push_back(c);
    }
    if (ref.values.size() < 2) throw std::runtime_error("tw reference: needs at least 2 rows");
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
        if (i > 0 && !(ref.values[i] > ref.values[i - 1]))
            throw std::runtime_error("tw reference: values must be strictly increasing");
        if (i > 0 && ref.cdfs[i] < ref.cdfs[i - 1])
            throw std::runtime_error("tw reference: cdf must be nondecreasing");
        if (ref.cdfs[i] < 0.0 || ref.cdfs[i] > 1.0)
            throw std::runtime_error("tw reference: cdf outside [0,1]");
    }
    return ref;
}

// ---------------------------------------------------------------------------
// sup-norm distances
// ---------------------------------------------------------------------------

/// Kolmogorov-Smirnov distance between the empirical CDF of the samples and
/// the interpolated reference table.
inline double ks_distance(std::vector<double> samples, const TWReference& ref) {
    if (samples.size() < 100)
        throw std::invalid_argument("ks_distance: needs at least 100 samples");
    for (double s : samples)
        if (!std::isfinite(s)) throw std::invalid_argument("ks_distance: non-finite sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = ref.cdf(samples[i]);
        worst = std::max(worst, f - static_cast<double>(i) / n);
        worst = std::max(worst, static_cast<double>(i + 1) / n - f);
    }
    return std::min(worst, 1.0);
}

/// Two-sample Kolmogorov-Smirnov distance, ties handled by advancing both
/// empirical CDFs past the tied value before comparing.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample set");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t ia = 0, ib = 0;
    double worst = 0.0;
    while (ia < a.size() || ib < b.size()) {
        double v;
        if (ia == a.size()) v = b[ib];
        else if (ib == b.size()) v = a[ia];
        else v = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] <= v) ++ia;
        while (ib < b.size() && b[ib] <= v) ++ib;
        worst = std::max(worst, std::abs(static_cast<double>(ia) / na -
                                         static_cast<double>(ib) / nb));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------

struct ProbePoint {
    double x = 0.0;
    double y = 0.0;
};

/// One batch of replicas for a single model. Grid models read length and
/// num_points as the source window; the lattice model reads num_points as
/// the column count past zero. With scaled set, observables are the fixed
/// point sheet values S_n(x, y); otherwise raw sheet values at (x, y).
struct ExperimentSpec {
    RepModel model = RepModel::bl;
    int levels = 2;
    std::size_t num_points = 2001;
    double length = 1.0;
    double weight = std::exp(1.0);
    double theta = 2.0;
    std::size_t num_replicas = 1;
    RngSpec base{};
    std::vector<ProbePoint> probes;
    bool scaled = true;
    bool check_structure = true;
};

struct ObservableSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    std::vector<double> sorted;  // empirical CDF support
};

struct ExperimentResult {
    std::vector<std::vector<double>> observables;  // [probe][replica]
    std::vector<ObservableSummary> summaries;      // one per probe
};

namespace detail {

/// Probe (x, y) mapped to source coordinates under the model's scaling map,
/// or passed through untouched for raw observables.
struct SourceProbe {
    double xs = 0.0;
    double ys = 0.0;
};

inline SourceProbe map_probe(const ExperimentSpec& spec, const ScalingParams& fp,
                             ProbePoint p) {
    if (!spec.scaled) return {p.x, p.y};
    switch (spec.model) {
        case RepModel::bl: {
            const double n13 = std::cbrt(static_cast<double>(spec.levels));
            return {2.0 * p.x / n13, 1.0 + 2.0 * p.y / n13};
        }
        case RepModel::oy:
            return {fp.a2 * p.x, fp.a2 * p.y + fp.a3};
        case RepModel::lg:
            return {fp.a2 * p.x + 1.0, fp.a2 * p.y + fp.a3};
        default:
            throw std::invalid_argument("run_experiment: unsupported model");
    }
}

inline void require_probe_on_grid(const ExperimentSpec& spec, const ScalingParams& fp,
                                  std::size_t idx) {
    const SourceProbe sp = map_probe(spec, fp, spec.probes[idx]);
    const double x0 = 0.0;
    const double dx = spec.model == RepModel::lg
                          ? 1.0
                          : spec.length / static_cast<double>(spec.num_points - 1);
    const std::size_t m =
        spec.model == RepModel::lg ? spec.num_points + 1 : spec.num_points;
    try {
        const std::size_t i1 = grid_index(sp.xs, x0, dx, m, "probe");
        const std::size_t i2 = grid_index(sp.ys, x0, dx, m, "probe");
        if (i2 < i1) throw std::domain_error("probe: endpoints out of order");
        if (spec.model == RepModel::lg && i1 < 1)
            throw std::domain_error("probe: start column before 1");
    } catch (const std::domain_error& e) {
        throw std::invalid_argument("run_experiment: probe " + std::to_string(idx) +
                                    " outside the representable window (" + e.what() + ")");
    }
}

}  // namespace detail

/// Deterministic replica sweep. Throws invalid_argument for malformed specs
/// and runtime_error when any replica fails a structural check (a non-finite
/// observable, or a sheet quadrangle violation across ordered probe pairs).
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.num_replicas < 1)
        throw std::invalid_argument("run_experiment: num_replicas must be at least 1");
    if (spec.probes.empty())
        throw std::invalid_argument("run_experiment: needs at least one probe");
    if (spec.levels < 1)
        throw std::invalid_argument("run_experiment: needs at least one level");
    if (spec.num_points < 2)
        throw std::invalid_argument("run_experiment: needs at least two grid points");
    if (spec.model == RepModel::kpz)
        throw std::invalid_argument(
            "run_experiment: the kpz prelimit is reached by rescaling oy output");
    if (spec.model == RepModel::oy && !(spec.weight > 1.0))
        throw std::invalid_argument("run_experiment: oy weight must exceed 1");
    if (spec.model == RepModel::lg && !(spec.theta > 0.0))
        throw std::invalid_argument("run_experiment: lg theta must be positive");
    if (spec.model != RepModel::lg && !(spec.length > 0.0))
        throw std::invalid_argument("run_experiment: length must be positive");

    ScalingParams fp{};
    if (spec.scaled && spec.model == RepModel::oy)
        fp = fixed_point_params(oy_scaling_constants(std::log(spec.weight)), spec.levels);
    if (spec.scaled && spec.model == RepModel::lg)
        throw std::invalid_argument(
            "run_experiment: scaled lg probes need lattice-aligned constants; "
            "run unscaled and rescale the emitted observables");
    for (std::size_t i = 0; i < spec.probes.size(); ++i)
        detail::require_probe_on_grid(spec, fp, i);

    const std::size_t num_probes = spec.probes.size();
    const std::size_t replicas = spec.num_replicas;
    ExperimentResult out;
    out.observables.assign(num_probes, std::vector<double>(replicas, 0.0));
    std::vector<std::string> failures(replicas);

    // every ordered probe pair whose cross terms are still path-ordered
    std::vector<std::pair<std::size_t, std::size_t>> quad_pairs;
    if (spec.check_structure) {
        for (std::size_t a = 0; a < num_probes; ++a)
            for (std::size_t b = 0; b < num_probes; ++b) {
                const ProbePoint pa = spec.probes[a], pb = spec.probes[b];
                if (!(pa.x < pb.x) || !(pa.y < pb.y)) continue;
                const auto cross = detail::map_probe(spec, fp, ProbePoint{pb.x, pa.y});
                if (cross.xs <= cross.ys) quad_pairs.emplace_back(a, b);
            }
    }

    const double dx = spec.model == RepModel::lg
                          ? 1.0
                          : spec.length / static_cast<double>(spec.num_points - 1);
    parallel_for(replicas, [&](std::size_t r) {
        const RngSpec stream{spec.base.seed, r};
        try {
            if (spec.model == RepModel::lg) {
                const LatticeEnvironment env = sample_inverse_gamma_lattice(
                    spec.theta, spec.num_points, spec.levels, stream);
                auto sheet = [&](ProbePoint p) {
                    const auto sp = detail::map_probe(spec, fp, p);
                    return lattice_partition_dp(env, Point{sp.xs, spec.levels},
                                                Point{sp.ys, 1});
                };
                for (std::size_t j = 0; j < num_probes; ++j)
                    out.observables[j][r] = sheet(spec.probes[j]);
                for (const auto& [a, b] : quad_pairs) {
                    const double combo = out.observables[a][r] + out.observables[b][r] -
                                         sheet(ProbePoint{spec.probes[a].x, spec.probes[b].y}) -
                                         sheet(ProbePoint{spec.probes[b].x, spec.probes[a].y});
                    if (!(combo >= -1e-8))
                        throw std::runtime_error("sheet quadrangle violated by " +
                                                 std::to_string(-combo));
                }
            } else {
                const GridEnvironment env = sample_brownian(
                    spec.levels, 0.0, dx, spec.num_points, stream);
                auto sheet = [&](ProbePoint p) {
                    if (spec.model == RepModel::bl) {
                        if (spec.scaled)
                            return bl_sheet_to_fixed_point(env, spec.levels, p.x, p.y);
                        return lpp_value(env, Point{p.x, spec.levels}, Point{p.y, 1});
                    }
                    if (spec.scaled)
                        return oy_sheet_to_fixed_point(
                            env, oy_scaling_constants(std::log(spec.weight)), spec.levels,
                            p.x, p.y, spec.weight);
                    return polymer_free_energy(env, Point{p.x, spec.levels},
                                               Point{p.y, 1}, spec.weight);
                };
                for (std::size_t j = 0; j < num_probes; ++j)
                    out.observables[j][r] = sheet(spec.probes[j]);
                for (const auto& [a, b] : quad_pairs) {
                    const double combo = out.observables[a][r] + out.observables[b][r] -
                                         sheet(ProbePoint{spec.probes[a].x, spec.probes[b].y}) -
                                         sheet(ProbePoint{spec.probes[b].x, spec.probes[a].y});
                    if (!(combo >= -1e-8))
                        throw std::runtime_error("sheet quadrangle violated by " +
                                                 std::to_string(-combo));
                }
            }
            for (std::size_t j = 0; j < num_probes; ++j)
                if (!std::isfinite(out.observables[j][r]))
                    throw std::runtime_error("non-finite observable at probe " +
                                             std::to_string(j));
        } catch (const std::exception& e) {
            failures[r] = e.what();
            if (failures[r].empty()) failures[r] = "unknown failure";
        }
    });

    for (std::size_t r = 0; r < replicas; ++r)
        if (!failures[r].empty())
            throw std::runtime_error("run_experiment: replica " + std::to_string(r) +
                                     " failed a structural check: " + failures[r]);

    out.summaries.resize(num_probes);
    for (std::size_t j = 0; j < num_probes; ++j) {
        ObservableSummary& s = out.summaries[j];
        const std::vector<double>& v = out.observables[j];
        const double n = static_cast<double>(replicas);
        s.mean = detail::pairwise_sum(v) / n;
        std::vector<double> c2(replicas), c3(replicas);
        for (std::size_t r = 0; r < replicas; ++r) {
            const double d = v[r] - s.mean;
            c2[r] = d * d;
            c3[r] = d * d * d;
        }
        const double m2 = detail::pairwise_sum(c2) / n;
        const double m3 = detail::pairwise_sum(c3) / n;
        s.variance = replicas > 1 ? m2 * n / (n - 1.0) : 0.0;
        s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
        s.sorted = v;
        std::sort(s.sorted.begin(), s.sorted.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// finite-size diagnostics
// ---------------------------------------------------------------------------

struct GrowthDiagnostic {
    double right = 0.0;  // min over the upper half-window of (T(y,1) + y^2) / y
    double left = 0.0;   // min over the lower half-window of (T(y,1) + y^2) / (-y)
};

/// Finite-window probe of parabolic growth of the level-1 row. Points with
/// |y| below rounding are skipped; each half of the window must contain at
/// least 10 grid points.
inline GrowthDiagnostic growth_diagnostic(const ActionField& field, double y_min,
                                          double y_max) {
    if (!(y_min < y_max))
        throw std::invalid_argument("growth_diagnostic: empty window");
    const double mid = 0.5 * (y_min + y_max);
    std::size_t right_count = 0, left_count = 0;
    double right_min = std::numeric_limits<double>::infinity();
    double left_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < field.num_points(); ++i) {
        const double y = field.x(i);
        if (y < y_min - 1e-12 || y > y_max + 1e-12) continue;
        const double v = field.at(i, 1);
        if (y > mid) {
            ++right_count;
            if (std::abs(y) > 1e-12) right_min = std::min(right_min, (v + y * y) / y);
        } else if (y < mid) {
            ++left_count;
            if (std::abs(y) > 1e-12) left_min = std::min(left_min, (v + y * y) / (-y));
        }
    }
    if (right_count < 10 || left_count < 10)
        throw std::invalid_argument("growth_diagnostic: window too small");
    return {right_min, left_min};
}

// ---------------------------------------------------------------------------
// symmetry diagnostics
// ---------------------------------------------------------------------------

struct SymmetrySpec {
    std::size_t num_replicas = 2000;
    RngSpec base{};
    double x = 0.0;                 // start of the single-point comparison
    double y = 0.0;                 // end of the single-point comparison
    std::vector<double> process_x;  // starts for the process comparison
    double process_y = 0.0;         // common end for the process comparison
};

struct SymmetryReport {
    double sym1 = 0.0;  // KS distance of Z(x,y,1) against Z(0,y-x,1)
    double sym2 = 0.0;  // worst KS distance across the process probes
};

/// Distributional stationarity probe. The builder is called once per replica
/// with an independent rng stream and must return a representation whose
/// slices cover x and every process start; both observables of a comparison
/// are read from the same replica, so equal laws with x = 0 give exactly 0.
template <typename Builder>
SymmetryReport symmetry_diagnostic(Builder&& build, const SymmetrySpec& spec) {
    if (spec.num_replicas < 2000)
        throw std::invalid_argument("symmetry_diagnostic: needs at least 2000 replicas");
    const std::size_t replicas = spec.num_replicas;
    std::vector<double> a(replicas), b(replicas);
    std::vector<std::vector<double>> pa(spec.process_x.size(),
                                        std::vector<double>(replicas));
    std::vector<std::vector<double>> pb = pa;
    std::vector<std::string> failures(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        try {
            const ActionRepresentation rep =
                build(RngSpec{spec.base.seed, spec.base.stream_id + r});
            a[r] = rep.value(spec.x, spec.y, 1);
            b[r] = rep.value(0.0, spec.y - spec.x, 1);
            for (std::size_t j = 0; j < spec.process_x.size(); ++j) {
                pa[j][r] = rep.value(spec.process_x[j], spec.process_y, 1);
                pb[j][r] = rep.value(0.0, spec.process_y - spec.process_x[j], 1);
            }
        } catch (const std::exception& e) {
            failures[r] = e.what();
            if (failures[r].empty()) failures[r] = "unknown failure";
        }
    });
    for (std::size_t r = 0; r < replicas; ++r)
        if (!failures[r].empty())
            throw std::runtime_error("symmetry_diagnostic: replica " + std::to_string(r) +
                                     " failed: " + failures[r]);
    SymmetryReport report;
    report.sym1 = ks_two_sample(a, b);
    for (std::size_t j = 0; j < spec.process_x.size(); ++j)
        report.sym2 = std::max(report.sym2, ks_two_sample(pa[j], pb[j]));
    return report;
}

}  // namespace kpzlab

// Batch front door for the laboratory: reads a JSON config (flags override
// file values), dispatches one subcommand, and writes plain CSV/JSON
// artifacts plus a provenance sidecar that reproduces the run byte for byte.
//
// Exit codes: 0 success, 1 structural-check failure, 2 usage error,
// 3 config schema error (the diagnostic names the first invalid field).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "kpzlab/actionfield.hpp"
#include "kpzlab/environment.hpp"
#include "kpzlab/geodesics.hpp"
#include "kpzlab/lastpassage.hpp"
#include "kpzlab/melons.hpp"
#include "kpzlab/montecarlo.hpp"
#include "kpzlab/representations.hpp"

using json = nlohmann::json;
using namespace kpzlab;

namespace {

constexpr const char* kVersion = "kpzlab 0.1.0";

struct RunConfig {
    std::string command;
    std::string model = "bl";
    int n = 2;
    long long num_points = 201;
    double length = 1.0;
    double weight = std::exp(1.0);
    double theta = 2.0;
    double t = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    long long num_replicas = 100;
    std::vector<std::array<double, 2>> probes = {{0.0, 0.0}};
    bool scaled = true;
    std::vector<double> slice_positions = {0.3};
    std::array<double, 2> root = {0.0, -1.0};   // geodesic start, k = -1 means "level n"
    std::array<double, 2> query = {-1.0, 1.0};  // geodesic query, x = -1 means "length"
    std::string out = ".";
    std::string format = "csv";
    std::string lg_scaling;
};

// ---------------------------------------------------------------------------
// config ingestion
// ---------------------------------------------------------------------------

/// Fills cfg from the file, reporting the first key whose type is wrong.
/// Returns an empty string on success.
std::string apply_config_file(RunConfig& cfg, const json& doc) {
    if (!doc.is_object()) return "field `<root>`: config must be a JSON object";
    auto pair_of = [](const json& v, std::array<double, 2>& into) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            return false;
        into = {v[0].get<double>(), v[1].get<double>()};
        return true;
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "model") {
            if (!value.is_string()) return "field `model`: expected a string";
            cfg.model = value.get<std::string>();
        } else if (key == "n") {
            if (!value.is_number_integer()) return "field `n`: expected an integer";
            cfg.n = value.get<int>();
        } else if (key == "num_points") {
            if (!value.is_number_integer()) return "field `num_points`: expected an integer";
            cfg.num_points = value.get<long long>();
        } else if (key == "length") {
            if (!value.is_number()) return "field `length`: expected a number";
            cfg.length = value.get<double>();
        } else if (key == "weight") {
            if (!value.is_number()) return "field `weight`: expected a number";
            cfg.weight = value.get<double>();
        } else if (key == "theta") {
            if (!value.is_number()) return "field `theta`: expected a number";
            cfg.theta = value.get<double>();
        } else if (key == "t") {
            if (!value.is_number()) return "field `t`: expected a number";
            cfg.t = value.get<double>();
        } else if (key == "seed") {
            if (!value.is_number_integer() || value.get<long long>() < 0)
                return "field `seed`: expected a nonnegative integer";
            cfg.seed = value.get<std::uint64_t>();
        } else if (key == "stream") {
            if (!value.is_number_integer() || value.get<long long>() < 0)
                return "field `stream`: expected a nonnegative integer";
            cfg.stream = value.get<std::uint64_t>();
        } else if (key == "num_replicas") {
            if (!value.is_number_integer())
                return "field `num_replicas`: expected an integer";
            cfg.num_replicas = value.get<long long>();
        } else if (key == "probes") {
            if (!value.is_array()) return "field `probes`: expected an array of [x, y]";
            cfg.probes.clear();
            for (const auto& item : value) {
                std::array<double, 2> p{};
                if (!pair_of(item, p)) return "field `probes`: expected an array of [x, y]";
                cfg.probes.push_back(p);
            }
        } else if (key == "scaled") {
            if (!value.is_boolean()) return "field `scaled`: expected a boolean";
            cfg.scaled = value.get<bool>();
        } else if (key == "slice_positions") {
            if (!value.is_array()) return "field `slice_positions`: expected an array";
            cfg.slice_positions.clear();
            for (const auto& item : value) {
                if (!item.is_number()) return "field `slice_positions`: expected numbers";
                cfg.slice_positions.push_back(item.get<double>());
            }
        } else if (key == "root") {
            if (!pair_of(value, cfg.root)) return "field `root`: expected [x, k]";
        } else if (key == "query") {
            if (!pair_of(value, cfg.query)) return "field `query`: expected [x, k]";
        } else if (key == "out") {
            if (!value.is_string()) return "field `out`: expected a string";
            cfg.out = value.get<std::string>();
        } else if (key == "format") {
            if (!value.is_string()) return "field `format`: expected a string";
            cfg.format = value.get<std::string>();
        } else if (key == "lg_scaling") {
            if (!value.is_string()) return "field `lg_scaling`: expected a string";
            cfg.lg_scaling = value.get<std::string>();
        } else {
            return "field `" + key + "`: unknown key";
        }
    }
    return {};
}

/// Ordered semantic checks; the first failure names its field.
std::string check_schema(const RunConfig& cfg) {
    const bool known = cfg.model == "bl" || cfg.model == "oy" || cfg.model == "lg" ||
                       cfg.model == "kpz";
    if (!known) return "field `model`: must be one of bl, oy, lg, kpz";
    if (cfg.n < 1) return "field `n`: must be at least 1";
    if (cfg.num_points < 2) return "field `num_points`: must be at least 2";
    if (!(cfg.length > 0.0)) return "field `length`: must be positive";
    if ((cfg.model == "oy" || cfg.model == "kpz") && !(cfg.weight > 1.0))
        return "field `weight`: must exceed 1";
    if (cfg.model == "lg" && !(cfg.theta > 0.0)) return "field `theta`: must be positive";
    if (cfg.model == "kpz" && !(cfg.t > 0.0)) return "field `t`: must be positive";
    if (cfg.format != "csv" && cfg.format != "json")
        return "field `format`: must be csv or json";

    if (cfg.command == "simulate") {
        if (cfg.model == "kpz")
            return "field `model`: the kpz prelimit cannot be simulated directly";
        if (cfg.num_replicas < 1) return "field `num_replicas`: must be at least 1";
        if (cfg.probes.empty()) return "field `probes`: needs at least one probe";
    }
    if (cfg.command == "verify" || cfg.command == "scale") {
        if (cfg.n < 2) return "field `n`: verification needs at least 2 levels";
        if (cfg.slice_positions.empty())
            return "field `slice_positions`: needs at least one position";
        for (double p : cfg.slice_positions) {
            const double span = cfg.model == "lg"
                                    ? static_cast<double>(cfg.num_points)
                                    : cfg.length;
            if (!(p > 0.0) || !(p < span))
                return "field `slice_positions`: positions must lie inside the window";
        }
        if (cfg.command == "scale" && cfg.model == "lg" && cfg.lg_scaling.empty())
            return "field `lg_scaling`: the lattice scaling needs a constants file";
    }
    if (cfg.command == "geodesic") {
        if (cfg.model != "bl")
            return "field `model`: geodesic backtracking needs the max-plus model bl";
        const double rk = cfg.root[1] < 0 ? cfg.n : cfg.root[1];
        const double qk = cfg.query[1];
        if (rk < 1 || rk > cfg.n || rk != std::floor(rk))
            return "field `root`: level must be an integer in [1, n]";
        if (qk < 1 || qk > cfg.n || qk != std::floor(qk))
            return "field `query`: level must be an integer in [1, n]";
    }
    if (cfg.command == "melon" && cfg.model == "kpz")
        return "field `model`: the kpz prelimit has no sampled ensemble";
    return {};
}

// ---------------------------------------------------------------------------
// emission helpers
// ---------------------------------------------------------------------------

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json config_echo(const RunConfig& cfg) {
    json probes = json::array();
    for (const auto& p : cfg.probes) probes.push_back({p[0], p[1]});
    return json{{"command", cfg.command},
                {"model", cfg.model},
                {"n", cfg.n},
                {"num_points", cfg.num_points},
                {"length", cfg.length},
                {"weight", cfg.weight},
                {"theta", cfg.theta},
                {"t", cfg.t},
                {"seed", cfg.seed},
                {"stream", cfg.stream},
                {"num_replicas", cfg.num_replicas},
                {"probes", probes},
                {"scaled", cfg.scaled},
                {"slice_positions", cfg.slice_positions},
                {"root", {cfg.root[0], cfg.root[1]}},
                {"query", {cfg.query[0], cfg.query[1]}},
                {"out", cfg.out},
                {"format", cfg.format},
                {"lg_scaling", cfg.lg_scaling}};
}

void write_provenance(const RunConfig& cfg) {
    json prov{{"version", kVersion}, {"config", config_echo(cfg)}};
    write_text(std::filesystem::path(cfg.out) / "provenance.json", prov.dump(2) + "\n");
}

RepModel model_tag(const std::string& name) { return rep_model_from_name(name); }

RepresentationSpec rep_spec_of(const RunConfig& cfg) {
    RepresentationSpec spec;
    spec.model = model_tag(cfg.model == "kpz" ? "oy" : cfg.model);
    spec.levels = cfg.n;
    spec.num_points = static_cast<std::size_t>(cfg.num_points);
    spec.length = cfg.length;
    spec.weight = cfg.weight;
    spec.theta = cfg.theta;
    spec.slice_positions = cfg.slice_positions;
    return spec;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
    ExperimentSpec spec;
    spec.model = model_tag(cfg.model);
    spec.levels = cfg.n;
    spec.num_points = static_cast<std::size_t>(cfg.num_points);
    spec.length = cfg.length;
    spec.weight = cfg.weight;
    spec.theta = cfg.theta;
    spec.num_replicas = static_cast<std::size_t>(cfg.num_replicas);
    spec.base = RngSpec{cfg.seed, cfg.stream};
    spec.scaled = cfg.scaled;
    for (const auto& p : cfg.probes) spec.probes.push_back({p[0], p[1]});

    const ExperimentResult result = run_experiment(spec);
    const std::filesystem::path dir(cfg.out);

    if (cfg.format == "csv") {
        std::string table = "probe,replica,value\n";
        for (std::size_t j = 0; j < result.observables.size(); ++j)
            for (std::size_t r = 0; r < result.observables[j].size(); ++r)
                table += std::to_string(j) + "," + std::to_string(r) + "," +
                         fmt(result.observables[j][r]) + "\n";
        write_text(dir / "replicas.csv", table);

        std::string summary = "probe,x,y,mean,variance,skewness\n";
        for (std::size_t j = 0; j < result.summaries.size(); ++j) {
            const ObservableSummary& s = result.summaries[j];
            summary += std::to_string(j) + "," + fmt(cfg.probes[j][0]) + "," +
                       fmt(cfg.probes[j][1]) + "," + fmt(s.mean) + "," + fmt(s.variance) +
                       "," + fmt(s.skewness) + "\n";
        }
        write_text(dir / "summary.csv", summary);
    } else {
        json probes = json::array();
        for (std::size_t j = 0; j < result.summaries.size(); ++j) {
            const ObservableSummary& s = result.summaries[j];
            probes.push_back({{"probe", j},
                              {"x", cfg.probes[j][0]},
                              {"y", cfg.probes[j][1]},
                              {"mean", s.mean},
                              {"variance", s.variance},
                              {"skewness", s.skewness},
                              {"values", result.observables[j]}});
        }
        write_text(dir / "simulate.json", json{{"probes", probes}}.dump(2) + "\n");
    }
    write_provenance(cfg);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    const RngSpec rng{cfg.seed, cfg.stream};
    ActionRepresentation rep = build_representation(rep_spec_of(cfg), rng);
    if (cfg.model == "kpz") {
        rep = scale_oy_to_kpz(rep, cfg.t);
        validate_representation(rep, RngSpec{cfg.seed, cfg.stream + 1});
    }
    const AxiomReport report = measure_axioms(rep, RngSpec{cfg.seed, cfg.stream + 2});

    json body{{"worst_recursion", report.worst_recursion},
              {"worst_quadrangle", report.worst_quadrangle},
              {"worst_monotone", report.worst_monotone},
              {"recursion_samples", report.recursion_samples},
              {"quadrangle_samples", report.quadrangle_samples}};
    json defects = json::array();
    for (std::size_t j = 0; j < rep.num_slices(); ++j)
        defects.push_back(monotone_difference_defect(rep, j));
    body["monotone_defects"] = defects;

    const std::filesystem::path dir(cfg.out);
    if (cfg.format == "csv") {
        std::string table = "metric,value\n";
        table += "worst_recursion," + fmt(report.worst_recursion) + "\n";
        table += "worst_quadrangle," + fmt(report.worst_quadrangle) + "\n";
        table += "worst_monotone," + fmt(report.worst_monotone) + "\n";
        table += "recursion_samples," + std::to_string(report.recursion_samples) + "\n";
        table += "quadrangle_samples," + std::to_string(report.quadrangle_samples) + "\n";
        for (std::size_t j = 0; j < rep.num_slices(); ++j)
            table += "monotone_defect_" + std::to_string(j) + "," +
                     fmt(defects[j].get<double>()) + "\n";
        write_text(dir / "verify.csv", table);
    } else {
        write_text(dir / "verify.json", body.dump(2) + "\n");
    }
    write_provenance(cfg);
    return 0;
}

int cmd_geodesic(const RunConfig& cfg) {
    const std::size_t m = static_cast<std::size_t>(cfg.num_points);
    const double dx = cfg.length / static_cast<double>(m - 1);
    const GridEnvironment env =
        sample_brownian(cfg.n, 0.0, dx, m, RngSpec{cfg.seed, cfg.stream});
    const int root_k = cfg.root[1] < 0 ? cfg.n : static_cast<int>(cfg.root[1]);
    const double query_x = cfg.query[0] < 0 ? cfg.length : cfg.query[0];
    const ActionField field = action_from_point(env, Point{cfg.root[0], root_k});
    const BacktrackResult result =
        backtrack_geodesic(field, env, Point{query_x, static_cast<int>(cfg.query[1])});

    write_text(std::filesystem::path(cfg.out) / "geodesic.csv",
               geodesic_to_csv(result.path, result.termination));
    write_provenance(cfg);
    return 0;
}

int cmd_scale(const RunConfig& cfg) {
    const RngSpec rng{cfg.seed, cfg.stream};
    const ActionRepresentation rep = build_representation(rep_spec_of(cfg), rng);
    ActionRepresentation scaled = rep;
    if (cfg.model == "bl") {
        scaled = scale_to_fixed_point(rep, cfg.n);
    } else if (cfg.model == "oy") {
        scaled = scale_to_fixed_point(rep, oy_scaling_constants(std::log(cfg.weight)),
                                      cfg.n);
    } else if (cfg.model == "lg") {
        scaled = scale_to_fixed_point(
            rep, lg_scaling_constants(load_lg_scaling(cfg.lg_scaling)), cfg.n);
    } else {
        scaled = scale_oy_to_kpz(rep, cfg.t);
    }
    write_text(std::filesystem::path(cfg.out) / "scaled.csv", representation_to_csv(scaled));
    write_provenance(cfg);
    return 0;
}

int cmd_melon(const RunConfig& cfg) {
    const RngSpec rng{cfg.seed, cfg.stream};
    const RngSpec prov{cfg.seed, cfg.stream};
    std::string table = "y,level,value\n";
    if (cfg.model == "lg") {
        const LatticeEnvironment src = sample_inverse_gamma_lattice(
            cfg.theta, static_cast<std::size_t>(cfg.num_points), cfg.n, rng);
        const Melon melon = lg_ensemble(src, prov);
        const LatticeEnvironment& lines = melon.lattice();
        for (int k = 1; k <= lines.num_levels(); ++k)
            for (std::size_t i = 0; i < lines.num_points(); ++i)
                table += fmt(lines.x(i)) + "," + std::to_string(k) + "," +
                         fmt(lines.at(i, k)) + "\n";
    } else {
        const std::size_t m = static_cast<std::size_t>(cfg.num_points);
        const double dx = cfg.length / static_cast<double>(m - 1);
        const GridEnvironment src = sample_brownian(cfg.n, 0.0, dx, m, rng);
        const Melon melon = cfg.model == "bl" ? brownian_melon(src, prov)
                                              : oy_ensemble(src, cfg.weight, prov);
        const GridEnvironment& lines = melon.grid();
        for (int k = 1; k <= lines.num_levels(); ++k)
            for (std::size_t i = 0; i < lines.num_points(); ++i)
                table += fmt(lines.x(i)) + "," + std::to_string(k) + "," +
                         fmt(lines.at(i, k)) + "\n";
    }
    write_text(std::filesystem::path(cfg.out) / "melon.csv", table);
    write_provenance(cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for last passage and polymer scaling"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string config_path, model_flag, out_flag, format_flag;
    std::uint64_t seed_flag = 0;
    long long replicas_flag = 0;
    int n_flag = 0;

    struct Flags {
        CLI::Option* config;
        CLI::Option* seed;
        CLI::Option* replicas;
        CLI::Option* model;
        CLI::Option* n;
        CLI::Option* out;
        CLI::Option* format;
    };
    std::vector<std::pair<CLI::App*, Flags>> wired;
    for (const char* name : {"simulate", "verify", "geodesic", "scale", "melon"}) {
        CLI::App* cmd = app.add_subcommand(name);
        Flags f{cmd->add_option("--config", config_path, "JSON config file"),
                cmd->add_option("--seed", seed_flag, "rng seed override"),
                cmd->add_option("--replicas", replicas_flag, "replica count override"),
                cmd->add_option("--model", model_flag, "model tag: bl, oy, lg, kpz"),
                cmd->add_option("--n", n_flag, "line count override"),
                cmd->add_option("--out", out_flag, "output directory"),
                cmd->add_option("--format", format_flag, "table format: csv or json")};
        wired.emplace_back(cmd, f);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    RunConfig cfg;
    const CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    const Flags* flags = nullptr;
    for (const auto& [cmd, f] : wired)
        if (cmd == active) flags = &f;

    if (flags->config->count() > 0) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "config file not found: " << config_path << "\n";
            return 2;
        }
        json doc;
        try {
            in >> doc;
        } catch (const json::parse_error& e) {
            std::cerr << "config error: field `<root>`: " << e.what() << "\n";
            return 3;
        }
        const std::string err = apply_config_file(cfg, doc);
        if (!err.empty()) {
            std::cerr << "config error: " << err << "\n";
            return 3;
        }
    }
    if (flags->seed->count() > 0) cfg.seed = seed_flag;
    if (flags->replicas->count() > 0) cfg.num_replicas = replicas_flag;
    if (flags->model->count() > 0) cfg.model = model_flag;
    if (flags->n->count() > 0) cfg.n = n_flag;
    if (flags->out->count() > 0) cfg.out = out_flag;
    if (flags->format->count() > 0) cfg.format = format_flag;

    const std::string schema_err = check_schema(cfg);
    if (!schema_err.empty()) {
        std::cerr << "config error: " << schema_err << "\n";
        return 3;
    }

    std::error_code ec;
    std::filesystem::create_directories(cfg.out, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << cfg.out << ": " << ec.message()
                  << "\n";
        return 2;
    }

    try {
        if (cfg.command == "simulate") return cmd_simulate(cfg);
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "geodesic") return cmd_geodesic(cfg);
        if (cfg.command == "scale") return cmd_scale(cfg);
        return cmd_melon(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 1;
    }
}

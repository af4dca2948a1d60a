// cayleylab: batch front-end over the library. One config = one task; every
// run writes its artifacts plus a manifest report, and identical configs
// produce byte-identical artifacts.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "cayley/groups.hpp"
#include "cayley/io.hpp"
#include "cayley/spectral.hpp"

using json = nlohmann::ordered_json;
using namespace cayley;

namespace {

constexpr const char* kVersion = "cayleylab 1.0.0";

// Exit codes: 0 success, 2 validation, 3 incomplete window, 4 resource cap,
// 5 numerical failure.
enum ExitCode { kOk = 0, kValidation = 2, kWindow = 3, kResource = 4, kNumerical = 5 };

json default_config() {
    return json{
        {"task", ""},
        {"group", {{"kind", "int_lattice"}, {"dim", 1}, {"tree_degree", 3}}},
        {"generators", {{"name", "standard"}, {"convention", "simple"}, {"elements", json::array()}}},
        {"scheme", {{"kind", "combinatorial"}, {"scale", 1.0}, {"probabilities", json::array()}}},
        {"potential",
         {{"kind", "zero"}, {"value", 0.0}, {"table", json::array()}, {"base", 0},
          {"entries", json::object()}}},
        {"region",
         {{"kind", "ball"}, {"n", 1}, {"radius", 2}, {"center", ""}, {"lo", 0}, {"hi", 0},
          {"vertices", json::array()}}},
        {"params",
         {{"lambdas", json::array()}, {"grid_min", 0.0}, {"grid_max", 2.0}, {"grid_step", 0.01},
          {"n_values", json::array()}, {"window", 0.002}, {"threshold", 0.02},
          {"tolerance", 1e-9}, {"cluster_tol", 1e-8}, {"residual_tol", 1e-9},
          {"strategy", "backtracking"}, {"node_limit", 1000000}, {"seeds", json::array()},
          {"radius", 3}, {"degree_max", 6}, {"transversal", json::array()},
          {"heights", json::array()}, {"window_n", 0}, {"sample_radius", 2}}},
        {"output_dir", "cayleylab-out"},
        {"seed", 0},
        {"vertex_cap", kDefaultVertexCap},
    };
}

struct Context {
    json config;
    std::filesystem::path out_dir;
    std::vector<json> manifest;
    json records = json::array();

    void write_artifact(const std::string& name, const std::string& bytes) {
        std::filesystem::create_directories(out_dir);
        const auto path = out_dir / name;
        std::ofstream file(path, std::ios::binary);
        if (!file) throw DataError("cannot write artifact '" + path.string() + "'");
        file << bytes;
        manifest.push_back(json{
            {"file", name}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
    }
};

// ---------------------------------------------------------------------------
// Config -> domain objects

GroupSpec parse_group(const json& cfg, std::vector<std::string>* problems) {
    const std::string kind = cfg.value("kind", "");
    if (kind == "int_lattice") {
        const int dim = cfg.value("dim", 1);
        if (dim < 1 || dim > 4) {
            if (problems) problems->push_back("group.dim must be in 1..4");
            return GroupSpec::lattice(1);
        }
        return GroupSpec::lattice(dim);
    }
    if (kind == "int_cross_c2") return GroupSpec::cross_c2();
    if (kind == "lamplighter") return GroupSpec::lamplighter_group();
    if (kind == "baumslag_solitar_1_2") return GroupSpec::bs12();
    if (kind == "regular_tree") {
        const int q = cfg.value("tree_degree", 3);
        if (q < 3 || q > 10) {
            if (problems) problems->push_back("group.tree_degree must be in 3..10");
            return GroupSpec::tree(3);
        }
        return GroupSpec::tree(q);
    }
    if (problems) problems->push_back("unknown group.kind '" + kind + "'");
    return GroupSpec::lattice(1);
}

GeneratingSet parse_generators(const GroupSpec& spec, const json& cfg,
                               std::vector<std::string>* problems) {
    GeneratingSet gens;
    const std::string convention = cfg.value("convention", "simple");
    if (convention == "simple")
        gens.convention = EdgeConvention::simple;
    else if (convention == "serre")
        gens.convention = EdgeConvention::serre;
    else if (problems)
        problems->push_back("generators.convention must be 'simple' or 'serre'");

    const auto elements = cfg.value("elements", json::array());
    if (!elements.empty()) {
        for (const auto& e : elements) gens.generators.push_back(e.get<std::string>());
        return gens;
    }
    if (spec.kind == GroupKind::regular_tree) return gens; // ignored for trees
    try {
        return builtin_generators(spec, cfg.value("name", "standard"), gens.convention);
    } catch (const DataError& e) {
        if (problems) problems->push_back(e.what());
        return gens;
    }
}

WeightScheme parse_scheme(const json& cfg, std::vector<std::string>* problems) {
    const std::string kind = cfg.value("kind", "combinatorial");
    const double scale = cfg.value("scale", 1.0);
    if (!(scale > 0.0) && problems) problems->push_back("scheme.scale must be positive");
    if (kind == "combinatorial") return WeightScheme::combinatorial(scale);
    if (kind == "unit") return WeightScheme::unit(scale);
    if (kind == "markov") {
        std::vector<double> probs;
        for (const auto& p : cfg.value("probabilities", json::array()))
            probs.push_back(p.get<double>());
        return WeightScheme::markov(probs, scale);
    }
    if (problems) problems->push_back("unknown scheme.kind '" + kind + "'");
    return WeightScheme::combinatorial();
}

Potential parse_potential(const GroupSpec& spec, const json& cfg,
                          std::vector<std::string>* problems) {
    const std::string kind = cfg.value("kind", "zero");
    if (kind == "zero") return Potential::zero();
    if (kind == "constant") return Potential::constant(cfg.value("value", 0.0));
    if (kind == "tabulated") {
        std::unordered_map<VertexKey, double> entries;
        for (const auto& [key, value] : cfg.value("entries", json::object()).items())
            entries[key] = value.get<double>();
        return Potential::tabulated(std::move(entries), cfg.value("value", 0.0));
    }
    if (kind == "height_profile") {
        std::vector<double> table;
        for (const auto& v : cfg.value("table", json::array())) table.push_back(v.get<double>());
        if (table.empty()) {
            if (problems) problems->push_back("potential.table must be non-empty");
            return Potential::zero();
        }
        if (spec.kind == GroupKind::regular_tree)
            return Potential::height_profile(tree_busemann_height, table, cfg.value("base", 0));
        auto group = make_group(spec);
        return Potential::height_profile(
            [group](const VertexKey& k) { return group->free_abelian_image(k)[0]; }, table,
            cfg.value("base", 0));
    }
    if (problems) problems->push_back("unknown potential.kind '" + kind + "'");
    return Potential::zero();
}

struct Workspace {
    GroupSpec spec;
    GeneratingSet gens;
    WeightScheme scheme;
    Potential potential = Potential::zero();
    std::shared_ptr<const GraphOracle> oracle;
    std::int64_t vertex_cap = kDefaultVertexCap;
};

Workspace make_workspace(const json& config) {
    Workspace w;
    w.spec = parse_group(config.at("group"), nullptr);
    w.gens = parse_generators(w.spec, config.at("generators"), nullptr);
    w.scheme = parse_scheme(config.at("scheme"), nullptr);
    w.potential = parse_potential(w.spec, config.at("potential"), nullptr);
    w.oracle = make_cayley_oracle(w.spec, w.gens, w.scheme);
    w.vertex_cap = config.value("vertex_cap", kDefaultVertexCap);
    return w;
}

VertexKey default_center(const GroupSpec& spec) {
    if (spec.kind == GroupKind::regular_tree) return "|0";
    return make_group(spec)->identity();
}

// Builds the region named by the config together with a patch wide enough
// for boundary and coupling queries on it.
std::pair<Patch, Region> materialize_region(const Workspace& w, const json& cfg) {
    const std::string kind = cfg.value("kind", "ball");
    if (kind == "ball") {
        const int radius = cfg.value("radius", 2);
        VertexKey center = cfg.value("center", std::string{});
        if (center.empty()) center = default_center(w.spec);
        Patch patch = build_patch(*w.oracle, {center}, radius, w.vertex_cap);
        std::vector<std::int32_t> members;
        for (std::int32_t v = 0; v < patch.core_size; ++v) members.push_back(v);
        return {std::move(patch), Region::of(std::move(members))};
    }
    std::vector<VertexKey> keys;
    if (kind == "interval") {
        if (w.spec.kind != GroupKind::int_lattice || w.spec.lattice_dim != 1)
            throw DataError("region.kind 'interval' needs int_lattice(1)");
        for (std::int64_t k = cfg.value("lo", 0); k <= cfg.value("hi", 0); ++k)
            keys.push_back(std::to_string(k));
    } else if (kind == "strip") {
        if (w.spec.kind != GroupKind::int_cross_c2)
            throw DataError("region.kind 'strip' needs int_cross_c2");
        const int n = cfg.value("n", 1);
        for (int k = -n; k <= n; ++k)
            for (int bit = 0; bit <= 1; ++bit)
                keys.push_back(std::to_string(k) + "|" + (bit ? "1" : "0"));
    } else if (kind == "folner") {
        keys = folner_set(w.spec, w.gens, cfg.value("n", 1)).vertices;
    } else if (kind == "explicit") {
        for (const auto& v : cfg.value("vertices", json::array()))
            keys.push_back(v.get<std::string>());
        if (keys.empty()) throw DataError("region.kind 'explicit' needs region.vertices");
    } else {
        throw DataError("unknown region.kind '" + kind + "'");
    }
    Patch patch = build_patch(*w.oracle, keys, 1, w.vertex_cap);
    Region region = Region::of_keys(patch, keys);
    return {std::move(patch), std::move(region)};
}

std::vector<double> grid_from(const json& params) {
    const double lo = params.value("grid_min", 0.0);
    const double hi = params.value("grid_max", 2.0);
    const double step = params.value("grid_step", 0.01);
    std::vector<double> grid;
    for (std::int64_t i = 0;; ++i) {
        const double x = lo + step * static_cast<double>(i);
        if (x > hi + step * 0.5) break;
        grid.push_back(x);
    }
    return grid;
}

std::vector<double> lambdas_from(const json& params) {
    std::vector<double> out;
    for (const auto& v : params.value("lambdas", json::array())) out.push_back(v.get<double>());
    return out;
}

std::vector<int> n_values_from(const json& params) {
    std::vector<int> out;
    for (const auto& v : params.value("n_values", json::array())) out.push_back(v.get<int>());
    return out;
}

// ---------------------------------------------------------------------------
// Validation: every problem is reported, not only the first.

std::vector<std::string> validate_config(const json& config) {
    std::vector<std::string> problems;
    static const std::vector<std::string> tasks = {
        "patch", "exhaust", "uniqueness", "eigensearch", "ids",
        "jumps", "bounds",  "heightcheck", "folner",     "moments"};
    const std::string task = config.value("task", "");
    if (std::find(tasks.begin(), tasks.end(), task) == tasks.end())
        problems.push_back("unknown task '" + task + "'");

    const GroupSpec spec = parse_group(config.at("group"), &problems);
    parse_generators(spec, config.at("generators"), &problems);
    parse_scheme(config.at("scheme"), &problems);
    parse_potential(spec, config.at("potential"), &problems);

    const json& params = config.at("params");
    const json& region = config.at("region");
    if (region.value("radius", 0) < 0) problems.push_back("region.radius must be >= 0");
    if (region.value("n", 1) < 1) problems.push_back("region.n must be >= 1");
    if (params.value("radius", 0) < 0) problems.push_back("params.radius must be >= 0");
    if (params.value("grid_step", 0.01) <= 0.0)
        problems.push_back("params.grid_step must be positive");
    if (params.value("grid_max", 2.0) <= params.value("grid_min", 0.0))
        problems.push_back("params.grid_max must exceed params.grid_min");
    if (params.value("window", 0.002) <= 0.0) problems.push_back("params.window must be positive");
    if (params.value("node_limit", 1000000) < 1)
        problems.push_back("params.node_limit must be >= 1");
    if (config.value("vertex_cap", kDefaultVertexCap) < 1)
        problems.push_back("vertex_cap must be >= 1");

    const bool needs_folner = task == "ids" || task == "jumps" || task == "folner" ||
                              region.value("kind", "") == "folner";
    if (spec.kind == GroupKind::regular_tree && needs_folner)
        problems.push_back("non-amenable built-in: the regular tree has no Folner family");
    const std::string strategy = params.value("strategy", "backtracking");
    if (strategy != "greedy" && strategy != "backtracking")
        problems.push_back("params.strategy must be 'greedy' or 'backtracking'");
    return problems;
}

// ---------------------------------------------------------------------------
// Tasks

void run_patch(Context& ctx, const Workspace& w) {
    const json& params = ctx.config.at("params");
    std::vector<VertexKey> seeds;
    for (const auto& s : params.value("seeds", json::array()))
        seeds.push_back(s.get<std::string>());
    if (seeds.empty()) seeds.push_back(default_center(w.spec));
    const Patch patch = build_patch(*w.oracle, seeds, params.value("radius", 3), w.vertex_cap);
    ctx.write_artifact("patch.txt", serialize_patch(patch));
    ctx.records.push_back(json{{"task", "patch"},
                               {"vertices", patch.size()},
                               {"core", patch.core_size},
                               {"oracle", patch.oracle_descriptor}});
}

void run_exhaust(Context& ctx, const Workspace& w) {
    const auto [patch, region] = materialize_region(w, ctx.config.at("region"));
    const json& params = ctx.config.at("params");
    SearchConfig search_config;
    search_config.strategy = params.value("strategy", "backtracking") == std::string("greedy")
                                 ? SearchStrategy::greedy
                                 : SearchStrategy::backtracking;
    search_config.node_limit = params.value("node_limit", 1000000);
    const auto outcome = search_exhaustion(patch, region, search_config);
    json record{{"task", "exhaust"},
                {"region_size", region.size()},
                {"nodes_visited", outcome.nodes_visited},
                {"note", outcome.note}};
    switch (outcome.status) {
        case SearchOutcome::Status::found: {
            record["status"] = "found";
            record["steps"] = outcome.certificate.steps.size();
            const auto violation = verify_exhaustion(patch, region, outcome.certificate);
            record["verified"] = !violation.has_value();
            ctx.write_artifact("certificate.txt", serialize_certificate(outcome.certificate));
            break;
        }
        case SearchOutcome::Status::none: record["status"] = "none"; break;
        case SearchOutcome::Status::unknown: record["status"] = "unknown"; break;
    }
    ctx.records.push_back(record);
}

void run_uniqueness(Context& ctx, const Workspace& w) {
    const auto [patch, region] = materialize_region(w, ctx.config.at("region"));
    const auto op = compress(patch, w.scheme, w.potential, region);
    const json& params = ctx.config.at("params");
    const double tol = params.value("tolerance", 1e-9);
    std::string artifact;
    json verdicts = json::array();
    for (double lambda : lambdas_from(params)) {
        const auto verdict = decide_uniqueness(op, lambda, tol);
        artifact += serialize_verdict(verdict, lambda) + "\n";
        verdicts.push_back(json{
            {"lambda", lambda},
            {"status", verdict.status == UniquenessVerdict::Status::unique    ? "unique"
                       : verdict.status == UniquenessVerdict::Status::witness ? "witness"
                                                                              : "numerically_marginal"},
            {"sigma_min", verdict.min_singular_value}});
    }
    ctx.write_artifact("verdicts.txt", artifact);
    ctx.records.push_back(
        json{{"task", "uniqueness"}, {"region_size", region.size()}, {"verdicts", verdicts}});
}

void run_eigensearch(Context& ctx, const Workspace& w) {
    const auto [patch, region] = materialize_region(w, ctx.config.at("region"));
    const auto op = compress(patch, w.scheme, w.potential, region);
    const json& params = ctx.config.at("params");
    const auto search = find_supported_eigenfunctions(op, params.value("cluster_tol", 1e-8),
                                                      params.value("residual_tol", 1e-9));
    ctx.write_artifact("eigensearch.txt", serialize_search(search, op));
    json hits = json::array();
    for (const auto& hit : search.hits)
        hits.push_back(json{{"lambda", hit.lambda},
                            {"multiplicity", hit.multiplicity},
                            {"coupling_residual", hit.coupling_residual}});
    ctx.records.push_back(json{{"task", "eigensearch"},
                               {"region_size", region.size()},
                               {"hits", hits},
                               {"min_residual_seen", search.min_residual_seen}});
}

IDSCurve curve_for_folner(const Workspace& w, int n, const std::vector<double>& grid) {
    const auto folner = folner_set(w.spec, w.gens, n);
    const Patch patch = build_patch(*w.oracle, folner.vertices, 1, w.vertex_cap);
    const Region region = Region::of_keys(patch, folner.vertices);
    const auto op = compress(patch, w.scheme, w.potential, region);
    std::ostringstream provenance;
    provenance << w.oracle->descriptor() << " folner_n=" << n;
    return empirical_ids(eigensolve(op), grid, 1, provenance.str());
}

void run_ids(Context& ctx, const Workspace& w) {
    const json& params = ctx.config.at("params");
    const auto grid = grid_from(params);
    auto ns = n_values_from(params);
    if (ns.empty()) ns.push_back(ctx.config.at("region").value("n", 1));
    json curves = json::array();
    for (int n : ns) {
        const IDSCurve curve = curve_for_folner(w, n, grid);
        std::ostringstream name;
        name << "ids_n" << n << ".txt";
        ctx.write_artifact(name.str(), serialize_curve(curve));
        json record{{"n", n}, {"region_size", curve.region_size}, {"file", name.str()}};
        if (w.spec.kind == GroupKind::int_lattice && w.spec.lattice_dim == 1 &&
            w.scheme.kind == WeightScheme::Kind::combinatorial) {
            double sup = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                sup = std::max(sup, std::abs(curve.values[i] - exact_ids_line(grid[i])));
            record["sup_deviation_from_exact_line_ids"] = sup;
        }
        curves.push_back(record);
    }
    ctx.records.push_back(json{{"task", "ids"}, {"curves", curves}});
}

void run_jumps(Context& ctx, const Workspace& w) {
    const json& params = ctx.config.at("params");
    const auto grid = grid_from(params);
    auto ns = n_values_from(params);
    if (ns.size() < 3) throw DataError("jumps task needs params.n_values with >= 3 entries");
    std::vector<IDSCurve> curves;
    for (int n : ns) {
        curves.push_back(curve_for_folner(w, n, grid));
        std::ostringstream name;
        name << "ids_n" << n << ".txt";
        ctx.write_artifact(name.str(), serialize_curve(curves.back()));
    }
    const auto report =
        detect_jumps(curves, params.value("window", 0.002), params.value("threshold", 0.02));
    ctx.write_artifact("jumps.txt", serialize_jump_report(report));
    json candidates = json::array();
    for (const auto& c : report.candidates)
        candidates.push_back(json{{"lambda", c.lambda}, {"stable", c.stable}});
    ctx.records.push_back(json{{"task", "jumps"}, {"candidates", candidates}});
}

void run_bounds(Context& ctx, const Workspace& w) {
    const auto [patch, region] = materialize_region(w, ctx.config.at("region"));
    const json& params = ctx.config.at("params");

    json window_region = ctx.config.at("region");
    const int window_n = params.value("window_n", 0);
    if (window_n > 0) {
        window_region["n"] = window_n;
        window_region["radius"] = window_n;
        if (window_region.value("kind", "") == "interval") {
            window_region["lo"] = -window_n;
            window_region["hi"] = window_n;
        }
    }
    const auto [window_patch, window] = materialize_region(w, window_region);
    const auto window_hits = find_supported_eigenfunctions(
        compress(window_patch, w.scheme, w.potential, window),
        params.value("cluster_tol", 1e-8), params.value("residual_tol", 1e-9));

    std::string artifact;
    json reports = json::array();
    for (double lambda : lambdas_from(params)) {
        const auto report = vn_bound_check(
            patch, region, TransversalFamily::simply_transitive(), w.scheme, w.potential,
            window_hits, window.size(), 1, lambda, params.value("window", 0.002),
            params.value("tolerance", 1e-9));
        artifact += serialize_bound_report(report) + "\n";
        reports.push_back(json{{"lambda", lambda},
                               {"applicable", report.applicable},
                               {"pass", report.pass},
                               {"bound_tau", report.bound_tau},
                               {"empirical_mass_tau", report.empirical_mass_tau}});
    }
    ctx.write_artifact("bounds.txt", artifact);
    ctx.records.push_back(json{{"task", "bounds"}, {"reports", reports}});
}

void run_heightcheck(Context& ctx, const Workspace& w) {
    const json& params = ctx.config.at("params");
    std::ostringstream artifact;
    json record{{"task", "heightcheck"}};

    std::function<std::int64_t(const VertexKey&)> height_of;
    if (w.spec.kind == GroupKind::regular_tree) {
        height_of = tree_busemann_height;
        record["certificate"] = "busemann";
        artifact << "height: busemann level of the fixed end\n";
    } else {
        std::vector<std::int64_t> heights;
        for (const auto& h : params.value("heights", json::array()))
            heights.push_back(h.get<std::int64_t>());
        const auto group = make_group(w.spec);
        const auto cert = certify_height(*group, w.gens, {{}, heights});
        record["accepted"] = cert.accepted;
        record["detail"] = cert.detail;
        artifact << "accepted: " << (cert.accepted ? "yes" : "no") << "\n";
        artifact << "detail: " << cert.detail << "\n";
        if (!cert.accepted) {
            ctx.write_artifact("heightcheck.txt", artifact.str());
            ctx.records.push_back(record);
            return;
        }
        record["raising_generator"] = cert.raising_generator;
        height_of = [group, cert](const VertexKey& k) {
            return evaluate_height(*group, cert, k);
        };
    }

    const int radius = params.value("sample_radius", 2);
    const Patch patch =
        build_patch(*w.oracle, {default_center(w.spec)}, radius + 1, w.vertex_cap);
    std::vector<std::int32_t> sample;
    for (std::int32_t v = 0; v < patch.core_size; ++v)
        if (patch.seed_distance[v] <= radius) sample.push_back(v);
    const auto table = height_table(patch, height_of);
    const auto axioms = verify_height_axioms(patch, table, Region::of(sample));
    record["sampled"] = axioms.checked;
    record["violations"] = axioms.violations.size();
    artifact << "sampled: " << axioms.checked << "\n";
    artifact << "violations: " << axioms.violations.size() << "\n";
    for (const auto& v : axioms.violations)
        artifact << "violation axiom " << v.axiom << ": " << v.detail << "\n";
    ctx.write_artifact("heightcheck.txt", artifact.str());
    ctx.records.push_back(record);
}

void run_folner(Context& ctx, const Workspace& w) {
    auto ns = n_values_from(ctx.config.at("params"));
    if (ns.empty()) ns.push_back(ctx.config.at("region").value("n", 1));
    std::ostringstream artifact;
    artifact << "# columns: n size boundary ratio_num ratio_den ratio\n";
    json rows = json::array();
    for (int n : ns) {
        const auto f = folner_set(w.spec, w.gens, n);
        artifact << n << " " << f.vertices.size() << " " << f.boundary_size << " "
                 << f.ratio_num << " " << f.ratio_den << " " << format_double(f.ratio())
                 << "\n";
        rows.push_back(json{{"n", n},
                            {"size", f.vertices.size()},
                            {"boundary", f.boundary_size},
                            {"ratio", f.ratio()}});
    }
    ctx.write_artifact("folner.txt", artifact.str());
    ctx.records.push_back(json{{"task", "folner"}, {"rows", rows}});
}

void run_moments(Context& ctx, const Workspace& w) {
    const json& params = ctx.config.at("params");
    std::vector<VertexKey> transversal;
    for (const auto& v : params.value("transversal", json::array()))
        transversal.push_back(v.get<std::string>());
    if (transversal.empty()) transversal.push_back(default_center(w.spec));
    const int degree_max = params.value("degree_max", 6);
    std::ostringstream artifact;
    artifact << "# columns: k trace_of_H_power_k\n";
    json rows = json::array();
    for (int k = 0; k <= degree_max; ++k) {
        std::vector<double> mono(k + 1, 0.0);
        mono[k] = 1.0;
        const double value =
            vn_trace_poly(*w.oracle, w.scheme, w.potential, transversal, mono, w.vertex_cap);
        artifact << k << " " << format_double(value) << "\n";
        rows.push_back(json{{"k", k}, {"value", value}});
    }
    ctx.write_artifact("moments.txt", artifact.str());
    ctx.records.push_back(json{{"task", "moments"}, {"rows", rows}});
}

int run(json config) {
    const auto started = std::chrono::steady_clock::now();
    const auto problems = validate_config(config);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "config error: " << p << "\n";
        return kValidation;
    }

    Context ctx;
    ctx.config = config;
    ctx.out_dir = config.value("output_dir", "cayleylab-out");
    const Workspace w = make_workspace(config);

    const std::string task = config.at("task");
    if (task == "patch") run_patch(ctx, w);
    else if (task == "exhaust") run_exhaust(ctx, w);
    else if (task == "uniqueness") run_uniqueness(ctx, w);
    else if (task == "eigensearch") run_eigensearch(ctx, w);
    else if (task == "ids") run_ids(ctx, w);
    else if (task == "jumps") run_jumps(ctx, w);
    else if (task == "bounds") run_bounds(ctx, w);
    else if (task == "heightcheck") run_heightcheck(ctx, w);
    else if (task == "folner") run_folner(ctx, w);
    else if (task == "moments") run_moments(ctx, w);

    json report{{"version", kVersion},
                {"config", config},
                {"records", ctx.records},
                {"manifest", ctx.manifest},
                {"wall_clock_seconds",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                     .count()}};
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream out(ctx.out_dir / "report.json");
    out << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
    return kOk;
}

void add_override_options(CLI::App* sub, std::string& config_path, json& overrides) {
    sub->add_option("--config", config_path, "JSON config file");
    const auto opt = [&overrides](const std::string& path) {
        return [&overrides, path](const std::string& value) {
            json* slot = &overrides;
            std::size_t start = 0;
            while (true) {
                const auto dot = path.find('.', start);
                const std::string key = path.substr(start, dot - start);
                if (dot == std::string::npos) {
                    json parsed = json::parse(value, nullptr, false);
                    (*slot)[key] = parsed.is_discarded() ? json(value) : parsed;
                    return;
                }
                slot = &(*slot)[key];
                start = dot + 1;
            }
        };
    };
    sub->add_option_function<std::string>("--group", opt("group.kind"), "Group kind");
    sub->add_option_function<std::string>("--dim", opt("group.dim"), "Lattice dimension");
    sub->add_option_function<std::string>("--tree-degree", opt("group.tree_degree"),
                                          "Tree degree");
    sub->add_option_function<std::string>("--gens", opt("generators.name"),
                                          "Named generating set");
    sub->add_option_function<std::string>("--convention", opt("generators.convention"),
                                          "simple or serre");
    sub->add_option_function<std::string>("--scheme", opt("scheme.kind"),
                                          "combinatorial, unit or markov");
    sub->add_option_function<std::string>("--region", opt("region.kind"),
                                          "ball, interval, strip, folner or explicit");
    sub->add_option_function<std::string>("--n", opt("region.n"), "Region index n");
    sub->add_option_function<std::string>("--radius", opt("region.radius"), "Ball radius");
    sub->add_option_function<std::string>("--lo", opt("region.lo"), "Interval start");
    sub->add_option_function<std::string>("--hi", opt("region.hi"), "Interval end");
    sub->add_option_function<std::string>("--lambda", opt("params.lambdas"),
                                          "Lambda values, e.g. [1.2]");
    sub->add_option_function<std::string>("--n-values", opt("params.n_values"),
                                          "Folner indices, e.g. [1,2,3]");
    sub->add_option_function<std::string>("--grid-step", opt("params.grid_step"),
                                          "Lambda grid step");
    sub->add_option_function<std::string>("--heights", opt("params.heights"),
                                          "Generator heights, e.g. [1,0]");
    sub->add_option_function<std::string>("--strategy", opt("params.strategy"),
                                          "greedy or backtracking");
    sub->add_option_function<std::string>("--output-dir", opt("output_dir"),
                                          "Artifact directory");
    sub->add_option_function<std::string>("--seed", opt("seed"), "Run seed (echoed)");
    sub->add_option_function<std::string>("--vertex-cap", opt("vertex_cap"),
                                          "Vertex cap override");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite windows of weighted Cayley graphs: exhaustions, eigenfunction "
                 "search, and integrated density of states"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path;
    json overrides = json::object();

    const std::vector<std::string> tasks = {"patch",       "exhaust",     "uniqueness",
                                            "eigensearch", "ids",         "jumps",
                                            "bounds",      "heightcheck", "folner",
                                            "moments",     "validate"};
    for (const std::string& task : tasks) {
        auto* sub = app.add_subcommand(
            task, task == "validate" ? "Check a config without running it"
                                     : "Run the '" + task + "' task");
        add_override_options(sub, config_path, overrides);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string task = app.get_subcommands().front()->get_name();

    try {
        json config = default_config();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "config error: cannot open '" << config_path << "'\n";
                return kValidation;
            }
            json from_file = json::parse(in, nullptr, true, true);
            config.merge_patch(from_file);
        }
        if (task != "validate") config["task"] = task;
        config.merge_patch(overrides);
        if (const char* cap = std::getenv("CAYLEYLAB_VERTEX_CAP"))
            config["vertex_cap"] = std::stoll(cap);

        if (task == "validate") {
            const auto problems = validate_config(config);
            if (problems.empty()) {
                std::cout << "ok\n";
                return kOk;
            }
            for (const auto& p : problems) std::cout << "config error: " << p << "\n";
            return kValidation;
        }
        return run(std::move(config));
    } catch (const WindowError& e) {
        std::cerr << "window error: " << e.what() << "\n";
        return kWindow;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return kResource;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    }
}

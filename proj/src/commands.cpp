#include "pathlet/commands.hpp"

#include "pathlet/decomposer.hpp"
#include "pathlet/errors.hpp"
#include "pathlet/evalkit.hpp"
#include "pathlet/hierarchy.hpp"
#include "pathlet/random.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fs = std::filesystem;

namespace pathlet {

namespace {

constexpr std::uint64_t kSplitTag = 0x5b117;
constexpr std::uint64_t kBoundTag = 0xb0u;

std::string smoothing_name(Smoothing::Kind k) {
    return k == Smoothing::Kind::LogSumExp ? "logsumexp" : "pnorm";
}

// Collects artifacts in memory and writes them once the run has finished,
// recording a checksum per file for the manifest.
class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string bytes) { files_.emplace_back(name, std::move(bytes)); }
    void add_json(const std::string& name, const nlohmann::ordered_json& j) { add(name, j.dump(2) + "\n"); }

    nlohmann::ordered_json listing() const {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& [name, bytes] : files_) {
            arr.push_back({{"path", name}, {"bytes", bytes.size()}, {"fnv1a", fnv1a_hex(bytes)}});
        }
        return arr;
    }

    void flush() const {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
        for (const auto& [name, bytes] : files_) {
            const fs::path p = dir_ / name;
            fs::create_directories(p.parent_path(), ec);
            std::ofstream out(p, std::ios::binary);
            out << bytes;
            if (!out) throw IoError("cannot write " + p.string());
        }
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

void write_file(const std::string& path, const std::string& bytes) {
    const fs::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    out << bytes;
    if (!out) throw IoError("cannot write " + path);
}

void require(const std::string& value, const std::string& what) {
    if (value.empty()) throw ConfigError(what + " is required");
}

struct Corpus {
    RoadGraph graph;
    std::vector<Trajectory> trajs;
    TrajectoryLoadStats stats;
};

Corpus load_corpus(const std::string& graph_path, const std::string& trajectories_path) {
    require(graph_path, "graph path");
    require(trajectories_path, "trajectories path");
    Corpus c;
    c.graph = load_graph(graph_path);
    c.trajs = load_trajectories(trajectories_path, c.graph, &c.stats);
    return c;
}

std::vector<Trajectory> pick(std::span<const Trajectory> trajs, std::span<const std::size_t> idx) {
    std::vector<Trajectory> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(trajs[i]);
    return out;
}

nlohmann::ordered_json trajectory_key(const Trajectory& t) {
    if (t.part == 0) return t.traj_id;
    return nlohmann::ordered_json::array({t.traj_id, t.part});
}

std::string edge_map_csv(const RoadGraph& g) {
    std::ostringstream out;
    out << "dense_id,edge_id\n";
    for (std::size_t i = 0; i < g.num_edges(); ++i) out << i << ',' << g.original_id(static_cast<EdgeId>(i)) << '\n';
    return out.str();
}

// Candidate rows are spelled in original edge ids on the finest level and in
// finer-level pathlet ids above it.
nlohmann::ordered_json solution_json(const CellRun& run, int level, const RoadGraph* graph) {
    const CellResult& r = run.result;
    nlohmann::ordered_json j;
    j["level"] = level;
    j["cell"] = run.cell;
    j["rows"] = r.problem.candidates.size();
    j["cols"] = r.problem.M.cols();
    auto& cands = j["candidates"] = nlohmann::ordered_json::array();
    for (const auto& p : r.problem.candidates.pathlets) {
        auto seq = nlohmann::ordered_json::array();
        for (Symbol s : p) {
            if (graph) {
                seq.push_back(graph->original_id(s));
            } else {
                seq.push_back(s);
            }
        }
        cands.push_back(std::move(seq));
    }
    auto& frac = j["fractional"] = nlohmann::ordered_json::array();
    const DecisionMatrix& R = r.fractional.R;
    for (std::size_t k = 0; k < R.pattern->size(); ++k) {
        const double v = R.values[k];
        if (v <= 0.0) continue;
        frac.push_back(nlohmann::ordered_json::array({R.pattern->entry_row(k), R.pattern->entry_col(k), v}));
    }
    auto entries = [](const SparseBinaryMatrix& m) {
        auto arr = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            for (int row : m.col(c)) arr.push_back(nlohmann::ordered_json::array({row, c}));
        }
        return arr;
    };
    j["rounded"] = entries(r.binary.R);
    j["assignment"] = entries(r.assignment);
    return j;
}

std::string trace_csv(const HierarchyResult& h) {
    std::ostringstream out;
    out << "level,cell,iter,true_objective,surrogate,residual\n";
    for (const auto& level : h.levels) {
        for (const auto& run : level.cells) {
            for (const auto& row : run.result.fractional.trace) {
                out << level.level << ',' << run.cell << ',' << row.iter << ',' << format_double(row.true_objective)
                    << ',' << format_double(row.surrogate) << ',' << format_double(row.residual) << '\n';
            }
        }
    }
    return out.str();
}

nlohmann::ordered_json cell_summary(const CellRun& run, int level) {
    const CellResult& r = run.result;
    const FractionalSolution& f = r.fractional;
    nlohmann::ordered_json j;
    j["level"] = level;
    j["cell"] = run.cell;
    j["sequences"] = run.sequences;
    j["candidates"] = r.problem.candidates.size();
    j["converged"] = f.converged;
    j["stationary"] = f.stationary;
    j["iterations"] = f.iterations;
    j["max_residual"] = f.max_residual;
    j["relaxed_objective"] = true_objective(f.R, r.dictionary.origin.lambda);
    j["smoothing_gap"] = f.smoothing_gap;
    j["theta"] = r.theta;
    j["attempts_used"] = r.binary.attempts_used;
    j["good_sample"] = !r.binary.repaired;
    j["coverage_repairs"] = r.binary.repaired_entries;
    j["partition_repairs"] = r.partition_repairs;
    j["pruned"] = r.pruned;
    j["dictionary_size"] = r.dictionary.size();
    j["objective"] = r.cost;
    return j;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

int RunConfig::effective_levels() const {
    if (levels > 0) return levels;
    return depth == 0 ? 1 : 2;
}

void RunConfig::validate() const {
    learn.validate();
    if (depth < 0) throw ConfigError("depth must be >= 0");
    if (levels < 0) throw ConfigError("levels must be >= 0");
    if (depth == 0 && effective_levels() != 1) throw ConfigError("a flat run (depth 0) has exactly one level");
    if (depth > 0 && effective_levels() > depth + 1) {
        throw ConfigError("depth " + std::to_string(depth) + " allows at most " + std::to_string(depth + 1) +
                          " levels");
    }
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
    if (min_length < 1) throw ConfigError("min_length must be >= 1");
    if (!seed) throw ConfigError("a seed is required for randomized runs");
}

nlohmann::ordered_json RunConfig::to_json() const {
    const SolverConfig& s = learn.solver;
    nlohmann::ordered_json j;
    j["graph"] = graph_path;
    j["trajectories"] = trajectories_path;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["lambda"] = s.lambda;
    j["theta_mode"] = to_string(learn.theta_mode);
    j["theta_value"] = learn.theta_value;
    j["c_min"] = learn.c_min;
    j["max_len"] = learn.max_len;
    j["max_attempts"] = learn.max_attempts;
    j["prune"] = learn.prune;
    j["learning_rate"] = s.learning_rate;
    j["tolerance"] = s.tolerance;
    j["mu"] = s.mu;
    j["mu_interval"] = s.mu_interval;
    j["mu_growth"] = s.mu_growth;
    j["mu_max"] = s.mu_max;
    j["feasibility_tol"] = s.feasibility_tol;
    j["multipliers"] = s.multipliers;
    j["smoothing"] = smoothing_name(s.smoothing.kind);
    j["temperature"] = s.smoothing.temperature;
    j["pnorm_p"] = s.smoothing.p;
    j["min_temperature"] = s.min_temperature;
    j["max_iters"] = s.max_iters;
    j["depth"] = depth;
    j["levels"] = effective_levels();
    j["test_fraction"] = test_fraction;
    j["min_length"] = min_length;
    j["bound_samples"] = bound_samples;
    return j;
}

std::string RunConfig::hash() const { return fnv1a_hex(to_json().dump()); }

Split split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ConfigError("test_fraction must lie in [0, 1)");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
    const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    Split s;
    s.test.assign(perm.begin(), perm.begin() + static_cast<long>(n_test));
    s.train.assign(perm.begin() + static_cast<long>(n_test), perm.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.train.begin(), s.train.end());
    return s;
}

nlohmann::ordered_json error_json(const std::exception& e) {
    nlohmann::ordered_json j;
    if (const auto* pe = dynamic_cast<const Error*>(&e)) {
        j["error"] = pe->kind();
    } else {
        j["error"] = "InternalError";
    }
    j["message"] = e.what();
    if (const auto* nc = dynamic_cast<const NonContiguous*>(&e)) j["index"] = nc->index();
    return j;
}

// ---- learn ------------------------------------------------------------------

int cmd_learn(const RunConfig& config) {
    config.validate();
    require(config.output_dir, "output directory");
    const std::uint64_t seed = *config.seed;
    Corpus corpus = load_corpus(config.graph_path, config.trajectories_path);
    const std::size_t loaded = corpus.trajs.size();
    std::erase_if(corpus.trajs, [&](const Trajectory& t) {
        return t.edges.size() < static_cast<std::size_t>(config.min_length);
    });
    if (corpus.trajs.empty()) throw EmptyCorpus("no trajectories to learn from in " + config.trajectories_path);

    const Split split = split_indices(corpus.trajs.size(), config.test_fraction, derive_seed(seed, {kSplitTag}));
    const auto train = pick(corpus.trajs, split.train);
    const auto test = pick(corpus.trajs, split.test);
    if (train.empty()) throw EmptyCorpus("the training split is empty");

    const HierarchyResult h =
        learn_hierarchy(corpus.graph, train, config.depth, config.effective_levels(), config.learn, seed);
    const Dictionary& unified = h.dictionary.unified;
    const std::size_t n_edges = corpus.graph.num_edges();
    const auto [train_report, test_report] = evaluate(unified, train, test, n_edges);
    const std::string hash = config.hash();

    ArtifactWriter out(config.output_dir);

    nlohmann::ordered_json split_j;
    split_j["seed"] = seed;
    split_j["test_fraction"] = config.test_fraction;
    auto& tr = split_j["train"] = nlohmann::ordered_json::array();
    for (std::size_t i : split.train) tr.push_back(trajectory_key(corpus.trajs[i]));
    auto& te = split_j["test"] = nlohmann::ordered_json::array();
    for (std::size_t i : split.test) te.push_back(trajectory_key(corpus.trajs[i]));
    out.add_json("split.json", split_j);

    nlohmann::ordered_json dict_j;
    dict_j["config_hash"] = hash;
    dict_j.update(dictionary_to_json(h.dictionary, &corpus.graph));
    out.add_json("dictionary.json", dict_j);

    nlohmann::ordered_json report;
    report["config_hash"] = hash;
    report["seed"] = seed;
    report["train"] = to_json(train_report);
    report["test"] = to_json(test_report);
    report["mdl_train"] = to_json(mdl_breakdown(unified, train, n_edges));
    auto& lv = report["levels"] = nlohmann::ordered_json::array();
    for (const auto& level : h.levels) {
        nlohmann::ordered_json l;
        l["level"] = level.level;
        l["dictionary_size"] = level.dictionary.size();
        l["duplicates_removed"] = level.duplicates_removed;
        l["train"] = to_json(evaluate_split(level.dictionary, train, train.size(), n_edges));
        auto& cells = l["cells"] = nlohmann::ordered_json::array();
        for (const auto& run : level.cells) cells.push_back(cell_summary(run, level.level));
        lv.push_back(std::move(l));
    }
    out.add_json("report.json", report);

    out.add("solver_trace.csv", trace_csv(h));

    nlohmann::ordered_json bounds;
    bounds["config_hash"] = hash;
    auto& bcells = bounds["cells"] = nlohmann::ordered_json::array();
    for (const auto& level : h.levels) {
        for (const auto& run : level.cells) {
            const CellResult& r = run.result;
            const BoundReport b = verify_bound(
                r.fractional.R, r.problem.M, r.problem.D, r.theta, config.learn.solver.lambda, config.bound_samples,
                derive_seed(seed, {kBoundTag, static_cast<std::uint64_t>(level.level),
                                   static_cast<std::uint64_t>(run.cell)}));
            nlohmann::ordered_json c;
            c["level"] = level.level;
            c["cell"] = run.cell;
            c.update(to_json(b));
            bcells.push_back(std::move(c));
        }
    }
    out.add_json("bound_report.json", bounds);

    if (config.write_solutions) {
        for (const auto& level : h.levels) {
            for (const auto& run : level.cells) {
                out.add_json("solutions/level" + std::to_string(level.level) + "_cell" + std::to_string(run.cell) +
                                 ".json",
                             solution_json(run, level.level,
                                           level.level == h.levels.front().level ? &corpus.graph : nullptr));
            }
        }
    }
    if (corpus.graph.remapped()) out.add("edge_id_map.csv", edge_map_csv(corpus.graph));

    const int code = h.converged() ? kExitOk : kExitNotConverged;
    nlohmann::ordered_json manifest;
    manifest["command"] = "learn";
    manifest["seed"] = seed;
    manifest["config_hash"] = hash;
    manifest["config"] = config.to_json();
    manifest["inputs"] = {{"edges", n_edges},
                          {"trajectory_lines", corpus.stats.lines},
                          {"split_at_revisits", corpus.stats.split_trajectories},
                          {"pieces", loaded},
                          {"shorter_than_min_length", loaded - corpus.trajs.size()},
                          {"trajectories", corpus.trajs.size()},
                          {"train", train.size()},
                          {"test", test.size()}};
    manifest["status"] = {{"converged", h.converged()}, {"exit_code", code}};
    manifest["artifacts"] = out.listing();
    out.add_json("manifest.json", manifest);
    out.flush();
    return code;
}

// ---- encode / eval / curve --------------------------------------------------

int cmd_encode(const EncodeOptions& options) {
    require(options.dictionary_path, "dictionary path");
    require(options.output_path, "output path");
    const Corpus corpus = load_corpus(options.graph_path, options.trajectories_path);
    const MultiScaleDictionary dict = load_dictionary(options.dictionary_path, &corpus.graph);
    const Dictionary& unified = dict.unified;
    const DictionaryIndex index(unified);
    if (options.relaxed) options.learn.validate();

    std::ostringstream lines;
    std::size_t covered = 0;
    std::size_t uncovered_edges = 0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < corpus.trajs.size(); ++i) {
        const Trajectory& t = corpus.trajs[i];
        const RepresentationVector v =
            options.relaxed
                ? encode_relaxed(t, unified, options.learn.solver, options.learn.theta_for(1),
                                 derive_seed(options.seed, {static_cast<std::uint64_t>(i)}))
                : encode_new(t, unified, index);
        covered += v.uncovered_edges.empty() ? 1 : 0;
        uncovered_edges += v.uncovered_edges.size();
        active += v.active_ids.size();
        lines << feature_row(v, t.departure, options.cosine, &corpus.graph).dump() << '\n';
    }
    write_file(options.output_path, lines.str());

    nlohmann::ordered_json report;
    report["trajectories"] = corpus.trajs.size();
    report["lines"] = corpus.trajs.size();
    report["covered"] = covered;
    report["uncovered_edges"] = uncovered_edges;
    report["mean_active"] =
        corpus.trajs.empty() ? 0.0 : static_cast<double>(active) / static_cast<double>(corpus.trajs.size());
    report["method"] = options.relaxed ? "relaxed" : "exact";
    report["dictionary_size"] = unified.size();
    write_file(options.output_path + ".report.json", report.dump(2) + "\n");
    return kExitOk;
}

int cmd_eval(const EvalOptions& options) {
    require(options.dictionary_path, "dictionary path");
    require(options.output_path, "output path");
    const Corpus corpus = load_corpus(options.graph_path, options.trajectories_path);
    const MultiScaleDictionary dict = load_dictionary(options.dictionary_path, &corpus.graph);
    const std::size_t n_edges = corpus.graph.num_edges();
    nlohmann::ordered_json j;
    j["report"] = to_json(evaluate_split(dict.unified, corpus.trajs, corpus.trajs.size(), n_edges));
    if (!corpus.trajs.empty()) j["mdl"] = to_json(mdl_breakdown(dict.unified, corpus.trajs, n_edges));
    write_file(options.output_path, j.dump(2) + "\n");
    return kExitOk;
}

int cmd_curve(const CurveOptions& options) {
    require(options.dictionary_path, "dictionary path");
    require(options.output_path, "output path");
    const Corpus corpus = load_corpus(options.graph_path, options.trajectories_path);
    const MultiScaleDictionary dict = load_dictionary(options.dictionary_path, &corpus.graph);
    const auto rows = partial_reconstruction_curve(dict.unified, corpus.trajs, options.keep_fractions);
    std::ostringstream out;
    write_curve_csv(out, rows);
    write_file(options.output_path, out.str());
    return kExitOk;
}

// ---- sweep / bound ----------------------------------------------------------

int cmd_sweep(const SweepOptions& options) {
    const RunConfig& run = options.run;
    run.learn.validate();
    require(run.output_dir, "output directory");
    const Corpus corpus = load_corpus(run.graph_path, run.trajectories_path);
    if (corpus.trajs.empty()) throw EmptyCorpus("no trajectories in " + run.trajectories_path);
    const auto rows = lambda_sweep(corpus.trajs, corpus.graph.num_edges(), options.lambdas, options.seeds, run.learn);
    const TrendCheck trend = check_trend(rows);

    ArtifactWriter out(run.output_dir);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    out.add("sweep.csv", csv.str());

    nlohmann::ordered_json cfg = run.to_json();
    cfg.erase("seed");
    cfg.erase("lambda");
    cfg["lambdas"] = options.lambdas;
    cfg["seeds"] = options.seeds;
    const std::string hash = fnv1a_hex(cfg.dump());
    nlohmann::ordered_json summary;
    summary["config_hash"] = hash;
    summary["cost_inversions"] = trend.cost_inversions;
    summary["size_inversions"] = trend.size_inversions;
    summary["converged"] = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
    out.add_json("sweep.json", summary);

    nlohmann::ordered_json manifest;
    manifest["command"] = "sweep";
    manifest["config_hash"] = hash;
    manifest["config"] = cfg;
    manifest["artifacts"] = out.listing();
    out.add_json("manifest.json", manifest);
    out.flush();
    return summary["converged"].get<bool>() ? kExitOk : kExitNotConverged;
}

int cmd_verify_bound(const BoundOptions& options) {
    const RunConfig& run = options.run;
    run.learn.validate();
    if (!run.seed) throw ConfigError("a seed is required for randomized runs");
    require(run.output_dir, "output directory");
    const Corpus corpus = load_corpus(run.graph_path, run.trajectories_path);
    if (corpus.trajs.empty()) throw EmptyCorpus("no trajectories in " + run.trajectories_path);
    const auto seqs = edge_sequences(corpus.trajs);
    const Problem p = prepare_problem(seqs, corpus.graph.num_edges(), run.learn);
    const FractionalSolution frac = solve_relaxed(p.M, p.D, p.pattern, run.learn.solver);
    const double theta = run.learn.theta_for(seqs.size());
    const BoundReport b = verify_bound(frac.R, p.M, p.D, theta, run.learn.solver.lambda, options.samples,
                                       derive_seed(*run.seed, {kBoundTag}));

    ArtifactWriter out(run.output_dir);
    nlohmann::ordered_json j = run.to_json();
    j["samples"] = options.samples;
    const std::string hash = fnv1a_hex(j.dump());
    nlohmann::ordered_json report;
    report["config_hash"] = hash;
    report["seed"] = *run.seed;
    report.update(to_json(b));
    report["relaxation_converged"] = frac.converged;
    report["relaxed_objective"] = true_objective(frac.R, run.learn.solver.lambda);
    out.add_json("bound_report.json", report);
    nlohmann::ordered_json manifest;
    manifest["command"] = "verify-bound";
    manifest["seed"] = *run.seed;
    manifest["config_hash"] = hash;
    manifest["config"] = j;
    manifest["artifacts"] = out.listing();
    out.add_json("manifest.json", manifest);
    out.flush();
    return frac.converged ? kExitOk : kExitNotConverged;
}

// ---- geojson / synthetic ----------------------------------------------------

int cmd_export_geojson(const GeoJsonOptions& options) {
    require(options.dictionary_path, "dictionary path");
    require(options.graph_path, "graph path");
    require(options.output_path, "output path");
    const RoadGraph graph = load_graph(options.graph_path);
    if (!graph.has_geometry()) throw MissingGeometry("GeoJSON export needs edge coordinates");
    const MultiScaleDictionary dict = load_dictionary(options.dictionary_path, &graph);

    std::vector<const Pathlet*> ranked;
    for (const auto& p : dict.unified.pathlets) ranked.push_back(&p);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const Pathlet* a, const Pathlet* b) { return a->support > b->support; });
    if (ranked.size() > options.top_k) ranked.resize(options.top_k);

    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    auto& features = fc["features"] = nlohmann::ordered_json::array();
    for (const Pathlet* p : ranked) {
        auto coords = nlohmann::ordered_json::array();
        std::optional<Point> last;
        for (EdgeId e : p->edges) {
            for (const Point& pt : graph.edge(e).geometry) {
                if (last && *last == pt) continue;
                coords.push_back(nlohmann::ordered_json::array({pt.x, pt.y}));
                last = pt;
            }
        }
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "LineString"}, {"coordinates", coords}};
        f["properties"] = {{"pathlet_id", p->id}, {"support", p->support}, {"level", p->level}};
        features.push_back(std::move(f));
    }
    write_file(options.output_path, fc.dump() + "\n");
    return kExitOk;
}

int cmd_gen_synthetic(const SyntheticOptions& options) {
    require(options.output_dir, "output directory");
    const SyntheticCorpus corpus = generate_synthetic(options.corpus);
    const SyntheticConfig& c = options.corpus;
    ArtifactWriter out(options.output_dir);

    std::ostringstream graph;
    write_graph_csv(graph, corpus.graph);
    out.add("graph.csv", graph.str());
    std::ostringstream trajs;
    write_trajectories_jsonl(trajs, corpus.trajs, corpus.graph);
    out.add("trajectories.jsonl", trajs.str());

    auto corridors = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < corpus.corridors.size(); ++k) {
        auto seq = nlohmann::ordered_json::array();
        for (EdgeId e : corpus.corridors[k]) seq.push_back(corpus.graph.original_id(e));
        const auto n = std::count(corpus.corridor_of.begin(), corpus.corridor_of.end(), static_cast<int>(k));
        corridors.push_back({{"corridor", k}, {"edge_seq", seq}, {"trajectories", n}});
    }
    out.add_json("corridors.json", corridors);

    nlohmann::ordered_json cfg;
    cfg["grid"] = c.grid;
    cfg["spacing"] = c.spacing;
    cfg["n_corridors"] = c.n_corridors;
    cfg["corridor_len"] = c.corridor_len;
    cfg["n_trajs"] = c.n_trajs;
    cfg["noise"] = c.noise;
    cfg["departures"] = c.departures;
    cfg["seed"] = c.seed;
    nlohmann::ordered_json manifest;
    manifest["command"] = "gen-synthetic";
    manifest["seed"] = c.seed;
    manifest["config_hash"] = fnv1a_hex(cfg.dump());
    manifest["config"] = cfg;
    manifest["artifacts"] = out.listing();
    out.add_json("manifest.json", manifest);
    out.flush();
    return kExitOk;
}

}  // namespace pathlet

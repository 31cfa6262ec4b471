#include "pathlet/hierarchy.hpp"

#include "pathlet/decomposer.hpp"
#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

namespace pathlet {

// ---- partition tree ---------------------------------------------------------

namespace {

struct Builder {
    const std::vector<Point>& mids;
    int depth;
    std::vector<int>& leaf;
    std::vector<std::vector<Box>>& boxes;
    std::vector<std::vector<std::size_t>>& population;

    void split(std::vector<EdgeId> edges, const Box& box, int level, int cell) {
        boxes[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(cell)] = box;
        population[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(cell)] = edges.size();
        if (level == depth + 1) {
            for (EdgeId e : edges) leaf[static_cast<std::size_t>(e)] = cell;
            return;
        }
        const bool on_x = (level - 1) % 2 == 0;
        auto coord = [&](EdgeId e) {
            const Point& p = mids[static_cast<std::size_t>(e)];
            return on_x ? p.x : p.y;
        };
        double cut;
        if (edges.empty()) {
            cut = on_x ? (box.xmin + box.xmax) / 2 : (box.ymin + box.ymax) / 2;
        } else {
            std::vector<double> values;
            values.reserve(edges.size());
            for (EdgeId e : edges) values.push_back(coord(e));
            const auto mid = values.begin() + static_cast<long>((values.size() - 1) / 2);
            std::nth_element(values.begin(), mid, values.end());
            cut = *mid;
        }
        std::vector<EdgeId> lower;
        std::vector<EdgeId> upper;
        for (EdgeId e : edges) (coord(e) <= cut ? lower : upper).push_back(e);
        Box lo = box;
        Box hi = box;
        if (on_x) {
            lo.xmax = cut;
            hi.xmin = cut;
        } else {
            lo.ymax = cut;
            hi.ymin = cut;
        }
        split(std::move(lower), lo, level + 1, 2 * cell);
        split(std::move(upper), hi, level + 1, 2 * cell + 1);
    }
};

}  // namespace

PartitionTree PartitionTree::build(const RoadGraph& graph, int depth) {
    if (depth < 1) throw ConfigError("partition depth must be >= 1");
    if (depth > 20) throw ConfigError("partition depth must be <= 20");
    if (!graph.has_geometry()) throw MissingGeometry("spatial partitioning needs edge coordinates");

    PartitionTree tree;
    tree.depth_ = depth;
    tree.leaf_.assign(graph.num_edges(), 0);
    for (int k = 1; k <= depth + 1; ++k) {
        tree.boxes_.emplace_back(std::size_t{1} << (k - 1));
        tree.population_.emplace_back(std::size_t{1} << (k - 1), 0);
    }

    Box root{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    std::vector<Point> mids;
    mids.reserve(graph.num_edges());
    std::vector<EdgeId> all;
    for (const Edge& e : graph.edges()) {
        for (const Point& p : e.geometry) {
            root.xmin = std::min(root.xmin, p.x);
            root.ymin = std::min(root.ymin, p.y);
            root.xmax = std::max(root.xmax, p.x);
            root.ymax = std::max(root.ymax, p.y);
        }
        mids.push_back(graph.midpoint(e.id));
        all.push_back(e.id);
    }
    if (all.empty()) root = Box{};

    Builder b{mids, depth, tree.leaf_, tree.boxes_, tree.population_};
    b.split(std::move(all), root, 1, 0);
    return tree;
}

int PartitionTree::cells_at(int level) const {
    if (level < 1 || level > leaf_level()) {
        throw IndexOutOfRange("level " + std::to_string(level) + " outside 1.." + std::to_string(leaf_level()));
    }
    return 1 << (level - 1);
}

int PartitionTree::cell_of(EdgeId e, int level) const {
    cells_at(level);
    return leaf_of(e) >> (leaf_level() - level);
}

const Box& PartitionTree::box(int level, int cell) const {
    if (cell < 0 || cell >= cells_at(level)) throw IndexOutOfRange("cell " + std::to_string(cell));
    return boxes_[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(cell)];
}

std::size_t PartitionTree::population(int level, int cell) const {
    if (cell < 0 || cell >= cells_at(level)) throw IndexOutOfRange("cell " + std::to_string(cell));
    return population_[static_cast<std::size_t>(level - 1)][static_cast<std::size_t>(cell)];
}

std::vector<CellPiece> split_by_cell(std::span<const Sequence> seqs, const std::function<int(Symbol)>& cell_of) {
    std::vector<CellPiece> out;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        const Sequence& seq = seqs[s];
        for (std::size_t i = 0; i < seq.size(); ++i) {
            const int c = cell_of(seq[i]);
            if (i == 0 || out.back().cell != c) out.push_back(CellPiece{c, s, i, {}});
            out.back().symbols.push_back(seq[i]);
        }
    }
    return out;
}

// ---- per-level learning -----------------------------------------------------

bool LevelResult::converged() const {
    return std::all_of(cells.begin(), cells.end(), [](const CellRun& c) { return c.result.fractional.converged; });
}

namespace {

struct CellJob {
    int cell = 0;
    std::vector<Sequence> seqs;
};

// Runs jobs on a small worker pool. Results land in job order, so the
// outcome does not depend on scheduling.
std::vector<CellResult> run_cells(std::vector<CellJob>& jobs, std::size_t n_symbols, int level,
                                  const LearnConfig& config, std::uint64_t seed) {
    std::vector<CellResult> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                const auto s = derive_seed(seed, {static_cast<std::uint64_t>(level),
                                                  static_cast<std::uint64_t>(jobs[i].cell)});
                results[i] = learn_cell(jobs[i].seqs, n_symbols, config, s);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers = std::min(hw, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<CellJob> group(const std::vector<CellPiece>& pieces) {
    std::map<int, std::vector<Sequence>> by_cell;
    for (const auto& p : pieces) by_cell[p.cell].push_back(p.symbols);
    std::vector<CellJob> jobs;
    for (auto& [cell, seqs] : by_cell) jobs.push_back(CellJob{cell, std::move(seqs)});
    return jobs;
}

// Builds the level dictionary from finished cells. expand maps a cell
// pathlet (over that cell's symbols) to its edge expansion.
LevelResult assemble(int level, std::vector<CellJob>& jobs, std::vector<CellResult> results,
                     const std::function<Sequence(const Sequence&)>& expand, bool keep_children) {
    LevelResult out;
    out.level = level;
    out.dictionary.origin.level = level;
    std::map<Sequence, int> seen;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        CellResult& r = results[i];
        if (i == 0) {
            out.dictionary.origin.lambda = r.dictionary.origin.lambda;
            out.dictionary.origin.theta = r.dictionary.origin.theta;
        }
        for (const Pathlet& p : r.dictionary.pathlets) {
            Pathlet q;
            q.edges = expand(p.edges);
            if (seen.count(q.edges)) {
                ++out.duplicates_removed;
                continue;
            }
            q.id = static_cast<int>(out.dictionary.pathlets.size());
            q.level = level;
            q.cell = jobs[i].cell;
            q.support = p.support;
            if (keep_children) q.children = p.edges;
            seen.emplace(q.edges, q.id);
            out.dictionary.pathlets.push_back(std::move(q));
        }
        out.cells.push_back(CellRun{jobs[i].cell, jobs[i].seqs.size(), std::move(r)});
    }
    return out;
}

}  // namespace

LevelResult learn_level(std::span<const Trajectory> trajs, const PartitionTree& tree, int level,
                        const LearnConfig& config, std::uint64_t seed) {
    config.validate();
    tree.cells_at(level);
    const auto seqs = edge_sequences(trajs);
    auto jobs = group(split_by_cell(seqs, [&](Symbol e) { return tree.cell_of(e, level); }));
    auto results = run_cells(jobs, tree.num_edges(), level, config, seed);
    LevelResult out = assemble(level, jobs, std::move(results), [](const Sequence& s) { return s; }, false);
    out.dictionary.origin.seed = seed;
    return out;
}

LevelResult learn_flat(std::span<const Trajectory> trajs, std::size_t n_edges, const LearnConfig& config,
                       std::uint64_t seed) {
    config.validate();
    std::vector<CellJob> jobs;
    jobs.push_back(CellJob{0, edge_sequences(trajs)});
    auto results = run_cells(jobs, n_edges, 1, config, seed);
    LevelResult out = assemble(1, jobs, std::move(results), [](const Sequence& s) { return s; }, false);
    out.dictionary.origin.seed = seed;
    return out;
}

std::vector<Sequence> tokenize(std::span<const Trajectory> trajs, const Dictionary& finer) {
    const DictionaryIndex index(finer);
    std::vector<Sequence> out;
    out.reserve(trajs.size());
    for (const Trajectory& t : trajs) {
        const Segmentation seg = index.segment(t.edges);
        if (!seg.covered()) {
            throw UncoveredInput("trajectory " + std::to_string(t.traj_id) + " has " +
                                 std::to_string(seg.uncovered.size()) + " edges outside the level-" +
                                 std::to_string(finer.origin.level) + " dictionary");
        }
        out.push_back(seg.pieces);
    }
    return out;
}

LevelResult lift_level(std::span<const Trajectory> trajs, const LevelResult& finer, const LearnConfig& config,
                       std::uint64_t seed) {
    config.validate();
    if (finer.level < 2) throw ConfigError("the whole-map level has no coarser level to lift to");
    const Dictionary& fd = finer.dictionary;
    const int level = finer.level - 1;
    const auto tokens = tokenize(trajs, fd);
    auto jobs = group(split_by_cell(tokens, [&](Symbol tok) {
        return fd.pathlets[static_cast<std::size_t>(tok)].cell >> 1;
    }));
    auto results = run_cells(jobs, fd.size(), level, config, seed);
    auto expand = [&fd](const Sequence& toks) {
        Sequence edges;
        for (Symbol tok : toks) {
            const auto& e = fd.pathlets[static_cast<std::size_t>(tok)].edges;
            edges.insert(edges.end(), e.begin(), e.end());
        }
        return edges;
    };
    LevelResult out = assemble(level, jobs, std::move(results), expand, true);
    out.dictionary.origin.seed = seed;
    return out;
}

// ---- unified dictionary -----------------------------------------------------

const Dictionary* MultiScaleDictionary::level(int k) const {
    for (const auto& d : levels) {
        if (d.origin.level == k) return &d;
    }
    return nullptr;
}

MultiScaleDictionary unify(std::vector<Dictionary> levels, const RoadGraph* graph) {
    if (levels.empty()) throw ConfigError("unify needs at least one level");
    std::sort(levels.begin(), levels.end(),
              [](const Dictionary& a, const Dictionary& b) { return a.origin.level < b.origin.level; });
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i].origin.level != levels[i - 1].origin.level + 1) {
            throw ConfigError("levels must be consecutive");
        }
    }

    MultiScaleDictionary out;
    std::vector<int> offset(levels.size(), 0);
    for (std::size_t i = 1; i < levels.size(); ++i) {
        offset[i] = offset[i - 1] + static_cast<int>(levels[i - 1].size());
    }
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const Dictionary& d = levels[i];
        for (std::size_t j = 0; j < d.size(); ++j) {
            const Pathlet& p = d.pathlets[j];
            if (p.id != static_cast<int>(j)) {
                throw ExpansionMismatch("level " + std::to_string(d.origin.level) + " pathlet ids are not 0..n-1");
            }
            if (p.edges.empty()) throw ExpansionMismatch("pathlet " + std::to_string(p.id) + " is empty");
            if (!p.children.empty()) {
                if (i + 1 == levels.size()) {
                    throw ExpansionMismatch("pathlet " + std::to_string(p.id) + " on the finest level has children");
                }
                const Dictionary& fine = levels[i + 1];
                Sequence cat;
                for (Symbol c : p.children) {
                    if (c < 0 || static_cast<std::size_t>(c) >= fine.size()) {
                        throw ExpansionMismatch("pathlet " + std::to_string(p.id) + " refers to missing child " +
                                                std::to_string(c));
                    }
                    const auto& e = fine.pathlets[static_cast<std::size_t>(c)].edges;
                    cat.insert(cat.end(), e.begin(), e.end());
                }
                if (cat != p.edges) {
                    throw ExpansionMismatch("level " + std::to_string(d.origin.level) + " pathlet " +
                                            std::to_string(p.id) + " differs from the concatenation of its children");
                }
            }
            if (graph) {
                for (Symbol e : p.edges) {
                    if (e < 0 || static_cast<std::size_t>(e) >= graph->num_edges()) {
                        throw ExpansionMismatch("pathlet " + std::to_string(p.id) + " uses unknown edge " +
                                                std::to_string(e));
                    }
                }
                if (auto bad = graph->first_discontinuity(p.edges)) {
                    throw ExpansionMismatch("level " + std::to_string(d.origin.level) + " pathlet " +
                                            std::to_string(p.id) + " breaks at position " + std::to_string(*bad));
                }
            }
            Pathlet q = p;
            q.id = offset[i] + p.id;
            q.level = d.origin.level;
            for (Symbol& c : q.children) c += offset[i + 1];
            out.unified.pathlets.push_back(std::move(q));
        }
    }
    out.unified.origin = levels.back().origin;
    out.levels = std::move(levels);
    return out;
}

bool HierarchyResult::converged() const {
    return std::all_of(levels.begin(), levels.end(), [](const LevelResult& l) { return l.converged(); });
}

HierarchyResult learn_hierarchy(const RoadGraph& graph, std::span<const Trajectory> trajs, int depth, int levels,
                                const LearnConfig& config, std::uint64_t seed) {
    if (depth < 0) throw ConfigError("hierarchy depth must be >= 0");
    if (levels < 1) throw ConfigError("hierarchy levels must be >= 1");
    HierarchyResult out;
    if (depth == 0) {
        if (levels != 1) throw ConfigError("a flat run has exactly one level");
        out.levels.push_back(learn_flat(trajs, graph.num_edges(), config, seed));
    } else {
        out.tree = PartitionTree::build(graph, depth);
        if (levels > out.tree.leaf_level()) {
            throw ConfigError("depth " + std::to_string(depth) + " allows at most " +
                              std::to_string(out.tree.leaf_level()) + " levels");
        }
        out.levels.push_back(learn_level(trajs, out.tree, out.tree.leaf_level(), config, seed));
        while (static_cast<int>(out.levels.size()) < levels) {
            out.levels.push_back(lift_level(trajs, out.levels.back(), config, seed));
        }
    }
    std::vector<Dictionary> dicts;
    for (const auto& l : out.levels) dicts.push_back(l.dictionary);
    out.dictionary = unify(std::move(dicts), &graph);
    return out;
}

// ---- persistence ------------------------------------------------------------

nlohmann::ordered_json dictionary_to_json(const MultiScaleDictionary& dict, const RoadGraph* graph) {
    nlohmann::ordered_json j;
    const DictionaryOrigin& o = dict.unified.origin;
    j["lambda"] = o.lambda;
    j["theta"] = o.theta;
    j["seed"] = o.seed;
    auto& lv = j["levels"] = nlohmann::ordered_json::array();
    for (const auto& d : dict.levels) {
        lv.push_back({{"level", d.origin.level}, {"size", d.size()}});
    }
    auto& arr = j["pathlets"] = nlohmann::ordered_json::array();
    for (const Pathlet& p : dict.unified.pathlets) {
        nlohmann::ordered_json q;
        q["id"] = p.id;
        q["level"] = p.level;
        q["cell"] = p.cell;
        auto& seq = q["edge_seq"] = nlohmann::ordered_json::array();
        for (Symbol e : p.edges) {
            if (graph) {
                seq.push_back(graph->original_id(e));
            } else {
                seq.push_back(e);
            }
        }
        if (!p.children.empty()) q["children_ids"] = p.children;
        q["support"] = p.support;
        arr.push_back(std::move(q));
    }
    return j;
}

MultiScaleDictionary dictionary_from_json(const nlohmann::json& j, const RoadGraph* graph) {
    std::map<int, Dictionary> by_level;
    try {
        DictionaryOrigin origin;
        origin.lambda = j.value("lambda", 0.0);
        origin.theta = j.value("theta", 0.0);
        origin.seed = j.value("seed", std::uint64_t{0});
        std::map<int, int> offset;
        int expected = 0;
        for (const auto& q : j.at("pathlets")) {
            Pathlet p;
            const int id = q.at("id").get<int>();
            if (id != expected++) throw ParseError("pathlet ids must be 0..n-1 in column order");
            p.level = q.value("level", 1);
            p.cell = q.value("cell", 0);
            p.support = q.value("support", 0);
            for (const auto& e : q.at("edge_seq")) {
                const auto raw = e.get<std::int64_t>();
                if (graph) {
                    p.edges.push_back(graph->dense_id(raw));
                } else {
                    if (raw < 0 || raw > std::numeric_limits<Symbol>::max()) {
                        throw ParseError("edge id " + std::to_string(raw) + " out of range");
                    }
                    p.edges.push_back(static_cast<Symbol>(raw));
                }
            }
            if (q.contains("children_ids")) p.children = q.at("children_ids").get<Sequence>();
            if (!offset.count(p.level)) {
                if (!offset.empty() && p.level <= offset.rbegin()->first) {
                    throw ParseError("pathlets must be ordered by ascending level");
                }
                offset[p.level] = id;
            }
            Dictionary& d = by_level[p.level];
            d.origin = origin;
            d.origin.level = p.level;
            p.id = id - offset[p.level];
            d.pathlets.push_back(std::move(p));
        }
        // Children are stored as global ids of the next finer level.
        for (auto& [level, d] : by_level) {
            auto fine = offset.find(level + 1);
            for (Pathlet& p : d.pathlets) {
                if (p.children.empty()) continue;
                if (fine == offset.end()) throw ExpansionMismatch("children on the finest level");
                for (Symbol& c : p.children) c -= fine->second;
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("dictionary JSON: ") + e.what());
    }
    if (by_level.empty()) throw ParseError("dictionary JSON has no pathlets");
    std::vector<Dictionary> levels;
    for (auto& [level, d] : by_level) levels.push_back(std::move(d));
    return unify(std::move(levels), graph);
}

MultiScaleDictionary load_dictionary(const std::string& path, const RoadGraph* graph) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return dictionary_from_json(j, graph);
}

}  // namespace pathlet

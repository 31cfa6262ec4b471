#pragma once

// Multi-scale learning over an axis-aligned partition of the map. Level 1 is
// the whole map; level k has 2^(k-1) cells and a tree of depth d has its
// leaves on level d + 1. Finer levels learn edge pathlets per cell, coarser
// levels learn pathlets whose symbols are pathlets of the level below.

#include "pathlet/learner.hpp"
#include "pathlet/model.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

namespace pathlet {

struct Box {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;
};

class PartitionTree {
public:
    PartitionTree() = default;

    // Splits alternately on x then y at the lower median of the edge
    // midpoints in each cell; edges on the median go to the lower half.
    // Throws MissingGeometry when the graph has no coordinates.
    static PartitionTree build(const RoadGraph& graph, int depth);

    int depth() const noexcept { return depth_; }
    int leaf_level() const noexcept { return depth_ + 1; }
    std::size_t num_edges() const noexcept { return leaf_.size(); }
    int cells_at(int level) const;

    int leaf_of(EdgeId e) const { return leaf_.at(static_cast<std::size_t>(e)); }
    int cell_of(EdgeId e, int level) const;
    const Box& box(int level, int cell) const;
    // Edges whose midpoint falls in the cell.
    std::size_t population(int level, int cell) const;

private:
    int depth_ = 0;
    std::vector<int> leaf_;
    std::vector<std::vector<Box>> boxes_;  // [level - 1][cell]
    std::vector<std::vector<std::size_t>> population_;
};

// A maximal run of one sequence whose symbols share a cell.
struct CellPiece {
    int cell = 0;
    std::size_t source = 0;  // index of the sequence it was cut from
    std::size_t offset = 0;  // position of its first symbol in the source
    Sequence symbols;
};

std::vector<CellPiece> split_by_cell(std::span<const Sequence> seqs, const std::function<int(Symbol)>& cell_of);

struct CellRun {
    int cell = 0;
    std::size_t sequences = 0;
    CellResult result;
};

struct LevelResult {
    int level = 0;
    Dictionary dictionary;  // union over cells, ids 0..n-1 in cell order
    std::vector<CellRun> cells;
    std::size_t duplicates_removed = 0;

    bool converged() const;
};

// Learns one level on edge sequences. Cells run concurrently; cell c of
// level k is seeded with derive_seed(seed, {k, c}).
LevelResult learn_level(std::span<const Trajectory> trajs, const PartitionTree& tree, int level,
                        const LearnConfig& config, std::uint64_t seed);

// Single-cell learning on the whole map, reported as level 1.
LevelResult learn_flat(std::span<const Trajectory> trajs, std::size_t n_edges, const LearnConfig& config,
                       std::uint64_t seed);

// Token sequences of every trajectory over the given dictionary. Throws
// UncoveredInput if some edge cannot be reached by any pathlet.
std::vector<Sequence> tokenize(std::span<const Trajectory> trajs, const Dictionary& finer);

// Learns level finer.level - 1 on the token sequences of the trajectories
// over the finer dictionary.
LevelResult lift_level(std::span<const Trajectory> trajs, const LevelResult& finer, const LearnConfig& config,
                       std::uint64_t seed);

struct MultiScaleDictionary {
    std::vector<Dictionary> levels;  // ascending level, children index the next entry
    Dictionary unified;              // every level's columns, coarse first, global ids

    std::size_t size() const noexcept { return unified.size(); }
    const Dictionary* level(int k) const;
};

// Concatenates the levels into one dictionary. Every expansion must equal
// the concatenation of its children and, with a graph, be a path in it;
// violations throw ExpansionMismatch.
MultiScaleDictionary unify(std::vector<Dictionary> levels, const RoadGraph* graph = nullptr);

struct HierarchyResult {
    PartitionTree tree;
    std::vector<LevelResult> levels;  // finest first, in learning order
    MultiScaleDictionary dictionary;

    bool converged() const;
};

// depth 0 learns a single flat level. Otherwise learns the leaves of a
// depth-d tree and lifts levels - 1 times.
HierarchyResult learn_hierarchy(const RoadGraph& graph, std::span<const Trajectory> trajs, int depth, int levels,
                                const LearnConfig& config, std::uint64_t seed);

// ---- persistence ------------------------------------------------------------

// Pathlets in column order with original edge ids when a graph is given.
nlohmann::ordered_json dictionary_to_json(const MultiScaleDictionary& dict, const RoadGraph* graph);
MultiScaleDictionary dictionary_from_json(const nlohmann::json& j, const RoadGraph* graph);
MultiScaleDictionary load_dictionary(const std::string& path, const RoadGraph* graph);

}  // namespace pathlet

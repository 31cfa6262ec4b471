#pragma once

// Minimum-count concatenation of a sequence from a fixed dictionary. This
// defines the representation cost rc(t, P) and the sparse representation
// vectors used for new trajectories.

#include "pathlet/model.hpp"
#include "pathlet/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace pathlet {

// Result of segmenting one symbol sequence.
struct Segmentation {
    std::vector<int> pieces;               // dictionary positions, in sequence order
    std::vector<std::size_t> uncovered;    // positions not covered by any piece
    bool covered() const noexcept { return uncovered.empty(); }
    int cost() const noexcept { return static_cast<int>(pieces.size()); }
};

// Dictionary indexed by first symbol. Candidates at a position are tried
// longest first, then lexicographically, then by position in the dictionary.
class DictionaryIndex {
public:
    DictionaryIndex() = default;
    explicit DictionaryIndex(std::vector<Sequence> pathlets);
    explicit DictionaryIndex(const Dictionary& dict);

    std::size_t size() const noexcept { return pathlets_.size(); }
    const Sequence& pathlet(int i) const { return pathlets_[static_cast<std::size_t>(i)]; }

    // Exact DP over positions minimising (uncovered symbols, pieces)
    // lexicographically.
    Segmentation segment(std::span<const Symbol> seq) const;

private:
    std::vector<Sequence> pathlets_;
    std::unordered_map<Symbol, std::vector<int>> by_first_;
};

struct Decomposition {
    std::int64_t traj_id = 0;
    int part = 0;
    std::vector<int> pathlet_ids;  // Pathlet::id values
    int cost = 0;
    bool covered = false;
    std::size_t length = 0;  // edges in the trajectory
    std::vector<EdgeId> uncovered_edges;
};

Decomposition decompose(const Trajectory& traj, const Dictionary& dict, const DictionaryIndex& index);
Decomposition decompose(const Trajectory& traj, const Dictionary& dict);

struct RepresentationVector {
    std::int64_t traj_id = 0;
    int part = 0;
    std::vector<int> active_ids;  // sorted column indices of the unified dictionary
    std::vector<EdgeId> uncovered_edges;
};

// Exact minimum-support cover over a unified dictionary.
RepresentationVector encode_new(const Trajectory& traj, const Dictionary& unified, const DictionaryIndex& index);
RepresentationVector encode_new(const Trajectory& traj, const Dictionary& unified);

// Cover by relaxation and rounding instead of the DP: solves
// min sum r s.t. P' r = m over the dictionary pathlets contained in the
// trajectory, rounds with theta and repairs coverage with length-1 pathlets
// when the dictionary has them. Kept for fidelity experiments.
RepresentationVector encode_relaxed(const Trajectory& traj, const Dictionary& unified, const SolverConfig& solver,
                                    double theta, std::uint64_t seed);

struct CoverStats {
    std::size_t trajectories = 0;
    std::size_t covered_trajectories = 0;
    std::size_t edges = 0;            // edge occurrences
    std::size_t uncovered_edges = 0;
    double trajectory_cover = 0.0;
    double edge_cover = 0.0;
    double mean_cost = 0.0;           // over covered trajectories only
};

CoverStats cover_ratio(std::span<const Decomposition> decompositions);
CoverStats cover_ratio(std::span<const Trajectory> trajs, const Dictionary& dict);

// {"traj_id","pathlet_ids","cost","covered"} (+"part" for split pieces).
nlohmann::ordered_json to_json(const Decomposition& d);
nlohmann::ordered_json to_json(const RepresentationVector& v, const RoadGraph* graph = nullptr);

}  // namespace pathlet

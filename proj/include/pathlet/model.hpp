#pragma once

// Domain types shared by every stage of the pipeline: the road graph,
// map-matched trajectories, pathlets and dictionaries, plus their loaders.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pathlet {

// A symbol is an edge id on the finest level and a pathlet id (token) once
// trajectories are re-expressed over a finer dictionary.
using Symbol = std::int32_t;
using Sequence = std::vector<Symbol>;
using EdgeId = Symbol;
using NodeId = std::int64_t;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Edge {
    EdgeId id = 0;
    NodeId from_node = 0;
    NodeId to_node = 0;
    std::vector<Point> geometry;  // empty when the graph has no coordinates
};

class RoadGraph {
public:
    RoadGraph() = default;

    // Validates and densifies the edge list. Input ids may be any unique
    // non-negative integers; they are remapped to [0, n) in ascending order
    // and the original ids are kept for output.
    explicit RoadGraph(std::vector<Edge> edges);

    std::size_t num_edges() const noexcept { return edges_.size(); }
    const Edge& edge(EdgeId id) const;
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    bool has_geometry() const noexcept { return has_geometry_; }
    bool remapped() const noexcept { return remapped_; }

    std::int64_t original_id(EdgeId id) const { return original_ids_.at(static_cast<std::size_t>(id)); }
    // Throws DanglingReference for ids that are not in the graph.
    EdgeId dense_id(std::int64_t original) const;

    bool contiguous(EdgeId a, EdgeId b) const;
    // Position of the first edge that does not continue its predecessor.
    std::optional<std::size_t> first_discontinuity(std::span<const EdgeId> seq) const;

    // Point halfway along the edge polyline by arc length.
    Point midpoint(EdgeId id) const;

private:
    std::vector<Edge> edges_;
    std::vector<std::int64_t> original_ids_;
    bool has_geometry_ = false;
    bool remapped_ = false;
};

struct TimeOfDay {
    int hours = 0;
    int minutes = 0;
};

struct Trajectory {
    std::int64_t traj_id = 0;
    int part = 0;  // > 0 for pieces produced by splitting at an edge revisit
    Sequence edges;
    std::optional<TimeOfDay> departure;
};

struct Pathlet {
    int id = 0;
    Sequence edges;  // full expansion on the road graph
    int level = 0;
    int cell = 0;
    int support = 0;
    Sequence children;  // finer-level pathlet ids; empty on the finest level
};

struct DictionaryOrigin {
    double lambda = 0.0;
    double theta = 0.0;
    std::uint64_t seed = 0;
    int level = 0;
    int cell = 0;
};

struct Dictionary {
    std::vector<Pathlet> pathlets;
    DictionaryOrigin origin;

    std::size_t size() const noexcept { return pathlets.size(); }
    bool empty() const noexcept { return pathlets.empty(); }
};

// Splits a sequence into maximal pieces without a repeated symbol. A piece
// ends right before the first symbol that already occurs in it.
std::vector<Sequence> split_at_revisits(std::span<const Symbol> seq);

std::vector<Sequence> edge_sequences(std::span<const Trajectory> trajs);

// Shortest text that reads back to the same double.
std::string format_double(double v);

// ---- graph CSV: edge_id,from_node,to_node[,x1,y1,x2,y2] -------------------

RoadGraph parse_graph_csv(std::istream& in);
RoadGraph load_graph(const std::string& path);
void write_graph_csv(std::ostream& out, const RoadGraph& graph);

// ---- trajectories JSONL: {"traj_id":int,"edge_seq":[int,...]} --------------

struct TrajectoryLoadStats {
    std::size_t lines = 0;
    std::size_t split_trajectories = 0;  // inputs that revisited an edge
    std::size_t pieces = 0;              // trajectories produced
};

// Edge ids in the file are the graph's original ids.
std::vector<Trajectory> parse_trajectories_jsonl(std::istream& in, const RoadGraph& graph,
                                                 TrajectoryLoadStats* stats = nullptr);
std::vector<Trajectory> load_trajectories(const std::string& path, const RoadGraph& graph,
                                          TrajectoryLoadStats* stats = nullptr);
void write_trajectories_jsonl(std::ostream& out, std::span<const Trajectory> trajs,
                              const RoadGraph& graph);

}  // namespace pathlet

#pragma once

// Desk-scale synthetic corpora: a bidirectional grid road network and
// trajectories that follow one of a few corridors with random lead-in and
// lead-out walks.

#include "pathlet/model.hpp"

#include <cstdint>
#include <vector>

namespace pathlet {

struct SyntheticConfig {
    int grid = 10;            // nodes per side
    double spacing = 100.0;   // meters between neighbouring nodes
    int n_corridors = 3;
    int corridor_len = 8;     // edges per corridor
    int n_trajs = 200;
    int noise = 3;            // max edges of random walk before and after the corridor
    std::uint64_t seed = 1;
    bool departures = true;   // uniform departure time of day per trajectory
    // Node paths used as corridors instead of random ones when non-empty.
    std::vector<std::vector<NodeId>> fixed_corridors;
};

struct SyntheticCorpus {
    RoadGraph graph;
    std::vector<Trajectory> trajs;
    std::vector<Sequence> corridors;  // edge sequences
    std::vector<int> corridor_of;     // corridor index per trajectory
};

// n x n nodes, node id r * n + c at (c * spacing, r * spacing), one edge per
// direction between horizontal and vertical neighbours.
RoadGraph make_grid(int n, double spacing = 100.0);

// Edge from node a to node b in a grid built by make_grid, or -1.
EdgeId grid_edge(const RoadGraph& grid, NodeId a, NodeId b);

SyntheticCorpus generate_synthetic(const SyntheticConfig& config);

}  // namespace pathlet

#pragma once

// Small corpora shared by the unit and acceptance tests.

#include "pathlet/candidates.hpp"
#include "pathlet/model.hpp"
#include "pathlet/random.hpp"
#include "pathlet/synthetic.hpp"

#include <vector>

namespace fixture {

using pathlet::Sequence;

// Up to four runs along a chain of seven symbols, resampled until the
// enumeration with max_len 4 and c_min 2 yields at most ten candidates.
inline std::vector<Sequence> tiny_instance(pathlet::Rng& rng) {
    for (;;) {
        const std::size_t n = 2 + pathlet::uniform_index(rng, 3);
        std::vector<Sequence> seqs;
        for (std::size_t t = 0; t < n; ++t) {
            const auto start = static_cast<int>(pathlet::uniform_index(rng, 4));
            const auto len = 2 + static_cast<int>(pathlet::uniform_index(rng, 3));
            Sequence s;
            for (int i = start; i < start + len && i < 7; ++i) s.push_back(i);
            seqs.push_back(s);
        }
        if (pathlet::enumerate_candidates(seqs, 4, 2).size() <= 10) return seqs;
    }
}

// The corridor corpus used by the hierarchy checks: three corridors that
// cross the vertical median of a 10 x 10 grid.
inline pathlet::SyntheticConfig crossing_corridors(std::uint64_t seed) {
    pathlet::SyntheticConfig cfg;
    cfg.n_trajs = 200;
    cfg.seed = seed;
    cfg.fixed_corridors = {{21, 22, 23, 24, 25, 26, 27, 28, 29},
                           {51, 52, 53, 54, 55, 56, 57, 58},
                           {71, 72, 73, 74, 64, 65, 66, 67, 68}};
    return cfg;
}

// Every trajectory walks its own grid row, so no two share an edge.
inline std::vector<pathlet::Trajectory> disjoint_rows(const pathlet::RoadGraph& grid, int n) {
    std::vector<pathlet::Trajectory> out;
    for (int r = 0; r < n; ++r) {
        pathlet::Trajectory t;
        t.traj_id = r;
        for (int c = 0; c + 1 < n; ++c) {
            t.edges.push_back(pathlet::grid_edge(grid, r * n + c, r * n + c + 1));
        }
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace fixture

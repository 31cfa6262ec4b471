#include "pathlet/synthetic.hpp"

#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pathlet {

RoadGraph make_grid(int n, double spacing) {
    if (n < 2) throw ConfigError("grid needs at least 2 nodes per side");
    std::vector<Edge> edges;
    auto coord = [n, spacing](NodeId v) {
        return Point{static_cast<double>(v % n) * spacing, static_cast<double>(v / n) * spacing};
    };
    auto add = [&](NodeId a, NodeId b) {
        Edge e;
        e.id = static_cast<EdgeId>(edges.size());
        e.from_node = a;
        e.to_node = b;
        e.geometry = {coord(a), coord(b)};
        edges.push_back(std::move(e));
    };
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const NodeId v = static_cast<NodeId>(r) * n + c;
            if (c + 1 < n) {
                add(v, v + 1);
                add(v + 1, v);
            }
            if (r + 1 < n) {
                add(v, v + n);
                add(v + n, v);
            }
        }
    }
    return RoadGraph(std::move(edges));
}

namespace {

struct Adjacency {
    std::map<NodeId, std::vector<EdgeId>> out;
    std::map<NodeId, std::vector<EdgeId>> in;
};

Adjacency adjacency(const RoadGraph& g) {
    Adjacency a;
    for (const Edge& e : g.edges()) {
        a.out[e.from_node].push_back(e.id);
        a.in[e.to_node].push_back(e.id);
    }
    return a;
}

}  // namespace

EdgeId grid_edge(const RoadGraph& grid, NodeId a, NodeId b) {
    for (const Edge& e : grid.edges()) {
        if (e.from_node == a && e.to_node == b) return e.id;
    }
    return -1;
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config) {
    if (config.n_corridors < 1) throw ConfigError("need at least one corridor");
    if (config.n_trajs < 0 || config.noise < 0) throw ConfigError("n_trajs and noise must be >= 0");
    if (config.corridor_len < 1) throw ConfigError("corridor length must be >= 1");

    SyntheticCorpus corpus;
    corpus.graph = make_grid(config.grid, config.spacing);
    const RoadGraph& g = corpus.graph;
    const Adjacency adj = adjacency(g);
    Rng rng(derive_seed(config.seed, {0x5e11u}));
    Rng clock(derive_seed(config.seed, {0xc10cu}));

    if (!config.fixed_corridors.empty()) {
        for (const auto& nodes : config.fixed_corridors) {
            Sequence seq;
            for (std::size_t i = 1; i < nodes.size(); ++i) {
                const EdgeId e = grid_edge(g, nodes[i - 1], nodes[i]);
                if (e < 0) throw ConfigError("fixed corridor uses a non-adjacent node pair");
                seq.push_back(e);
            }
            corpus.corridors.push_back(std::move(seq));
        }
    } else {
        const auto n_nodes = static_cast<std::uint64_t>(config.grid) * static_cast<std::uint64_t>(config.grid);
        while (static_cast<int>(corpus.corridors.size()) < config.n_corridors) {
            // Self-avoiding random walk; restart when it gets stuck.
            NodeId v = static_cast<NodeId>(uniform_index(rng, n_nodes));
            std::set<NodeId> seen{v};
            Sequence seq;
            while (static_cast<int>(seq.size()) < config.corridor_len) {
                std::vector<EdgeId> options;
                for (EdgeId e : adj.out.at(v)) {
                    if (!seen.count(g.edge(e).to_node)) options.push_back(e);
                }
                if (options.empty()) break;
                const EdgeId e = options[uniform_index(rng, options.size())];
                seq.push_back(e);
                v = g.edge(e).to_node;
                seen.insert(v);
            }
            if (static_cast<int>(seq.size()) == config.corridor_len &&
                std::find(corpus.corridors.begin(), corpus.corridors.end(), seq) == corpus.corridors.end()) {
                corpus.corridors.push_back(std::move(seq));
            }
        }
    }

    for (int i = 0; i < config.n_trajs; ++i) {
        const int k = static_cast<int>(uniform_index(rng, corpus.corridors.size()));
        const Sequence& corridor = corpus.corridors[static_cast<std::size_t>(k)];
        std::set<NodeId> seen;
        seen.insert(g.edge(corridor.front()).from_node);
        for (EdgeId e : corridor) seen.insert(g.edge(e).to_node);

        const int prefix_len = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(config.noise) + 1));
        const int suffix_len = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(config.noise) + 1));

        Sequence prefix;
        NodeId head = g.edge(corridor.front()).from_node;
        for (int s = 0; s < prefix_len; ++s) {
            std::vector<EdgeId> options;
            for (EdgeId e : adj.in.at(head)) {
                if (!seen.count(g.edge(e).from_node)) options.push_back(e);
            }
            if (options.empty()) break;
            const EdgeId e = options[uniform_index(rng, options.size())];
            prefix.push_back(e);
            head = g.edge(e).from_node;
            seen.insert(head);
        }
        std::reverse(prefix.begin(), prefix.end());

        Sequence suffix;
        NodeId tail = g.edge(corridor.back()).to_node;
        for (int s = 0; s < suffix_len; ++s) {
            std::vector<EdgeId> options;
            for (EdgeId e : adj.out.at(tail)) {
                if (!seen.count(g.edge(e).to_node)) options.push_back(e);
            }
            if (options.empty()) break;
            const EdgeId e = options[uniform_index(rng, options.size())];
            suffix.push_back(e);
            tail = g.edge(e).to_node;
            seen.insert(tail);
        }

        Trajectory t;
        t.traj_id = i;
        t.edges = prefix;
        t.edges.insert(t.edges.end(), corridor.begin(), corridor.end());
        t.edges.insert(t.edges.end(), suffix.begin(), suffix.end());
        if (config.departures) {
            const auto minute = static_cast<int>(uniform_index(clock, 1440));
            t.departure = TimeOfDay{minute / 60, minute % 60};
        }
        corpus.trajs.push_back(std::move(t));
        corpus.corridor_of.push_back(k);
    }
    return corpus;
}

}  // namespace pathlet

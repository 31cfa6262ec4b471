#include "pathlet/decomposer.hpp"

#include "pathlet/candidates.hpp"
#include "pathlet/errors.hpp"
#include "pathlet/rounding.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>

namespace pathlet {

DictionaryIndex::DictionaryIndex(std::vector<Sequence> pathlets) : pathlets_(std::move(pathlets)) {
    for (std::size_t i = 0; i < pathlets_.size(); ++i) {
        if (pathlets_[i].empty()) continue;
        by_first_[pathlets_[i].front()].push_back(static_cast<int>(i));
    }
    for (auto& [first, ids] : by_first_) {
        std::sort(ids.begin(), ids.end(), [this](int a, int b) {
            const auto& pa = pathlets_[static_cast<std::size_t>(a)];
            const auto& pb = pathlets_[static_cast<std::size_t>(b)];
            if (pa.size() != pb.size()) return pa.size() > pb.size();
            if (pa != pb) return pa < pb;
            return a < b;
        });
    }
}

DictionaryIndex::DictionaryIndex(const Dictionary& dict)
    : DictionaryIndex([&dict] {
          std::vector<Sequence> seqs;
          seqs.reserve(dict.size());
          for (const auto& p : dict.pathlets) seqs.push_back(p.edges);
          return seqs;
      }()) {}

namespace {

struct Score {
    std::size_t uncovered = 0;
    std::size_t pieces = 0;
    friend bool operator==(const Score&, const Score&) = default;
    friend bool operator<(const Score& a, const Score& b) {
        return a.uncovered != b.uncovered ? a.uncovered < b.uncovered : a.pieces < b.pieces;
    }
};

bool matches_at(std::span<const Symbol> seq, std::size_t i, const Sequence& p) {
    if (i + p.size() > seq.size()) return false;
    return std::equal(p.begin(), p.end(), seq.begin() + static_cast<long>(i));
}

}  // namespace

Segmentation DictionaryIndex::segment(std::span<const Symbol> seq) const {
    const std::size_t n = seq.size();
    std::vector<Score> best(n + 1);
    static const std::vector<int> kNone;
    auto options = [this](Symbol s) -> const std::vector<int>& {
        auto it = by_first_.find(s);
        return it == by_first_.end() ? kNone : it->second;
    };

    for (std::size_t i = n; i-- > 0;) {
        Score b{best[i + 1].uncovered + 1, best[i + 1].pieces};
        for (int id : options(seq[i])) {
            const auto& p = pathlet(id);
            if (!matches_at(seq, i, p)) continue;
            Score c{best[i + p.size()].uncovered, best[i + p.size()].pieces + 1};
            if (c < b) b = c;
        }
        best[i] = b;
    }

    Segmentation out;
    std::size_t i = 0;
    while (i < n) {
        bool advanced = false;
        for (int id : options(seq[i])) {
            const auto& p = pathlet(id);
            if (!matches_at(seq, i, p)) continue;
            Score c{best[i + p.size()].uncovered, best[i + p.size()].pieces + 1};
            if (c == best[i]) {
                out.pieces.push_back(id);
                i += p.size();
                advanced = true;
                break;
            }
        }
        if (!advanced) {
            out.uncovered.push_back(i);
            ++i;
        }
    }
    // Reassemble the covered stretches and compare with the input.
    {
        Sequence rebuilt;
        rebuilt.reserve(n);
        std::size_t pos = 0;
        std::size_t piece = 0;
        std::size_t gap = 0;
        while (pos < n && piece <= out.pieces.size()) {
            if (gap < out.uncovered.size() && out.uncovered[gap] == pos) {
                rebuilt.push_back(seq[pos]);
                ++pos;
                ++gap;
                continue;
            }
            if (piece == out.pieces.size()) break;
            const auto& p = pathlet(out.pieces[piece++]);
            rebuilt.insert(rebuilt.end(), p.begin(), p.end());
            pos += p.size();
        }
        if (piece != out.pieces.size() || !std::equal(rebuilt.begin(), rebuilt.end(), seq.begin(), seq.end())) {
            throw std::logic_error("segmentation does not reproduce its input");
        }
    }
    return out;
}

Decomposition decompose(const Trajectory& traj, const Dictionary& dict, const DictionaryIndex& index) {
    const Segmentation seg = index.segment(traj.edges);
    Decomposition d;
    d.traj_id = traj.traj_id;
    d.part = traj.part;
    d.covered = seg.covered();
    d.cost = seg.cost();
    d.length = traj.edges.size();
    d.pathlet_ids.reserve(seg.pieces.size());
    for (int i : seg.pieces) d.pathlet_ids.push_back(dict.pathlets[static_cast<std::size_t>(i)].id);
    for (std::size_t pos : seg.uncovered) d.uncovered_edges.push_back(traj.edges[pos]);
    return d;
}

Decomposition decompose(const Trajectory& traj, const Dictionary& dict) {
    return decompose(traj, dict, DictionaryIndex(dict));
}

RepresentationVector encode_new(const Trajectory& traj, const Dictionary& unified, const DictionaryIndex& index) {
    const Segmentation seg = index.segment(traj.edges);
    RepresentationVector v;
    v.traj_id = traj.traj_id;
    v.part = traj.part;
    for (int i : seg.pieces) v.active_ids.push_back(unified.pathlets[static_cast<std::size_t>(i)].id);
    std::sort(v.active_ids.begin(), v.active_ids.end());
    v.active_ids.erase(std::unique(v.active_ids.begin(), v.active_ids.end()), v.active_ids.end());
    for (std::size_t pos : seg.uncovered) v.uncovered_edges.push_back(traj.edges[pos]);
    return v;
}

RepresentationVector encode_new(const Trajectory& traj, const Dictionary& unified) {
    return encode_new(traj, unified, DictionaryIndex(unified));
}

RepresentationVector encode_relaxed(const Trajectory& traj, const Dictionary& unified, const SolverConfig& solver,
                                    double theta, std::uint64_t seed) {
    RepresentationVector v;
    v.traj_id = traj.traj_id;
    v.part = traj.part;

    // Local symbol space: positions of the trajectory's edges.
    std::vector<std::pair<Symbol, int>> local;
    for (std::size_t i = 0; i < traj.edges.size(); ++i) local.emplace_back(traj.edges[i], static_cast<int>(i));
    std::sort(local.begin(), local.end());
    auto local_of = [&local](Symbol e) -> int {
        auto it = std::lower_bound(local.begin(), local.end(), std::make_pair(e, -1));
        return (it != local.end() && it->first == e) ? it->second : -1;
    };

    std::vector<int> columns;  // dictionary positions usable for this trajectory
    std::vector<std::pair<int, int>> d_entries;
    for (std::size_t i = 0; i < unified.size(); ++i) {
        const auto& p = unified.pathlets[i].edges;
        std::vector<int> rows;
        bool inside = !p.empty();
        for (Symbol e : p) {
            const int r = local_of(e);
            if (r < 0) {
                inside = false;
                break;
            }
            rows.push_back(r);
        }
        if (!inside) continue;
        for (int r : rows) d_entries.emplace_back(r, static_cast<int>(columns.size()));
        columns.push_back(static_cast<int>(i));
    }
    const std::size_t n = traj.edges.size();
    std::vector<std::pair<int, int>> m_entries;
    for (std::size_t i = 0; i < n; ++i) m_entries.emplace_back(static_cast<int>(i), 0);
    SparseBinaryMatrix M(n, 1, std::move(m_entries));
    SparseBinaryMatrix D(n, columns.size(), std::move(d_entries));

    const FractionalSolution frac = solve_relaxed(M, D, solver);
    SparseBinaryMatrix r = randomized_round(frac.R, theta, seed);
    try {
        r = repair_coverage(r, M, D);
    } catch (const InfeasibleSolution&) {
        // Edges without a length-1 pathlet stay uncovered and are reported below.
    }
    std::vector<char> hit(n, 0);
    for (int c : r.col(0)) {
        v.active_ids.push_back(unified.pathlets[static_cast<std::size_t>(columns[static_cast<std::size_t>(c)])].id);
        for (int e : D.col(static_cast<std::size_t>(c))) hit[static_cast<std::size_t>(e)] = 1;
    }
    std::sort(v.active_ids.begin(), v.active_ids.end());
    for (std::size_t i = 0; i < n; ++i) {
        if (!hit[i]) v.uncovered_edges.push_back(traj.edges[i]);
    }
    return v;
}

CoverStats cover_ratio(std::span<const Decomposition> decompositions) {
    CoverStats s;
    s.trajectories = decompositions.size();
    double cost_sum = 0.0;
    for (const auto& d : decompositions) {
        s.edges += d.length;
        s.uncovered_edges += d.uncovered_edges.size();
        if (d.covered) {
            ++s.covered_trajectories;
            cost_sum += d.cost;
        }
    }
    s.trajectory_cover = s.trajectories
                             ? static_cast<double>(s.covered_trajectories) / static_cast<double>(s.trajectories)
                             : 1.0;
    s.edge_cover = s.edges ? 1.0 - static_cast<double>(s.uncovered_edges) / static_cast<double>(s.edges) : 1.0;
    s.mean_cost = s.covered_trajectories ? cost_sum / static_cast<double>(s.covered_trajectories) : 0.0;
    return s;
}

CoverStats cover_ratio(std::span<const Trajectory> trajs, const Dictionary& dict) {
    const DictionaryIndex index(dict);
    std::vector<Decomposition> ds;
    ds.reserve(trajs.size());
    for (const auto& t : trajs) ds.push_back(decompose(t, dict, index));
    return cover_ratio(ds);
}

nlohmann::ordered_json to_json(const Decomposition& d) {
    nlohmann::ordered_json j;
    j["traj_id"] = d.traj_id;
    if (d.part != 0) j["part"] = d.part;
    j["pathlet_ids"] = d.pathlet_ids;
    j["cost"] = d.cost;
    j["covered"] = d.covered;
    return j;
}

nlohmann::ordered_json to_json(const RepresentationVector& v, const RoadGraph* graph) {
    nlohmann::ordered_json j;
    j["traj_id"] = v.traj_id;
    if (v.part != 0) j["part"] = v.part;
    j["active_ids"] = v.active_ids;
    auto& unc = j["uncovered_edges"] = nlohmann::ordered_json::array();
    for (EdgeId e : v.uncovered_edges) {
        if (graph) {
            unc.push_back(graph->original_id(e));
        } else {
            unc.push_back(e);
        }
    }
    return j;
}

}  // namespace pathlet

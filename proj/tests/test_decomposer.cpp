#include "oracles.hpp"

#include "pathlet/decomposer.hpp"
#include "pathlet/random.hpp"

#include <doctest.h>

using namespace pathlet;

namespace {

Dictionary make_dict(std::vector<Sequence> seqs) {
    Dictionary d;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        Pathlet p;
        p.id = static_cast<int>(i);
        p.edges = std::move(seqs[i]);
        d.pathlets.push_back(std::move(p));
    }
    return d;
}

Trajectory traj(Sequence edges, std::int64_t id = 0) {
    Trajectory t;
    t.traj_id = id;
    t.edges = std::move(edges);
    return t;
}

}  // namespace

TEST_SUITE("decomposer") {

TEST_CASE("whole-trajectory pathlet costs one") {
    const auto d = decompose(traj({0, 1, 2}), make_dict({{0, 1, 2}}));
    CHECK(d.covered);
    CHECK(d.cost == 1);
    CHECK(d.pathlet_ids == std::vector<int>{0});
}

TEST_CASE("two pieces beat three") {
    const auto dict = make_dict({{0}, {1}, {2}, {0, 1}});
    const auto d = decompose(traj({0, 1, 2}), dict);
    CHECK(d.cost == 2);
    CHECK(d.pathlet_ids == std::vector<int>{3, 2});
    CHECK(oracle::exhaustive_segmentation({0, 1, 2}, {{0}, {1}, {2}, {0, 1}}).pieces == 2);
}

TEST_CASE("missing prefix leaves a partial cover") {
    const auto d = decompose(traj({0, 1}), make_dict({{1}}));
    CHECK_FALSE(d.covered);
    CHECK(d.uncovered_edges == std::vector<EdgeId>{0});
    CHECK(d.pathlet_ids == std::vector<int>{0});
}

TEST_CASE("ties prefer the longest first piece") {
    const DictionaryIndex index(std::vector<Sequence>{{2}, {0}, {1, 2}, {0, 1}});
    const auto seg = index.segment(Sequence{0, 1, 2});
    CHECK(seg.cost() == 2);
    CHECK(seg.pieces == std::vector<int>{3, 0});
}

TEST_CASE("pathlet ids come from the dictionary, not positions") {
    Dictionary dict = make_dict({{5, 6}, {7}});
    dict.pathlets[0].id = 40;
    dict.pathlets[1].id = 41;
    CHECK(decompose(traj({5, 6, 7}), dict).pathlet_ids == std::vector<int>{40, 41});
}

TEST_CASE("DP agrees with exhaustive enumeration") {
    Rng rng(2024);
    int mismatches = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const std::size_t len = 1 + uniform_index(rng, 10);
        Sequence seq;
        for (std::size_t i = 0; i < len; ++i) seq.push_back(static_cast<Symbol>(uniform_index(rng, 4)));
        std::vector<Sequence> dict;
        const std::size_t n_dict = uniform_index(rng, 13);
        for (std::size_t k = 0; k < n_dict; ++k) {
            const std::size_t a = uniform_index(rng, len);
            const std::size_t b = std::min(len, a + 1 + uniform_index(rng, 4));
            Sequence p(seq.begin() + static_cast<long>(a), seq.begin() + static_cast<long>(b));
            if (uniform_index(rng, 4) == 0) p.back() = static_cast<Symbol>(uniform_index(rng, 4));
            dict.push_back(p);
        }
        const auto seg = DictionaryIndex(dict).segment(seq);
        const auto want = oracle::exhaustive_segmentation(seq, dict);
        if (seg.uncovered.size() != want.uncovered || seg.cost() != want.pieces) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("representation vector of a single super-pathlet") {
    Dictionary unified = make_dict({{0}, {1}, {2}, {0, 1, 2}});
    const auto v = encode_new(traj({0, 1, 2}, 9), unified);
    CHECK(v.traj_id == 9);
    CHECK(v.active_ids == std::vector<int>{3});
    CHECK(v.uncovered_edges.empty());
}

TEST_CASE("empty dictionary leaves every edge uncovered") {
    const auto v = encode_new(traj({4, 5}), Dictionary{});
    CHECK(v.active_ids.empty());
    CHECK(v.uncovered_edges == std::vector<EdgeId>{4, 5});
}

TEST_CASE("unseen edge is listed and the rest encoded") {
    const auto v = encode_new(traj({0, 1, 8}), make_dict({{0, 1}}));
    CHECK(v.active_ids == std::vector<int>{0});
    CHECK(v.uncovered_edges == std::vector<EdgeId>{8});
    const auto j = to_json(v);
    CHECK(j["uncovered_edges"] == nlohmann::json::array({8}));
}

TEST_CASE("relaxed encoding covers with singletons available") {
    const Dictionary dict = make_dict({{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 1, 2}});
    const auto v = encode_relaxed(traj({0, 1, 2}), dict, SolverConfig{}, 2.0, 3);
    CHECK(v.uncovered_edges.empty());
    CHECK_FALSE(v.active_ids.empty());
    CHECK(std::is_sorted(v.active_ids.begin(), v.active_ids.end()));
}

TEST_CASE("cover ratios at the extremes") {
    const std::vector<Trajectory> trajs{traj({0, 1}), traj({1, 2, 3})};
    const auto full = cover_ratio(trajs, make_dict({{0}, {1}, {2}, {3}}));
    CHECK(full.trajectory_cover == 1.0);
    CHECK(full.edge_cover == 1.0);
    CHECK(full.mean_cost == doctest::Approx(2.5));
    const auto none = cover_ratio(trajs, Dictionary{});
    CHECK(none.trajectory_cover == 0.0);
    CHECK(none.edge_cover == 0.0);
    const auto partial = cover_ratio(trajs, make_dict({{0, 1}}));
    CHECK(partial.covered_trajectories == 1);
    CHECK(partial.uncovered_edges == 3);
    CHECK(partial.edge_cover == doctest::Approx(0.4));
    CHECK(cover_ratio(std::span<const Trajectory>{}, Dictionary{}).trajectory_cover == 1.0);
}

TEST_CASE("decomposition JSON") {
    Trajectory t = traj({0, 1}, 3);
    t.part = 2;
    const auto j = to_json(decompose(t, make_dict({{0, 1}})));
    CHECK(j["traj_id"] == 3);
    CHECK(j["part"] == 2);
    CHECK(j["cost"] == 1);
    CHECK(j["covered"] == true);
}

}  // TEST_SUITE

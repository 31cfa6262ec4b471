#include "oracles.hpp"

#include "pathlet/candidates.hpp"
#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"
#include "pathlet/solver.hpp"

#include <doctest.h>

#include <memory>

using namespace pathlet;

namespace {

DecisionMatrix dense_matrix(std::size_t rows, std::size_t cols) {
    return DecisionMatrix(std::make_shared<DecisionPattern>(DecisionPattern::dense(rows, cols)));
}

SparseBinaryMatrix random_binary(std::size_t rows, std::size_t cols, double p, Rng& rng) {
    std::vector<std::pair<int, int>> e;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (uniform01(rng) < p) e.emplace_back(static_cast<int>(r), static_cast<int>(c));
        }
    }
    return SparseBinaryMatrix(rows, cols, std::move(e));
}

struct TwoEdgeInstance {
    std::vector<Sequence> seqs{{0, 1}};
    CandidateSet cands = enumerate_candidates(seqs, 2, 1);
    IncidenceMatrices mats = build_matrices(seqs, cands, 2);
};

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("objective of the zero matrix") {
    CHECK(true_objective(dense_matrix(3, 4), 0.1) == 0.0);
}

TEST_CASE("objective of a 2x2 identity") {
    DecisionMatrix R = dense_matrix(2, 2);
    R.set(0, 0, 1.0);
    R.set(1, 1, 1.0);
    CHECK(true_objective(R, 0.1) == doctest::Approx(2.2).epsilon(1e-12));
    const SparseBinaryMatrix B(2, 2, {{0, 0}, {1, 1}});
    CHECK(true_objective(B, 0.1) == doctest::Approx(2.2).epsilon(1e-12));
}

TEST_CASE("objective matches a dense re-evaluation") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        DecisionMatrix R = dense_matrix(5, 5);
        std::vector<std::vector<double>> copy(5, std::vector<double>(5));
        for (std::size_t r = 0; r < 5; ++r) {
            for (std::size_t c = 0; c < 5; ++c) {
                copy[r][c] = uniform01(rng);
                R.set(r, c, copy[r][c]);
            }
        }
        CHECK(true_objective(R, 0.3) == doctest::Approx(oracle::dense_objective(copy, 0.3)).epsilon(1e-12));
    }
}

TEST_CASE("pinned entries read as zero and refuse writes") {
    auto pattern = std::make_shared<DecisionPattern>(DecisionPattern::from_pairs(2, 2, {{0, 1}, {1, 0}}));
    DecisionMatrix R(pattern);
    CHECK(pattern->find(0, 0) == -1);
    CHECK(pattern->find(0, 1) == 0);
    CHECK(R.at(0, 0) == 0.0);
    R.set(0, 1, 0.5);
    CHECK(R.row_max(0) == 0.5);
    CHECK_THROWS(R.set(0, 0, 0.5));
    CHECK_THROWS(DecisionPattern::from_pairs(2, 2, {{0, 1}, {0, 1}}));
}

TEST_CASE("surrogate at zero with nothing to cover") {
    const SparseBinaryMatrix M(2, 3, {});
    const SparseBinaryMatrix D(2, 4, {});
    const DecisionMatrix R = dense_matrix(4, 3);
    Smoothing sm;
    const auto v = surrogate_objective_and_gradient(R, M, D, 0.1, 1.0, sm);
    // Every row of zeros contributes temperature * log(cols).
    CHECK(v.smooth_max == doctest::Approx(4 * sm.temperature * std::log(3.0)));
    CHECK(v.penalty == 0.0);
    CHECK(v.linear == 0.0);
    for (double g : v.gradient) CHECK(g == doctest::Approx(1.0 / 3.0 + 0.1));
}

TEST_CASE("surrogate gradient matches central differences") {
    Rng rng(42);
    for (Smoothing::Kind kind : {Smoothing::Kind::LogSumExp, Smoothing::Kind::PNorm}) {
        const SparseBinaryMatrix M = random_binary(10, 8, 0.4, rng);
        const SparseBinaryMatrix D = random_binary(10, 15, 0.3, rng);
        DecisionMatrix R = dense_matrix(15, 8);
        for (double& v : R.values) v = 0.05 + 0.9 * uniform01(rng);
        Smoothing sm;
        sm.kind = kind;
        const auto analytic = surrogate_objective_and_gradient(R, M, D, 0.1, 3.0, sm).gradient;
        auto f = [&](const std::vector<double>& x) {
            DecisionMatrix Rx = R;
            Rx.values = x;
            return surrogate_objective_and_gradient(Rx, M, D, 0.1, 3.0, sm).value;
        };
        const auto numeric = oracle::central_differences(f, R.values, 1e-5);
        double err = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            err = std::max(err, std::abs(analytic[k] - numeric[k]));
            scale = std::max(scale, std::abs(numeric[k]));
        }
        CHECK(err / scale <= 1e-4);
    }
}

TEST_CASE("shape mismatch is reported") {
    const SparseBinaryMatrix M(2, 1, {{0, 0}});
    const SparseBinaryMatrix D(3, 2, {});
    CHECK_THROWS_AS(constraint_residual(dense_matrix(2, 1), M, D), ShapeMismatch);
}

TEST_CASE("two-edge trajectory concentrates on the long candidate") {
    TwoEdgeInstance inst;
    SolverConfig cfg;
    const auto sol = solve_relaxed(inst.mats.M, inst.mats.D, cfg);
    CHECK(sol.converged);
    const int whole = *inst.cands.find(Sequence{0, 1});
    CHECK(sol.R.at(static_cast<std::size_t>(whole), 0) > 0.9);
    CHECK(true_objective(sol.R, cfg.lambda) <= 1.1 + 1e-2);
    const auto opt = oracle::exhaustive_binary_optimum(inst.seqs, inst.cands.pathlets, cfg.lambda);
    REQUIRE(opt.has_value());
    CHECK(*opt == doctest::Approx(1.1));
    CHECK(sol.max_residual < cfg.feasibility_tol);
    CHECK(!sol.trace.empty());
    CHECK(sol.smoothing_gap <= sol.smoothing_gap_bound + 1e-9);
}

TEST_CASE("no trajectories gives the zero solution") {
    const SparseBinaryMatrix M(2, 0, {});
    const SparseBinaryMatrix D(2, 3, {{0, 0}, {1, 1}, {0, 2}, {1, 2}});
    const auto sol = solve_relaxed(M, D, SolverConfig{});
    CHECK(true_objective(sol.R, 0.1) == 0.0);
    CHECK(sol.converged);
}

TEST_CASE("relaxed optimum never exceeds the binary optimum") {
    Rng rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Sequence> seqs;
        for (int t = 0; t < 3; ++t) {
            const int start = static_cast<int>(uniform_index(rng, 3));
            const int len = 2 + static_cast<int>(uniform_index(rng, 3));
            Sequence s;
            for (int i = 0; i < len; ++i) s.push_back(start + i);
            seqs.push_back(s);
        }
        const CandidateSet c = enumerate_candidates(seqs, 3, 2);
        if (c.size() > 14) continue;
        const auto mats = build_matrices(seqs, c, 8);
        const auto pairs = containment_pairs(seqs, c);
        auto pattern = std::make_shared<DecisionPattern>(DecisionPattern::from_pairs(c.size(), seqs.size(), pairs));
        SolverConfig cfg;
        const auto sol = solve_relaxed(mats.M, mats.D, pattern, cfg);
        const auto opt = oracle::exhaustive_binary_optimum(seqs, c.pathlets, cfg.lambda);
        REQUIRE(opt.has_value());
        CHECK(true_objective(sol.R, cfg.lambda) <= *opt + 0.05);
    }
}

TEST_CASE("invalid solver settings") {
    SolverConfig cfg;
    cfg.lambda = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.mu_growth = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.smoothing.kind = Smoothing::Kind::PNorm;
    cfg.smoothing.p = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("baseline prefers the whole trajectory") {
    TwoEdgeInstance inst;
    const auto b = baseline_per_trajectory(inst.seqs, inst.cands, 0.1);
    REQUIRE(b.assignments[0].size() == 1);
    CHECK(inst.cands.pathlets[static_cast<std::size_t>(b.assignments[0][0])] == Sequence{0, 1});
    CHECK(b.objective == doctest::Approx(1.1));
}

TEST_CASE("baseline with a dominant lambda minimises piece count") {
    CandidateSet c;
    c.pathlets = {{0}, {1}, {2}, {0, 1, 2}};
    c.support = {50, 50, 50, 1};
    c.reindex();
    const std::vector<Sequence> seqs{{0, 1, 2}};
    CHECK(baseline_per_trajectory(seqs, c, 0.01).assignments[0].size() == 3);
    CHECK(baseline_per_trajectory(seqs, c, 1e6).assignments[0].size() == 1);
}

TEST_CASE("baseline ties go to the lexicographically smaller split") {
    const std::vector<Sequence> seqs{{0, 1, 2}};
    CandidateSet c;
    c.pathlets = {{0}, {1}, {2}, {0, 1}, {1, 2}};
    c.support = {1, 1, 1, 1, 1};
    c.reindex();
    const auto b = baseline_per_trajectory(seqs, c, 0.1);
    CHECK(b.assignments[0] == std::vector<int>{0, 4});
    c.pathlets = {{0}, {1}};
    c.support = {1, 1};
    c.reindex();
    CHECK_THROWS_AS(baseline_per_trajectory(seqs, c, 0.1), UncoveredInput);
}

}  // TEST_SUITE

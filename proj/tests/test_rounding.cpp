#include "oracles.hpp"

#include "pathlet/candidates.hpp"
#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"
#include "pathlet/rounding.hpp"

#include <doctest.h>

#include <memory>

using namespace pathlet;

namespace {

DecisionMatrix dense_matrix(std::size_t rows, std::size_t cols) {
    return DecisionMatrix(std::make_shared<DecisionPattern>(DecisionPattern::dense(rows, cols)));
}

// Chain trajectories [0,1] and [1,2] with every subpath as a candidate.
struct ChainInstance {
    std::vector<Sequence> seqs{{0, 1}, {1, 2}};
    CandidateSet cands = enumerate_candidates(seqs, 2, 1);
    IncidenceMatrices mats = build_matrices(seqs, cands, 3);
};

}  // namespace

TEST_SUITE("rounding") {

TEST_CASE("theta settings") {
    CHECK(experimental_theta(8) == doctest::Approx(0.25 * std::log(16.0)));
    CHECK(theory_theta(8) == doctest::Approx(std::log(16.0)));
    CHECK(theta_regime(theory_theta(8), 8) == "ln2T");
    CHECK(theta_regime(experimental_theta(8), 8) == "quarter_ln2T");
    CHECK(theta_regime(3.0, 8) == "explicit");
    CHECK(good_cost_threshold(2.0, 0.1, 1.5) == doctest::Approx(2 * 2.0 * 11.0 * 1.5));
}

TEST_CASE("zero marginals never fire and clipped ones always do") {
    DecisionMatrix R = dense_matrix(3, 3);
    R.set(0, 0, 0.5);
    R.set(1, 1, 0.25);
    R.set(2, 2, 1.0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto B = randomized_round(R, 4.0, s);
        CHECK(B.contains(0, 0));
        CHECK(B.contains(1, 1));
        CHECK(B.contains(2, 2));
        CHECK(B.nnz() == 3);
    }
    CHECK_THROWS_AS(randomized_round(R, 0.0, 1), ConfigError);
}

TEST_CASE("sampling is reproducible per seed") {
    DecisionMatrix R = dense_matrix(4, 4);
    for (double& v : R.values) v = 0.3;
    const auto a = randomized_round(R, 1.0, 77);
    const auto b = randomized_round(R, 1.0, 77);
    CHECK(a.nnz() == b.nnz());
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) CHECK(a.contains(r, c) == b.contains(r, c));
    }
}

TEST_CASE("entry frequencies follow the clipped marginals") {
    Rng rng(3);
    DecisionMatrix R = dense_matrix(5, 4);
    for (double& v : R.values) v = uniform01(rng);
    const double theta = 1.5;
    const std::size_t n = 4000;
    std::vector<std::size_t> hits(R.values.size(), 0);
    for (std::size_t s = 0; s < n; ++s) {
        const auto B = randomized_round(R, theta, derive_seed(1, {s}));
        for (std::size_t k = 0; k < R.values.size(); ++k) {
            hits[k] += B.contains(static_cast<std::size_t>(R.pattern->entry_row(k)),
                                  static_cast<std::size_t>(R.pattern->entry_col(k)));
        }
    }
    std::size_t inside = 0;
    for (std::size_t k = 0; k < hits.size(); ++k) {
        const double p = std::min(1.0, theta * R.values[k]);
        inside += oracle::within_three_sigma(static_cast<double>(hits[k]) / n, p, n);
    }
    CHECK(inside >= 19);
}

TEST_CASE("binary feasible input is returned on the first attempt") {
    ChainInstance inst;
    auto pattern = std::make_shared<DecisionPattern>(
        DecisionPattern::from_pairs(inst.cands.size(), 2, containment_pairs(inst.seqs, inst.cands)));
    DecisionMatrix R(pattern);
    const auto a = static_cast<std::size_t>(*inst.cands.find(Sequence{0, 1}));
    const auto b = static_cast<std::size_t>(*inst.cands.find(Sequence{1, 2}));
    R.set(a, 0, 1.0);
    R.set(b, 1, 1.0);
    const auto sol = round_until_good(R, inst.mats.M, inst.mats.D, 1.0, 0.1, 3, 5);
    CHECK(sol.attempts_used == 1);
    CHECK(sol.feasible);
    CHECK_FALSE(sol.repaired);
    CHECK(sol.R.nnz() == 2);
    CHECK(sol.R.contains(a, 0));
    CHECK(sol.R.contains(b, 1));
    CHECK(sol.cost == doctest::Approx(2.2));
}

TEST_CASE("all-zero relaxation is repaired with length-1 pathlets") {
    ChainInstance inst;
    const DecisionMatrix R = dense_matrix(inst.cands.size(), 2);
    const auto sol = round_until_good(R, inst.mats.M, inst.mats.D, 1.0, 0.1, 3, 5);
    CHECK(sol.repaired);
    CHECK(sol.feasible);
    CHECK(sol.repaired_entries == 4);
    CHECK(covers(sol.R, inst.mats.M, inst.mats.D));
    for (std::size_t r = 0; r < sol.R.rows(); ++r) {
        if (!sol.R.row(r).empty()) CHECK(inst.cands.pathlets[r].size() == 1);
    }
}

TEST_CASE("repair fails without a length-1 candidate") {
    const SparseBinaryMatrix M(2, 1, {{0, 0}, {1, 0}});
    const SparseBinaryMatrix D(2, 1, {{0, 0}, {1, 0}});
    const SparseBinaryMatrix R(1, 1, {});
    CHECK_THROWS_AS(repair_coverage(R, M, D), InfeasibleSolution);
}

TEST_CASE("dictionary holds the used rows only") {
    CandidateSet c;
    c.pathlets = {{0}, {1}, {2}};
    c.support = {4, 5, 6};
    c.reindex();
    BinarySolution sol;
    sol.R = SparseBinaryMatrix(3, 2, {{1, 0}, {1, 1}});
    sol.feasible = true;
    const Dictionary d = extract_dictionary(sol, c);
    REQUIRE(d.size() == 1);
    CHECK(d.pathlets[0].edges == Sequence{1});
    CHECK(d.pathlets[0].support == 5);
    sol.feasible = false;
    CHECK_THROWS_AS(extract_dictionary(sol, c), InfeasibleSolution);
}

TEST_CASE("empty solution gives an empty dictionary") {
    CandidateSet c;
    BinarySolution sol;
    sol.R = SparseBinaryMatrix(0, 0, {});
    sol.feasible = true;
    CHECK(extract_dictionary(sol, c).empty());
}

TEST_CASE("dictionary size equals an independent row scan") {
    Rng rng(8);
    DecisionMatrix R = dense_matrix(12, 6);
    for (double& v : R.values) v = uniform01(rng) < 0.3 ? uniform01(rng) : 0.0;
    CandidateSet c;
    for (int i = 0; i < 12; ++i) c.pathlets.push_back({i});
    c.support.assign(12, 1);
    c.reindex();
    BinarySolution sol;
    sol.R = randomized_round(R, 2.0, 4);
    sol.feasible = true;
    std::size_t used = 0;
    for (std::size_t r = 0; r < 12; ++r) {
        bool any = false;
        for (std::size_t t = 0; t < 6; ++t) any = any || sol.R.contains(r, t);
        used += any;
    }
    CHECK(extract_dictionary(sol, c).size() == used);
}

TEST_CASE("bound at theta = ln 2|T| is exactly zero") {
    ChainInstance inst;
    const auto sol = solve_relaxed(inst.mats.M, inst.mats.D, SolverConfig{});
    const auto rep = verify_bound(sol.R, inst.mats.M, inst.mats.D, theory_theta(2), 0.1, 1000, 1);
    CHECK(rep.theoretical_lower_bound == 0.0);
    CHECK(rep.vacuous);
    CHECK(rep.pass);
    CHECK(rep.regime == "ln2T");
    CHECK(rep.theory_safe);
}

TEST_CASE("bound at theta = ln 4|T| is one quarter") {
    ChainInstance inst;
    const auto sol = solve_relaxed(inst.mats.M, inst.mats.D, SolverConfig{});
    const auto rep = verify_bound(sol.R, inst.mats.M, inst.mats.D, std::log(8.0), 0.1, 2000, 1);
    CHECK(rep.theoretical_lower_bound == doctest::Approx(0.25));
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.empirical_p >= 0.25 - rep.margin);
    CHECK(rep.pass);
    CHECK_THROWS_AS(verify_bound(sol.R, inst.mats.M, inst.mats.D, 1.0, 0.1, 10, 1), ConfigError);
}

}  // TEST_SUITE

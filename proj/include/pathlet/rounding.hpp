#pragma once

// Randomized rounding of the fractional solution, coverage repair,
// dictionary extraction and Monte-Carlo checks of the success bound
//
//   P[ C(Rr) <= 2 theta (lambda+1)/lambda C(R*)  and  D Rr >= M ] >= 1/2 - |T| e^-theta.

#include "pathlet/candidates.hpp"
#include "pathlet/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace pathlet {

struct BinarySolution {
    SparseBinaryMatrix R;   // |P| x |T|
    bool feasible = false;  // D R >= M
    bool repaired = false;
    std::size_t repaired_entries = 0;
    double cost = 0.0;      // true objective
    int attempts_used = 0;
    std::uint64_t seed = 0;
};

// 1/4 ln(2|T|), the setting used for experiments.
double experimental_theta(std::size_t n_trajectories);
// ln(2|T|), the smallest theta for which the bound is positive.
double theory_theta(std::size_t n_trajectories);
std::string theta_regime(double theta, std::size_t n_trajectories);

// One sample: entry (i, j) is 1 with probability min(1, theta R*[i, j]),
// independently. Pinned entries are never sampled.
SparseBinaryMatrix randomized_round(const DecisionMatrix& R_star, double theta, std::uint64_t seed);

// (edge, trajectory) pairs with M = 1 that no selected pathlet covers.
std::vector<std::pair<int, int>> uncovered_entries(const SparseBinaryMatrix& R, const SparseBinaryMatrix& M,
                                                   const SparseBinaryMatrix& D);
inline bool covers(const SparseBinaryMatrix& R, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D) {
    return uncovered_entries(R, M, D).empty();
}

// Rounding acceptance threshold 2 theta (lambda+1)/lambda C(R*).
double good_cost_threshold(double theta, double lambda, double c_star);

// Adds the length-1 pathlet {e} to trajectory t for every uncovered (e, t).
// Throws InfeasibleSolution when D has no length-1 column for e.
SparseBinaryMatrix repair_coverage(const SparseBinaryMatrix& R, const SparseBinaryMatrix& M,
                                   const SparseBinaryMatrix& D, std::size_t* added = nullptr);

// Samples up to max_attempts times and returns the first sample that covers
// M within the cost threshold. Otherwise every sample is repaired and the
// cheapest (then earliest) is returned with repaired = true.
BinarySolution round_until_good(const DecisionMatrix& R_star, const SparseBinaryMatrix& M,
                                const SparseBinaryMatrix& D, double theta, double lambda, int max_attempts,
                                std::uint64_t seed);

// Rows of R with at least one 1, in row order. Throws InfeasibleSolution if
// the solution is not flagged feasible.
Dictionary extract_dictionary(const BinarySolution& solution, const CandidateSet& candidates);

struct BoundReport {
    double theta = 0.0;
    double lambda = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_trajectories = 0;
    double empirical_p = 0.0;
    double theoretical_lower_bound = 0.0;
    double margin = 0.0;  // 3 sigma binomial margin at the bound
    bool vacuous = false; // bound <= 0
    bool pass = false;
    std::string regime;
    bool theory_safe = false;
};

BoundReport verify_bound(const DecisionMatrix& R_star, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                         double theta, double lambda, std::size_t n_samples, std::uint64_t seed);

nlohmann::ordered_json to_json(const BoundReport& report);

}  // namespace pathlet

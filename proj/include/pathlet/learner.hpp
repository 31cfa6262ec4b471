#pragma once

// One cell of dictionary learning: enumerate candidates, solve the
// relaxation, round, repair and extract the dictionary. Works on abstract
// symbol sequences so the same code learns edge pathlets and pathlets of
// pathlets.

#include "pathlet/candidates.hpp"
#include "pathlet/rounding.hpp"
#include "pathlet/solver.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pathlet {

enum class ThetaMode { QuarterLn2T, Ln2T, Explicit };

std::string to_string(ThetaMode mode);
ThetaMode theta_mode_from_string(const std::string& s);

struct LearnConfig {
    SolverConfig solver;
    ThetaMode theta_mode = ThetaMode::QuarterLn2T;
    double theta_value = 0.0;  // used when theta_mode == Explicit
    int max_attempts = 3;
    int max_len = kDefaultMaxLen;
    int c_min = kDefaultCMin;
    // Greedy removal of selected pathlets after rounding while the objective
    // under exact segmentation keeps dropping.
    bool prune = true;

    double theta_for(std::size_t n_sequences) const;
    void validate() const;
};

// Candidates and matrices for one set of sequences.
struct Problem {
    std::size_t n_symbols = 0;
    CandidateSet candidates;
    SparseBinaryMatrix M;
    SparseBinaryMatrix D;
    std::shared_ptr<const DecisionPattern> pattern;  // candidate contained in sequence
};

Problem prepare_problem(std::span<const Sequence> seqs, std::size_t n_symbols, const LearnConfig& config);

struct CellResult {
    Problem problem;
    FractionalSolution fractional;
    BinarySolution binary;      // rounded sample, before pruning
    // One column per sequence holding its exact segmentation into dictionary
    // pathlets; rows index problem.candidates.
    SparseBinaryMatrix assignment;
    double cost = 0.0;          // true objective of assignment
    std::size_t pruned = 0;     // pathlets dropped by the greedy pass
    Dictionary dictionary;  // pathlets over the input symbols, support from enumeration
    double theta = 0.0;
    std::uint64_t seed = 0;
    // Length-1 pathlets added so that every sequence splits into dictionary
    // pathlets, not merely gets covered.
    std::size_t partition_repairs = 0;
};

// Exact segmentations of seqs over the given candidate rows; throws
// InfeasibleSolution when some sequence cannot be segmented.
SparseBinaryMatrix segment_all(std::span<const Sequence> seqs, const CandidateSet& candidates,
                               std::span<const int> rows);

// Drops rows from the selection one at a time, least used first, whenever
// the removal keeps every sequence segmentable and lowers
// |rows| + lambda * (total pieces). Returns the kept rows in ascending order.
std::vector<int> prune_rows(std::span<const Sequence> seqs, const CandidateSet& candidates, std::vector<int> rows,
                            double lambda);

// Rounds a solved problem; used directly when one relaxation feeds several
// seeds.
CellResult finish_cell(Problem problem, FractionalSolution fractional, std::span<const Sequence> seqs,
                       const LearnConfig& config, std::uint64_t seed);

CellResult learn_cell(std::span<const Sequence> seqs, std::size_t n_symbols, const LearnConfig& config,
                      std::uint64_t seed);

}  // namespace pathlet

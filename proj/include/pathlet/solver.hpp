#pragma once

// Relaxed dictionary-learning problem
//
//   min  sum_i max(R[i,:]) + lambda * sum_ij R[i,j]   s.t.  D R = M,  0 <= R <= 1
//
// solved by projected gradient descent on a smooth surrogate, plus the
// per-trajectory weighted lower-bound baseline used for comparison.

#include "pathlet/candidates.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pathlet {

// Which entries of the |P| x |T| decision matrix are free variables. Every
// other entry is pinned to zero. Entries are ordered by row, then column.
class DecisionPattern {
public:
    static DecisionPattern dense(std::size_t rows, std::size_t cols);
    // pairs are (row, col); duplicates are rejected.
    static DecisionPattern from_pairs(std::size_t rows, std::size_t cols,
                                      std::vector<std::pair<int, int>> pairs);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return entry_col_.size(); }

    std::size_t row_begin(std::size_t r) const { return row_ptr_[r]; }
    std::size_t row_end(std::size_t r) const { return row_ptr_[r + 1]; }
    int entry_row(std::size_t k) const { return entry_row_[k]; }
    int entry_col(std::size_t k) const { return entry_col_[k]; }
    // Entry indices lying in column c, ordered by row.
    std::span<const std::size_t> column_entries(std::size_t c) const;
    // Entry index of (r, c), or -1 when the coordinate is pinned to zero.
    long find(std::size_t r, std::size_t c) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> entry_row_;
    std::vector<int> entry_col_;
    std::vector<std::size_t> col_ptr_;
    std::vector<std::size_t> col_entries_;
};

// Real-valued decision matrix over a pattern.
struct DecisionMatrix {
    std::shared_ptr<const DecisionPattern> pattern;
    std::vector<double> values;

    DecisionMatrix() = default;
    explicit DecisionMatrix(std::shared_ptr<const DecisionPattern> p)
        : pattern(std::move(p)), values(pattern->size(), 0.0) {}

    std::size_t rows() const { return pattern->rows(); }
    std::size_t cols() const { return pattern->cols(); }
    double at(std::size_t r, std::size_t c) const;
    void set(std::size_t r, std::size_t c, double v);
    double row_max(std::size_t r) const;
};

struct Smoothing {
    enum class Kind { LogSumExp, PNorm };
    Kind kind = Kind::LogSumExp;
    double temperature = 0.05;  // log-sum-exp
    double p = 8.0;             // p-norm

    std::string describe() const;
};

struct SolverConfig {
    double lambda = 0.1;
    double learning_rate = 0.05;   // initial and maximum step
    double tolerance = 1e-5;       // |C(R_k) - C(R_{k-1})| stopping threshold
    double mu = 1.0;               // initial penalty weight
    int mu_interval = 200;         // iterations between penalty updates
    double mu_growth = 2.0;
    double mu_max = 1e5;
    double feasibility_tol = 1e-3; // max |DR - M| entry
    bool multipliers = true;       // first-order multiplier updates at each penalty update
    Smoothing smoothing;
    double min_temperature = 0.05 / 16.0;
    int max_iters = 20000;

    void validate() const;  // throws ConfigError
};

struct TraceRow {
    int iter = 0;
    double true_objective = 0.0;
    double surrogate = 0.0;
    double residual = 0.0;  // max |DR - M| entry
};

struct FractionalSolution {
    DecisionMatrix R;
    std::vector<TraceRow> trace;
    bool converged = false;  // stopping criterion met, or feasible at the iteration cap
    bool stationary = false; // stopping criterion met
    int iterations = 0;
    double max_residual = 0.0;
    double residual_norm = 0.0;  // Frobenius norm of DR - M
    double final_mu = 0.0;
    double final_temperature = 0.0;
    // Smoothed row-max minus true row-max at R, and the a-priori bound
    // rows * temperature * log(cols).
    double smoothing_gap = 0.0;
    double smoothing_gap_bound = 0.0;
    SolverConfig config;
};

// sum_i max(R[i,:]) + lambda * sum_ij R[i,j]; pinned entries count as zero.
double true_objective(const DecisionMatrix& R, double lambda);
// Same objective for a binary matrix (|P| x |T|).
double true_objective(const SparseBinaryMatrix& R, double lambda);

struct SurrogateValue {
    double value = 0.0;
    double smooth_max = 0.0;
    double linear = 0.0;
    double penalty = 0.0;
    std::vector<double> gradient;  // aligned with R.values
};

// smooth-max over each row + lambda * sum R + mu * ||D R - M||_F^2 and its
// exact gradient with respect to the free entries of R.
SurrogateValue surrogate_objective_and_gradient(const DecisionMatrix& R,
                                                const SparseBinaryMatrix& M,
                                                const SparseBinaryMatrix& D, double lambda,
                                                double mu, const Smoothing& smoothing);

// Frobenius norm and max entry of D R - M.
struct Residual {
    double norm = 0.0;
    double max_abs = 0.0;
};
Residual constraint_residual(const DecisionMatrix& R, const SparseBinaryMatrix& M,
                             const SparseBinaryMatrix& D);

// Projected gradient descent from R = 0 with backtracking steps, momentum
// with adaptive restart, a growing penalty weight with multiplier updates,
// and temperature annealing. Never throws on non-convergence: the result is
// flagged instead.
FractionalSolution solve_relaxed(const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                                 std::shared_ptr<const DecisionPattern> pattern,
                                 const SolverConfig& config);
// Dense pattern over all |P| x |T| entries.
FractionalSolution solve_relaxed(const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                                 const SolverConfig& config);

// ---- per-trajectory lower-bound baseline ---------------------------------

struct BaselineResult {
    std::vector<std::vector<int>> assignments;  // candidate ids per sequence, in order
    double objective = 0.0;                     // f
};

// Minimises f = sum_t sum_p (lambda + 1/support(p)) x_{t,p} independently for
// every sequence by a shortest-path DP over positions. Among equal-weight
// decompositions the lexicographically smallest pathlet sequence wins.
BaselineResult baseline_per_trajectory(std::span<const Sequence> seqs,
                                       const CandidateSet& candidates, double lambda);

}  // namespace pathlet

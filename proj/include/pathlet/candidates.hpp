#pragma once

// Candidate pathlet enumeration with support pre-filtering, and the sparse
// binary incidence matrices built from it.

#include "pathlet/model.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pathlet {

struct SequenceHash {
    std::size_t operator()(const Sequence& s) const noexcept;
};

// Binary matrix stored as its coordinate set, with row and column adjacency.
class SparseBinaryMatrix {
public:
    SparseBinaryMatrix() = default;
    // Throws IndexOutOfRange for coordinates outside the shape and
    // ShapeMismatch for duplicates.
    SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                       std::vector<std::pair<int, int>> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return col_index_.size(); }

    // Row indices of the ones in column c, ascending.
    std::span<const int> col(std::size_t c) const;
    // Column indices of the ones in row r, ascending.
    std::span<const int> row(std::size_t r) const;
    bool contains(std::size_t r, std::size_t c) const;

    std::vector<int> col_sums() const;
    std::vector<int> row_sums() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> col_ptr_;
    std::vector<int> col_index_;  // row ids, grouped by column
    std::vector<std::size_t> row_ptr_;
    std::vector<int> row_index_;  // column ids, grouped by row
};

struct CandidateSet {
    std::vector<Sequence> pathlets;
    std::vector<int> support;
    int max_len = 10;
    int c_min = 3;

    std::size_t size() const noexcept { return pathlets.size(); }
    std::optional<int> find(std::span<const Symbol> seq) const;
    // Index of the length-1 candidate {s}; these always exist for symbols
    // seen during enumeration.
    std::optional<int> singleton(Symbol s) const { return find(std::span<const Symbol>(&s, 1)); }
    int longest() const noexcept;

    // Rebuilds the lookup after pathlets are edited by hand.
    void reindex();

private:
    std::unordered_map<Sequence, int, SequenceHash> index_;
};

inline constexpr int kDefaultMaxLen = 10;
inline constexpr int kDefaultCMin = 3;

// Every distinct contiguous subsequence of length <= max_len that occurs in
// at least c_min sequences, plus every length-1 subsequence. Ordered by
// length, then lexicographically.
CandidateSet enumerate_candidates(std::span<const Sequence> seqs, int max_len = kDefaultMaxLen,
                                  int c_min = kDefaultCMin);

struct IncidenceMatrices {
    SparseBinaryMatrix M;  // symbols x sequences
    SparseBinaryMatrix D;  // symbols x candidates
};

IncidenceMatrices build_matrices(std::span<const Sequence> seqs, const CandidateSet& candidates,
                                 std::size_t n_symbols);

// (candidate, sequence) pairs where the candidate is a contiguous
// subsequence of the sequence, sorted by candidate then sequence.
std::vector<std::pair<int, int>> containment_pairs(std::span<const Sequence> seqs,
                                                   const CandidateSet& candidates);

// {"max_len","c_min","pathlets":[{"pathlet_id","edge_seq","support"}]}.
// Symbols are written as original edge ids when a graph is given.
nlohmann::ordered_json candidates_to_json(const CandidateSet& candidates,
                                          const RoadGraph* graph = nullptr);
CandidateSet candidates_from_json(const nlohmann::json& j, const RoadGraph* graph = nullptr);

}  // namespace pathlet

#include "pathlet/candidates.hpp"

#include "pathlet/errors.hpp"

#include <algorithm>

namespace pathlet {

std::size_t SequenceHash::operator()(const Sequence& s) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (Symbol v : s) {
        h ^= static_cast<std::uint32_t>(v);
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

SparseBinaryMatrix::SparseBinaryMatrix(std::size_t rows, std::size_t cols,
                                       std::vector<std::pair<int, int>> entries)
    : rows_(rows), cols_(cols) {
    for (const auto& [r, c] : entries) {
        if (r < 0 || c < 0 || static_cast<std::size_t>(r) >= rows || static_cast<std::size_t>(c) >= cols) {
            throw IndexOutOfRange("entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                  ") outside " + std::to_string(rows) + "x" + std::to_string(cols));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    if (std::adjacent_find(entries.begin(), entries.end()) != entries.end()) {
        throw ShapeMismatch("duplicate coordinate in sparse binary matrix");
    }
    col_ptr_.assign(cols + 1, 0);
    row_ptr_.assign(rows + 1, 0);
    for (const auto& [r, c] : entries) {
        ++col_ptr_[static_cast<std::size_t>(c) + 1];
        ++row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (std::size_t i = 0; i < cols; ++i) col_ptr_[i + 1] += col_ptr_[i];
    for (std::size_t i = 0; i < rows; ++i) row_ptr_[i + 1] += row_ptr_[i];
    col_index_.resize(entries.size());
    row_index_.resize(entries.size());
    std::vector<std::size_t> row_fill(row_ptr_.begin(), row_ptr_.end() - 1);
    std::size_t k = 0;
    for (const auto& [r, c] : entries) {
        col_index_[k++] = r;
        row_index_[row_fill[static_cast<std::size_t>(r)]++] = c;
    }
}

std::span<const int> SparseBinaryMatrix::col(std::size_t c) const {
    return std::span<const int>(col_index_).subspan(col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]);
}

std::span<const int> SparseBinaryMatrix::row(std::size_t r) const {
    return std::span<const int>(row_index_).subspan(row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]);
}

bool SparseBinaryMatrix::contains(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) return false;
    auto column = col(c);
    return std::binary_search(column.begin(), column.end(), static_cast<int>(r));
}

std::vector<int> SparseBinaryMatrix::col_sums() const {
    std::vector<int> sums(cols_);
    for (std::size_t c = 0; c < cols_; ++c) sums[c] = static_cast<int>(col(c).size());
    return sums;
}

std::vector<int> SparseBinaryMatrix::row_sums() const {
    std::vector<int> sums(rows_);
    for (std::size_t r = 0; r < rows_; ++r) sums[r] = static_cast<int>(row(r).size());
    return sums;
}

std::optional<int> CandidateSet::find(std::span<const Symbol> seq) const {
    auto it = index_.find(Sequence(seq.begin(), seq.end()));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int CandidateSet::longest() const noexcept {
    int n = 0;
    for (const auto& p : pathlets) n = std::max(n, static_cast<int>(p.size()));
    return n;
}

void CandidateSet::reindex() {
    index_.clear();
    index_.reserve(pathlets.size());
    for (std::size_t i = 0; i < pathlets.size(); ++i) index_.emplace(pathlets[i], static_cast<int>(i));
}

CandidateSet enumerate_candidates(std::span<const Sequence> seqs, int max_len, int c_min) {
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (c_min < 1) throw ConfigError("c_min must be >= 1");

    struct Count {
        int support = 0;
        std::size_t last_seq = SIZE_MAX;
    };
    std::unordered_map<Sequence, Count, SequenceHash> counts;
    Sequence key;
    for (std::size_t t = 0; t < seqs.size(); ++t) {
        const auto& s = seqs[t];
        for (std::size_t i = 0; i < s.size(); ++i) {
            key.clear();
            for (std::size_t j = i; j < s.size() && j - i < static_cast<std::size_t>(max_len); ++j) {
                key.push_back(s[j]);
                Count& c = counts[key];
                if (c.last_seq != t) {
                    c.last_seq = t;
                    ++c.support;
                }
            }
        }
    }

    std::vector<std::pair<Sequence, int>> kept;
    for (auto& [seq, c] : counts) {
        if (seq.size() == 1 || c.support >= c_min) kept.emplace_back(seq, c.support);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });

    CandidateSet out;
    out.max_len = max_len;
    out.c_min = c_min;
    out.pathlets.reserve(kept.size());
    out.support.reserve(kept.size());
    for (auto& [seq, support] : kept) {
        out.pathlets.push_back(std::move(seq));
        out.support.push_back(support);
    }
    out.reindex();
    return out;
}

IncidenceMatrices build_matrices(std::span<const Sequence> seqs, const CandidateSet& candidates,
                                 std::size_t n_symbols) {
    auto check = [n_symbols](Symbol s) {
        if (s < 0 || static_cast<std::size_t>(s) >= n_symbols) {
            throw IndexOutOfRange("symbol " + std::to_string(s) + " outside [0, " + std::to_string(n_symbols) + ")");
        }
    };
    std::vector<std::pair<int, int>> m_entries;
    for (std::size_t t = 0; t < seqs.size(); ++t) {
        Sequence sorted = seqs[t];
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (Symbol s : sorted) {
            check(s);
            m_entries.emplace_back(s, static_cast<int>(t));
        }
    }
    std::vector<std::pair<int, int>> d_entries;
    for (std::size_t p = 0; p < candidates.size(); ++p) {
        Sequence sorted = candidates.pathlets[p];
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (Symbol s : sorted) {
            check(s);
            d_entries.emplace_back(s, static_cast<int>(p));
        }
    }
    return {SparseBinaryMatrix(n_symbols, seqs.size(), std::move(m_entries)),
            SparseBinaryMatrix(n_symbols, candidates.size(), std::move(d_entries))};
}

std::vector<std::pair<int, int>> containment_pairs(std::span<const Sequence> seqs,
                                                   const CandidateSet& candidates) {
    const std::size_t cap = static_cast<std::size_t>(candidates.longest());
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t t = 0; t < seqs.size(); ++t) {
        const auto& s = seqs[t];
        std::span<const Symbol> view(s);
        for (std::size_t i = 0; i < s.size(); ++i) {
            for (std::size_t len = 1; len <= cap && i + len <= s.size(); ++len) {
                if (auto p = candidates.find(view.subspan(i, len))) pairs.emplace_back(*p, static_cast<int>(t));
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

nlohmann::ordered_json candidates_to_json(const CandidateSet& candidates, const RoadGraph* graph) {
    nlohmann::ordered_json j;
    j["max_len"] = candidates.max_len;
    j["c_min"] = candidates.c_min;
    auto& arr = j["pathlets"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        nlohmann::ordered_json p;
        p["pathlet_id"] = i;
        auto& seq = p["edge_seq"] = nlohmann::ordered_json::array();
        for (Symbol s : candidates.pathlets[i]) {
            if (graph) {
                seq.push_back(graph->original_id(s));
            } else {
                seq.push_back(s);
            }
        }
        p["support"] = candidates.support[i];
        arr.push_back(std::move(p));
    }
    return j;
}

CandidateSet candidates_from_json(const nlohmann::json& j, const RoadGraph* graph) {
    CandidateSet out;
    try {
        out.max_len = j.at("max_len").get<int>();
        out.c_min = j.at("c_min").get<int>();
        for (const auto& p : j.at("pathlets")) {
            Sequence seq;
            for (const auto& v : p.at("edge_seq")) {
                auto raw = v.get<std::int64_t>();
                seq.push_back(graph ? graph->dense_id(raw) : static_cast<Symbol>(raw));
            }
            out.pathlets.push_back(std::move(seq));
            out.support.push_back(p.at("support").get<int>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("candidate set: ") + e.what());
    }
    out.reindex();
    return out;
}

}  // namespace pathlet

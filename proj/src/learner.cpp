#include "pathlet/learner.hpp"

#include "pathlet/decomposer.hpp"
#include "pathlet/errors.hpp"

#include <algorithm>
#include <optional>

namespace pathlet {

std::string to_string(ThetaMode mode) {
    switch (mode) {
        case ThetaMode::QuarterLn2T: return "quarter_ln2T";
        case ThetaMode::Ln2T: return "ln2T";
        case ThetaMode::Explicit: return "explicit";
    }
    return "explicit";
}

ThetaMode theta_mode_from_string(const std::string& s) {
    if (s == "quarter_ln2T") return ThetaMode::QuarterLn2T;
    if (s == "ln2T") return ThetaMode::Ln2T;
    if (s == "explicit") return ThetaMode::Explicit;
    throw ConfigError("theta mode must be quarter_ln2T, ln2T or explicit, got '" + s + "'");
}

double LearnConfig::theta_for(std::size_t n_sequences) const {
    switch (theta_mode) {
        case ThetaMode::QuarterLn2T: return experimental_theta(n_sequences);
        case ThetaMode::Ln2T: return theory_theta(n_sequences);
        case ThetaMode::Explicit: return theta_value;
    }
    return theta_value;
}

void LearnConfig::validate() const {
    solver.validate();
    if (theta_mode == ThetaMode::Explicit && !(theta_value > 0)) throw ConfigError("explicit theta must be > 0");
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (max_len < 1) throw ConfigError("max_len must be >= 1");
    if (c_min < 1) throw ConfigError("c_min must be >= 1");
}

Problem prepare_problem(std::span<const Sequence> seqs, std::size_t n_symbols, const LearnConfig& config) {
    Problem p;
    p.n_symbols = n_symbols;
    p.candidates = enumerate_candidates(seqs, config.max_len, config.c_min);
    auto mats = build_matrices(seqs, p.candidates, n_symbols);
    p.M = std::move(mats.M);
    p.D = std::move(mats.D);
    p.pattern = std::make_shared<DecisionPattern>(
        DecisionPattern::from_pairs(p.candidates.size(), seqs.size(), containment_pairs(seqs, p.candidates)));
    return p;
}

SparseBinaryMatrix segment_all(std::span<const Sequence> seqs, const CandidateSet& candidates,
                               std::span<const int> rows) {
    std::vector<Sequence> dict;
    dict.reserve(rows.size());
    for (int r : rows) dict.push_back(candidates.pathlets[static_cast<std::size_t>(r)]);
    const DictionaryIndex index(std::move(dict));
    std::vector<std::pair<int, int>> entries;
    for (std::size_t t = 0; t < seqs.size(); ++t) {
        const Segmentation seg = index.segment(seqs[t]);
        if (!seg.covered()) {
            throw InfeasibleSolution("sequence " + std::to_string(t) + " cannot be segmented by the selection");
        }
        for (int i : seg.pieces) entries.emplace_back(rows[static_cast<std::size_t>(i)], static_cast<int>(t));
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    return SparseBinaryMatrix(candidates.size(), seqs.size(), std::move(entries));
}

namespace {

struct Selection {
    std::vector<int> rows;                    // ascending candidate indices
    std::vector<std::vector<int>> pieces;     // per sequence, candidate indices
    std::vector<std::vector<int>> users;      // per candidate, sequences using it

    void use(std::size_t t, std::vector<int> p) {
        for (int r : pieces[t]) {
            auto& u = users[static_cast<std::size_t>(r)];
            u.erase(std::find(u.begin(), u.end(), static_cast<int>(t)));
        }
        pieces[t] = std::move(p);
        for (int r : pieces[t]) users[static_cast<std::size_t>(r)].push_back(static_cast<int>(t));
    }
};

// Segments seqs[t] for each t in which over rows, or returns nothing when one
// of them is left with uncovered symbols.
std::optional<std::vector<std::vector<int>>> try_segment(std::span<const Sequence> seqs,
                                                         const CandidateSet& candidates,
                                                         std::span<const int> rows, std::span<const int> which) {
    std::vector<Sequence> dict;
    dict.reserve(rows.size());
    for (int r : rows) dict.push_back(candidates.pathlets[static_cast<std::size_t>(r)]);
    const DictionaryIndex index(std::move(dict));
    std::vector<std::vector<int>> out;
    out.reserve(which.size());
    for (int t : which) {
        const Segmentation seg = index.segment(seqs[static_cast<std::size_t>(t)]);
        if (!seg.covered()) return std::nullopt;
        std::vector<int> p;
        p.reserve(seg.pieces.size());
        for (int i : seg.pieces) p.push_back(rows[static_cast<std::size_t>(i)]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<int> prune_rows(std::span<const Sequence> seqs, const CandidateSet& candidates, std::vector<int> rows,
                            double lambda) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::vector<int> all(seqs.size());
    for (std::size_t t = 0; t < seqs.size(); ++t) all[t] = static_cast<int>(t);
    auto initial = try_segment(seqs, candidates, rows, all);
    if (!initial) throw InfeasibleSolution("selection does not segment every sequence");

    Selection sel;
    sel.rows = rows;
    sel.pieces.resize(seqs.size());
    sel.users.resize(candidates.size());
    for (std::size_t t = 0; t < seqs.size(); ++t) sel.use(t, std::move((*initial)[t]));

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> order = sel.rows;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const auto ua = sel.users[static_cast<std::size_t>(a)].size();
            const auto ub = sel.users[static_cast<std::size_t>(b)].size();
            if (ua != ub) return ua < ub;
            return candidates.pathlets[static_cast<std::size_t>(a)].size() >
                   candidates.pathlets[static_cast<std::size_t>(b)].size();
        });
        for (int r : order) {
            std::vector<int> rest;
            rest.reserve(sel.rows.size());
            for (int x : sel.rows) {
                if (x != r) rest.push_back(x);
            }
            std::vector<int> affected = sel.users[static_cast<std::size_t>(r)];
            std::sort(affected.begin(), affected.end());
            affected.erase(std::unique(affected.begin(), affected.end()), affected.end());
            auto trial = try_segment(seqs, candidates, rest, affected);
            if (!trial) continue;
            long delta = 0;
            for (std::size_t k = 0; k < affected.size(); ++k) {
                delta += static_cast<long>((*trial)[k].size()) -
                         static_cast<long>(sel.pieces[static_cast<std::size_t>(affected[k])].size());
            }
            if (lambda * static_cast<double>(delta) >= 1.0) continue;
            for (std::size_t k = 0; k < affected.size(); ++k) {
                sel.use(static_cast<std::size_t>(affected[k]), std::move((*trial)[k]));
            }
            sel.rows = std::move(rest);
            changed = true;
        }
    }
    return sel.rows;
}

CellResult finish_cell(Problem problem, FractionalSolution fractional, std::span<const Sequence> seqs,
                       const LearnConfig& config, std::uint64_t seed) {
    CellResult out;
    out.seed = seed;
    out.theta = config.theta_for(seqs.size());
    out.binary = round_until_good(fractional.R, problem.M, problem.D, out.theta, config.solver.lambda,
                                  config.max_attempts, seed);
    const CandidateSet& cands = problem.candidates;

    std::vector<int> rows;
    for (std::size_t r = 0; r < out.binary.R.rows(); ++r) {
        if (!out.binary.R.row(r).empty()) rows.push_back(static_cast<int>(r));
    }
    // Coverage allows overlapping pathlets; segmentation does not, so add
    // length-1 pathlets wherever the selection leaves a gap.
    {
        std::vector<Sequence> dict;
        for (int r : rows) dict.push_back(cands.pathlets[static_cast<std::size_t>(r)]);
        const DictionaryIndex index(std::move(dict));
        std::vector<int> extra;
        for (const Sequence& s : seqs) {
            for (std::size_t pos : index.segment(s).uncovered) {
                auto p = cands.singleton(s[pos]);
                if (!p) throw InfeasibleSolution("no length-1 candidate for symbol " + std::to_string(s[pos]));
                extra.push_back(*p);
            }
        }
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        for (int p : extra) {
            if (!std::binary_search(rows.begin(), rows.end(), p)) {
                rows.push_back(p);
                ++out.partition_repairs;
            }
        }
        std::sort(rows.begin(), rows.end());
    }

    const std::size_t selected = rows.size();
    if (config.prune) rows = prune_rows(seqs, cands, std::move(rows), config.solver.lambda);
    out.pruned = selected - rows.size();
    out.assignment = segment_all(seqs, cands, rows);
    out.cost = static_cast<double>(rows.size()) + config.solver.lambda * static_cast<double>(out.assignment.nnz());

    for (int r : rows) {
        Pathlet p;
        p.id = static_cast<int>(out.dictionary.pathlets.size());
        p.edges = cands.pathlets[static_cast<std::size_t>(r)];
        p.support = cands.support[static_cast<std::size_t>(r)];
        out.dictionary.pathlets.push_back(std::move(p));
    }
    out.dictionary.origin.lambda = config.solver.lambda;
    out.dictionary.origin.theta = out.theta;
    out.dictionary.origin.seed = seed;
    out.problem = std::move(problem);
    out.fractional = std::move(fractional);
    return out;
}

CellResult learn_cell(std::span<const Sequence> seqs, std::size_t n_symbols, const LearnConfig& config,
                      std::uint64_t seed) {
    config.validate();
    Problem problem = prepare_problem(seqs, n_symbols, config);
    FractionalSolution frac = solve_relaxed(problem.M, problem.D, problem.pattern, config.solver);
    return finish_cell(std::move(problem), std::move(frac), seqs, config, seed);
}

}  // namespace pathlet

#include "pathlet/rounding.hpp"

#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"

#include <algorithm>
#include <cmath>

namespace pathlet {

double experimental_theta(std::size_t n_trajectories) {
    return 0.25 * std::log(2.0 * static_cast<double>(std::max<std::size_t>(n_trajectories, 1)));
}

double theory_theta(std::size_t n_trajectories) {
    return std::log(2.0 * static_cast<double>(std::max<std::size_t>(n_trajectories, 1)));
}

std::string theta_regime(double theta, std::size_t n_trajectories) {
    if (std::abs(theta - experimental_theta(n_trajectories)) < 1e-12) return "quarter_ln2T";
    if (std::abs(theta - theory_theta(n_trajectories)) < 1e-12) return "ln2T";
    return "explicit";
}

SparseBinaryMatrix randomized_round(const DecisionMatrix& R_star, double theta, std::uint64_t seed) {
    if (!(theta > 0)) throw ConfigError("theta must be > 0");
    Rng rng(seed);
    const DecisionPattern& pat = *R_star.pattern;
    std::vector<std::pair<int, int>> ones;
    for (std::size_t k = 0; k < pat.size(); ++k) {
        const double q = std::min(1.0, theta * R_star.values[k]);
        // One draw per entry keeps the stream aligned across R* values.
        const double u = uniform01(rng);
        if (u < q) ones.emplace_back(pat.entry_row(k), pat.entry_col(k));
    }
    return SparseBinaryMatrix(pat.rows(), pat.cols(), std::move(ones));
}

std::vector<std::pair<int, int>> uncovered_entries(const SparseBinaryMatrix& R, const SparseBinaryMatrix& M,
                                                   const SparseBinaryMatrix& D) {
    if (D.rows() != M.rows() || D.cols() != R.rows() || M.cols() != R.cols()) {
        throw ShapeMismatch("rounded matrix shape does not match D and M");
    }
    std::vector<std::pair<int, int>> missing;
    std::vector<char> covered(M.rows(), 0);
    for (std::size_t t = 0; t < M.cols(); ++t) {
        for (int p : R.col(t)) {
            for (int e : D.col(static_cast<std::size_t>(p))) covered[static_cast<std::size_t>(e)] = 1;
        }
        for (int e : M.col(t)) {
            if (!covered[static_cast<std::size_t>(e)]) missing.emplace_back(e, static_cast<int>(t));
        }
        for (int p : R.col(t)) {
            for (int e : D.col(static_cast<std::size_t>(p))) covered[static_cast<std::size_t>(e)] = 0;
        }
    }
    return missing;
}

double good_cost_threshold(double theta, double lambda, double c_star) {
    return 2.0 * theta * (lambda + 1.0) / lambda * c_star;
}

SparseBinaryMatrix repair_coverage(const SparseBinaryMatrix& R, const SparseBinaryMatrix& M,
                                   const SparseBinaryMatrix& D, std::size_t* added) {
    const auto missing = uncovered_entries(R, M, D);
    if (added) *added = missing.size();
    if (missing.empty()) return R;

    std::vector<int> singleton(D.rows(), -1);
    for (std::size_t p = 0; p < D.cols(); ++p) {
        auto col = D.col(p);
        if (col.size() == 1 && singleton[static_cast<std::size_t>(col[0])] < 0) {
            singleton[static_cast<std::size_t>(col[0])] = static_cast<int>(p);
        }
    }
    std::vector<std::pair<int, int>> entries;
    entries.reserve(R.nnz() + missing.size());
    for (std::size_t t = 0; t < R.cols(); ++t) {
        for (int p : R.col(t)) entries.emplace_back(p, static_cast<int>(t));
    }
    for (const auto& [e, t] : missing) {
        const int p = singleton[static_cast<std::size_t>(e)];
        if (p < 0) throw InfeasibleSolution("no length-1 candidate covers symbol " + std::to_string(e));
        entries.emplace_back(p, t);
    }
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
    return SparseBinaryMatrix(R.rows(), R.cols(), std::move(entries));
}

BinarySolution round_until_good(const DecisionMatrix& R_star, const SparseBinaryMatrix& M,
                                const SparseBinaryMatrix& D, double theta, double lambda, int max_attempts,
                                std::uint64_t seed) {
    if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    const double threshold = good_cost_threshold(theta, lambda, true_objective(R_star, lambda));

    std::vector<BinarySolution> samples;
    for (int a = 0; a < max_attempts; ++a) {
        BinarySolution s;
        s.seed = derive_seed(seed, {static_cast<std::uint64_t>(a)});
        s.R = randomized_round(R_star, theta, s.seed);
        s.attempts_used = a + 1;
        s.feasible = covers(s.R, M, D);
        s.cost = true_objective(s.R, lambda);
        if (s.feasible && s.cost <= threshold) return s;
        samples.push_back(std::move(s));
    }

    for (auto& s : samples) {
        s.R = repair_coverage(s.R, M, D, &s.repaired_entries);
        s.repaired = true;
        s.feasible = true;
        s.cost = true_objective(s.R, lambda);
        s.attempts_used = max_attempts;
    }
    auto best = std::min_element(samples.begin(), samples.end(),
                                 [](const BinarySolution& a, const BinarySolution& b) { return a.cost < b.cost; });
    return *best;
}

Dictionary extract_dictionary(const BinarySolution& solution, const CandidateSet& candidates) {
    if (!solution.feasible) throw InfeasibleSolution("cannot extract a dictionary from an infeasible solution");
    if (solution.R.rows() != candidates.size()) {
        throw ShapeMismatch("solution has " + std::to_string(solution.R.rows()) + " rows but there are " +
                            std::to_string(candidates.size()) + " candidates");
    }
    Dictionary dict;
    for (std::size_t r = 0; r < solution.R.rows(); ++r) {
        if (solution.R.row(r).empty()) continue;
        Pathlet p;
        p.id = static_cast<int>(dict.pathlets.size());
        p.edges = candidates.pathlets[r];
        p.support = candidates.support[r];
        dict.pathlets.push_back(std::move(p));
    }
    return dict;
}

BoundReport verify_bound(const DecisionMatrix& R_star, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                         double theta, double lambda, std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 1000) throw ConfigError("verify_bound needs at least 1000 samples");
    BoundReport rep;
    rep.theta = theta;
    rep.lambda = lambda;
    rep.n_samples = n_samples;
    rep.n_trajectories = M.cols();
    rep.regime = theta_regime(theta, M.cols());
    rep.theory_safe = theta >= theory_theta(M.cols()) - 1e-12;

    const double threshold = good_cost_threshold(theta, lambda, true_objective(R_star, lambda));
    std::size_t good = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        auto R = randomized_round(R_star, theta, derive_seed(seed, {0xb0u, i}));
        if (true_objective(R, lambda) <= threshold && covers(R, M, D)) ++good;
    }
    rep.empirical_p = static_cast<double>(good) / static_cast<double>(n_samples);
    rep.theoretical_lower_bound = 0.5 - static_cast<double>(M.cols()) * std::exp(-theta);
    if (std::abs(rep.theoretical_lower_bound) < 1e-12) rep.theoretical_lower_bound = 0.0;
    rep.vacuous = rep.theoretical_lower_bound <= 1e-12;
    const double b = std::clamp(rep.theoretical_lower_bound, 0.0, 1.0);
    rep.margin = 3.0 * std::sqrt(b * (1.0 - b) / static_cast<double>(n_samples));
    rep.pass = rep.vacuous || rep.empirical_p >= rep.theoretical_lower_bound - rep.margin;
    return rep;
}

nlohmann::ordered_json to_json(const BoundReport& r) {
    nlohmann::ordered_json j;
    j["theta"] = r.theta;
    j["lambda"] = r.lambda;
    j["n_samples"] = r.n_samples;
    j["empirical_p"] = r.empirical_p;
    j["theoretical_lower_bound"] = r.theoretical_lower_bound;
    j["pass"] = r.pass;
    j["margin"] = r.margin;
    j["vacuous"] = r.vacuous;
    j["regime"] = r.regime;
    j["theory_safe"] = r.theory_safe;
    j["n_trajectories"] = r.n_trajectories;
    return j;
}

}  // namespace pathlet

#include "pathlet/solver.hpp"

#include "pathlet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pathlet {

// ---- DecisionPattern -------------------------------------------------------

DecisionPattern DecisionPattern::dense(std::size_t rows, std::size_t cols) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) pairs.emplace_back(static_cast<int>(r), static_cast<int>(c));
    }
    return from_pairs(rows, cols, std::move(pairs));
}

DecisionPattern DecisionPattern::from_pairs(std::size_t rows, std::size_t cols,
                                            std::vector<std::pair<int, int>> pairs) {
    for (const auto& [r, c] : pairs) {
        if (r < 0 || c < 0 || static_cast<std::size_t>(r) >= rows || static_cast<std::size_t>(c) >= cols) {
            throw IndexOutOfRange("decision entry (" + std::to_string(r) + ", " + std::to_string(c) + ") out of range");
        }
    }
    std::sort(pairs.begin(), pairs.end());
    if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end()) {
        throw ShapeMismatch("duplicate decision entry");
    }
    DecisionPattern p;
    p.rows_ = rows;
    p.cols_ = cols;
    p.row_ptr_.assign(rows + 1, 0);
    p.col_ptr_.assign(cols + 1, 0);
    p.entry_row_.reserve(pairs.size());
    p.entry_col_.reserve(pairs.size());
    for (const auto& [r, c] : pairs) {
        ++p.row_ptr_[static_cast<std::size_t>(r) + 1];
        ++p.col_ptr_[static_cast<std::size_t>(c) + 1];
        p.entry_row_.push_back(r);
        p.entry_col_.push_back(c);
    }
    for (std::size_t i = 0; i < rows; ++i) p.row_ptr_[i + 1] += p.row_ptr_[i];
    for (std::size_t i = 0; i < cols; ++i) p.col_ptr_[i + 1] += p.col_ptr_[i];
    p.col_entries_.resize(pairs.size());
    std::vector<std::size_t> fill(p.col_ptr_.begin(), p.col_ptr_.end() - 1);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        p.col_entries_[fill[static_cast<std::size_t>(pairs[k].second)]++] = k;
    }
    return p;
}

std::span<const std::size_t> DecisionPattern::column_entries(std::size_t c) const {
    return std::span<const std::size_t>(col_entries_).subspan(col_ptr_[c], col_ptr_[c + 1] - col_ptr_[c]);
}

long DecisionPattern::find(std::size_t r, std::size_t c) const {
    if (r >= rows_ || c >= cols_) return -1;
    auto b = entry_col_.begin() + static_cast<long>(row_ptr_[r]);
    auto e = entry_col_.begin() + static_cast<long>(row_ptr_[r + 1]);
    auto it = std::lower_bound(b, e, static_cast<int>(c));
    if (it == e || *it != static_cast<int>(c)) return -1;
    return static_cast<long>(it - entry_col_.begin());
}

double DecisionMatrix::at(std::size_t r, std::size_t c) const {
    long k = pattern->find(r, c);
    return k < 0 ? 0.0 : values[static_cast<std::size_t>(k)];
}

void DecisionMatrix::set(std::size_t r, std::size_t c, double v) {
    long k = pattern->find(r, c);
    if (k < 0) throw IndexOutOfRange("entry is pinned to zero by the decision pattern");
    values[static_cast<std::size_t>(k)] = v;
}

double DecisionMatrix::row_max(std::size_t r) const {
    double m = 0.0;
    for (std::size_t k = pattern->row_begin(r); k < pattern->row_end(r); ++k) m = std::max(m, values[k]);
    return m;
}

std::string Smoothing::describe() const {
    std::ostringstream ss;
    if (kind == Kind::LogSumExp) {
        ss << "logsumexp(tau=" << temperature << ")";
    } else {
        ss << "pnorm(p=" << p << ")";
    }
    return ss.str();
}

void SolverConfig::validate() const {
    if (!(lambda > 0)) throw ConfigError("lambda must be > 0");
    if (!(learning_rate > 0)) throw ConfigError("learning rate must be > 0");
    if (!(tolerance > 0)) throw ConfigError("tolerance must be > 0");
    if (!(mu > 0)) throw ConfigError("mu must be > 0");
    if (mu_interval < 1) throw ConfigError("mu interval must be >= 1");
    if (!(mu_growth >= 1)) throw ConfigError("mu growth must be >= 1");
    if (!(feasibility_tol > 0)) throw ConfigError("feasibility tolerance must be > 0");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (smoothing.kind == Smoothing::Kind::LogSumExp && !(smoothing.temperature > 0)) {
        throw ConfigError("temperature must be > 0");
    }
    if (smoothing.kind == Smoothing::Kind::PNorm && !(smoothing.p >= 1)) throw ConfigError("p must be >= 1");
}

// ---- objectives ------------------------------------------------------------

double true_objective(const DecisionMatrix& R, double lambda) {
    double rows = 0.0;
    for (std::size_t r = 0; r < R.rows(); ++r) rows += R.row_max(r);
    double total = 0.0;
    for (double v : R.values) total += v;
    return rows + lambda * total;
}

double true_objective(const SparseBinaryMatrix& R, double lambda) {
    std::size_t used = 0;
    for (std::size_t r = 0; r < R.rows(); ++r) used += R.row(r).empty() ? 0 : 1;
    return static_cast<double>(used) + lambda * static_cast<double>(R.nnz());
}

namespace {

void check_shapes(const DecisionPattern& pattern, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D) {
    if (D.rows() != M.rows() || D.cols() != pattern.rows() || M.cols() != pattern.cols()) {
        std::ostringstream ss;
        ss << "D is " << D.rows() << "x" << D.cols() << ", R is " << pattern.rows() << "x" << pattern.cols()
           << ", M is " << M.rows() << "x" << M.cols();
        throw ShapeMismatch(ss.str());
    }
}

// Precomputed coupling between decision entries and the entries of DR - M
// that can be nonzero. Residual positions are grouped by column.
class Evaluator {
public:
    Evaluator(const DecisionPattern& pattern, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D)
        : pattern_(pattern) {
        check_shapes(pattern, M, D);
        std::vector<int> edges;
        entry_ptr_.assign(pattern.size() + 1, 0);
        for (std::size_t t = 0; t < pattern.cols(); ++t) {
            edges.assign(M.col(t).begin(), M.col(t).end());
            for (std::size_t k : pattern.column_entries(t)) {
                auto d = D.col(static_cast<std::size_t>(pattern.entry_row(k)));
                edges.insert(edges.end(), d.begin(), d.end());
            }
            std::sort(edges.begin(), edges.end());
            edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
            const std::size_t base = target_.size();
            for (int e : edges) {
                target_.push_back(M.contains(static_cast<std::size_t>(e), t) ? 1.0 : 0.0);
            }
            for (std::size_t k : pattern.column_entries(t)) {
                auto d = D.col(static_cast<std::size_t>(pattern.entry_row(k)));
                entry_ptr_[k + 1] = d.size();
                for (int e : d) {
                    auto it = std::lower_bound(edges.begin(), edges.end(), e);
                    positions_by_entry_.emplace_back(k, base + static_cast<std::size_t>(it - edges.begin()));
                }
            }
        }
        for (std::size_t k = 0; k < pattern.size(); ++k) entry_ptr_[k + 1] += entry_ptr_[k];
        // positions_by_entry_ was filled column by column; regroup by entry.
        positions_.resize(positions_by_entry_.size());
        std::vector<std::size_t> fill(entry_ptr_.begin(), entry_ptr_.end() - 1);
        for (const auto& [k, pos] : positions_by_entry_) positions_[fill[k]++] = pos;
        positions_by_entry_.clear();
        positions_by_entry_.shrink_to_fit();
        residual_.resize(target_.size());
    }

    std::size_t residual_size() const { return target_.size(); }

    const std::vector<double>& compute_residual(const std::vector<double>& x) {
        for (std::size_t i = 0; i < target_.size(); ++i) residual_[i] = -target_[i];
        for (std::size_t k = 0; k < x.size(); ++k) {
            const double v = x[k];
            if (v == 0.0) continue;
            for (std::size_t j = entry_ptr_[k]; j < entry_ptr_[k + 1]; ++j) residual_[positions_[j]] += v;
        }
        return residual_;
    }

    Residual residual_stats(const std::vector<double>& x) {
        compute_residual(x);
        Residual r;
        for (double v : residual_) {
            r.norm += v * v;
            r.max_abs = std::max(r.max_abs, std::abs(v));
        }
        r.norm = std::sqrt(r.norm);
        return r;
    }

    // Surrogate value; fills gradient when non-null. multipliers may be empty.
    SurrogateValue evaluate(const std::vector<double>& x, double lambda, double mu, const Smoothing& sm,
                            std::span<const double> multipliers, bool want_gradient) {
        SurrogateValue out;
        if (want_gradient) out.gradient.assign(x.size(), 0.0);
        const std::size_t cols = pattern_.cols();

        for (std::size_t r = 0; r < pattern_.rows(); ++r) {
            if (cols == 0) break;
            const std::size_t b = pattern_.row_begin(r);
            const std::size_t e = pattern_.row_end(r);
            const std::size_t zeros = cols - (e - b);
            if (sm.kind == Smoothing::Kind::LogSumExp) {
                const double tau = sm.temperature;
                double m = zeros > 0 ? 0.0 : -std::numeric_limits<double>::infinity();
                for (std::size_t k = b; k < e; ++k) m = std::max(m, x[k]);
                double s = static_cast<double>(zeros) * std::exp(-m / tau);
                for (std::size_t k = b; k < e; ++k) s += std::exp((x[k] - m) / tau);
                out.smooth_max += m + tau * std::log(s);
                if (want_gradient) {
                    for (std::size_t k = b; k < e; ++k) out.gradient[k] += std::exp((x[k] - m) / tau) / s;
                }
            } else {
                const double p = sm.p;
                double m = 0.0;
                for (std::size_t k = b; k < e; ++k) m = std::max(m, std::abs(x[k]));
                if (m == 0.0) continue;
                double s = 0.0;
                for (std::size_t k = b; k < e; ++k) s += std::pow(std::abs(x[k]) / m, p);
                const double norm = m * std::pow(s, 1.0 / p);
                out.smooth_max += norm;
                if (want_gradient) {
                    for (std::size_t k = b; k < e; ++k) {
                        const double v = x[k];
                        const double g = std::pow(std::abs(v) / norm, p - 1.0);
                        out.gradient[k] += v >= 0 ? g : -g;
                    }
                }
            }
        }

        double total = 0.0;
        for (double v : x) total += v;
        out.linear = lambda * total;
        if (want_gradient) {
            for (double& g : out.gradient) g += lambda;
        }

        compute_residual(x);
        const bool with_mult = !multipliers.empty();
        for (std::size_t i = 0; i < residual_.size(); ++i) {
            out.penalty += mu * residual_[i] * residual_[i];
            if (with_mult) out.penalty += multipliers[i] * residual_[i];
        }
        if (want_gradient) {
            for (std::size_t k = 0; k < x.size(); ++k) {
                double acc = 0.0;
                for (std::size_t j = entry_ptr_[k]; j < entry_ptr_[k + 1]; ++j) {
                    const std::size_t pos = positions_[j];
                    acc += 2.0 * mu * residual_[pos] + (with_mult ? multipliers[pos] : 0.0);
                }
                out.gradient[k] += acc;
            }
        }
        out.value = out.smooth_max + out.linear + out.penalty;
        return out;
    }

private:
    const DecisionPattern& pattern_;
    std::vector<double> target_;
    std::vector<std::size_t> entry_ptr_;
    std::vector<std::size_t> positions_;
    std::vector<std::pair<std::size_t, std::size_t>> positions_by_entry_;
    std::vector<double> residual_;
};

double smoothing_gap_bound(std::size_t rows, std::size_t cols, const Smoothing& sm) {
    if (cols == 0) return 0.0;
    if (sm.kind == Smoothing::Kind::LogSumExp) {
        return static_cast<double>(rows) * sm.temperature * std::log(static_cast<double>(cols));
    }
    // ||x||_p <= cols^(1/p) * max|x| and max|x| <= 1 on the box.
    return static_cast<double>(rows) * (std::pow(static_cast<double>(cols), 1.0 / sm.p) - 1.0);
}

}  // namespace

SurrogateValue surrogate_objective_and_gradient(const DecisionMatrix& R, const SparseBinaryMatrix& M,
                                                const SparseBinaryMatrix& D, double lambda, double mu,
                                                const Smoothing& smoothing) {
    Evaluator ev(*R.pattern, M, D);
    return ev.evaluate(R.values, lambda, mu, smoothing, {}, true);
}

Residual constraint_residual(const DecisionMatrix& R, const SparseBinaryMatrix& M, const SparseBinaryMatrix& D) {
    Evaluator ev(*R.pattern, M, D);
    return ev.residual_stats(R.values);
}

FractionalSolution solve_relaxed(const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                                 const SolverConfig& config) {
    return solve_relaxed(M, D, std::make_shared<DecisionPattern>(DecisionPattern::dense(D.cols(), M.cols())),
                         config);
}

FractionalSolution solve_relaxed(const SparseBinaryMatrix& M, const SparseBinaryMatrix& D,
                                 std::shared_ptr<const DecisionPattern> pattern, const SolverConfig& config) {
    config.validate();
    Evaluator ev(*pattern, M, D);

    FractionalSolution sol;
    sol.config = config;
    sol.R = DecisionMatrix(pattern);
    const std::size_t n = pattern->size();

    Smoothing sm = config.smoothing;
    double mu = config.mu;
    double step = config.learning_rate;
    std::vector<double> multipliers(config.multipliers ? ev.residual_size() : 0, 0.0);

    std::vector<double> x(n, 0.0);     // current iterate (R_k)
    std::vector<double> z(n, 0.0);     // extrapolated point
    std::vector<double> x_new(n, 0.0);
    double momentum = 1.0;

    double prev_true = true_objective(sol.R, config.lambda);
    double prev_surrogate = ev.evaluate(x, config.lambda, mu, sm, multipliers, false).value;
    int since_update = 0;
    int iter = 0;

    auto finish_stage = [&]() {
        momentum = 1.0;
        z = x;
        since_update = 0;
    };

    while (iter < config.max_iters) {
        ++iter;
        const SurrogateValue at_z = ev.evaluate(z, config.lambda, mu, sm, multipliers, true);

        // Backtracking: halve the step until the quadratic upper bound holds.
        double f_new = 0.0;
        double trial = std::min(config.learning_rate, step * 1.25);
        for (;;) {
            double lin = 0.0;
            double quad = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = std::clamp(z[k] - trial * at_z.gradient[k], 0.0, 1.0);
                x_new[k] = v;
                const double d = v - z[k];
                lin += at_z.gradient[k] * d;
                quad += d * d;
            }
            f_new = ev.evaluate(x_new, config.lambda, mu, sm, multipliers, false).value;
            const double slack = 1e-12 * std::max(1.0, std::abs(at_z.value));
            if (f_new <= at_z.value + lin + quad / (2.0 * trial) + slack || trial < 1e-14) break;
            trial *= 0.5;
        }
        step = trial;

        // Gradient-based adaptive restart, otherwise accelerate.
        double restart_test = 0.0;
        for (std::size_t k = 0; k < n; ++k) restart_test += (z[k] - x_new[k]) * (x_new[k] - x[k]);
        if (restart_test > 0.0) {
            momentum = 1.0;
            z = x_new;
        } else {
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            const double beta = (momentum - 1.0) / next;
            for (std::size_t k = 0; k < n; ++k) {
                z[k] = std::clamp(x_new[k] + beta * (x_new[k] - x[k]), 0.0, 1.0);
            }
            momentum = next;
        }
        x.swap(x_new);
        sol.R.values = x;

        const double c_now = true_objective(sol.R, config.lambda);
        const Residual res = ev.residual_stats(x);
        sol.trace.push_back({iter, c_now, f_new, res.max_abs});
        ++since_update;

        const bool plateau = std::abs(c_now - prev_true) < config.tolerance &&
                             std::abs(f_new - prev_surrogate) < config.tolerance;
        prev_true = c_now;
        prev_surrogate = f_new;

        if (!plateau && since_update < config.mu_interval) continue;

        const bool feasible = res.max_abs < config.feasibility_tol;
        if (!feasible) {
            if (config.multipliers) {
                const auto& r = ev.compute_residual(x);
                for (std::size_t i = 0; i < multipliers.size(); ++i) multipliers[i] += 2.0 * mu * r[i];
            }
            mu = std::min(mu * config.mu_growth, config.mu_max);
            finish_stage();
            prev_surrogate = std::numeric_limits<double>::infinity();
            continue;
        }
        if (!plateau) {
            since_update = 0;
            continue;
        }
        if (sm.kind == Smoothing::Kind::LogSumExp && sm.temperature > config.min_temperature * (1.0 + 1e-12)) {
            sm.temperature = std::max(sm.temperature * 0.5, config.min_temperature);
            finish_stage();
            prev_surrogate = std::numeric_limits<double>::infinity();
            continue;
        }
        sol.stationary = true;
        break;
    }

    sol.iterations = iter;
    sol.R.values = x;
    const Residual res = ev.residual_stats(x);
    sol.max_residual = res.max_abs;
    sol.residual_norm = res.norm;
    sol.converged = sol.stationary || res.max_abs < config.feasibility_tol;
    sol.final_mu = mu;
    sol.final_temperature = sm.temperature;
    const SurrogateValue final_value = ev.evaluate(x, config.lambda, mu, sm, {}, false);
    double row_max_sum = 0.0;
    for (std::size_t r = 0; r < pattern->rows(); ++r) row_max_sum += sol.R.row_max(r);
    sol.smoothing_gap = final_value.smooth_max - row_max_sum;
    sol.smoothing_gap_bound = smoothing_gap_bound(pattern->rows(), pattern->cols(), sm);
    return sol;
}

// ---- baseline --------------------------------------------------------------

BaselineResult baseline_per_trajectory(std::span<const Sequence> seqs, const CandidateSet& candidates,
                                       double lambda) {
    BaselineResult out;
    out.assignments.resize(seqs.size());
    const std::size_t cap = static_cast<std::size_t>(candidates.longest());
    for (std::size_t t = 0; t < seqs.size(); ++t) {
        const auto& s = seqs[t];
        std::span<const Symbol> view(s);
        const std::size_t n = s.size();
        const double inf = std::numeric_limits<double>::infinity();
        // best[i]: cheapest decomposition of s[i..n).
        std::vector<double> best(n + 1, inf);
        best[n] = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t len = 1; len <= cap && i + len <= n; ++len) {
                auto p = candidates.find(view.subspan(i, len));
                if (!p || !std::isfinite(best[i + len])) continue;
                const double w = lambda + 1.0 / static_cast<double>(candidates.support[static_cast<std::size_t>(*p)]);
                best[i] = std::min(best[i], w + best[i + len]);
            }
        }
        if (!std::isfinite(best[0])) {
            throw UncoveredInput("sequence " + std::to_string(t) + " cannot be decomposed by the candidates");
        }
        // Forward pass: the shortest optimal first piece is the lexicographically smallest.
        std::size_t i = 0;
        while (i < n) {
            for (std::size_t len = 1; len <= cap && i + len <= n; ++len) {
                auto p = candidates.find(view.subspan(i, len));
                if (!p || !std::isfinite(best[i + len])) continue;
                const double w = lambda + 1.0 / static_cast<double>(candidates.support[static_cast<std::size_t>(*p)]);
                if (std::abs(w + best[i + len] - best[i]) <= 1e-12 * std::max(1.0, best[i])) {
                    out.assignments[t].push_back(*p);
                    i += len;
                    break;
                }
            }
        }
        out.objective += best[0];
    }
    return out;
}

}  // namespace pathlet

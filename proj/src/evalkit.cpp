#include "pathlet/evalkit.hpp"

#include "pathlet/errors.hpp"
#include "pathlet/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

namespace pathlet {

int code_bits(std::size_t n) {
    int b = 0;
    while (b < 63 && (std::uint64_t{1} << b) < n) ++b;
    return std::max(1, b);
}

MdlBreakdown mdl_breakdown(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_edges) {
    std::size_t total = 0;
    for (const auto& t : trajs) total += t.edges.size();
    if (total == 0) throw EmptyCorpus("MDL score needs at least one edge");

    MdlBreakdown m;
    m.edge_bits = code_bits(n_edges);
    m.pathlet_bits = code_bits(dict.size());
    m.raw_bits = static_cast<double>(total) * m.edge_bits;
    for (const auto& p : dict.pathlets) m.dictionary_bits += static_cast<double>(p.edges.size()) * m.edge_bits;

    const DictionaryIndex index(dict);
    for (const auto& t : trajs) {
        const Segmentation seg = index.segment(t.edges);
        m.references += seg.pieces.size();
        m.verbatim_edges += seg.uncovered.size();
    }
    m.encoded_bits = static_cast<double>(m.references) * m.pathlet_bits +
                     static_cast<double>(m.verbatim_edges) * m.edge_bits;
    m.score = (m.dictionary_bits + m.encoded_bits) / m.raw_bits;
    return m;
}

double mdl_score(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_edges) {
    return mdl_breakdown(dict, trajs, n_edges).score;
}

EvalReport evaluate_split(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_train,
                          std::size_t n_edges) {
    EvalReport r;
    r.dictionary_size = dict.size();
    r.trajectories = trajs.size();
    r.dictionary_size_over_T =
        n_train ? static_cast<double>(dict.size()) / static_cast<double>(n_train) : 0.0;
    const CoverStats cs = cover_ratio(trajs, dict);
    r.mean_representation_cost = cs.mean_cost;
    r.trajectory_cover = cs.trajectory_cover;
    r.edge_cover = cs.edge_cover;
    r.mdl_score = cs.edges ? mdl_score(dict, trajs, n_edges) : std::numeric_limits<double>::quiet_NaN();
    r.lambda = dict.origin.lambda;
    r.theta = dict.origin.theta;
    r.seed = dict.origin.seed;
    return r;
}

std::pair<EvalReport, EvalReport> evaluate(const Dictionary& dict, std::span<const Trajectory> train,
                                           std::span<const Trajectory> test, std::size_t n_edges) {
    return {evaluate_split(dict, train, train.size(), n_edges), evaluate_split(dict, test, train.size(), n_edges)};
}

namespace {

nlohmann::ordered_json number_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& r) {
    nlohmann::ordered_json j;
    j["dictionary_size"] = r.dictionary_size;
    j["trajectories"] = r.trajectories;
    j["dictionary_size_over_T"] = r.dictionary_size_over_T;
    j["mean_representation_cost"] = r.mean_representation_cost;
    j["trajectory_cover"] = r.trajectory_cover;
    j["edge_cover"] = r.edge_cover;
    j["mdl_score"] = number_or_null(r.mdl_score);
    j["lambda"] = r.lambda;
    j["theta"] = r.theta;
    j["seed"] = r.seed;
    return j;
}

nlohmann::ordered_json to_json(const MdlBreakdown& m) {
    nlohmann::ordered_json j;
    j["bit_model"] = "fixed-width codes of max(1, ceil(log2 n)) bits";
    j["edge_bits"] = m.edge_bits;
    j["pathlet_bits"] = m.pathlet_bits;
    j["raw_bits"] = m.raw_bits;
    j["dictionary_bits"] = m.dictionary_bits;
    j["encoded_bits"] = m.encoded_bits;
    j["references"] = m.references;
    j["verbatim_edges"] = m.verbatim_edges;
    j["score"] = m.score;
    return j;
}

// ---- lambda sweep -----------------------------------------------------------

std::vector<SweepRow> lambda_sweep(std::span<const Trajectory> trajs, std::size_t n_edges,
                                   std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                                   const LearnConfig& base) {
    if (lambdas.empty()) throw ConfigError("lambda sweep needs at least one lambda");
    if (seeds.empty()) throw ConfigError("lambda sweep needs at least one seed");
    for (double l : lambdas) {
        if (!(l > 0)) throw ConfigError("every lambda must be > 0");
    }
    base.validate();
    const auto seqs = edge_sequences(trajs);

    std::vector<SweepRow> rows(lambdas.size());
    std::vector<std::exception_ptr> errors(lambdas.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < lambdas.size(); i = next++) {
            try {
                LearnConfig cfg = base;
                cfg.solver.lambda = lambdas[i];
                Problem problem = prepare_problem(seqs, n_edges, cfg);
                const FractionalSolution frac = solve_relaxed(problem.M, problem.D, problem.pattern, cfg.solver);
                SweepRow& row = rows[i];
                row.lambda = lambdas[i];
                row.seeds = seeds.size();
                row.converged = frac.converged;
                row.is_default = std::abs(lambdas[i] - SolverConfig{}.lambda) < 1e-12;
                for (std::uint64_t s : seeds) {
                    const CellResult r = finish_cell(problem, frac, seqs, cfg, derive_seed(s, {1, 0}));
                    const CoverStats cs = cover_ratio(trajs, r.dictionary);
                    row.dictionary_size += static_cast<double>(r.dictionary.size());
                    row.mean_representation_cost += cs.mean_cost;
                    row.trajectory_cover += cs.trajectory_cover;
                }
                const auto n = static_cast<double>(seeds.size());
                row.dictionary_size /= n;
                row.mean_representation_cost /= n;
                row.trajectory_cover /= n;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n_workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()),
                                                        lambdas.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "lambda,seeds,dictionary_size,mean_representation_cost,trajectory_cover,converged,default\n";
    for (const auto& r : rows) {
        out << format_double(r.lambda) << ',' << r.seeds << ',' << format_double(r.dictionary_size) << ','
            << format_double(r.mean_representation_cost) << ',' << format_double(r.trajectory_cover) << ','
            << (r.converged ? 1 : 0) << ',' << (r.is_default ? 1 : 0) << '\n';
    }
}

TrendCheck check_trend(std::span<const SweepRow> rows) {
    std::vector<SweepRow> sorted(rows.begin(), rows.end());
    std::sort(sorted.begin(), sorted.end(), [](const SweepRow& a, const SweepRow& b) { return a.lambda < b.lambda; });
    TrendCheck t;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].mean_representation_cost > sorted[i - 1].mean_representation_cost + 1e-12) ++t.cost_inversions;
        if (sorted[i].dictionary_size < sorted[i - 1].dictionary_size - 1e-12) ++t.size_inversions;
    }
    return t;
}

// ---- partial reconstruction -------------------------------------------------

std::vector<int> usage_ranking(const Dictionary& dict, std::span<const Trajectory> trajs) {
    const DictionaryIndex index(dict);
    std::vector<std::size_t> usage(dict.size(), 0);
    for (const auto& t : trajs) {
        for (int i : index.segment(t.edges).pieces) ++usage[static_cast<std::size_t>(i)];
    }
    std::vector<int> order(dict.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return usage[static_cast<std::size_t>(a)] > usage[static_cast<std::size_t>(b)];
    });
    return order;
}

std::vector<CurveRow> partial_reconstruction_curve(const Dictionary& dict, std::span<const Trajectory> trajs,
                                                   std::span<const double> keep_fractions) {
    const std::vector<int> ranking = usage_ranking(dict, trajs);
    std::vector<CurveRow> rows;
    for (double f : keep_fractions) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("keep fractions must lie in [0, 1]");
        CurveRow row;
        row.keep_fraction = f;
        row.kept = std::min(dict.size(),
                            static_cast<std::size_t>(std::ceil(f * static_cast<double>(dict.size()) - 1e-9)));
        std::vector<int> keep(ranking.begin(), ranking.begin() + static_cast<long>(row.kept));
        std::sort(keep.begin(), keep.end());
        Dictionary sub;
        sub.origin = dict.origin;
        for (int i : keep) sub.pathlets.push_back(dict.pathlets[static_cast<std::size_t>(i)]);
        const CoverStats cs = cover_ratio(trajs, sub);
        row.edge_uncover_ratio = 1.0 - cs.edge_cover;
        row.trajectory_cover = cs.trajectory_cover;
        row.mean_representation_cost = cs.mean_cost;
        rows.push_back(row);
    }
    return rows;
}

void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows) {
    out << "keep_fraction,kept,edge_uncover_ratio,trajectory_cover,mean_representation_cost\n";
    for (const auto& r : rows) {
        out << format_double(r.keep_fraction) << ',' << r.kept << ',' << format_double(r.edge_uncover_ratio) << ','
            << format_double(r.trajectory_cover) << ',' << format_double(r.mean_representation_cost) << '\n';
    }
}

// ---- features ---------------------------------------------------------------

namespace {

double day_angle(int hours, int minutes) {
    if (hours < 0 || hours > 23) throw ConfigError("hours must be in 0..23, got " + std::to_string(hours));
    if (minutes < 0 || minutes > 59) throw ConfigError("minutes must be in 0..59, got " + std::to_string(minutes));
    return 2.0 * std::numbers::pi * static_cast<double>(hours * 60 + minutes) / 1440.0;
}

}  // namespace

double time_encoding(int hours, int minutes) {
    return std::sin(day_angle(hours, minutes));
}

double time_encoding_cos(int hours, int minutes) {
    return std::cos(day_angle(hours, minutes));
}

nlohmann::ordered_json feature_row(const RepresentationVector& v, const std::optional<TimeOfDay>& departure,
                                   bool with_cosine, const RoadGraph* graph) {
    nlohmann::ordered_json j = to_json(v, graph);
    if (departure) {
        j["time_encoding"] = time_encoding(departure->hours, departure->minutes);
        if (with_cosine) j["time_encoding_cos"] = time_encoding_cos(departure->hours, departure->minutes);
    }
    return j;
}

}  // namespace pathlet

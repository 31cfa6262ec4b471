#pragma once

// Metrics over a learned dictionary, the compression score, and the
// harnesses that sweep lambda or truncate the dictionary.

#include "pathlet/decomposer.hpp"
#include "pathlet/learner.hpp"
#include "pathlet/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace pathlet {

// Fixed-width code length for an alphabet of n symbols, at least one bit.
int code_bits(std::size_t n);

struct MdlBreakdown {
    int edge_bits = 0;     // per edge id
    int pathlet_bits = 0;  // per dictionary reference
    double raw_bits = 0;          // every trajectory spelled out edge by edge
    double dictionary_bits = 0;   // every pathlet spelled out edge by edge
    double encoded_bits = 0;      // references plus verbatim uncovered edges
    std::size_t references = 0;
    std::size_t verbatim_edges = 0;
    double score = 0;             // (dictionary_bits + encoded_bits) / raw_bits
};

// Throws EmptyCorpus when there is no edge to encode.
MdlBreakdown mdl_breakdown(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_edges);
double mdl_score(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_edges);

struct EvalReport {
    std::size_t dictionary_size = 0;
    std::size_t trajectories = 0;
    double dictionary_size_over_T = 0;  // always relative to the training split
    double mean_representation_cost = 0;
    double trajectory_cover = 0;
    double edge_cover = 0;
    double mdl_score = 0;  // NaN for an empty split
    double lambda = 0;
    double theta = 0;
    std::uint64_t seed = 0;
};

// Train and test reports for a dictionary learned on train.
std::pair<EvalReport, EvalReport> evaluate(const Dictionary& dict, std::span<const Trajectory> train,
                                           std::span<const Trajectory> test, std::size_t n_edges);
EvalReport evaluate_split(const Dictionary& dict, std::span<const Trajectory> trajs, std::size_t n_train,
                          std::size_t n_edges);

nlohmann::ordered_json to_json(const EvalReport& r);
nlohmann::ordered_json to_json(const MdlBreakdown& m);

// ---- lambda sweep -----------------------------------------------------------

struct SweepRow {
    double lambda = 0;
    std::size_t seeds = 0;
    double dictionary_size = 0;           // mean over seeds
    double mean_representation_cost = 0;  // mean over seeds
    double trajectory_cover = 0;          // mean over seeds
    bool converged = true;                // relaxation converged
    bool is_default = false;              // lambda equals the default 0.1
};

// Flat learning per lambda on the corpus; the relaxation is solved once per
// lambda and rounded once per seed. Each seed yields the same dictionary as
// learn_flat with that seed.
std::vector<SweepRow> lambda_sweep(std::span<const Trajectory> trajs, std::size_t n_edges,
                                   std::span<const double> lambdas, std::span<const std::uint64_t> seeds,
                                   const LearnConfig& base);
void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows);

// Pairs of adjacent rows that break "cost non-increasing" and "size
// non-decreasing" in lambda, counted separately.
struct TrendCheck {
    int cost_inversions = 0;
    int size_inversions = 0;
};
TrendCheck check_trend(std::span<const SweepRow> rows);

// ---- partial reconstruction -------------------------------------------------

struct CurveRow {
    double keep_fraction = 0;
    std::size_t kept = 0;
    double edge_uncover_ratio = 0;
    double trajectory_cover = 0;
    double mean_representation_cost = 0;  // over trajectories still covered
};

// Pathlets ranked by how often the corpus decomposition uses them (ties by
// id); each row keeps the top ceil(f * size) of them.
std::vector<int> usage_ranking(const Dictionary& dict, std::span<const Trajectory> trajs);
std::vector<CurveRow> partial_reconstruction_curve(const Dictionary& dict, std::span<const Trajectory> trajs,
                                                   std::span<const double> keep_fractions);
void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows);

// ---- features ---------------------------------------------------------------

// sin(2 pi (60 h + m) / 1440). Throws ConfigError outside 0..23 / 0..59.
double time_encoding(int hours, int minutes);
// The cosine companion of time_encoding.
double time_encoding_cos(int hours, int minutes);

// Representation vector plus time-of-day channels when a departure is known.
nlohmann::ordered_json feature_row(const RepresentationVector& v, const std::optional<TimeOfDay>& departure,
                                   bool with_cosine, const RoadGraph* graph);

}  // namespace pathlet

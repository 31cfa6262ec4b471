#pragma once

// Subcommands of the pathlet tool. Each takes a fully parsed option struct,
// writes its artifacts and returns the process exit code; failures surface
// as exceptions derived from pathlet::Error.

#include "pathlet/learner.hpp"
#include "pathlet/synthetic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pathlet {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailed = 1,
    kExitNotConverged = 2,  // artifacts written, coverage guaranteed by repair
};

struct RunConfig {
    std::string graph_path;
    std::string trajectories_path;
    std::string output_dir;
    LearnConfig learn;
    int depth = 0;   // partition depth; 0 learns one flat level
    int levels = 0;  // levels to learn; 0 picks 1 when flat and 2 otherwise
    std::optional<std::uint64_t> seed;
    double test_fraction = 0.30;
    int min_length = 2;  // shorter trajectories are left out of the run
    std::size_t bound_samples = 1000;
    bool write_solutions = true;

    int effective_levels() const;
    void validate() const;  // throws ConfigError
    // Every setting except the output directory.
    nlohmann::ordered_json to_json() const;
    std::string hash() const;  // FNV-1a of to_json(), 16 hex digits
};

std::string fnv1a_hex(const std::string& bytes);

// Seeded uniform split; test receives round(test_fraction * n) indices.
struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};
Split split_indices(std::size_t n, double test_fraction, std::uint64_t seed);

int cmd_learn(const RunConfig& config);

struct EncodeOptions {
    std::string dictionary_path;
    std::string graph_path;
    std::string trajectories_path;
    std::string output_path;  // JSONL; a sibling .report.json gets the counts
    bool cosine = false;
    bool relaxed = false;     // cover by relaxation and rounding instead of the DP
    LearnConfig learn;        // solver and theta for relaxed encoding
    std::uint64_t seed = 0;
};
int cmd_encode(const EncodeOptions& options);

struct EvalOptions {
    std::string dictionary_path;
    std::string graph_path;
    std::string trajectories_path;
    std::string output_path;
};
int cmd_eval(const EvalOptions& options);

struct SweepOptions {
    RunConfig run;  // corpus paths, output directory, base learning settings
    std::vector<double> lambdas{0.01, 0.1, 1.0, 10.0};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
};
int cmd_sweep(const SweepOptions& options);

struct CurveOptions {
    std::string dictionary_path;
    std::string graph_path;
    std::string trajectories_path;
    std::string output_path;
    std::vector<double> keep_fractions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};
int cmd_curve(const CurveOptions& options);

struct GeoJsonOptions {
    std::string dictionary_path;
    std::string graph_path;
    std::string output_path;
    std::size_t top_k = 300;
};
int cmd_export_geojson(const GeoJsonOptions& options);

struct SyntheticOptions {
    SyntheticConfig corpus;
    std::string output_dir;
};
int cmd_gen_synthetic(const SyntheticOptions& options);

struct BoundOptions {
    RunConfig run;  // corpus, output directory, lambda, theta and seed
    std::size_t samples = 10000;
};
int cmd_verify_bound(const BoundOptions& options);

// {"error": kind, "message": what} for the failure reports of exit code 1.
nlohmann::ordered_json error_json(const std::exception& e);

}  // namespace pathlet

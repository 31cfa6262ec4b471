// pathlet: learn, apply and evaluate pathlet dictionaries on map-matched
// trajectories.
//
// Settings may come from a TOML file given with --config; a [learn] table
// configures the learn subcommand and so on. Command-line flags take
// precedence over the file.

#include "pathlet/commands.hpp"
#include "pathlet/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace pathlet;

namespace {

struct LearnFlags {
    std::string theta_mode = "quarter_ln2T";
    std::string smoothing = "logsumexp";
    bool no_prune = false;
    bool no_multipliers = false;
};

void add_corpus(CLI::App* cmd, RunConfig& run) {
    cmd->add_option("--graph", run.graph_path, "Road graph CSV")->required();
    cmd->add_option("--trajectories", run.trajectories_path, "Map-matched trajectories JSONL")->required();
}

void add_learning(CLI::App* cmd, RunConfig& run, LearnFlags& flags) {
    SolverConfig& s = run.learn.solver;
    cmd->add_option("--lambda", s.lambda, "Weight of the representation cost")->capture_default_str();
    cmd->add_option("--theta-mode", flags.theta_mode, "Rounding scale")
        ->check(CLI::IsMember({"quarter_ln2T", "ln2T", "explicit"}))
        ->capture_default_str();
    cmd->add_option("--theta", run.learn.theta_value, "Rounding scale for --theta-mode explicit");
    cmd->add_option("--c-min", run.learn.c_min, "Minimum candidate support")->capture_default_str();
    cmd->add_option("--max-len", run.learn.max_len, "Maximum candidate length")->capture_default_str();
    cmd->add_option("--max-attempts", run.learn.max_attempts, "Rounding attempts")->capture_default_str();
    cmd->add_flag("--no-prune", flags.no_prune, "Keep every rounded pathlet");
    cmd->add_option("--learning-rate", s.learning_rate, "Initial gradient step")->capture_default_str();
    cmd->add_option("--tolerance", s.tolerance, "Objective change that stops the solver")->capture_default_str();
    cmd->add_option("--mu", s.mu, "Initial penalty weight")->capture_default_str();
    cmd->add_option("--mu-interval", s.mu_interval, "Iterations between penalty increases")->capture_default_str();
    cmd->add_option("--mu-growth", s.mu_growth, "Penalty growth factor")->capture_default_str();
    cmd->add_option("--mu-max", s.mu_max, "Penalty cap")->capture_default_str();
    cmd->add_flag("--no-multipliers", flags.no_multipliers, "Pure penalty method");
    cmd->add_option("--smoothing", flags.smoothing, "Smooth maximum")
        ->check(CLI::IsMember({"logsumexp", "pnorm"}))
        ->capture_default_str();
    cmd->add_option("--temperature", s.smoothing.temperature, "Log-sum-exp temperature")->capture_default_str();
    cmd->add_option("--pnorm-p", s.smoothing.p, "Exponent of the p-norm smoothing")->capture_default_str();
    cmd->add_option("--max-iters", s.max_iters, "Solver iteration cap")->capture_default_str();
}

void apply(RunConfig& run, const LearnFlags& flags) {
    run.learn.theta_mode = theta_mode_from_string(flags.theta_mode);
    run.learn.prune = !flags.no_prune;
    run.learn.solver.multipliers = !flags.no_multipliers;
    run.learn.solver.smoothing.kind =
        flags.smoothing == "pnorm" ? Smoothing::Kind::PNorm : Smoothing::Kind::LogSumExp;
}

void report_error(const std::exception& e, const std::string& out_dir) {
    const auto j = error_json(e);
    std::cerr << j.dump() << '\n';
    if (out_dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream(std::filesystem::path(out_dir) / "error.json") << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pathlet dictionary learning for map-matched trajectories"};
    app.set_config("--config", "", "TOML file with default settings");
    app.require_subcommand(1);

    RunConfig learn_run;
    LearnFlags learn_flags;
    std::uint64_t learn_seed = 0;
    auto* learn = app.add_subcommand("learn", "Learn a dictionary and write a run directory");
    add_corpus(learn, learn_run);
    learn->add_option("--out", learn_run.output_dir, "Run directory")->required();
    learn->add_option("--seed", learn_seed, "Random seed")->required();
    learn->add_option("--depth", learn_run.depth, "Partition depth, 0 for flat learning")->capture_default_str();
    learn->add_option("--levels", learn_run.levels, "Levels to learn (default 1 flat, 2 otherwise)");
    learn->add_option("--test-fraction", learn_run.test_fraction, "Held-out share of trajectories")
        ->capture_default_str();
    learn->add_option("--min-length", learn_run.min_length, "Shortest trajectory (edges) used in the run")
        ->capture_default_str();
    learn->add_option("--bound-samples", learn_run.bound_samples, "Samples for the rounding bound check")
        ->capture_default_str();
    learn->add_flag("!--no-solutions", learn_run.write_solutions, "Skip the solution matrix files");
    add_learning(learn, learn_run, learn_flags);

    EncodeOptions enc;
    RunConfig enc_run;
    LearnFlags enc_flags;
    auto* encode = app.add_subcommand("encode", "Encode trajectories over a learned dictionary");
    encode->add_option("--dictionary", enc.dictionary_path, "dictionary.json of a run")->required();
    encode->add_option("--graph", enc.graph_path, "Road graph CSV")->required();
    encode->add_option("--trajectories", enc.trajectories_path, "Trajectories JSONL")->required();
    encode->add_option("--out", enc.output_path, "Output JSONL")->required();
    encode->add_flag("--cosine", enc.cosine, "Add the cosine time-of-day channel");
    encode->add_flag("--relaxed", enc.relaxed, "Cover by relaxation and rounding");
    encode->add_option("--seed", enc.seed, "Seed for --relaxed");
    add_learning(encode, enc_run, enc_flags);

    EvalOptions ev;
    auto* eval = app.add_subcommand("eval", "Evaluate a dictionary on a trajectory set");
    eval->add_option("--dictionary", ev.dictionary_path, "dictionary.json of a run")->required();
    eval->add_option("--graph", ev.graph_path, "Road graph CSV")->required();
    eval->add_option("--trajectories", ev.trajectories_path, "Trajectories JSONL")->required();
    eval->add_option("--out", ev.output_path, "Report JSON")->required();

    SweepOptions sw;
    LearnFlags sw_flags;
    auto* sweep = app.add_subcommand("sweep", "Dictionary size and cost across lambda values");
    add_corpus(sweep, sw.run);
    sweep->add_option("--out", sw.run.output_dir, "Output directory")->required();
    sweep->add_option("--lambdas", sw.lambdas, "Lambda values")->delimiter(',')->capture_default_str();
    sweep->add_option("--seeds", sw.seeds, "Rounding seeds")->delimiter(',')->capture_default_str();
    add_learning(sweep, sw.run, sw_flags);

    CurveOptions cv;
    auto* curve = app.add_subcommand("curve", "Uncovered share when keeping only the most used pathlets");
    curve->add_option("--dictionary", cv.dictionary_path, "dictionary.json of a run")->required();
    curve->add_option("--graph", cv.graph_path, "Road graph CSV")->required();
    curve->add_option("--trajectories", cv.trajectories_path, "Trajectories JSONL")->required();
    curve->add_option("--out", cv.output_path, "Output CSV")->required();
    curve->add_option("--fractions", cv.keep_fractions, "Keep fractions")->delimiter(',')->capture_default_str();

    GeoJsonOptions gj;
    auto* geo = app.add_subcommand("export-geojson", "Most supported pathlets as GeoJSON lines");
    geo->add_option("--dictionary", gj.dictionary_path, "dictionary.json of a run")->required();
    geo->add_option("--graph", gj.graph_path, "Road graph CSV with coordinates")->required();
    geo->add_option("--out", gj.output_path, "Output GeoJSON")->required();
    geo->add_option("--top-k", gj.top_k, "Number of pathlets")->capture_default_str();

    SyntheticOptions syn;
    bool no_departures = false;
    auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic grid corpus");
    gen->add_option("--out", syn.output_dir, "Output directory")->required();
    gen->add_option("--grid", syn.corpus.grid, "Nodes per grid side")->capture_default_str();
    gen->add_option("--spacing", syn.corpus.spacing, "Distance between grid nodes")->capture_default_str();
    gen->add_option("--corridors", syn.corpus.n_corridors, "Number of corridors")->capture_default_str();
    gen->add_option("--corridor-len", syn.corpus.corridor_len, "Edges per corridor")->capture_default_str();
    gen->add_option("--trajs", syn.corpus.n_trajs, "Number of trajectories")->capture_default_str();
    gen->add_option("--noise", syn.corpus.noise, "Maximum edges before and after the corridor")
        ->capture_default_str();
    gen->add_option("--seed", syn.corpus.seed, "Random seed")->required();
    gen->add_flag("--no-departures", no_departures, "Omit departure times");

    BoundOptions bo;
    LearnFlags bo_flags;
    std::uint64_t bound_seed = 0;
    auto* bound = app.add_subcommand("verify-bound", "Monte-Carlo check of the rounding guarantee");
    add_corpus(bound, bo.run);
    bound->add_option("--out", bo.run.output_dir, "Output directory")->required();
    bound->add_option("--seed", bound_seed, "Random seed")->required();
    bound->add_option("--samples", bo.samples, "Rounding samples")->capture_default_str();
    add_learning(bound, bo.run, bo_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    std::string out_dir;
    try {
        if (*learn) {
            out_dir = learn_run.output_dir;
            learn_run.seed = learn_seed;
            apply(learn_run, learn_flags);
            return cmd_learn(learn_run);
        }
        if (*encode) {
            apply(enc_run, enc_flags);
            enc.learn = enc_run.learn;
            return cmd_encode(enc);
        }
        if (*eval) return cmd_eval(ev);
        if (*sweep) {
            out_dir = sw.run.output_dir;
            apply(sw.run, sw_flags);
            return cmd_sweep(sw);
        }
        if (*curve) return cmd_curve(cv);
        if (*geo) return cmd_export_geojson(gj);
        if (*gen) {
            out_dir = syn.output_dir;
            syn.corpus.departures = !no_departures;
            return cmd_gen_synthetic(syn);
        }
        if (*bound) {
            out_dir = bo.run.output_dir;
            bo.run.seed = bound_seed;
            apply(bo.run, bo_flags);
            return cmd_verify_bound(bo);
        }
    } catch (const std::exception& e) {
        report_error(e, out_dir);
        return kExitFailed;
    }
    return kExitFailed;
}

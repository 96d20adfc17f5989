#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "semloc/landmark.hpp"
#include "semloc/model_gateway.hpp"
#include "semloc/similarity.hpp"

namespace semloc {

/// One optional per setting so the flag, environment, and config-file
/// layers can be merged by precedence before defaults apply.
struct ConfigLayer {
    std::optional<std::string> backend;
    std::optional<std::string> cache_dir;
    std::optional<std::string> vocabulary;
    std::optional<std::string> extra_labels;
    std::optional<int> top_k;
    std::optional<int> completions;
    std::optional<double> theta;
    std::optional<double> landmark_threshold;
    std::optional<unsigned> jobs;
};

struct RunConfig {
    std::string backend;  // "fixture:<path>" or an http(s) base URL
    std::optional<std::filesystem::path> cache_dir;
    std::optional<std::filesystem::path> vocabulary;
    std::optional<std::filesystem::path> extra_labels;
    int top_k = 5;
    int completions = 5;
    double theta = 0.75;
    double landmark_threshold = 0.1;  // meters
    unsigned jobs = 0;                // 0 = one worker per hardware thread
};

/// Reads SEMLOC_BACKEND, SEMLOC_CACHE, SEMLOC_VOCAB, SEMLOC_EXTRA_LABELS,
/// SEMLOC_K, SEMLOC_N, SEMLOC_THETA, SEMLOC_LANDMARK_THRESHOLD and
/// SEMLOC_JOBS. Unparseable numbers are input errors naming the variable.
ConfigLayer config_layer_from_env();

/// JSON object with the same settings under keys backend, cache, vocab,
/// extra_labels, k, n, theta, landmark_threshold, jobs.
ConfigLayer config_layer_from_file(const std::filesystem::path& path);

/// Precedence: flags > environment > config file > defaults. Validates the
/// merged result (k >= 1, n >= 1, theta in [0, 1), threshold >= 0).
RunConfig resolve_run_config(const ConfigLayer& flags,
                             const std::optional<std::filesystem::path>& config_file);

/// Builds the configured backend: "fixture:<path>" loads a recorded
/// fixture, http(s) URLs get the network client ("http:host:port"
/// shorthand accepted). The auth token is read from SEMLOC_API_TOKEN only.
/// A cache directory, when configured, wraps the backend write-through.
std::shared_ptr<ModelGateway> make_gateway(const RunConfig& config);

/// Worker count for a command: the configured jobs (or hardware
/// concurrency), capped by the HTTP in-flight limit when that backend is
/// selected.
unsigned effective_jobs(const RunConfig& config);

struct BuildDescriptorsArgs {
    std::filesystem::path manifest;
    std::filesystem::path output;
    bool keep_partial = false;
};

/// Builds one descriptor per manifest entry and writes the descriptor set.
/// Any per-image failure is reported on `err` and rethrown after the batch
/// finishes; with keep_partial the successful subset is still written.
void cmd_build_descriptors(const RunConfig& config, const BuildDescriptorsArgs& args,
                           std::ostream& err);

struct MatchArgs {
    std::filesystem::path query_descriptors;
    std::filesystem::path reference_descriptors;
    std::filesystem::path output;
    std::optional<std::filesystem::path> patch_scores;  // enables fusion
    std::optional<std::filesystem::path> landmarks;     // landmark report file
    LandmarkFilterMode landmark_mode = LandmarkFilterMode::intersect;
};

void cmd_match(const RunConfig& config, const MatchArgs& args);

struct LearnLandmarksArgs {
    std::filesystem::path query_descriptors;
    std::filesystem::path reference_descriptors;
    std::filesystem::path query_manifest;
    std::filesystem::path reference_manifest;
    std::filesystem::path output;
    EliminationMode elimination = EliminationMode::refill;
};

/// Writes the landmark report. An empty landmark set still writes the
/// report (for inspection) but exits with an invariant error advising a
/// lower threshold.
void cmd_learn_landmarks(const RunConfig& config, const LearnLandmarksArgs& args);

struct EvaluateArgs {
    std::filesystem::path matches;
    std::filesystem::path query_manifest;
    std::filesystem::path reference_manifest;
    std::optional<std::filesystem::path> output;  // JSON report
};

/// Prints the metrics table on `out`; also writes the JSON report when an
/// output path is given.
void cmd_evaluate(const RunConfig& config, const EvaluateArgs& args, std::ostream& out);

}  // namespace semloc

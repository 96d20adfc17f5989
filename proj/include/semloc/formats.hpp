#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "semloc/descriptor.hpp"
#include "semloc/evaluation.hpp"
#include "semloc/landmark.hpp"
#include "semloc/retrieval.hpp"

namespace semloc {

/// Canonical serialization: sorted object keys, two-space indent, trailing
/// newline, shortest round-trip number form. Identical values always yield
/// identical bytes.
std::string canonical_json(const nlohmann::json& value);

/// Parses a JSON document. Missing file or malformed JSON is an InputError
/// naming the path.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes canonical JSON atomically (temp file + rename in the target
/// directory).
void write_json_file(const std::filesystem::path& path, const nlohmann::json& value);

// Every reader validates the document against the format's invariants and
// every writer re-validates what it is about to serialize, so a file that
// was written by this module always reads back, and a file that reads back
// always writes byte-identically.

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

std::vector<ImageDescriptor> read_descriptors(const std::filesystem::path& path);
void write_descriptors(const std::filesystem::path& path,
                       const std::vector<ImageDescriptor>& descriptors);

PatchScoreTable read_patch_scores(const std::filesystem::path& path);
void write_patch_scores(const std::filesystem::path& path, const PatchScoreTable& table);

std::vector<MatchResult> read_matches(const std::filesystem::path& path);
void write_matches(const std::filesystem::path& path,
                   const std::vector<MatchResult>& matches);

LandmarkReport read_landmark_report(const std::filesystem::path& path);
void write_landmark_report(const std::filesystem::path& path, const LandmarkReport& report);

EvaluationReport read_evaluation_report(const std::filesystem::path& path);
void write_evaluation_report(const std::filesystem::path& path,
                             const EvaluationReport& report);

}  // namespace semloc

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semloc/retrieval.hpp"

namespace semloc {

struct Pose {
    Eigen::Vector3d position{0.0, 0.0, 0.0};          // meters, shared world frame
    std::optional<Eigen::Quaterniond> orientation;    // unit norm when present
};

struct ManifestEntry {
    std::string id;
    std::string image_path;
    Pose pose;
    std::string room;  // ground-truth room label
};

/// Image references with poses and ground-truth room labels for one
/// trajectory. Entries keep file order; ids are unique.
class DatasetManifest {
public:
    static DatasetManifest from_entries(std::vector<ManifestEntry> entries);

    const std::vector<ManifestEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(const std::string& id) const { return index_.count(id) > 0; }

    /// Throws InputError for unknown ids.
    const ManifestEntry& at(const std::string& id) const;

private:
    std::vector<ManifestEntry> entries_;
    std::map<std::string, std::size_t> index_;
};

/// Euclidean distance between the two positions, in meters. Orientation is
/// ignored.
double translation_error(const Pose& a, const Pose& b);

struct MetricRow {
    double mean_translation_error = 0.0;  // meters
    double room_detection_rate = 0.0;     // fraction in [0, 1]
    int query_count = 0;
};

struct QueryOutcome {
    std::string query_id;
    std::string reference_id;
    std::string room;  // query's GT room
    double translation_error;
    bool room_correct;  // retrieved reference shares the query's GT room
};

struct EvaluationReport {
    MetricRow total;
    std::map<std::string, MetricRow> per_room;  // keyed by query GT room
    std::vector<QueryOutcome> per_query;
};

/// Scores match results against the manifests: per-query translation error
/// and room correctness, aggregated per query GT room and in total.
EvaluationReport evaluate(const std::vector<MatchResult>& matches,
                          const DatasetManifest& query_manifest,
                          const DatasetManifest& reference_manifest);

/// Plain-text table with one row per room plus a total row.
std::string render_table(const EvaluationReport& report);

}  // namespace semloc

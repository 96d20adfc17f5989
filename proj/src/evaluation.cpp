#include "semloc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "semloc/error.hpp"

namespace semloc {

DatasetManifest DatasetManifest::from_entries(std::vector<ManifestEntry> entries) {
    DatasetManifest manifest;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const ManifestEntry& e = entries[i];
        if (e.id.empty()) {
            throw InputError("manifest entry " + std::to_string(i) + " has an empty id");
        }
        if (e.room.empty()) {
            throw InputError("manifest entry \"" + e.id + "\" lacks a room label");
        }
        if (!e.pose.position.allFinite()) {
            throw InputError("manifest entry \"" + e.id + "\" has a non-finite position");
        }
        if (e.pose.orientation) {
            const double norm = e.pose.orientation->norm();
            if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
                throw InputError("manifest entry \"" + e.id + "\" has a non-unit quaternion (norm " +
                                 std::to_string(norm) + ")");
            }
        }
        if (!manifest.index_.emplace(e.id, i).second) {
            throw InputError("duplicate image id in manifest: \"" + e.id + "\"");
        }
    }
    manifest.entries_ = std::move(entries);
    return manifest;
}

const ManifestEntry& DatasetManifest::at(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw InputError("unknown image id: \"" + id + "\"");
    }
    return entries_[it->second];
}

double translation_error(const Pose& a, const Pose& b) {
    return (a.position - b.position).norm();
}

EvaluationReport evaluate(const std::vector<MatchResult>& matches,
                          const DatasetManifest& query_manifest,
                          const DatasetManifest& reference_manifest) {
    EvaluationReport report;
    report.per_query.reserve(matches.size());

    std::map<std::string, std::pair<double, int>> room_error_correct;  // room -> (sum, correct)
    std::map<std::string, int> room_counts;
    double error_sum = 0.0;
    int correct = 0;

    for (const auto& m : matches) {
        const ManifestEntry& query = query_manifest.at(m.query_id);
        const ManifestEntry& reference = reference_manifest.at(m.reference_id);
        const double error = translation_error(query.pose, reference.pose);
        const bool room_correct = query.room == reference.room;

        report.per_query.push_back({m.query_id, m.reference_id, query.room, error, room_correct});
        error_sum += error;
        correct += room_correct ? 1 : 0;
        auto& [sum, ok] = room_error_correct[query.room];
        sum += error;
        ok += room_correct ? 1 : 0;
        room_counts[query.room] += 1;
    }

    const int n = static_cast<int>(matches.size());
    report.total.query_count = n;
    if (n > 0) {
        report.total.mean_translation_error = error_sum / n;
        report.total.room_detection_rate = static_cast<double>(correct) / n;
    }
    for (const auto& [room, stats] : room_error_correct) {
        const int count = room_counts[room];
        report.per_room[room] = {stats.first / count, static_cast<double>(stats.second) / count,
                                 count};
    }
    return report;
}

std::string render_table(const EvaluationReport& report) {
    std::size_t room_width = std::string("total").size();
    for (const auto& [room, row] : report.per_room) {
        (void)row;
        room_width = std::max(room_width, room.size());
    }

    std::ostringstream out;
    auto emit = [&](const std::string& room, const MetricRow& row) {
        out << std::left << std::setw(static_cast<int>(room_width) + 2) << room << std::right
            << std::setw(8) << row.query_count << std::fixed << std::setprecision(3)
            << std::setw(16) << row.mean_translation_error << std::setprecision(1)
            << std::setw(19) << row.room_detection_rate * 100.0 << '\n';
    };
    out << std::left << std::setw(static_cast<int>(room_width) + 2) << "room" << std::right
        << std::setw(8) << "queries" << std::setw(16) << "mean error [m]" << std::setw(19)
        << "room detection [%]" << '\n';
    for (const auto& [room, row] : report.per_room) {
        emit(room, row);
    }
    emit("total", report.total);
    return out.str();
}

}  // namespace semloc

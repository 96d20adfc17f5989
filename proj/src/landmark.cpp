#include "semloc/landmark.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "semloc/error.hpp"
#include "semloc/parallel.hpp"
#include "semloc/retrieval.hpp"

namespace semloc {

std::string to_string(EliminationMode mode) {
    return mode == EliminationMode::refill ? "refill" : "shrink";
}

EliminationMode elimination_mode_from_string(const std::string& text) {
    if (text == "refill") return EliminationMode::refill;
    if (text == "shrink") return EliminationMode::shrink;
    throw InputError("unknown elimination mode: " + text);
}

ImageDescriptor eliminate_label(const ImageDescriptor& descriptor,
                                const std::string& label,
                                EliminationMode mode) {
    ImageDescriptor out = descriptor;
    std::erase_if(out.score_map,
                  [&](const ScoredLabel& s) { return s.label == label; });
    if (mode == EliminationMode::shrink) {
        std::erase_if(out.top_objects,
                      [&](const ScoredLabel& s) { return s.label == label; });
        return out;
    }
    const std::size_t k = descriptor.top_objects.size();
    std::vector<ScoredLabel> rebuilt = out.score_map;
    std::stable_sort(rebuilt.begin(), rebuilt.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) {
                         return a.score > b.score;
                     });
    rebuilt.resize(std::min(k, rebuilt.size()));
    out.top_objects = std::move(rebuilt);
    return out;
}

namespace {

double mean_error(const std::vector<MatchResult>& matches,
                  const DatasetManifest& query_manifest,
                  const DatasetManifest& reference_manifest) {
    double sum = 0.0;
    for (const auto& m : matches) {
        sum += translation_error(query_manifest.at(m.query_id).pose,
                                 reference_manifest.at(m.reference_id).pose);
    }
    return sum / static_cast<double>(matches.size());
}

void require_full_score_maps(const std::vector<ImageDescriptor>& descriptors) {
    for (const auto& d : descriptors) {
        for (const auto& top : d.top_objects) {
            const bool present = std::any_of(
                d.score_map.begin(), d.score_map.end(),
                [&](const ScoredLabel& s) { return s.label == top.label; });
            if (!present) {
                throw InvariantError("descriptor " + d.image_id +
                                     " lacks a full score_map; rebuild "
                                     "descriptors before landmark learning");
            }
        }
    }
}

std::vector<std::string> collect_candidates(
    const std::vector<ImageDescriptor>& queries,
    const std::vector<ImageDescriptor>& references) {
    std::vector<std::string> candidates;
    std::set<std::string> seen;
    auto scan = [&](const std::vector<ImageDescriptor>& set) {
        for (const auto& d : set) {
            for (const auto& s : d.top_objects) {
                if (seen.insert(s.label).second) candidates.push_back(s.label);
            }
        }
    };
    scan(queries);
    scan(references);
    return candidates;
}

std::vector<ImageDescriptor> without_label(
    const std::vector<ImageDescriptor>& descriptors, const std::string& label,
    EliminationMode mode) {
    std::vector<ImageDescriptor> out;
    out.reserve(descriptors.size());
    for (const auto& d : descriptors) out.push_back(eliminate_label(d, label, mode));
    return out;
}

}  // namespace

LandmarkReport learn_landmarks(const std::vector<ImageDescriptor>& queries,
                               const std::vector<ImageDescriptor>& references,
                               const DatasetManifest& query_manifest,
                               const DatasetManifest& reference_manifest,
                               const LandmarkConfig& config) {
    if (!std::isfinite(config.error_reduction_threshold) ||
        config.error_reduction_threshold < 0.0) {
        throw InputError("error_reduction_threshold must be >= 0");
    }
    config.similarity.validate();
    require_full_score_maps(queries);
    require_full_score_maps(references);

    LandmarkReport report;
    report.error_reduction_threshold = config.error_reduction_threshold;
    report.baseline_error =
        mean_error(match(queries, references, config.similarity),
                   query_manifest, reference_manifest);

    const std::vector<std::string> candidates =
        collect_candidates(queries, references);
    report.per_label.resize(candidates.size());

    const unsigned jobs = config.jobs == 0 ? default_jobs() : config.jobs;
    parallel_for(candidates.size(), jobs, [&](std::size_t i) {
        const std::string& label = candidates[i];
        const auto q = without_label(queries, label, config.elimination);
        const auto r = without_label(references, label, config.elimination);
        const double error = mean_error(match(q, r, config.similarity),
                                        query_manifest, reference_manifest);
        report.per_label[i] = {label, error, error - report.baseline_error};
    });

    std::sort(report.per_label.begin(), report.per_label.end(),
              [](const LabelImpact& a, const LabelImpact& b) {
                  if (a.error_reduction != b.error_reduction) {
                      return a.error_reduction > b.error_reduction;
                  }
                  return a.label < b.label;
              });
    for (const auto& impact : report.per_label) {
        if (impact.error_reduction >= config.error_reduction_threshold) {
            report.landmark_set.push_back(impact.label);
        }
    }
    return report;
}

SimilarityConfig apply_landmark_filter(SimilarityConfig base,
                                       const LandmarkReport& report) {
    if (report.landmark_set.empty()) {
        throw InvariantError(
            "landmark set is empty; matching restricted to zero labels is "
            "meaningless, lower the error_reduction_threshold");
    }
    base.landmark_filter.emplace(report.landmark_set.begin(),
                                 report.landmark_set.end());
    return base;
}

}  // namespace semloc

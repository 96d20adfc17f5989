#include "semloc/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string_view>
#include <utility>

#include "semloc/descriptor_pipeline.hpp"
#include "semloc/error.hpp"

namespace semloc {

void SimilarityConfig::validate() const {
    if (!(theta >= 0.0 && theta < 1.0)) {
        throw InputError("theta must lie in [0, 1), got " + std::to_string(theta));
    }
}

double threshold_renorm(double x, double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) {
        throw InputError("theta must lie in [0, 1), got " + std::to_string(theta));
    }
    return x > theta ? (x - theta) / (1.0 - theta) : 0.0;
}

std::vector<ScoredLabel> effective_objects(const ImageDescriptor& d,
                                           const SimilarityConfig& config) {
    if (!config.landmark_filter) {
        return d.top_objects;
    }
    const auto& filter = *config.landmark_filter;
    if (config.filter_mode == LandmarkFilterMode::reselect) {
        std::vector<ScoredLabel> restricted;
        for (const auto& entry : d.score_map) {
            if (filter.contains(entry.label)) restricted.push_back(entry);
        }
        const auto k = std::min(restricted.size(), d.top_objects.size());
        if (k == 0) return {};
        return select_top_objects(restricted, static_cast<int>(k));
    }
    std::vector<ScoredLabel> kept;
    for (const auto& entry : d.top_objects) {
        if (filter.contains(entry.label)) kept.push_back(entry);
    }
    return kept;
}

double object_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                         const SimilarityConfig& config) {
    const std::vector<ScoredLabel> objects_a = effective_objects(a, config);
    const std::vector<ScoredLabel> objects_b = effective_objects(b, config);

    // Collect shared-label ratios, then sum in label order: addition is not
    // associative in floating point, so a fixed term order keeps the result
    // bitwise identical under argument swap.
    std::vector<std::pair<std::string_view, double>> terms;
    for (const auto& la : objects_a) {
        auto it = std::find_if(objects_b.begin(), objects_b.end(),
                               [&](const ScoredLabel& lb) { return lb.label == la.label; });
        if (it == objects_b.end()) continue;
        const double lo = std::min(la.score, it->score);
        const double hi = std::max(la.score, it->score);
        if (hi > 0.0) terms.emplace_back(la.label, lo / hi);  // both zero contributes nothing
    }
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (const auto& term : terms) sum += term.second;
    return sum;
}

double room_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                       const SimilarityConfig& config) {
    if (a.room_embedding.size() != b.room_embedding.size()) {
        throw InputError("room embedding dimension mismatch: " +
                         std::to_string(a.room_embedding.size()) + " (\"" + a.image_id +
                         "\") vs " + std::to_string(b.room_embedding.size()) + " (\"" +
                         b.image_id + "\")");
    }
    const double dot = std::clamp(a.room_embedding.dot(b.room_embedding), -1.0, 1.0);
    return threshold_renorm(dot, config.theta);
}

SemanticScore semantic_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                                  const SimilarityConfig& config) {
    SemanticScore score;
    score.object_part = object_similarity(a, b, config);
    score.room_part = room_similarity(a, b, config);
    score.total = score.object_part + score.room_part;
    return score;
}

}  // namespace semloc

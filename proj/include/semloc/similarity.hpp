#pragma once

#include <optional>
#include <string>
#include <unordered_set>

#include "semloc/descriptor.hpp"

namespace semloc {

/// How a landmark set restricts the object labels entering the similarity.
///   intersect: keep top_objects that are landmarks (no refill; default)
///   reselect:  re-pick top-k from the score_map restricted to landmarks
enum class LandmarkFilterMode { intersect, reselect };

struct SimilarityConfig {
    double theta = 0.75;  // room-embedding similarity threshold, in [0, 1)
    std::optional<std::unordered_set<std::string>> landmark_filter;
    LandmarkFilterMode filter_mode = LandmarkFilterMode::intersect;

    void validate() const;
};

struct SemanticScore {
    double total = 0.0;        // object_part + room_part, exactly
    double object_part = 0.0;  // in [0, k]
    double room_part = 0.0;    // in [0, 1]
};

/// Thresholded renormalization: (x - theta) / (1 - theta) for x > theta,
/// else 0. Monotone and continuous on [0, 1] for theta < 1.
double threshold_renorm(double x, double theta);

/// Sum over shared object labels of min(s_i, s_j) / max(s_i, s_j). Shared
/// labels with both scores zero contribute 0. Empty intersection gives 0.
double object_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                         const SimilarityConfig& config = {});

/// threshold_renorm applied to the dot product of the two unit-norm room
/// embeddings (clamped to [-1, 1]). Throws InputError on dimension
/// mismatch.
double room_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                       const SimilarityConfig& config = {});

SemanticScore semantic_similarity(const ImageDescriptor& a, const ImageDescriptor& b,
                                  const SimilarityConfig& config = {});

/// Object labels (with scores) a descriptor contributes under the config's
/// landmark filter. Exposed for the retrieval engine and tests.
std::vector<ScoredLabel> effective_objects(const ImageDescriptor& d,
                                           const SimilarityConfig& config);

}  // namespace semloc

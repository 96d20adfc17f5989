#pragma once

#include <string>
#include <vector>

#include "semloc/model_gateway.hpp"

namespace semloc {

struct ScoredLabel {
    std::string label;
    double score;

    bool operator==(const ScoredLabel&) const = default;
};

/// Per-image semantic descriptor. The full score_map (every vocabulary
/// label, in vocabulary order) is kept alongside the top-k selection so
/// landmark elimination can re-derive top sets without new model calls.
struct ImageDescriptor {
    std::string image_id;
    // Full vocabulary coverage. Vocabulary order as built; serialized as a
    // JSON map, so label-sorted after a file round trip.
    std::vector<ScoredLabel> score_map;
    std::vector<ScoredLabel> top_objects;      // k entries, descending score
    std::string room_label;                    // best room candidate
    std::vector<ScoredLabel> room_candidates;  // generation order, with grounding scores
    Embedding room_embedding;                  // unit norm
};

}  // namespace semloc

#pragma once

#include <string>
#include <vector>

#include "semloc/descriptor.hpp"
#include "semloc/model_gateway.hpp"
#include "semloc/vocabulary.hpp"

namespace semloc {

struct DescriptorConfig {
    int top_k = 5;        // object labels kept per image
    int completions = 5;  // room candidates requested from the LLM
};

/// Grounding prompt for a label: "a photo of a <label>". The template is
/// literal; no article agreement is applied.
std::string object_prompt(const std::string& label);

/// Scores every vocabulary label against the image. Returns one entry per
/// label in vocabulary order. Gateway errors are annotated with the label.
std::vector<ScoredLabel> ground_objects(const ImageRef& image, const Vocabulary& vocab,
                                        ModelGateway& gateway);

/// The k highest-scoring labels, descending; ties resolve by score_map
/// (vocabulary) order. Throws InputError if fewer than k labels exist.
std::vector<ScoredLabel> select_top_objects(const std::vector<ScoredLabel>& score_map, int k);

/// LLM prompt asking for a room type given the detected objects, labels
/// comma-joined in descending-score order.
std::string build_room_prompt(const std::vector<ScoredLabel>& top_objects);

struct RoomClassification {
    std::string label;
    std::vector<ScoredLabel> candidates;  // generation order, grounding scores
    Embedding embedding;
};

/// Obtains room candidates from the LLM, re-scores each against the image
/// with the object prompt template, picks the highest (ties keep generation
/// order) and embeds the winner.
RoomClassification classify_room(const ImageRef& image,
                                 const std::vector<ScoredLabel>& top_objects,
                                 ModelGateway& gateway, int n);

/// Composes the three stages into a full descriptor. Deterministic under a
/// fixture backend; errors are annotated with the image id.
ImageDescriptor build_descriptor(const ImageRef& image, const Vocabulary& vocab,
                                 ModelGateway& gateway, const DescriptorConfig& config = {});

}  // namespace semloc

#include "semloc/descriptor_pipeline.hpp"

#include <algorithm>

#include "semloc/error.hpp"

namespace semloc {

std::string object_prompt(const std::string& label) {
    return "a photo of a " + label;
}

std::vector<ScoredLabel> ground_objects(const ImageRef& image, const Vocabulary& vocab,
                                        ModelGateway& gateway) {
    std::vector<ScoredLabel> score_map;
    score_map.reserve(vocab.size());
    for (const auto& entry : vocab.entries()) {
        try {
            score_map.push_back({entry.label, gateway.ground(image, object_prompt(entry.label))});
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(e.what()) + " (grounding label \"" + entry.label +
                                      "\")");
        }
    }
    return score_map;
}

std::vector<ScoredLabel> select_top_objects(const std::vector<ScoredLabel>& score_map, int k) {
    if (k < 1) {
        throw InputError("select_top_objects: k must be >= 1, got " + std::to_string(k));
    }
    if (score_map.size() < static_cast<std::size_t>(k)) {
        throw InputError("vocabulary too small: " + std::to_string(score_map.size()) +
                         " labels scored, need k=" + std::to_string(k));
    }
    std::vector<ScoredLabel> sorted = score_map;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const ScoredLabel& a, const ScoredLabel& b) { return a.score > b.score; });
    sorted.resize(static_cast<std::size_t>(k));
    return sorted;
}

std::string build_room_prompt(const std::vector<ScoredLabel>& top_objects) {
    if (top_objects.empty()) {
        throw InputError("build_room_prompt: no object labels");
    }
    std::string prompt = "I think I see a ";
    for (std::size_t i = 0; i < top_objects.size(); ++i) {
        if (i > 0) prompt += ", ";
        prompt += top_objects[i].label;
    }
    prompt += " here. Therefore, this place is most probably a";
    return prompt;
}

RoomClassification classify_room(const ImageRef& image,
                                 const std::vector<ScoredLabel>& top_objects,
                                 ModelGateway& gateway, int n) {
    const std::string prompt = build_room_prompt(top_objects);
    const CompletionSet completions = gateway.complete(prompt, n);

    RoomClassification result;
    result.candidates.reserve(completions.candidates.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < completions.candidates.size(); ++i) {
        const std::string& candidate = completions.candidates[i];
        const double score = gateway.ground(image, object_prompt(candidate));
        result.candidates.push_back({candidate, score});
        if (score > result.candidates[best].score) best = i;
    }
    result.label = result.candidates[best].label;
    result.embedding = gateway.embed(result.label);
    return result;
}

ImageDescriptor build_descriptor(const ImageRef& image, const Vocabulary& vocab,
                                 ModelGateway& gateway, const DescriptorConfig& config) {
    try {
        ImageDescriptor d;
        d.image_id = image.id;
        d.score_map = ground_objects(image, vocab, gateway);
        d.top_objects = select_top_objects(d.score_map, config.top_k);
        RoomClassification room = classify_room(image, d.top_objects, gateway,
                                                config.completions);
        d.room_label = std::move(room.label);
        d.room_candidates = std::move(room.candidates);
        d.room_embedding = std::move(room.embedding);
        return d;
    } catch (const Error& e) {
        throw Error(e.kind(), "descriptor build failed for image \"" + image.id +
                                  "\": " + e.what());
    }
}

}  // namespace semloc

#include "semloc/fixture_gateway.hpp"

#include <cmath>
#include <fstream>

#include "semloc/error.hpp"

namespace semloc {

namespace {

const nlohmann::json& require_object(const nlohmann::json& doc, const char* key,
                                     const std::string& where) {
    if (!doc.contains(key) || !doc.at(key).is_object()) {
        throw InputError(where + ": missing or non-object section \"" + key + "\"");
    }
    return doc.at(key);
}

}  // namespace

FixtureGateway FixtureGateway::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open fixture file: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("fixture file " + path.string() + " is not valid JSON: " + e.what());
    }
    return FixtureGateway(doc, "fixture:" + path.string());
}

FixtureGateway::FixtureGateway(const nlohmann::json& doc, std::string label)
    : identity_(std::move(label)) {
    if (!doc.is_object()) {
        throw InputError(identity_ + ": fixture document must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "grounding" && key != "completions" && key != "embeddings") {
            throw InputError(identity_ + ": unknown top-level key \"" + key + "\"");
        }
    }
    for (const auto& [key, value] : require_object(doc, "grounding", identity_).items()) {
        if (key.find(kKeySeparator) == std::string::npos) {
            throw InputError(identity_ + ": grounding key lacks separator: \"" + key + "\"");
        }
        if (!value.is_number()) {
            throw InputError(identity_ + ": grounding value for \"" + key + "\" is not a number");
        }
        const double score = value.get<double>();
        if (!(score >= 0.0 && score <= 1.0)) {
            throw InputError(identity_ + ": grounding score " + std::to_string(score) +
                             " outside [0, 1] for key \"" + key + "\"");
        }
        grounding_.emplace(key, score);
    }
    for (const auto& [prompt, value] : require_object(doc, "completions", identity_).items()) {
        if (!value.is_array()) {
            throw InputError(identity_ + ": completions for \"" + prompt + "\" is not an array");
        }
        std::vector<std::string> texts;
        for (const auto& item : value) {
            if (!item.is_string()) {
                throw InputError(identity_ + ": non-string completion for \"" + prompt + "\"");
            }
            texts.push_back(item.get<std::string>());
        }
        completions_.emplace(prompt, std::move(texts));
    }
    Eigen::Index dim = -1;
    for (const auto& [text, value] : require_object(doc, "embeddings", identity_).items()) {
        if (!value.is_array() || value.empty()) {
            throw InputError(identity_ + ": embedding for \"" + text +
                             "\" is not a non-empty array");
        }
        Embedding v(value.size());
        for (std::size_t i = 0; i < value.size(); ++i) {
            if (!value[i].is_number()) {
                throw InputError(identity_ + ": non-numeric embedding component for \"" + text +
                                 "\"");
            }
            v[static_cast<Eigen::Index>(i)] = value[i].get<double>();
        }
        if (dim < 0) {
            dim = v.size();
        } else if (v.size() != dim) {
            throw InputError(identity_ + ": embedding dimension mismatch for \"" + text + "\" (" +
                             std::to_string(v.size()) + " vs " + std::to_string(dim) + ")");
        }
        embeddings_.emplace(text, std::move(v));
    }
}

double FixtureGateway::ground(const ImageRef& image, const std::string& prompt) {
    if (prompt.empty()) {
        throw InputError("ground: empty prompt for image \"" + image.id + "\"");
    }
    auto it = grounding_.find(image.id + kKeySeparator + prompt);
    if (it == grounding_.end()) {
        throw BackendError("fixture miss: no grounding entry for image \"" + image.id +
                           "\" prompt \"" + prompt + "\"");
    }
    return it->second;
}

CompletionSet FixtureGateway::complete(const std::string& prompt, int n) {
    if (n < 1) {
        throw InputError("complete: n must be >= 1, got " + std::to_string(n));
    }
    auto it = completions_.find(prompt);
    if (it == completions_.end()) {
        throw BackendError("fixture miss: no completions entry for prompt \"" + prompt + "\"");
    }
    return make_completion_set(it->second, n, prompt);
}

Embedding FixtureGateway::embed(const std::string& text) {
    if (text.empty()) {
        throw InputError("embed: empty text");
    }
    auto it = embeddings_.find(text);
    if (it == embeddings_.end()) {
        throw BackendError("fixture miss: no embedding entry for text \"" + text + "\"");
    }
    return normalize_embedding(it->second, text);
}

}  // namespace semloc

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "semloc/model_gateway.hpp"

namespace semloc {

/// Recorded model responses: a deterministic stand-in for live inference.
/// Keys are exact strings, a miss is an error. Read-only after load, so
/// concurrent access needs no synchronization.
class FixtureGateway : public ModelGateway {
public:
    /// Key separator between image id and prompt in the grounding section.
    static constexpr char kKeySeparator = '\x1f';

    static FixtureGateway from_file(const std::filesystem::path& path);

    /// Parses a fixture document directly; `label` becomes the identity.
    FixtureGateway(const nlohmann::json& doc, std::string label);

    double ground(const ImageRef& image, const std::string& prompt) override;
    CompletionSet complete(const std::string& prompt, int n) override;
    Embedding embed(const std::string& text) override;
    std::string identity() const override { return identity_; }

private:
    std::string identity_;
    std::map<std::string, double> grounding_;  // "<image_id>\x1f<prompt>" -> score
    std::map<std::string, std::vector<std::string>> completions_;
    std::map<std::string, Embedding> embeddings_;
};

}  // namespace semloc

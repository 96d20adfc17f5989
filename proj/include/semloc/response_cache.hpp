#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "semloc/model_gateway.hpp"

namespace semloc {

/// Write-through persistent cache around any gateway. Records live as
/// content-addressed JSON files keyed on a stable hash of (capability,
/// image-id-or-text, prompt, backend identity), so a cache directory can be
/// reused across runs. Concurrent readers are safe; writes go through a
/// temp file plus atomic rename. Two concurrent misses for the same key may
/// both hit the backend; responses for identical keys are identical by
/// contract, so the last write wins harmlessly.
class CachedGateway : public ModelGateway {
public:
    CachedGateway(std::shared_ptr<ModelGateway> inner, std::filesystem::path directory);

    double ground(const ImageRef& image, const std::string& prompt) override;
    CompletionSet complete(const std::string& prompt, int n) override;
    Embedding embed(const std::string& text) override;
    std::string identity() const override { return inner_->identity(); }

    /// Stable 64-bit FNV-1a hash, hex-encoded; exposed for tests.
    static std::string hash_key(const std::string& key);

private:
    struct Record {
        std::string capability;
        std::string subject;
        std::string prompt;
        nlohmann::json response;
    };

    std::filesystem::path record_path(const std::string& key) const;
    std::optional<nlohmann::json> lookup(const Record& expected, const std::string& key) const;
    void store(const Record& record, const std::string& key) const;

    std::shared_ptr<ModelGateway> inner_;
    std::filesystem::path directory_;
};

}  // namespace semloc

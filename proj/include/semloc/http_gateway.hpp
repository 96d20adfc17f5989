#pragma once

#include <chrono>
#include <mutex>
#include <semaphore>
#include <string>

#include <json.hpp>

#include "semloc/model_gateway.hpp"

namespace semloc {

struct HttpGatewayConfig {
    std::string base_url;      // e.g. "http://localhost:8080"
    std::string auth_token;    // sent as "Authorization: Bearer <token>" when non-empty
    int max_retries = 3;       // retries after the initial attempt, transient failures only
    std::chrono::milliseconds initial_backoff{250};  // doubled per retry
    std::chrono::seconds timeout{30};                // per-request connect/read/write timeout
    int max_in_flight = 4;
};

/// Generic inference-service client. All three capabilities are JSON over
/// POST: /ground {image, prompt} -> {score}, /complete {prompt, n} ->
/// {texts}, /embed {text} -> {vector}.
///
/// Raw grounding scores are treated as cosine similarities and mapped to
/// [0, 1] via (c+1)/2. Transient failures (connection errors, 408, 429,
/// 5xx) are retried with exponential backoff; other failures and malformed
/// bodies error immediately. A semaphore bounds concurrent requests.
class HttpGateway : public ModelGateway {
public:
    explicit HttpGateway(HttpGatewayConfig config);

    double ground(const ImageRef& image, const std::string& prompt) override;
    CompletionSet complete(const std::string& prompt, int n) override;
    Embedding embed(const std::string& text) override;
    std::string identity() const override { return "http:" + config_.base_url; }

private:
    nlohmann::json post(const std::string& endpoint, const nlohmann::json& body,
                        const std::string& context);

    HttpGatewayConfig config_;
    std::counting_semaphore<> slots_;
    std::mutex dim_mutex_;
    Eigen::Index embedding_dim_ = -1;
};

}  // namespace semloc

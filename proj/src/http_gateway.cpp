#include "semloc/http_gateway.hpp"

#include <thread>

#include <httplib.h>

#include "semloc/error.hpp"

namespace semloc {

namespace {

bool transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

HttpGateway::HttpGateway(HttpGatewayConfig config)
    : config_(std::move(config)), slots_(std::max(1, config_.max_in_flight)) {
    if (config_.base_url.empty()) {
        throw InputError("http backend: base URL is empty");
    }
}

nlohmann::json HttpGateway::post(const std::string& endpoint, const nlohmann::json& body,
                                 const std::string& context) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
    } release{slots_};

    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!config_.auth_token.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.auth_token);
    }

    std::string last_failure;
    auto backoff = config_.initial_backoff;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout);
        client.set_read_timeout(config_.timeout);
        client.set_write_timeout(config_.timeout);

        auto res = client.Post(endpoint, headers, payload, "application/json");
        if (!res) {
            last_failure = "connection failure (" + httplib::to_string(res.error()) + ")";
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            std::string failure = "status " + std::to_string(res->status);
            if (!transient_status(res->status)) {
                throw BackendError("http backend " + endpoint + " failed (" + failure + ") for " +
                                   context);
            }
            last_failure = std::move(failure);
            continue;
        }
        try {
            return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw BackendError("http backend " + endpoint + " returned malformed JSON for " +
                               context + ": " + e.what());
        }
    }
    throw BackendError("http backend " + endpoint + " failed after " +
                       std::to_string(config_.max_retries + 1) + " attempts for " + context +
                       ": " + last_failure);
}

double HttpGateway::ground(const ImageRef& image, const std::string& prompt) {
    if (prompt.empty()) {
        throw InputError("ground: empty prompt for image \"" + image.id + "\"");
    }
    const std::string context = "image \"" + image.id + "\" prompt \"" + prompt + "\"";
    nlohmann::json body{{"image", image.path.empty() ? image.id : image.path},
                        {"prompt", prompt}};
    nlohmann::json res = post("/ground", body, context);
    if (!res.is_object() || !res.contains("score") || !res["score"].is_number()) {
        throw BackendError("http backend /ground response lacks numeric \"score\" for " + context);
    }
    return cosine_to_unit_interval(res["score"].get<double>());
}

CompletionSet HttpGateway::complete(const std::string& prompt, int n) {
    if (n < 1) {
        throw InputError("complete: n must be >= 1, got " + std::to_string(n));
    }
    const std::string context = "prompt \"" + prompt + "\"";
    nlohmann::json res = post("/complete", {{"prompt", prompt}, {"n", n}}, context);
    if (!res.is_object() || !res.contains("texts") || !res["texts"].is_array()) {
        throw BackendError("http backend /complete response lacks \"texts\" array for " + context);
    }
    std::vector<std::string> raw;
    for (const auto& item : res["texts"]) {
        if (!item.is_string()) {
            throw BackendError("http backend /complete returned a non-string text for " + context);
        }
        raw.push_back(item.get<std::string>());
    }
    return make_completion_set(std::move(raw), n, prompt);
}

Embedding HttpGateway::embed(const std::string& text) {
    if (text.empty()) {
        throw InputError("embed: empty text");
    }
    const std::string context = "text \"" + text + "\"";
    nlohmann::json res = post("/embed", {{"text", text}}, context);
    if (!res.is_object() || !res.contains("vector") || !res["vector"].is_array() ||
        res["vector"].empty()) {
        throw BackendError("http backend /embed response lacks non-empty \"vector\" for " +
                           context);
    }
    Embedding v(res["vector"].size());
    for (std::size_t i = 0; i < res["vector"].size(); ++i) {
        if (!res["vector"][i].is_number()) {
            throw BackendError("http backend /embed returned a non-numeric component for " +
                               context);
        }
        v[static_cast<Eigen::Index>(i)] = res["vector"][i].get<double>();
    }
    {
        std::lock_guard<std::mutex> lock(dim_mutex_);
        if (embedding_dim_ < 0) {
            embedding_dim_ = v.size();
        } else if (v.size() != embedding_dim_) {
            throw BackendError("http backend /embed dimension changed from " +
                               std::to_string(embedding_dim_) + " to " + std::to_string(v.size()) +
                               " for " + context);
        }
    }
    return normalize_embedding(std::move(v), text);
}

}  // namespace semloc

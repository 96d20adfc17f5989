#include "semloc/response_cache.hpp"

#include <atomic>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <thread>

#include "semloc/error.hpp"

namespace semloc {

namespace {

constexpr char kSep = '\x1f';

std::string make_key(const std::string& capability, const std::string& subject,
                     const std::string& prompt, const std::string& backend) {
    std::string key;
    key.reserve(capability.size() + subject.size() + prompt.size() + backend.size() + 3);
    key += capability;
    key += kSep;
    key += subject;
    key += kSep;
    key += prompt;
    key += kSep;
    key += backend;
    return key;
}

std::string describe_key(const std::string& capability, const std::string& subject,
                         const std::string& prompt) {
    std::string desc = capability + " \"" + subject + "\"";
    if (!prompt.empty()) desc += " prompt \"" + prompt + "\"";
    return desc;
}

}  // namespace

CachedGateway::CachedGateway(std::shared_ptr<ModelGateway> inner, std::filesystem::path directory)
    : inner_(std::move(inner)), directory_(std::move(directory)) {
    std::error_code ec;
    std::filesystem::create_directories(directory_, ec);
    if (ec || !std::filesystem::is_directory(directory_)) {
        throw InputError("cache directory is not writable: " + directory_.string());
    }
}

std::string CachedGateway::hash_key(const std::string& key) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::filesystem::path CachedGateway::record_path(const std::string& key) const {
    return directory_ / (hash_key(key) + ".json");
}

std::optional<nlohmann::json> CachedGateway::lookup(const Record& expected,
                                                    const std::string& key) const {
    const auto path = record_path(key);
    std::ifstream in(path);
    if (!in) return std::nullopt;

    const std::string desc = describe_key(expected.capability, expected.subject, expected.prompt);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvariantError("cache corruption at " + path.string() + " for " + desc + ": " +
                             e.what());
    }
    if (!doc.is_object() || doc.value("capability", "") != expected.capability ||
        doc.value("subject", "") != expected.subject ||
        doc.value("prompt", "") != expected.prompt ||
        doc.value("backend", "") != inner_->identity() || !doc.contains("response")) {
        throw InvariantError("cache corruption at " + path.string() + ": record does not match " +
                             desc);
    }
    return doc["response"];
}

void CachedGateway::store(const Record& record, const std::string& key) const {
    nlohmann::json doc{{"backend", inner_->identity()},
                       {"capability", record.capability},
                       {"prompt", record.prompt},
                       {"response", record.response},
                       {"subject", record.subject}};

    static std::atomic<std::uint64_t> counter{0};
    std::ostringstream tmp_name;
    tmp_name << hash_key(key) << ".tmp." << std::this_thread::get_id() << "."
             << counter.fetch_add(1);
    const auto tmp_path = directory_ / tmp_name.str();
    {
        std::ofstream out(tmp_path);
        if (!out) {
            throw InputError("cannot write cache record: " + tmp_path.string());
        }
        out << doc.dump(2) << '\n';
    }
    std::filesystem::rename(tmp_path, record_path(key));
}

double CachedGateway::ground(const ImageRef& image, const std::string& prompt) {
    Record record{"ground", image.id, prompt, {}};
    const std::string key = make_key(record.capability, record.subject, record.prompt,
                                     inner_->identity());
    if (auto hit = lookup(record, key)) {
        return hit->get<double>();
    }
    const double score = inner_->ground(image, prompt);
    record.response = score;
    store(record, key);
    return score;
}

CompletionSet CachedGateway::complete(const std::string& prompt, int n) {
    Record record{"complete", prompt, {}, {}};
    const std::string key = make_key(record.capability, record.subject, record.prompt,
                                     inner_->identity());
    if (auto hit = lookup(record, key)) {
        // Raw strings are cached; normalization and truncation to n happen
        // per call so one record serves any n.
        std::vector<std::string> raw = hit->get<std::vector<std::string>>();
        return make_completion_set(std::move(raw), n, prompt);
    }
    CompletionSet set = inner_->complete(prompt, n);
    record.response = set.raw;
    store(record, key);
    return set;
}

Embedding CachedGateway::embed(const std::string& text) {
    Record record{"embed", text, {}, {}};
    const std::string key = make_key(record.capability, record.subject, record.prompt,
                                     inner_->identity());
    if (auto hit = lookup(record, key)) {
        std::vector<double> components = hit->get<std::vector<double>>();
        return Eigen::Map<Embedding>(components.data(),
                                     static_cast<Eigen::Index>(components.size()));
    }
    Embedding e = inner_->embed(text);
    record.response = std::vector<double>(e.data(), e.data() + e.size());
    store(record, key);
    return e;
}

}  // namespace semloc

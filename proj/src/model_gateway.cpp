#include "semloc/model_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "semloc/error.hpp"
#include "semloc/vocabulary.hpp"

namespace semloc {

namespace {

bool is_terminal_punct(char c) {
    return c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':';
}

}  // namespace

std::string normalize_completion(std::string_view raw) {
    std::string s = normalize_label(raw);  // lowercase + trim + collapse whitespace
    while (!s.empty() && (is_terminal_punct(s.back()) || s.back() == ' ')) {
        s.pop_back();
    }
    for (const char* article : {"a ", "an ", "the "}) {
        if (s.starts_with(article)) {
            s.erase(0, std::string_view(article).size());
            break;
        }
    }
    return s;
}

std::vector<std::string> normalize_completions(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& r : raw) {
        std::string c = normalize_completion(r);
        if (c.empty()) continue;
        if (seen.insert(c).second) out.push_back(std::move(c));
    }
    return out;
}

CompletionSet make_completion_set(std::vector<std::string> raw, int n, const std::string& prompt) {
    CompletionSet set;
    set.candidates = normalize_completions(raw);
    set.raw = std::move(raw);
    if (set.candidates.empty()) {
        throw BackendError("no usable completion candidates for prompt \"" + prompt + "\"");
    }
    if (static_cast<int>(set.candidates.size()) > n) {
        set.candidates.resize(static_cast<std::size_t>(n));
    }
    return set;
}

Embedding normalize_embedding(Embedding v, const std::string& context) {
    const double norm = v.norm();
    if (norm == 0.0 || !std::isfinite(norm)) {
        throw BackendError("embedding for \"" + context + "\" cannot be normalized (norm " +
                           std::to_string(norm) + ")");
    }
    return v / norm;
}

double cosine_to_unit_interval(double c) {
    return std::clamp((c + 1.0) / 2.0, 0.0, 1.0);
}

}  // namespace semloc

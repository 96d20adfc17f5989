#include "semloc/vocabulary.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "semloc/error.hpp"

namespace semloc {

std::string normalize_label(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

Vocabulary Vocabulary::from_labels(const std::vector<std::string>& base,
                                   const std::vector<std::string>& user) {
    Vocabulary vocab;
    std::unordered_set<std::string> seen;
    auto append = [&](const std::vector<std::string>& labels, LabelSource source) {
        for (const auto& raw : labels) {
            std::string label = normalize_label(raw);
            if (label.empty()) {
                throw InputError("vocabulary label is empty after normalization: \"" + raw + "\"");
            }
            if (seen.insert(label).second) {
                vocab.entries_.push_back({std::move(label), source});
            }
        }
    };
    append(base, LabelSource::base);
    append(user, LabelSource::user);
    if (vocab.entries_.empty()) {
        throw InputError("vocabulary is empty");
    }
    return vocab;
}

std::vector<std::string> Vocabulary::labels() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.label);
    return out;
}

bool Vocabulary::contains(std::string_view label) const {
    const std::string needle = normalize_label(label);
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const Entry& e) { return e.label == needle; });
}

Vocabulary Vocabulary::without(std::string_view label) const {
    const std::string needle = normalize_label(label);
    auto it = std::find_if(entries_.begin(), entries_.end(),
                           [&](const Entry& e) { return e.label == needle; });
    if (it == entries_.end()) {
        throw InputError("label not in vocabulary: \"" + needle + "\"");
    }
    if (entries_.size() == 1) {
        throw InvariantError("removing \"" + needle + "\" would empty the vocabulary");
    }
    Vocabulary out;
    out.entries_.reserve(entries_.size() - 1);
    for (const auto& e : entries_) {
        if (e.label != needle) out.entries_.push_back(e);
    }
    return out;
}

std::vector<std::string> read_label_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open vocabulary file: " + path.string());
    }
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;  // blank
        if (line[first] == '#') continue;          // comment
        labels.push_back(line);
    }
    return labels;
}

Vocabulary load_vocabulary(const std::filesystem::path& base_path,
                           const std::optional<std::filesystem::path>& extension_path) {
    std::vector<std::string> base = read_label_file(base_path);
    std::vector<std::string> user;
    if (extension_path) {
        user = read_label_file(*extension_path);
    }
    return Vocabulary::from_labels(base, user);
}

}  // namespace semloc

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semloc {

enum class LabelSource { base, user };

/// Canonical label form: lowercase, trimmed, internal whitespace collapsed
/// to single spaces. All vocabulary and similarity lookups key on this form.
std::string normalize_label(std::string_view raw);

/// Ordered list of open-vocabulary object labels used for grounding.
/// Labels are unique after normalization; base labels precede user labels
/// and the relative file order is preserved. Immutable after construction.
class Vocabulary {
public:
    struct Entry {
        std::string label;
        LabelSource source;
    };

    /// Merges a base list with optional user extensions. Duplicates across
    /// the two lists keep the base entry; duplicates within a list keep the
    /// first occurrence. Throws InputError on empty labels or an empty
    /// merged result.
    static Vocabulary from_labels(const std::vector<std::string>& base,
                                  const std::vector<std::string>& user);

    const std::vector<Entry>& entries() const { return entries_; }
    std::vector<std::string> labels() const;
    std::size_t size() const { return entries_.size(); }
    bool contains(std::string_view label) const;

    /// Returns a copy without the given label (normalized before lookup).
    /// Throws InputError if the label is absent, InvariantError if removal
    /// would empty the vocabulary.
    Vocabulary without(std::string_view label) const;

    bool operator==(const Vocabulary&) const = default;

private:
    std::vector<Entry> entries_;
};

/// Reads one label per line; `#` begins a comment line, blank lines are
/// ignored. Throws InputError if the file is missing or unreadable.
std::vector<std::string> read_label_file(const std::filesystem::path& path);

/// Loads the base label file plus an optional extension file and merges
/// them into one vocabulary.
Vocabulary load_vocabulary(const std::filesystem::path& base_path,
                           const std::optional<std::filesystem::path>& extension_path = {});

}  // namespace semloc

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace semloc {

/// Room-label embedding. Gateway implementations return unit-norm vectors;
/// all embeddings produced by one backend share the same dimension.
using Embedding = Eigen::VectorXd;

struct ImageRef {
    std::string id;    // key into fixtures and manifests
    std::string path;  // payload sent to HTTP backends
};

/// Normalized LLM completions for one prompt. `candidates` is deduplicated,
/// free of empty strings and ordered by first occurrence; `raw` keeps the
/// backend's original strings.
struct CompletionSet {
    std::vector<std::string> candidates;
    std::vector<std::string> raw;
};

/// The three model capabilities the pipeline needs, behind one interface.
/// Implementations must accept concurrent calls. All outputs are normalized
/// at this boundary: grounding scores lie in [0, 1], completions are
/// canonical strings, embeddings have unit norm.
class ModelGateway {
public:
    virtual ~ModelGateway() = default;

    /// Image-text affinity in [0, 1].
    virtual double ground(const ImageRef& image, const std::string& prompt) = 0;

    /// Up to n normalized completion candidates (n >= 1). Throws
    /// BackendError if no usable candidate remains after normalization.
    virtual CompletionSet complete(const std::string& prompt, int n) = 0;

    /// Unit-norm embedding of a non-empty text.
    virtual Embedding embed(const std::string& text) = 0;

    /// Stable identity string, part of persistent cache keys.
    virtual std::string identity() const = 0;
};

/// Canonical completion form: lowercase, trimmed, terminal punctuation and
/// one leading article ("a "/"an "/"the ") stripped, whitespace collapsed.
std::string normalize_completion(std::string_view raw);

/// Applies normalize_completion to each string, drops empties, deduplicates
/// preserving first occurrence.
std::vector<std::string> normalize_completions(const std::vector<std::string>& raw);

/// Builds a CompletionSet from raw backend strings, truncating candidates
/// to n. Throws BackendError (mentioning the prompt) if nothing survives.
CompletionSet make_completion_set(std::vector<std::string> raw, int n, const std::string& prompt);

/// Scales a vector to unit norm. Throws BackendError for zero vectors;
/// `context` names the offending text in the message.
Embedding normalize_embedding(Embedding v, const std::string& context);

/// Affine map from a raw cosine similarity in [-1, 1] to [0, 1], clamped.
double cosine_to_unit_interval(double c);

}  // namespace semloc

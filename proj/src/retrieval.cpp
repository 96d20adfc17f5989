#include "semloc/retrieval.hpp"

#include <algorithm>
#include <cmath>

#include "semloc/error.hpp"

namespace semloc {

std::string to_string(DecisionSource source) {
    switch (source) {
        case DecisionSource::semantic: return "semantic";
        case DecisionSource::fused_semantic: return "fused-semantic";
        case DecisionSource::fused_patch: return "fused-patch";
    }
    return "semantic";
}

DecisionSource decision_source_from_string(const std::string& s) {
    if (s == "semantic") return DecisionSource::semantic;
    if (s == "fused-semantic") return DecisionSource::fused_semantic;
    if (s == "fused-patch") return DecisionSource::fused_patch;
    throw InputError("unknown decision source: \"" + s + "\"");
}

PatchScoreTable PatchScoreTable::from_rows(std::vector<Row> rows) {
    PatchScoreTable table;
    for (const auto& row : rows) {
        if (!(row.score >= 0.0) || !std::isfinite(row.score)) {
            throw InputError("patch score for (" + row.query_id + ", " + row.reference_id +
                             ") must be finite and >= 0, got " + std::to_string(row.score));
        }
        auto [it, inserted] = table.scores_.emplace(
            std::make_pair(row.query_id, row.reference_id), row.score);
        (void)it;
        if (!inserted) {
            throw InputError("duplicate patch score row for (" + row.query_id + ", " +
                             row.reference_id + ")");
        }
        auto best = table.best_.find(row.query_id);
        if (best == table.best_.end()) {
            table.best_.emplace(row.query_id, std::make_pair(row.reference_id, row.score));
        } else if (row.score > best->second.second) {
            best->second = {row.reference_id, row.score};
        }
    }
    table.rows_ = std::move(rows);
    return table;
}

double PatchScoreTable::score(const std::string& query_id,
                              const std::string& reference_id) const {
    auto it = scores_.find(std::make_pair(query_id, reference_id));
    if (it == scores_.end()) {
        throw InputError("missing patch score for pair (" + query_id + ", " + reference_id + ")");
    }
    return it->second;
}

const std::string& PatchScoreTable::best_reference(const std::string& query_id) const {
    auto it = best_.find(query_id);
    if (it == best_.end()) {
        throw InputError("patch score table has no rows for query \"" + query_id + "\"");
    }
    return it->second.first;
}

double PatchScoreTable::trajectory_max() const {
    double max_best = 0.0;
    for (const auto& [query, best] : best_) {
        (void)query;
        max_best = std::max(max_best, best.second);
    }
    return max_best;
}

PatchScoreTable normalize_patch_scores(const PatchScoreTable& table) {
    if (table.empty()) {
        throw InputError("patch score table is empty");
    }
    const double max_best = table.trajectory_max();
    if (max_best <= 0.0) {
        throw InvariantError("patch score table is degenerate: all best scores are zero");
    }
    std::vector<PatchScoreTable::Row> rows = table.rows();
    for (auto& row : rows) {
        row.score /= max_best;
    }
    return PatchScoreTable::from_rows(std::move(rows));
}

namespace {

struct SemanticWinner {
    std::size_t index;
    SemanticScore score;
};

SemanticWinner best_semantic(const ImageDescriptor& query,
                             std::span<const ImageDescriptor> references,
                             const SimilarityConfig& config) {
    SemanticWinner winner{0, semantic_similarity(query, references[0], config)};
    for (std::size_t j = 1; j < references.size(); ++j) {
        SemanticScore s = semantic_similarity(query, references[j], config);
        if (s.total > winner.score.total) {
            winner = {j, s};
        }
    }
    return winner;
}

}  // namespace

std::vector<MatchResult> match(std::span<const ImageDescriptor> queries,
                               std::span<const ImageDescriptor> references,
                               const SimilarityConfig& config) {
    config.validate();
    if (references.empty()) {
        throw InputError("reference descriptor set is empty");
    }
    if (queries.empty()) {
        throw InputError("query descriptor set is empty");
    }
    std::vector<MatchResult> results;
    results.reserve(queries.size());
    for (const auto& query : queries) {
        const SemanticWinner winner = best_semantic(query, references, config);
        results.push_back({query.image_id, references[winner.index].image_id, winner.score,
                           DecisionSource::semantic, std::nullopt});
    }
    return results;
}

MatchResult fuse(const ImageDescriptor& query, const ImageDescriptor& semantic_winner,
                 const ImageDescriptor& patch_winner, const PatchScoreTable& normalized,
                 const SimilarityConfig& config) {
    const SemanticScore sem_s = semantic_similarity(query, semantic_winner, config);
    const SemanticScore sem_p = semantic_similarity(query, patch_winner, config);
    const double pat_s = normalized.score(query.image_id, semantic_winner.image_id);
    const double pat_p = normalized.score(query.image_id, patch_winner.image_id);

    FusedDetail detail{patch_winner.image_id, pat_s, pat_p, sem_s.total + pat_s,
                       sem_p.total + pat_p};

    MatchResult result;
    result.query_id = query.image_id;
    if (detail.semantic_sum > detail.patch_sum) {
        result.reference_id = semantic_winner.image_id;
        result.semantic = sem_s;
        result.decision_source = DecisionSource::fused_semantic;
    } else {
        // Equality goes to the patch winner.
        result.reference_id = patch_winner.image_id;
        result.semantic = sem_p;
        result.decision_source = patch_winner.image_id == semantic_winner.image_id
                                     ? DecisionSource::fused_semantic
                                     : DecisionSource::fused_patch;
    }
    result.fused_detail = detail;
    return result;
}

std::vector<MatchResult> match_fused(std::span<const ImageDescriptor> queries,
                                     std::span<const ImageDescriptor> references,
                                     const PatchScoreTable& raw_table,
                                     const SimilarityConfig& config) {
    config.validate();
    if (references.empty()) {
        throw InputError("reference descriptor set is empty");
    }
    if (queries.empty()) {
        throw InputError("query descriptor set is empty");
    }
    const PatchScoreTable normalized = normalize_patch_scores(raw_table);

    std::vector<MatchResult> results;
    results.reserve(queries.size());
    for (const auto& query : queries) {
        const SemanticWinner winner = best_semantic(query, references, config);
        const std::string& patch_ref = normalized.best_reference(query.image_id);
        auto it = std::find_if(references.begin(), references.end(),
                               [&](const ImageDescriptor& d) { return d.image_id == patch_ref; });
        if (it == references.end()) {
            throw InputError("patch winner \"" + patch_ref + "\" for query \"" + query.image_id +
                             "\" is not in the reference set");
        }
        results.push_back(fuse(query, references[winner.index], *it, normalized, config));
    }
    return results;
}

}  // namespace semloc

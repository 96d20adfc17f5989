#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semloc/descriptor.hpp"
#include "semloc/similarity.hpp"

namespace semloc {

enum class DecisionSource { semantic, fused_semantic, fused_patch };

std::string to_string(DecisionSource source);
DecisionSource decision_source_from_string(const std::string& s);

struct FusedDetail {
    std::string patch_reference_id;  // the patch method's winner I_p
    double patch_score_semantic;     // normalized patch score of the semantic winner
    double patch_score_patch;        // normalized patch score of I_p
    double semantic_sum;             // S_sem(i, s) + patch_score_semantic
    double patch_sum;                // S_sem(i, p) + patch_score_patch
};

struct MatchResult {
    std::string query_id;
    std::string reference_id;  // the final decision
    SemanticScore semantic;    // semantic score between query and reference_id
    DecisionSource decision_source = DecisionSource::semantic;
    std::optional<FusedDetail> fused_detail;
};

/// Externally computed local-feature scores per (query, reference) pair.
/// Scores are nonnegative; each query's best reference is the argmax of its
/// row, ties resolved by row order in the source file.
class PatchScoreTable {
public:
    struct Row {
        std::string query_id;
        std::string reference_id;
        double score;
    };

    static PatchScoreTable from_rows(std::vector<Row> rows);

    const std::vector<Row>& rows() const { return rows_; }
    bool empty() const { return rows_.empty(); }

    /// Throws InputError naming the pair when absent.
    double score(const std::string& query_id, const std::string& reference_id) const;

    /// Throws InputError when the query has no rows.
    const std::string& best_reference(const std::string& query_id) const;

    /// Largest per-query best score across the table.
    double trajectory_max() const;

private:
    std::vector<Row> rows_;
    std::map<std::pair<std::string, std::string>, double> scores_;
    std::map<std::string, std::pair<std::string, double>> best_;  // query -> (ref, score)
};

/// Divides every score by the highest per-query best score in the table.
/// Throws InvariantError when that maximum is zero.
PatchScoreTable normalize_patch_scores(const PatchScoreTable& table);

/// For each query, the reference with maximal semantic total. Ties resolve
/// to the earlier reference. Results follow query order.
std::vector<MatchResult> match(std::span<const ImageDescriptor> queries,
                               std::span<const ImageDescriptor> references,
                               const SimilarityConfig& config = {});

/// Joint decision for one query between the semantic winner I_s and the
/// patch winner I_p: pick I_s iff S_sem(i,s) + patch(i,s) is strictly
/// greater than S_sem(i,p) + patch(i,p), I_p otherwise. `normalized` must
/// contain both cross-scores.
MatchResult fuse(const ImageDescriptor& query, const ImageDescriptor& semantic_winner,
                 const ImageDescriptor& patch_winner, const PatchScoreTable& normalized,
                 const SimilarityConfig& config = {});

/// Semantic matching followed by per-query fusion against the table's patch
/// winners. The raw table is normalized internally.
std::vector<MatchResult> match_fused(std::span<const ImageDescriptor> queries,
                                     std::span<const ImageDescriptor> references,
                                     const PatchScoreTable& raw_table,
                                     const SimilarityConfig& config = {});

}  // namespace semloc

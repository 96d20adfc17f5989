#pragma once

#include <string>
#include <vector>

#include "semloc/descriptor.hpp"
#include "semloc/evaluation.hpp"
#include "semloc/similarity.hpp"

namespace semloc {

/// How a descriptor's top objects are rebuilt when a label is eliminated.
/// refill: re-select the top k from the stored score_map with the label
/// excluded, so another label takes the freed slot. shrink: drop the label
/// from the existing top list without replacement.
enum class EliminationMode { refill, shrink };

std::string to_string(EliminationMode mode);
EliminationMode elimination_mode_from_string(const std::string& text);

struct LandmarkConfig {
    double error_reduction_threshold = 0.1;  // meters
    EliminationMode elimination = EliminationMode::refill;
    SimilarityConfig similarity;
    unsigned jobs = 1;
};

struct LabelImpact {
    std::string label;
    double error_without = 0.0;    // mean translation error with the label gone
    double error_reduction = 0.0;  // error_without - baseline_error
};

struct LandmarkReport {
    double baseline_error = 0.0;
    double error_reduction_threshold = 0.1;
    std::vector<LabelImpact> per_label;     // sorted by reduction desc, label asc
    std::vector<std::string> landmark_set;  // labels with reduction >= threshold
};

/// Returns a copy of `descriptor` with `label` eliminated. Room fields are
/// left untouched; only the object channel changes.
ImageDescriptor eliminate_label(const ImageDescriptor& descriptor,
                                const std::string& label,
                                EliminationMode mode);

/// Leave-one-out landmark learning over a query/reference split. Every label
/// appearing in any descriptor's top objects is eliminated in turn, the
/// retrieval re-run, and the change in mean translation error recorded.
/// Labels whose removal worsens the error by at least the threshold are the
/// landmarks.
LandmarkReport learn_landmarks(const std::vector<ImageDescriptor>& queries,
                               const std::vector<ImageDescriptor>& references,
                               const DatasetManifest& query_manifest,
                               const DatasetManifest& reference_manifest,
                               const LandmarkConfig& config = {});

/// Installs `report`'s landmark set as the similarity filter. An empty set
/// is an invariant error: matching restricted to zero labels is meaningless,
/// the caller should lower the threshold instead.
SimilarityConfig apply_landmark_filter(SimilarityConfig base,
                                       const LandmarkReport& report);

}  // namespace semloc

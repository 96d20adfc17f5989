#include "semloc/formats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "semloc/error.hpp"

namespace semloc {

namespace {

using nlohmann::json;

std::string describe(const json& value) {
    return std::string(value.type_name());
}

const json& get_member(const json& object, const char* key, const std::string& ctx) {
    if (!object.is_object()) {
        throw InputError(ctx + ": expected an object, got " + describe(object));
    }
    auto it = object.find(key);
    if (it == object.end()) {
        throw InputError(ctx + ": missing required key \"" + key + "\"");
    }
    return *it;
}

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& ctx) {
    for (auto it = object.begin(); it != object.end(); ++it) {
        if (allowed.count(it.key()) == 0) {
            throw InputError(ctx + ": unknown key \"" + it.key() + "\"");
        }
    }
}

std::string get_string(const json& object, const char* key, const std::string& ctx) {
    const json& value = get_member(object, key, ctx);
    if (!value.is_string()) {
        throw InputError(ctx + ": \"" + key + "\" must be a string, got " + describe(value));
    }
    return value.get<std::string>();
}

double get_number(const json& object, const char* key, const std::string& ctx) {
    const json& value = get_member(object, key, ctx);
    if (!value.is_number()) {
        throw InputError(ctx + ": \"" + key + "\" must be a number, got " + describe(value));
    }
    const double d = value.get<double>();
    if (!std::isfinite(d)) {
        throw InputError(ctx + ": \"" + key + "\" must be finite");
    }
    return d;
}

int get_count(const json& object, const char* key, const std::string& ctx) {
    const json& value = get_member(object, key, ctx);
    if (!value.is_number_integer() || value.get<long long>() < 0) {
        throw InputError(ctx + ": \"" + key + "\" must be a nonnegative integer");
    }
    return value.get<int>();
}

bool get_bool(const json& object, const char* key, const std::string& ctx) {
    const json& value = get_member(object, key, ctx);
    if (!value.is_boolean()) {
        throw InputError(ctx + ": \"" + key + "\" must be a boolean, got " + describe(value));
    }
    return value.get<bool>();
}

const json& get_array(const json& object, const char* key, const std::string& ctx) {
    const json& value = get_member(object, key, ctx);
    if (!value.is_array()) {
        throw InputError(ctx + ": \"" + key + "\" must be an array, got " + describe(value));
    }
    return value;
}

std::vector<double> number_vector(const json& array, const std::string& ctx) {
    std::vector<double> out;
    out.reserve(array.size());
    for (const auto& v : array) {
        if (!v.is_number() || !std::isfinite(v.get<double>())) {
            throw InputError(ctx + ": expected an array of finite numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

constexpr double kSumTolerance = 1e-9;

bool close(double a, double b) { return std::abs(a - b) <= kSumTolerance; }

}  // namespace

std::string canonical_json(const json& value) { return value.dump(2) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& value) {
    static std::atomic<unsigned> counter{0};
    const auto parent = path.parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::filesystem::path temp = path;
    temp += ".tmp" + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw InputError("cannot write " + temp.string());
        }
        out << canonical_json(value);
        out.flush();
        if (!out) {
            throw InputError("failed writing " + temp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        throw InputError("cannot move " + temp.string() + " to " + path.string());
    }
}

// --- manifest -------------------------------------------------------------

namespace {

json pose_to_json(const Pose& pose) {
    json j;
    j["position"] = {pose.position.x(), pose.position.y(), pose.position.z()};
    if (pose.orientation) {
        const auto& q = *pose.orientation;
        j["orientation"] = {q.w(), q.x(), q.y(), q.z()};
    }
    return j;
}

Pose pose_from_json(const json& j, const std::string& ctx) {
    reject_unknown_keys(j, {"position", "orientation"}, ctx);
    const json& position = get_array(j, "position", ctx);
    if (position.size() != 3) {
        throw InputError(ctx + ": \"position\" must have exactly 3 components");
    }
    const auto p = number_vector(position, ctx + ".position");
    Pose pose;
    pose.position = Eigen::Vector3d(p[0], p[1], p[2]);
    if (j.contains("orientation")) {
        const json& orientation = get_array(j, "orientation", ctx);
        if (orientation.size() != 4) {
            throw InputError(ctx + ": \"orientation\" must have exactly 4 components (w, x, y, z)");
        }
        const auto q = number_vector(orientation, ctx + ".orientation");
        pose.orientation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
    }
    return pose;
}

json manifest_to_json(const DatasetManifest& manifest) {
    json array = json::array();
    for (const auto& e : manifest.entries()) {
        json entry;
        entry["id"] = e.id;
        entry["image"] = e.image_path;
        entry["pose"] = pose_to_json(e.pose);
        entry["room"] = e.room;
        array.push_back(std::move(entry));
    }
    return array;
}

}  // namespace

DatasetManifest read_manifest(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_array()) {
        throw InputError(ctx + ": manifest must be a JSON array");
    }
    std::vector<ManifestEntry> entries;
    entries.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::string ectx = ctx + "[" + std::to_string(i) + "]";
        const json& record = doc[i];
        reject_unknown_keys(record, {"id", "image", "pose", "room"}, ectx);
        ManifestEntry e;
        e.id = get_string(record, "id", ectx);
        e.image_path = get_string(record, "image", ectx);
        e.pose = pose_from_json(get_member(record, "pose", ectx), ectx + ".pose");
        e.room = get_string(record, "room", ectx);
        entries.push_back(std::move(e));
    }
    return DatasetManifest::from_entries(std::move(entries));
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    DatasetManifest::from_entries(manifest.entries());
    write_json_file(path, manifest_to_json(manifest));
}

// --- descriptors ----------------------------------------------------------

namespace {

json scored_labels_to_json(const std::vector<ScoredLabel>& labels) {
    json array = json::array();
    for (const auto& s : labels) {
        array.push_back(json{{"label", s.label}, {"score", s.score}});
    }
    return array;
}

std::vector<ScoredLabel> scored_labels_from_json(const json& array, const std::string& ctx) {
    std::vector<ScoredLabel> out;
    out.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        const std::string ectx = ctx + "[" + std::to_string(i) + "]";
        reject_unknown_keys(array[i], {"label", "score"}, ectx);
        out.push_back({get_string(array[i], "label", ectx), get_number(array[i], "score", ectx)});
    }
    return out;
}

void validate_scores_in_range(const std::vector<ScoredLabel>& labels, const std::string& ctx) {
    for (const auto& s : labels) {
        if (s.label.empty()) {
            throw InputError(ctx + ": empty label");
        }
        if (s.score < 0.0 || s.score > 1.0) {
            throw InputError(ctx + ": score for \"" + s.label + "\" outside [0, 1]");
        }
    }
}

void validate_descriptor(const ImageDescriptor& d, const std::string& ctx) {
    if (d.image_id.empty()) {
        throw InputError(ctx + ": empty image_id");
    }
    if (d.score_map.empty()) {
        throw InputError(ctx + ": empty score_map");
    }
    validate_scores_in_range(d.score_map, ctx + ".score_map");
    validate_scores_in_range(d.top_objects, ctx + ".top_objects");
    validate_scores_in_range(d.room_candidates, ctx + ".room_candidates");

    std::set<std::string> map_labels;
    for (const auto& s : d.score_map) {
        if (!map_labels.insert(s.label).second) {
            throw InputError(ctx + ": duplicate score_map label \"" + s.label + "\"");
        }
    }
    if (d.top_objects.empty()) {
        throw InputError(ctx + ": empty top_objects");
    }
    std::set<std::string> top_labels;
    double min_top = 1.0;
    for (std::size_t i = 0; i < d.top_objects.size(); ++i) {
        const auto& top = d.top_objects[i];
        if (!top_labels.insert(top.label).second) {
            throw InputError(ctx + ": duplicate top_objects label \"" + top.label + "\"");
        }
        auto in_map = std::find_if(d.score_map.begin(), d.score_map.end(),
                                   [&](const ScoredLabel& s) { return s.label == top.label; });
        if (in_map == d.score_map.end()) {
            throw InputError(ctx + ": top_objects label \"" + top.label +
                             "\" missing from score_map");
        }
        if (in_map->score != top.score) {
            throw InputError(ctx + ": top_objects score for \"" + top.label +
                             "\" disagrees with score_map");
        }
        if (i > 0 && top.score > d.top_objects[i - 1].score) {
            throw InputError(ctx + ": top_objects not sorted by descending score");
        }
        min_top = std::min(min_top, top.score);
    }
    for (const auto& s : d.score_map) {
        if (top_labels.count(s.label) == 0 && s.score > min_top) {
            throw InputError(ctx + ": score_map label \"" + s.label +
                             "\" outscores a top_objects entry");
        }
    }

    if (d.room_candidates.empty()) {
        throw InputError(ctx + ": empty room_candidates");
    }
    const auto winner = std::max_element(
        d.room_candidates.begin(), d.room_candidates.end(),
        [](const ScoredLabel& a, const ScoredLabel& b) { return a.score < b.score; });
    const auto first_max = std::find_if(
        d.room_candidates.begin(), d.room_candidates.end(),
        [&](const ScoredLabel& s) { return s.score == winner->score; });
    if (d.room_label != first_max->label) {
        throw InputError(ctx + ": room_label \"" + d.room_label +
                         "\" is not the best room candidate");
    }

    if (d.room_embedding.size() == 0) {
        throw InputError(ctx + ": empty room_embedding");
    }
    if (!d.room_embedding.allFinite()) {
        throw InputError(ctx + ": room_embedding has non-finite components");
    }
    if (std::abs(d.room_embedding.norm() - 1.0) > 1e-6) {
        throw InputError(ctx + ": room_embedding is not unit norm");
    }
}

void validate_descriptor_set(const std::vector<ImageDescriptor>& descriptors,
                             const std::string& ctx) {
    std::set<std::string> ids;
    Eigen::Index dim = -1;
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        const auto& d = descriptors[i];
        validate_descriptor(d, ctx + "[" + std::to_string(i) + "]");
        if (!ids.insert(d.image_id).second) {
            throw InputError(ctx + ": duplicate image_id \"" + d.image_id + "\"");
        }
        if (dim < 0) {
            dim = d.room_embedding.size();
        } else if (d.room_embedding.size() != dim) {
            throw InputError(ctx + ": room_embedding dimension mismatch at \"" + d.image_id +
                             "\"");
        }
    }
}

json descriptor_to_json(const ImageDescriptor& d) {
    json record;
    record["image_id"] = d.image_id;
    json map = json::object();
    for (const auto& s : d.score_map) {
        map[s.label] = s.score;
    }
    record["score_map"] = std::move(map);
    record["top_objects"] = scored_labels_to_json(d.top_objects);
    record["room_label"] = d.room_label;
    record["room_candidates"] = scored_labels_to_json(d.room_candidates);
    record["room_embedding"] = std::vector<double>(
        d.room_embedding.data(), d.room_embedding.data() + d.room_embedding.size());
    return record;
}

ImageDescriptor descriptor_from_json(const json& record, const std::string& ctx) {
    reject_unknown_keys(record,
                        {"image_id", "score_map", "top_objects", "room_label",
                         "room_candidates", "room_embedding"},
                        ctx);
    ImageDescriptor d;
    d.image_id = get_string(record, "image_id", ctx);
    const json& map = get_member(record, "score_map", ctx);
    if (!map.is_object()) {
        throw InputError(ctx + ": \"score_map\" must be an object");
    }
    for (auto it = map.begin(); it != map.end(); ++it) {
        if (!it.value().is_number() || !std::isfinite(it.value().get<double>())) {
            throw InputError(ctx + ".score_map: score for \"" + it.key() +
                             "\" must be a finite number");
        }
        d.score_map.push_back({it.key(), it.value().get<double>()});
    }
    d.top_objects =
        scored_labels_from_json(get_array(record, "top_objects", ctx), ctx + ".top_objects");
    d.room_label = get_string(record, "room_label", ctx);
    d.room_candidates = scored_labels_from_json(get_array(record, "room_candidates", ctx),
                                                ctx + ".room_candidates");
    const auto embedding =
        number_vector(get_array(record, "room_embedding", ctx), ctx + ".room_embedding");
    d.room_embedding = Eigen::Map<const Eigen::VectorXd>(
        embedding.data(), static_cast<Eigen::Index>(embedding.size()));
    return d;
}

}  // namespace

std::vector<ImageDescriptor> read_descriptors(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_array()) {
        throw InputError(ctx + ": descriptor set must be a JSON array");
    }
    std::vector<ImageDescriptor> descriptors;
    descriptors.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        descriptors.push_back(descriptor_from_json(doc[i], ctx + "[" + std::to_string(i) + "]"));
    }
    validate_descriptor_set(descriptors, ctx);
    return descriptors;
}

void write_descriptors(const std::filesystem::path& path,
                       const std::vector<ImageDescriptor>& descriptors) {
    validate_descriptor_set(descriptors, "descriptor set");
    json array = json::array();
    for (const auto& d : descriptors) {
        array.push_back(descriptor_to_json(d));
    }
    write_json_file(path, array);
}

// --- patch scores ----------------------------------------------------------

PatchScoreTable read_patch_scores(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_object()) {
        throw InputError(ctx + ": patch score file must be a JSON object");
    }
    reject_unknown_keys(doc, {"scores"}, ctx);
    const json& scores = get_array(doc, "scores", ctx);
    std::vector<PatchScoreTable::Row> rows;
    rows.reserve(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const json& row = scores[i];
        const std::string ectx = ctx + ".scores[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != 3 || !row[0].is_string() || !row[1].is_string() ||
            !row[2].is_number()) {
            throw InputError(ectx + ": expected [query_id, reference_id, score]");
        }
        rows.push_back({row[0].get<std::string>(), row[1].get<std::string>(),
                        row[2].get<double>()});
        if (rows.back().query_id.empty() || rows.back().reference_id.empty()) {
            throw InputError(ectx + ": empty image id");
        }
    }
    return PatchScoreTable::from_rows(std::move(rows));
}

void write_patch_scores(const std::filesystem::path& path, const PatchScoreTable& table) {
    PatchScoreTable::from_rows(table.rows());
    json scores = json::array();
    for (const auto& row : table.rows()) {
        scores.push_back(json::array({row.query_id, row.reference_id, row.score}));
    }
    write_json_file(path, json{{"scores", std::move(scores)}});
}

// --- matches ----------------------------------------------------------------

namespace {

void validate_match(const MatchResult& m, const std::string& ctx) {
    if (m.query_id.empty() || m.reference_id.empty()) {
        throw InputError(ctx + ": empty image id");
    }
    const SemanticScore& s = m.semantic;
    if (!std::isfinite(s.total) || !std::isfinite(s.object_part) || !std::isfinite(s.room_part)) {
        throw InputError(ctx + ": non-finite semantic score");
    }
    if (s.object_part < 0.0 || s.room_part < 0.0 || s.room_part > 1.0) {
        throw InputError(ctx + ": semantic score parts out of range");
    }
    if (!close(s.total, s.object_part + s.room_part)) {
        throw InputError(ctx + ": semantic total does not equal object_part + room_part");
    }
    const bool fused = m.decision_source != DecisionSource::semantic;
    if (fused != m.fused_detail.has_value()) {
        throw InputError(ctx + ": fused_detail must be present exactly for fused decisions");
    }
    if (!m.fused_detail) {
        return;
    }
    const FusedDetail& f = *m.fused_detail;
    if (f.patch_reference_id.empty()) {
        throw InputError(ctx + ": empty patch_reference_id");
    }
    for (double v : {f.patch_score_semantic, f.patch_score_patch}) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw InputError(ctx + ": normalized patch scores must lie in [0, 1]");
        }
    }
    if (!std::isfinite(f.semantic_sum) || !std::isfinite(f.patch_sum)) {
        throw InputError(ctx + ": non-finite fused sums");
    }
    if (m.decision_source == DecisionSource::fused_patch) {
        if (m.reference_id != f.patch_reference_id) {
            throw InputError(ctx + ": fused-patch decision must select the patch winner");
        }
        if (!close(f.patch_sum, s.total + f.patch_score_patch)) {
            throw InputError(ctx + ": patch_sum inconsistent with semantic score");
        }
        if (f.semantic_sum > f.patch_sum) {
            throw InputError(ctx + ": fused-patch decision despite a larger semantic sum");
        }
    } else {
        if (!close(f.semantic_sum, s.total + f.patch_score_semantic)) {
            throw InputError(ctx + ": semantic_sum inconsistent with semantic score");
        }
        if (m.reference_id != f.patch_reference_id && f.semantic_sum <= f.patch_sum) {
            throw InputError(ctx + ": fused-semantic decision despite a larger patch sum");
        }
    }
}

json match_to_json(const MatchResult& m) {
    json record;
    record["query_id"] = m.query_id;
    record["reference_id"] = m.reference_id;
    record["semantic"] = {{"total", m.semantic.total},
                          {"object_part", m.semantic.object_part},
                          {"room_part", m.semantic.room_part}};
    record["decision_source"] = to_string(m.decision_source);
    if (m.fused_detail) {
        const FusedDetail& f = *m.fused_detail;
        record["fused_detail"] = {{"patch_reference_id", f.patch_reference_id},
                                  {"patch_score_semantic", f.patch_score_semantic},
                                  {"patch_score_patch", f.patch_score_patch},
                                  {"semantic_sum", f.semantic_sum},
                                  {"patch_sum", f.patch_sum}};
    }
    return record;
}

MatchResult match_from_json(const json& record, const std::string& ctx) {
    reject_unknown_keys(
        record, {"query_id", "reference_id", "semantic", "decision_source", "fused_detail"}, ctx);
    MatchResult m;
    m.query_id = get_string(record, "query_id", ctx);
    m.reference_id = get_string(record, "reference_id", ctx);
    const json& semantic = get_member(record, "semantic", ctx);
    reject_unknown_keys(semantic, {"total", "object_part", "room_part"}, ctx + ".semantic");
    m.semantic.total = get_number(semantic, "total", ctx + ".semantic");
    m.semantic.object_part = get_number(semantic, "object_part", ctx + ".semantic");
    m.semantic.room_part = get_number(semantic, "room_part", ctx + ".semantic");
    m.decision_source = decision_source_from_string(get_string(record, "decision_source", ctx));
    if (record.contains("fused_detail")) {
        const json& detail = record["fused_detail"];
        const std::string dctx = ctx + ".fused_detail";
        reject_unknown_keys(detail,
                            {"patch_reference_id", "patch_score_semantic", "patch_score_patch",
                             "semantic_sum", "patch_sum"},
                            dctx);
        FusedDetail f;
        f.patch_reference_id = get_string(detail, "patch_reference_id", dctx);
        f.patch_score_semantic = get_number(detail, "patch_score_semantic", dctx);
        f.patch_score_patch = get_number(detail, "patch_score_patch", dctx);
        f.semantic_sum = get_number(detail, "semantic_sum", dctx);
        f.patch_sum = get_number(detail, "patch_sum", dctx);
        m.fused_detail = f;
    }
    return m;
}

void validate_matches(const std::vector<MatchResult>& matches, const std::string& ctx) {
    std::set<std::string> queries;
    for (std::size_t i = 0; i < matches.size(); ++i) {
        validate_match(matches[i], ctx + "[" + std::to_string(i) + "]");
        if (!queries.insert(matches[i].query_id).second) {
            throw InputError(ctx + ": duplicate query_id \"" + matches[i].query_id + "\"");
        }
    }
}

}  // namespace

std::vector<MatchResult> read_matches(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_object()) {
        throw InputError(ctx + ": match file must be a JSON object");
    }
    reject_unknown_keys(doc, {"matches"}, ctx);
    const json& array = get_array(doc, "matches", ctx);
    std::vector<MatchResult> matches;
    matches.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        matches.push_back(match_from_json(array[i], ctx + ".matches[" + std::to_string(i) + "]"));
    }
    validate_matches(matches, ctx);
    return matches;
}

void write_matches(const std::filesystem::path& path, const std::vector<MatchResult>& matches) {
    validate_matches(matches, "match set");
    json array = json::array();
    for (const auto& m : matches) {
        array.push_back(match_to_json(m));
    }
    write_json_file(path, json{{"matches", std::move(array)}});
}

// --- landmark report ---------------------------------------------------------

namespace {

void validate_landmark_report(const LandmarkReport& report, const std::string& ctx) {
    if (!std::isfinite(report.baseline_error) || report.baseline_error < 0.0) {
        throw InputError(ctx + ": baseline_error must be finite and >= 0");
    }
    if (!std::isfinite(report.error_reduction_threshold) ||
        report.error_reduction_threshold < 0.0) {
        throw InputError(ctx + ": error_reduction_threshold must be finite and >= 0");
    }
    std::set<std::string> labels;
    std::vector<std::string> expected_set;
    for (std::size_t i = 0; i < report.per_label.size(); ++i) {
        const LabelImpact& impact = report.per_label[i];
        const std::string ectx = ctx + ".per_label[" + std::to_string(i) + "]";
        if (impact.label.empty()) {
            throw InputError(ectx + ": empty label");
        }
        if (!labels.insert(impact.label).second) {
            throw InputError(ctx + ": duplicate per_label entry \"" + impact.label + "\"");
        }
        if (!std::isfinite(impact.error_without) || impact.error_without < 0.0) {
            throw InputError(ectx + ": error_without must be finite and >= 0");
        }
        if (!close(impact.error_reduction, impact.error_without - report.baseline_error)) {
            throw InputError(ectx + ": error_reduction does not equal error_without - baseline");
        }
        if (i > 0) {
            const LabelImpact& prev = report.per_label[i - 1];
            const bool ordered =
                impact.error_reduction < prev.error_reduction ||
                (impact.error_reduction == prev.error_reduction && prev.label < impact.label);
            if (!ordered) {
                throw InputError(ctx + ": per_label not sorted by error_reduction descending");
            }
        }
        if (impact.error_reduction >= report.error_reduction_threshold) {
            expected_set.push_back(impact.label);
        }
    }
    if (report.landmark_set != expected_set) {
        throw InputError(ctx + ": landmark_set does not match the thresholded per_label table");
    }
}

}  // namespace

LandmarkReport read_landmark_report(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_object()) {
        throw InputError(ctx + ": landmark report must be a JSON object");
    }
    reject_unknown_keys(
        doc, {"baseline_error", "error_reduction_threshold", "per_label", "landmark_set"}, ctx);
    LandmarkReport report;
    report.baseline_error = get_number(doc, "baseline_error", ctx);
    report.error_reduction_threshold = get_number(doc, "error_reduction_threshold", ctx);
    const json& per_label = get_array(doc, "per_label", ctx);
    for (std::size_t i = 0; i < per_label.size(); ++i) {
        const std::string ectx = ctx + ".per_label[" + std::to_string(i) + "]";
        reject_unknown_keys(per_label[i], {"label", "error_without", "error_reduction"}, ectx);
        report.per_label.push_back({get_string(per_label[i], "label", ectx),
                                    get_number(per_label[i], "error_without", ectx),
                                    get_number(per_label[i], "error_reduction", ectx)});
    }
    const json& landmark_set = get_array(doc, "landmark_set", ctx);
    for (const auto& label : landmark_set) {
        if (!label.is_string()) {
            throw InputError(ctx + ": landmark_set must contain strings");
        }
        report.landmark_set.push_back(label.get<std::string>());
    }
    validate_landmark_report(report, ctx);
    return report;
}

void write_landmark_report(const std::filesystem::path& path, const LandmarkReport& report) {
    validate_landmark_report(report, "landmark report");
    json per_label = json::array();
    for (const auto& impact : report.per_label) {
        per_label.push_back(json{{"label", impact.label},
                                 {"error_without", impact.error_without},
                                 {"error_reduction", impact.error_reduction}});
    }
    write_json_file(path, json{{"baseline_error", report.baseline_error},
                               {"error_reduction_threshold", report.error_reduction_threshold},
                               {"per_label", std::move(per_label)},
                               {"landmark_set", report.landmark_set}});
}

// --- evaluation report --------------------------------------------------------

namespace {

void validate_evaluation_report(const EvaluationReport& report, const std::string& ctx) {
    std::set<std::string> queries;
    std::map<std::string, MetricRow> rooms;
    double error_sum = 0.0;
    int correct = 0;
    for (std::size_t i = 0; i < report.per_query.size(); ++i) {
        const QueryOutcome& q = report.per_query[i];
        const std::string ectx = ctx + ".per_query[" + std::to_string(i) + "]";
        if (q.query_id.empty() || q.reference_id.empty() || q.room.empty()) {
            throw InputError(ectx + ": empty field");
        }
        if (!queries.insert(q.query_id).second) {
            throw InputError(ctx + ": duplicate query_id \"" + q.query_id + "\"");
        }
        if (!std::isfinite(q.translation_error) || q.translation_error < 0.0) {
            throw InputError(ectx + ": translation_error must be finite and >= 0");
        }
        MetricRow& row = rooms[q.room];
        row.mean_translation_error += q.translation_error;  // sums for now
        row.room_detection_rate += q.room_correct ? 1.0 : 0.0;
        row.query_count += 1;
        error_sum += q.translation_error;
        correct += q.room_correct ? 1 : 0;
    }
    for (auto& [room, row] : rooms) {
        (void)room;
        row.mean_translation_error /= row.query_count;
        row.room_detection_rate /= row.query_count;
    }

    const int n = static_cast<int>(report.per_query.size());
    if (report.total.query_count != n) {
        throw InputError(ctx + ": total.queries does not match per_query rows");
    }
    const double expected_error = n > 0 ? error_sum / n : 0.0;
    const double expected_rate = n > 0 ? static_cast<double>(correct) / n : 0.0;
    if (!close(report.total.mean_translation_error, expected_error) ||
        !close(report.total.room_detection_rate, expected_rate)) {
        throw InputError(ctx + ": total row disagrees with per_query rows");
    }
    if (rooms.size() != report.per_room.size()) {
        throw InputError(ctx + ": per_room keys disagree with per_query rooms");
    }
    for (const auto& [room, expected] : rooms) {
        auto it = report.per_room.find(room);
        if (it == report.per_room.end()) {
            throw InputError(ctx + ": missing per_room entry for \"" + room + "\"");
        }
        if (it->second.query_count != expected.query_count ||
            !close(it->second.mean_translation_error, expected.mean_translation_error) ||
            !close(it->second.room_detection_rate, expected.room_detection_rate)) {
            throw InputError(ctx + ": per_room entry for \"" + room +
                             "\" disagrees with per_query rows");
        }
    }
}

json metric_row_to_json(const MetricRow& row) {
    return json{{"queries", row.query_count},
                {"mean_translation_error", row.mean_translation_error},
                {"room_detection_rate", row.room_detection_rate}};
}

MetricRow metric_row_from_json(const json& j, const std::string& ctx) {
    reject_unknown_keys(j, {"queries", "mean_translation_error", "room_detection_rate"}, ctx);
    MetricRow row;
    row.query_count = get_count(j, "queries", ctx);
    row.mean_translation_error = get_number(j, "mean_translation_error", ctx);
    row.room_detection_rate = get_number(j, "room_detection_rate", ctx);
    return row;
}

}  // namespace

EvaluationReport read_evaluation_report(const std::filesystem::path& path) {
    const json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_object()) {
        throw InputError(ctx + ": evaluation report must be a JSON object");
    }
    reject_unknown_keys(doc, {"per_query", "per_room", "total"}, ctx);
    EvaluationReport report;
    const json& per_query = get_array(doc, "per_query", ctx);
    for (std::size_t i = 0; i < per_query.size(); ++i) {
        const std::string ectx = ctx + ".per_query[" + std::to_string(i) + "]";
        const json& record = per_query[i];
        reject_unknown_keys(
            record, {"query_id", "reference_id", "room", "translation_error", "room_correct"},
            ectx);
        report.per_query.push_back({get_string(record, "query_id", ectx),
                                    get_string(record, "reference_id", ectx),
                                    get_string(record, "room", ectx),
                                    get_number(record, "translation_error", ectx),
                                    get_bool(record, "room_correct", ectx)});
    }
    const json& per_room = get_member(doc, "per_room", ctx);
    if (!per_room.is_object()) {
        throw InputError(ctx + ": \"per_room\" must be an object");
    }
    for (auto it = per_room.begin(); it != per_room.end(); ++it) {
        report.per_room[it.key()] =
            metric_row_from_json(it.value(), ctx + ".per_room[\"" + it.key() + "\"]");
    }
    report.total = metric_row_from_json(get_member(doc, "total", ctx), ctx + ".total");
    validate_evaluation_report(report, ctx);
    return report;
}

void write_evaluation_report(const std::filesystem::path& path, const EvaluationReport& report) {
    validate_evaluation_report(report, "evaluation report");
    json per_query = json::array();
    for (const auto& q : report.per_query) {
        per_query.push_back(json{{"query_id", q.query_id},
                                 {"reference_id", q.reference_id},
                                 {"room", q.room},
                                 {"translation_error", q.translation_error},
                                 {"room_correct", q.room_correct}});
    }
    json per_room = json::object();
    for (const auto& [room, row] : report.per_room) {
        per_room[room] = metric_row_to_json(row);
    }
    write_json_file(path, json{{"per_query", std::move(per_query)},
                               {"per_room", std::move(per_room)},
                               {"total", metric_row_to_json(report.total)}});
}

}  // namespace semloc

// Generates the synthetic datasets shipped under data/: a four-room golden
// trajectory with planted rearranged, low-object and room-miss queries, and
// a two-room landmark-learning fixture with planted anchor and distractor
// labels. Everything is derived from string-seeded hashes, so repeated runs
// emit identical bytes.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "semloc/descriptor_pipeline.hpp"
#include "semloc/evaluation.hpp"
#include "semloc/fixture_gateway.hpp"
#include "semloc/formats.hpp"
#include "semloc/model_gateway.hpp"
#include "semloc/retrieval.hpp"

namespace {

using nlohmann::json;
using semloc::PatchScoreTable;
using semloc::ScoredLabel;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

double unit_noise(const std::string& tag) {
    std::uint64_t s = fnv1a(tag) + 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double noise(const std::string& tag, double lo, double hi) {
    return lo + (hi - lo) * unit_noise(tag);
}

std::string ground_key(const std::string& image_id, const std::string& label) {
    return image_id + std::string(1, semloc::FixtureGateway::kKeySeparator) +
           semloc::object_prompt(label);
}

struct ImageSpec {
    std::string id;
    Eigen::Vector3d position;
    std::string room;                                // ground truth
    std::vector<std::pair<std::string, double>> planted;  // exact scores
    std::string candidate_set;                       // completions to use
};

struct FixtureDoc {
    json grounding = json::object();
    json completions = json::object();
    json embeddings = json::object();

    json document() const {
        return json{{"grounding", grounding},
                    {"completions", completions},
                    {"embeddings", embeddings}};
    }
};

std::vector<ScoredLabel> score_image(const ImageSpec& image,
                                     const std::vector<std::string>& vocab,
                                     double noise_lo, double noise_hi) {
    std::vector<ScoredLabel> scores;
    scores.reserve(vocab.size());
    for (const auto& label : vocab) {
        double value = noise(image.id + "|" + label, noise_lo, noise_hi);
        for (const auto& [planted_label, planted_score] : image.planted) {
            if (planted_label == label) value = planted_score;
        }
        scores.push_back({label, value});
    }
    return scores;
}

void write_label_file(const std::filesystem::path& path,
                      const std::string& heading,
                      const std::vector<std::string>& labels) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    out << "# " << heading << "\n";
    for (const auto& label : labels) out << label << "\n";
}

semloc::ManifestEntry entry_for(const ImageSpec& image) {
    semloc::ManifestEntry e;
    e.id = image.id;
    e.image_path = "images/" + image.id + ".png";
    e.pose.position = image.position;
    e.room = image.room;
    return e;
}

// ---------------------------------------------------------------- golden --

const std::vector<std::string> kKitchenPool = {
    "refrigerator", "oven", "sink", "microwave", "dishwasher machine", "kettle", "cup"};
const std::vector<std::string> kOfficePool = {
    "desk", "computer monitor", "keyboard", "office chair", "filing cabinet",
    "printer", "whiteboard"};
const std::vector<std::string> kHallwayPool = {
    "exit sign", "fire extinguisher", "bench", "elevator door", "notice board"};
const std::vector<std::string> kMeetingPool = {
    "conference table", "projector screen", "flipchart", "speakerphone", "tv screen"};
const std::vector<std::string> kShared = {
    "chair", "door", "window", "potted plant", "trash can", "ceiling light"};

std::vector<std::string> golden_vocabulary() {
    std::vector<std::string> vocab;
    for (const auto* pool : {&kKitchenPool, &kOfficePool, &kHallwayPool, &kMeetingPool}) {
        vocab.insert(vocab.end(), pool->begin(), pool->end());
    }
    vocab.insert(vocab.end(), kShared.begin(), kShared.end());
    return vocab;
}

struct CandidateSet {
    std::vector<std::string> raw;             // LLM completions as returned
    std::vector<std::pair<std::string, double>> scores;  // normalized label -> base score
};

std::map<std::string, CandidateSet> golden_candidate_sets() {
    std::map<std::string, CandidateSet> sets;
    sets["kitchen"] = {{"Kitchen.", "a pantry", "office", "kitchen", "storage room"},
                       {{"kitchen", 0.84}, {"pantry", 0.55}, {"office", 0.12},
                        {"storage room", 0.30}}};
    sets["office"] = {{"Office.", "a study", "meeting room", "office", "corridor"},
                      {{"office", 0.84}, {"study", 0.55}, {"meeting room", 0.12},
                       {"corridor", 0.30}}};
    sets["meeting room"] = {
        {"Meeting room.", "a conference room", "office", "meeting room", "classroom"},
        {{"meeting room", 0.84}, {"conference room", 0.55}, {"office", 0.12},
         {"classroom", 0.30}}};
    sets["hallway"] = {{"Hallway.", "a corridor", "lobby", "hallway", "stairwell"},
                       {{"hallway", 0.84}, {"corridor", 0.55}, {"lobby", 0.12},
                        {"stairwell", 0.30}}};
    sets["lobby"] = {{"a lobby", "hallway", "Lobby.", "entrance area", "office"},
                     {{"lobby", 0.80}, {"hallway", 0.62}, {"entrance area", 0.40},
                      {"office", 0.20}}};
    return sets;
}

json golden_embeddings() {
    auto axis = [](int i, double w, int j, double v) {
        std::vector<double> e(8, 0.0);
        e[i] = w;
        if (j >= 0) e[j] = v;
        return e;
    };
    json embeddings = json::object();
    embeddings["kitchen"] = axis(0, 1.0, -1, 0.0);
    embeddings["office"] = axis(1, 1.0, -1, 0.0);
    embeddings["hallway"] = axis(2, 1.0, -1, 0.0);
    embeddings["meeting room"] = axis(3, 1.0, -1, 0.0);
    embeddings["pantry"] = axis(0, 0.9, 4, std::sqrt(1.0 - 0.81));
    embeddings["study"] = axis(1, 0.88, 5, std::sqrt(1.0 - 0.88 * 0.88));
    embeddings["corridor"] = axis(2, 0.9, 6, std::sqrt(1.0 - 0.81));
    embeddings["conference room"] = axis(3, 0.92, 7, std::sqrt(1.0 - 0.92 * 0.92));
    embeddings["lobby"] = axis(2, 0.6, 6, 0.8);
    embeddings["classroom"] = axis(3, 0.7, 7, std::sqrt(1.0 - 0.49));
    embeddings["stairwell"] = axis(2, 0.75, 6, std::sqrt(1.0 - 0.75 * 0.75));
    embeddings["storage room"] = axis(0, 0.5, 4, std::sqrt(0.75));
    embeddings["entrance area"] = axis(2, 0.65, 6, std::sqrt(1.0 - 0.65 * 0.65));
    return embeddings;
}

std::vector<std::pair<std::string, double>> profile(const std::vector<std::string>& pool,
                                                    int index, const std::string& shared,
                                                    const std::string& image_id,
                                                    double jitter) {
    const double ladder[5] = {0.88, 0.82, 0.76, 0.70, 0.64};
    std::vector<std::pair<std::string, double>> planted;
    const int pool_size = static_cast<int>(pool.size());
    for (int slot = 0; slot < 4; ++slot) {
        const std::string& label = pool[(index + slot) % pool_size];
        planted.emplace_back(
            label, ladder[slot] + noise(image_id + "#" + std::to_string(slot), -jitter, jitter));
    }
    planted.emplace_back(shared, ladder[4] + noise(image_id + "#4", -jitter, jitter));
    return planted;
}

struct GoldenData {
    std::vector<ImageSpec> references;
    std::vector<ImageSpec> queries;
    json roles;
};

GoldenData golden_images() {
    GoldenData data;
    const std::vector<std::string> rooms = {"kitchen", "office", "meeting room", "hallway"};
    const std::map<std::string, const std::vector<std::string>*> pools = {
        {"kitchen", &kKitchenPool},
        {"office", &kOfficePool},
        {"meeting room", &kMeetingPool},
        {"hallway", &kHallwayPool}};
    const std::map<std::string, Eigen::Vector3d> origins = {
        {"kitchen", {0.0, 0.0, 0.0}},
        {"office", {20.0, 0.0, 0.0}},
        {"meeting room", {0.0, 20.0, 0.0}}};
    const std::map<std::string, std::string> prefixes = {
        {"kitchen", "k"}, {"office", "o"}, {"meeting room", "m"}, {"hallway", "h"}};

    for (const auto& room : rooms) {
        const std::string& prefix = prefixes.at(room);
        for (int j = 0; j < 10; ++j) {
            ImageSpec ref;
            ref.id = "ref_" + prefix + std::to_string(j);
            ref.room = room;
            ref.candidate_set = room;
            if (room == "hallway") {
                ref.position = {10.0, 1.8 * j, 0.0};
                ref.planted = profile(kHallwayPool, j, kShared[j % 2 == 0 ? 0 : 5],
                                      ref.id, 0.02);
                if (j >= 6) {
                    // Far-end hallway references carry a weak "door" response
                    // that low-object queries latch onto.
                    ref.planted.back() = {"door", 0.46};
                }
            } else {
                const auto& origin = origins.at(room);
                ref.position = origin + Eigen::Vector3d(1.2 * (j % 5), 1.5 * (j / 5), 0.0);
                ref.planted = profile(*pools.at(room), j, kShared[j % kShared.size()],
                                      ref.id, 0.02);
            }
            data.references.push_back(std::move(ref));
        }
    }

    json rearranged = json::array();
    json normal = json::array();
    json low_object = json::array();
    json room_miss = json::array();

    const std::map<std::string, int> rearranged_counts = {
        {"kitchen", 3}, {"office", 3}, {"meeting room", 2}};
    for (std::size_t room_index = 0; room_index < rooms.size(); ++room_index) {
        const std::string& room = rooms[room_index];
        if (room == "hallway") continue;
        const std::string& prefix = prefixes.at(room);
        for (int i = 0; i < 5; ++i) {
            const ImageSpec& target = data.references[room_index * 10 + 2 * i];
            ImageSpec q;
            q.id = "query_" + prefix + std::to_string(i);
            q.room = room;
            q.candidate_set = room;
            q.position = target.position + Eigen::Vector3d(0.25, 0.15, 0.0);
            const bool is_rearranged = i < rearranged_counts.at(room);
            for (std::size_t slot = 0; slot < target.planted.size(); ++slot) {
                const auto& [label, ref_score] = target.planted[slot];
                const std::string tag = q.id + "#" + std::to_string(slot);
                const double score = is_rearranged ? noise(tag, 0.60, 0.90)
                                                   : ref_score + noise(tag, -0.015, 0.015);
                q.planted.emplace_back(label, score);
            }
            (is_rearranged ? rearranged : normal).push_back(q.id);
            data.queries.push_back(std::move(q));
        }
    }
    for (int i = 0; i < 4; ++i) {
        ImageSpec q;
        q.id = "query_h" + std::to_string(i);
        q.room = "hallway";
        q.candidate_set = "hallway";
        q.position = {10.0, 1.8 * i + 0.3, 0.0};
        q.planted = {{"door", 0.5}, {"window", 0.2}, {"trash can", 0.18},
                     {"potted plant", 0.15}, {"cup", 0.12}};
        low_object.push_back(q.id);
        data.queries.push_back(std::move(q));
    }
    {
        ImageSpec q;
        q.id = "query_h4";
        q.room = "hallway";
        q.candidate_set = "lobby";
        q.position = {10.0, 0.9, 0.0};
        q.planted = {{"chair", 0.8}, {"door", 0.75}, {"printer", 0.7},
                     {"office chair", 0.65}, {"trash can", 0.6}};
        room_miss.push_back(q.id);
        data.queries.push_back(std::move(q));
    }

    data.roles = json{{"rearranged", rearranged},
                      {"normal", normal},
                      {"hallway_low_object", low_object},
                      {"room_miss", room_miss}};
    return data;
}

void add_image_to_fixture(FixtureDoc& fixture, const ImageSpec& image,
                          const std::vector<std::string>& vocab,
                          const std::map<std::string, CandidateSet>& candidate_sets,
                          double noise_lo, double noise_hi, int top_k) {
    const auto scores = score_image(image, vocab, noise_lo, noise_hi);
    for (const auto& s : scores) {
        fixture.grounding[ground_key(image.id, s.label)] = s.score;
    }
    const auto top = semloc::select_top_objects(scores, top_k);
    const std::string prompt = semloc::build_room_prompt(top);
    const CandidateSet& set = candidate_sets.at(image.candidate_set);
    fixture.completions[prompt] = set.raw;
    for (const auto& [label, base] : set.scores) {
        fixture.grounding[ground_key(image.id, label)] =
            base + noise(image.id + "@" + label, 0.0, 0.02);
    }
}

PatchScoreTable golden_patch_table(const GoldenData& data) {
    std::map<std::pair<std::string, std::string>, double> overrides;
    auto ref_id = [&](std::size_t index) { return data.references[index].id; };
    for (const auto& q : data.queries) {
        const char kind = q.id[6];  // query_<kind><i>
        const int i = q.id[7] - '0';
        if (kind == 'h') {
            if (i < 4) {
                overrides[{q.id, ref_id(30 + i)}] = 1.0;   // true neighbor, global max
                overrides[{q.id, ref_id(36)}] = 0.05;      // the semantic winner
            } else {
                overrides[{q.id, ref_id(30)}] = 0.9;
                overrides[{q.id, ref_id(12)}] = 0.1;
            }
            continue;
        }
        const int room_base = kind == 'k' ? 0 : (kind == 'o' ? 10 : 20);
        const std::string target = ref_id(room_base + 2 * i);
        const bool rearranged = (kind == 'k' || kind == 'o') ? i < 3 : i < 2;
        if (rearranged) {
            // Patch retrieval is fooled by the rearrangement: strong response
            // on a wrong-room reference, weak on the true one.
            const int wrong_base = kind == 'k' ? 10 : (kind == 'o' ? 20 : 0);
            overrides[{q.id, ref_id(wrong_base + 2 * i)}] = 0.85;
            overrides[{q.id, target}] = 0.08;
        } else {
            overrides[{q.id, target}] = 0.88 + 0.04 * unit_noise("patch+" + q.id);
        }
    }

    std::vector<PatchScoreTable::Row> rows;
    rows.reserve(data.queries.size() * data.references.size());
    for (const auto& q : data.queries) {
        for (const auto& r : data.references) {
            double value = noise("patch|" + q.id + "|" + r.id, 0.05, 0.35);
            auto it = overrides.find({q.id, r.id});
            if (it != overrides.end()) value = it->second;
            rows.push_back({q.id, r.id, value});
        }
    }
    return PatchScoreTable::from_rows(std::move(rows));
}

void generate_golden(const std::filesystem::path& dir) {
    const auto vocab = golden_vocabulary();
    const auto candidate_sets = golden_candidate_sets();
    const GoldenData data = golden_images();

    FixtureDoc fixture;
    fixture.embeddings = golden_embeddings();
    for (const auto& image : data.references) {
        add_image_to_fixture(fixture, image, vocab, candidate_sets, 0.01, 0.10, 5);
    }
    for (const auto& image : data.queries) {
        add_image_to_fixture(fixture, image, vocab, candidate_sets, 0.01, 0.10, 5);
    }

    write_label_file(dir / "vocabulary.txt", "synthetic four-room vocabulary", vocab);
    semloc::write_json_file(dir / "fixture.json", fixture.document());
    semloc::write_json_file(dir / "roles.json", data.roles);

    std::vector<semloc::ManifestEntry> refs, queries;
    for (const auto& image : data.references) refs.push_back(entry_for(image));
    for (const auto& image : data.queries) queries.push_back(entry_for(image));
    semloc::write_manifest(dir / "reference_manifest.json",
                           semloc::DatasetManifest::from_entries(std::move(refs)));
    semloc::write_manifest(dir / "query_manifest.json",
                           semloc::DatasetManifest::from_entries(std::move(queries)));
    semloc::write_patch_scores(dir / "patch_scores.json", golden_patch_table(data));
}

// -------------------------------------------------------------- landmark --

void generate_landmark(const std::filesystem::path& dir) {
    const std::vector<std::string> vocab = {
        "espresso machine", "fire extinguisher", "chair", "table", "printer", "cable",
        "mug", "lamp", "bin", "poster", "kettle", "stapler"};

    std::vector<ImageSpec> refs, queries;
    for (int j = 1; j <= 4; ++j) {
        ImageSpec a;
        a.id = "a" + std::to_string(j);
        a.position = {static_cast<double>(j - 1), 0.0, 0.0};
        a.room = "kitchen";
        a.planted = {{"espresso machine", 0.9 - 0.001 * j},
                     {"chair", 0.8 - 0.001 * j},
                     {"table", 0.7 - 0.001 * j},
                     {"mug", 0.28 - 0.001 * j}};
        refs.push_back(std::move(a));
    }
    {
        ImageSpec b1;
        b1.id = "b1";
        b1.position = {50.0, 0.0, 0.0};
        b1.room = "office";
        b1.planted = {{"fire extinguisher", 0.9}, {"chair", 0.799}, {"table", 0.699},
                      {"lamp", 0.27}};
        refs.push_back(std::move(b1));
    }
    for (int j = 2; j <= 4; ++j) {
        ImageSpec b;
        b.id = "b" + std::to_string(j);
        b.position = {49.0 + j, 0.0, 0.0};
        b.room = "office";
        b.planted = {{"chair", 0.8 - 0.001 * j},
                     {"table", 0.7 - 0.001 * j},
                     {"printer", 0.6 - 0.001 * j},
                     {"bin", 0.27 - 0.001 * j}};
        refs.push_back(std::move(b));
    }
    for (int i = 1; i <= 4; ++i) {
        ImageSpec q;
        q.id = "qa" + std::to_string(i);
        q.position = {static_cast<double>(i - 1), 0.0, 0.0};
        q.room = "kitchen";
        q.planted = {{"espresso machine", 0.9 - 0.001 * i},
                     {"chair", 0.8 - 0.001 * i},
                     {"table", 0.7 - 0.001 * i},
                     {"printer", 0.32}};
        queries.push_back(std::move(q));
    }
    {
        ImageSpec q;
        q.id = "qw";
        q.position = {0.3, 0.0, 0.0};
        q.room = "kitchen";
        q.planted = {{"fire extinguisher", 0.9}, {"chair", 0.799}, {"table", 0.699},
                     {"cable", 0.3}};
        queries.push_back(std::move(q));
    }
    const int target[4] = {2, 3, 4, 2};
    for (int i = 1; i <= 4; ++i) {
        const int m = target[i - 1];
        ImageSpec q;
        q.id = "qb" + std::to_string(i);
        q.position = {49.0 + m + (i == 4 ? 0.02 : 0.0), 0.0, 0.0};
        q.room = "office";
        q.planted = {{"chair", 0.8 - 0.001 * m},
                     {"table", 0.7 - 0.001 * m},
                     {"printer", 0.6 - 0.001 * m},
                     {"lamp", 0.26}};
        queries.push_back(std::move(q));
    }

    std::map<std::string, CandidateSet> candidate_sets;
    candidate_sets["room"] = {{"room"}, {{"room", 0.5}}};

    FixtureDoc fixture;
    fixture.embeddings["room"] = std::vector<double>{1.0, 0.0, 0.0, 0.0};
    for (auto* set : {&refs, &queries}) {
        for (auto& image : *set) {
            image.candidate_set = "room";
            add_image_to_fixture(fixture, image, vocab, candidate_sets, 0.005, 0.02, 3);
        }
    }

    write_label_file(dir / "vocabulary.txt", "landmark fixture vocabulary", vocab);
    semloc::write_json_file(dir / "fixture.json", fixture.document());

    std::vector<semloc::ManifestEntry> ref_entries, query_entries;
    for (const auto& image : refs) ref_entries.push_back(entry_for(image));
    for (const auto& image : queries) query_entries.push_back(entry_for(image));
    semloc::write_manifest(dir / "reference_manifest.json",
                           semloc::DatasetManifest::from_entries(std::move(ref_entries)));
    semloc::write_manifest(dir / "query_manifest.json",
                           semloc::DatasetManifest::from_entries(std::move(query_entries)));
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path out = argc > 1 ? argv[1] : "data";
    try {
        generate_golden(out / "golden");
        generate_landmark(out / "landmark");
    } catch (const std::exception& e) {
        std::cerr << "datagen failed: " << e.what() << '\n';
        return 1;
    }
    std::cout << "wrote " << (out / "golden").string() << " and "
              << (out / "landmark").string() << '\n';
    return 0;
}

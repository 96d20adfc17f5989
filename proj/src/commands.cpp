#include "semloc/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <vector>

#include "semloc/descriptor_pipeline.hpp"
#include "semloc/error.hpp"
#include "semloc/evaluation.hpp"
#include "semloc/fixture_gateway.hpp"
#include "semloc/formats.hpp"
#include "semloc/http_gateway.hpp"
#include "semloc/parallel.hpp"
#include "semloc/response_cache.hpp"
#include "semloc/retrieval.hpp"
#include "semloc/vocabulary.hpp"

namespace semloc {

namespace {

std::optional<std::string> env_string(const char* name) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
}

int parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const int value = std::stoi(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw InputError(what + " must be an integer, got \"" + text + "\"");
    }
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(value)) throw std::invalid_argument(text);
        return value;
    } catch (const std::exception&) {
        throw InputError(what + " must be a finite number, got \"" + text + "\"");
    }
}

unsigned parse_unsigned(const std::string& text, const std::string& what) {
    const int value = parse_int(text, what);
    if (value < 0) throw InputError(what + " must be >= 0, got " + text);
    return static_cast<unsigned>(value);
}

bool is_http_backend(const std::string& backend) {
    return backend.rfind("http:", 0) == 0 || backend.rfind("https:", 0) == 0;
}

}  // namespace

ConfigLayer config_layer_from_env() {
    ConfigLayer layer;
    layer.backend = env_string("SEMLOC_BACKEND");
    layer.cache_dir = env_string("SEMLOC_CACHE");
    layer.vocabulary = env_string("SEMLOC_VOCAB");
    layer.extra_labels = env_string("SEMLOC_EXTRA_LABELS");
    if (auto v = env_string("SEMLOC_K")) layer.top_k = parse_int(*v, "SEMLOC_K");
    if (auto v = env_string("SEMLOC_N")) layer.completions = parse_int(*v, "SEMLOC_N");
    if (auto v = env_string("SEMLOC_THETA")) layer.theta = parse_double(*v, "SEMLOC_THETA");
    if (auto v = env_string("SEMLOC_LANDMARK_THRESHOLD")) {
        layer.landmark_threshold = parse_double(*v, "SEMLOC_LANDMARK_THRESHOLD");
    }
    if (auto v = env_string("SEMLOC_JOBS")) layer.jobs = parse_unsigned(*v, "SEMLOC_JOBS");
    return layer;
}

ConfigLayer config_layer_from_file(const std::filesystem::path& path) {
    const nlohmann::json doc = read_json_file(path);
    const std::string ctx = path.string();
    if (!doc.is_object()) {
        throw InputError(ctx + ": config file must be a JSON object");
    }
    ConfigLayer layer;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string& key = it.key();
        const nlohmann::json& value = it.value();
        auto as_string = [&]() -> std::string {
            if (!value.is_string()) {
                throw InputError(ctx + ": \"" + key + "\" must be a string");
            }
            return value.get<std::string>();
        };
        auto as_int = [&]() -> int {
            if (!value.is_number_integer()) {
                throw InputError(ctx + ": \"" + key + "\" must be an integer");
            }
            return value.get<int>();
        };
        auto as_double = [&]() -> double {
            if (!value.is_number()) {
                throw InputError(ctx + ": \"" + key + "\" must be a number");
            }
            return value.get<double>();
        };
        if (key == "backend") {
            layer.backend = as_string();
        } else if (key == "cache") {
            layer.cache_dir = as_string();
        } else if (key == "vocab") {
            layer.vocabulary = as_string();
        } else if (key == "extra_labels") {
            layer.extra_labels = as_string();
        } else if (key == "k") {
            layer.top_k = as_int();
        } else if (key == "n") {
            layer.completions = as_int();
        } else if (key == "theta") {
            layer.theta = as_double();
        } else if (key == "landmark_threshold") {
            layer.landmark_threshold = as_double();
        } else if (key == "jobs") {
            const int jobs = as_int();
            if (jobs < 0) throw InputError(ctx + ": \"jobs\" must be >= 0");
            layer.jobs = static_cast<unsigned>(jobs);
        } else {
            throw InputError(ctx + ": unknown config key \"" + key + "\"");
        }
    }
    return layer;
}

RunConfig resolve_run_config(const ConfigLayer& flags,
                             const std::optional<std::filesystem::path>& config_file) {
    const ConfigLayer env = config_layer_from_env();
    const ConfigLayer file =
        config_file ? config_layer_from_file(*config_file) : ConfigLayer{};

    auto pick = [&](auto member) {
        auto value = flags.*member;
        if (!value) value = env.*member;
        if (!value) value = file.*member;
        return value;
    };

    RunConfig config;
    if (auto v = pick(&ConfigLayer::backend)) config.backend = *v;
    if (auto v = pick(&ConfigLayer::cache_dir)) config.cache_dir = *v;
    if (auto v = pick(&ConfigLayer::vocabulary)) config.vocabulary = *v;
    if (auto v = pick(&ConfigLayer::extra_labels)) config.extra_labels = *v;
    if (auto v = pick(&ConfigLayer::top_k)) config.top_k = *v;
    if (auto v = pick(&ConfigLayer::completions)) config.completions = *v;
    if (auto v = pick(&ConfigLayer::theta)) config.theta = *v;
    if (auto v = pick(&ConfigLayer::landmark_threshold)) config.landmark_threshold = *v;
    if (auto v = pick(&ConfigLayer::jobs)) config.jobs = *v;

    if (config.top_k < 1) throw InputError("k must be >= 1");
    if (config.completions < 1) throw InputError("n must be >= 1");
    if (!(config.theta >= 0.0 && config.theta < 1.0)) {
        throw InputError("theta must lie in [0, 1)");
    }
    if (!std::isfinite(config.landmark_threshold) || config.landmark_threshold < 0.0) {
        throw InputError("landmark threshold must be finite and >= 0");
    }
    return config;
}

std::shared_ptr<ModelGateway> make_gateway(const RunConfig& config) {
    std::shared_ptr<ModelGateway> gateway;
    if (config.backend.empty()) {
        throw InputError(
            "no backend configured; use --backend fixture:<path> or --backend "
            "http://host:port");
    }
    if (config.backend.rfind("fixture:", 0) == 0) {
        const std::string path = config.backend.substr(8);
        if (path.empty()) throw InputError("fixture backend needs a path");
        gateway = std::make_shared<FixtureGateway>(FixtureGateway::from_file(path));
    } else if (is_http_backend(config.backend)) {
        HttpGatewayConfig http;
        http.base_url = config.backend;
        if (http.base_url.rfind("http://", 0) != 0 && http.base_url.rfind("https://", 0) != 0) {
            // "http:host:port" shorthand
            http.base_url = "http://" + http.base_url.substr(5);
        }
        if (auto token = env_string("SEMLOC_API_TOKEN")) http.auth_token = *token;
        gateway = std::make_shared<HttpGateway>(std::move(http));
    } else {
        throw InputError("unrecognized backend \"" + config.backend +
                         "\"; expected fixture:<path> or an http(s) URL");
    }
    if (config.cache_dir) {
        gateway = std::make_shared<CachedGateway>(std::move(gateway), *config.cache_dir);
    }
    return gateway;
}

unsigned effective_jobs(const RunConfig& config) {
    unsigned jobs = config.jobs == 0 ? default_jobs() : config.jobs;
    if (is_http_backend(config.backend)) {
        jobs = std::min(jobs, static_cast<unsigned>(HttpGatewayConfig{}.max_in_flight));
    }
    return jobs;
}

void cmd_build_descriptors(const RunConfig& config, const BuildDescriptorsArgs& args,
                           std::ostream& err) {
    if (!config.vocabulary) {
        throw InputError("no vocabulary configured; use --vocab <file>");
    }
    const DatasetManifest manifest = read_manifest(args.manifest);
    if (manifest.size() == 0) {
        throw InputError(args.manifest.string() + ": manifest is empty");
    }
    const Vocabulary vocab = load_vocabulary(*config.vocabulary, config.extra_labels);
    const std::shared_ptr<ModelGateway> gateway = make_gateway(config);
    const DescriptorConfig pipeline{config.top_k, config.completions};

    const auto& entries = manifest.entries();
    std::vector<std::optional<ImageDescriptor>> slots(entries.size());
    std::vector<std::exception_ptr> failures(entries.size());
    parallel_for(entries.size(), effective_jobs(config), [&](std::size_t i) {
        const ImageRef image{entries[i].id, entries[i].image_path};
        try {
            slots[i] = build_descriptor(image, vocab, *gateway, pipeline);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    });

    std::vector<ImageDescriptor> built;
    built.reserve(entries.size());
    std::exception_ptr first_failure;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (slots[i]) {
            built.push_back(std::move(*slots[i]));
            continue;
        }
        if (!first_failure) first_failure = failures[i];
        try {
            std::rethrow_exception(failures[i]);
        } catch (const std::exception& e) {
            err << entries[i].id << ": " << e.what() << '\n';
        }
    }
    if (!first_failure) {
        write_descriptors(args.output, built);
        return;
    }
    if (args.keep_partial && !built.empty()) {
        write_descriptors(args.output, built);
        err << "kept " << built.size() << " of " << entries.size() << " descriptors\n";
    }
    std::rethrow_exception(first_failure);
}

void cmd_match(const RunConfig& config, const MatchArgs& args) {
    const std::vector<ImageDescriptor> queries = read_descriptors(args.query_descriptors);
    const std::vector<ImageDescriptor> references =
        read_descriptors(args.reference_descriptors);

    SimilarityConfig similarity;
    similarity.theta = config.theta;
    similarity.filter_mode = args.landmark_mode;
    if (args.landmarks) {
        similarity = apply_landmark_filter(similarity, read_landmark_report(*args.landmarks));
    }

    std::vector<MatchResult> results;
    if (args.patch_scores) {
        results = match_fused(queries, references, read_patch_scores(*args.patch_scores),
                              similarity);
    } else {
        results = match(queries, references, similarity);
    }
    write_matches(args.output, results);
}

void cmd_learn_landmarks(const RunConfig& config, const LearnLandmarksArgs& args) {
    const std::vector<ImageDescriptor> queries = read_descriptors(args.query_descriptors);
    const std::vector<ImageDescriptor> references =
        read_descriptors(args.reference_descriptors);
    const DatasetManifest query_manifest = read_manifest(args.query_manifest);
    const DatasetManifest reference_manifest = read_manifest(args.reference_manifest);

    LandmarkConfig landmark;
    landmark.error_reduction_threshold = config.landmark_threshold;
    landmark.elimination = args.elimination;
    landmark.similarity.theta = config.theta;
    landmark.jobs = effective_jobs(config);

    const LandmarkReport report =
        learn_landmarks(queries, references, query_manifest, reference_manifest, landmark);
    write_landmark_report(args.output, report);
    if (report.landmark_set.empty()) {
        throw InvariantError("landmark set is empty at threshold " +
                             std::to_string(config.landmark_threshold) +
                             "; lower --threshold and rerun");
    }
}

void cmd_evaluate(const RunConfig& config, const EvaluateArgs& args, std::ostream& out) {
    (void)config;
    const std::vector<MatchResult> matches = read_matches(args.matches);
    const DatasetManifest query_manifest = read_manifest(args.query_manifest);
    const DatasetManifest reference_manifest = read_manifest(args.reference_manifest);
    const EvaluationReport report = evaluate(matches, query_manifest, reference_manifest);
    if (args.output) {
        write_evaluation_report(*args.output, report);
    }
    out << render_table(report);
}

}  // namespace semloc

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "semloc/commands.hpp"
#include "semloc/error.hpp"

namespace {

struct CommonFlags {
    semloc::ConfigLayer layer;
    std::optional<std::string> config_file;
};

void add_common_options(CLI::App& cmd, CommonFlags& common) {
    cmd.add_option("--backend", common.layer.backend,
                   "Model backend: fixture:<path> or an http(s) URL");
    cmd.add_option("--cache", common.layer.cache_dir, "Response cache directory");
    cmd.add_option("--vocab", common.layer.vocabulary, "Base vocabulary label file");
    cmd.add_option("--extra-labels", common.layer.extra_labels,
                   "Extension label file merged after the base vocabulary");
    cmd.add_option("--k", common.layer.top_k, "Top object labels per image (default 5)");
    cmd.add_option("--n", common.layer.completions,
                   "Room candidates requested per image (default 5)");
    cmd.add_option("--theta", common.layer.theta,
                   "Room similarity threshold in [0, 1) (default 0.75)");
    cmd.add_option("--jobs", common.layer.jobs, "Worker threads (default: hardware)");
    cmd.add_option("--config", common.config_file, "JSON config file");
}

semloc::RunConfig resolve(const CommonFlags& common) {
    std::optional<std::filesystem::path> config_file;
    if (common.config_file) config_file = *common.config_file;
    return semloc::resolve_run_config(common.layer, config_file);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semantic place recognition: language-grounded image descriptors,\n"
                 "retrieval, landmark learning and trajectory evaluation."};
    app.require_subcommand(1);

    CommonFlags build_common;
    semloc::BuildDescriptorsArgs build_args;
    CLI::App* build = app.add_subcommand(
        "build-descriptors", "Ground a vocabulary and classify rooms for every image");
    add_common_options(*build, build_common);
    build->add_option("--manifest", build_args.manifest, "Dataset manifest (JSON)")
        ->required();
    build->add_option("--out", build_args.output, "Descriptor set output path")->required();
    build->add_flag("--keep-partial", build_args.keep_partial,
                    "Write successfully built descriptors even if some images fail");
    build->callback([&] {
        semloc::cmd_build_descriptors(resolve(build_common), build_args, std::cerr);
    });

    CommonFlags match_common;
    semloc::MatchArgs match_args;
    std::string landmark_mode = "intersect";
    CLI::App* match = app.add_subcommand(
        "match", "Retrieve the best reference for each query descriptor");
    add_common_options(*match, match_common);
    match->add_option("--queries", match_args.query_descriptors, "Query descriptor set")
        ->required();
    match->add_option("--references", match_args.reference_descriptors,
                      "Reference descriptor set")
        ->required();
    match->add_option("--out", match_args.output, "Match file output path")->required();
    match->add_option("--patch-scores", match_args.patch_scores,
                      "External patch score table; enables fused decisions");
    match->add_option("--landmarks", match_args.landmarks,
                      "Landmark report restricting object labels");
    match->add_option("--landmark-mode", landmark_mode,
                      "How landmarks restrict labels: intersect | reselect")
        ->check(CLI::IsMember({"intersect", "reselect"}));
    match->callback([&] {
        match_args.landmark_mode = landmark_mode == "reselect"
                                       ? semloc::LandmarkFilterMode::reselect
                                       : semloc::LandmarkFilterMode::intersect;
        semloc::cmd_match(resolve(match_common), match_args);
    });

    CommonFlags learn_common;
    semloc::LearnLandmarksArgs learn_args;
    std::string elimination = "refill";
    CLI::App* learn = app.add_subcommand(
        "learn-landmarks", "Leave-one-out label importance over a query/reference split");
    add_common_options(*learn, learn_common);
    learn->add_option("--queries", learn_args.query_descriptors, "Query descriptor set")
        ->required();
    learn->add_option("--references", learn_args.reference_descriptors,
                      "Reference descriptor set")
        ->required();
    learn->add_option("--query-manifest", learn_args.query_manifest, "Query manifest")
        ->required();
    learn->add_option("--reference-manifest", learn_args.reference_manifest,
                      "Reference manifest")
        ->required();
    learn->add_option("--out", learn_args.output, "Landmark report output path")->required();
    learn->add_option("--threshold", learn_common.layer.landmark_threshold,
                      "Error-reduction threshold in meters (default 0.1)");
    learn->add_option("--elimination", elimination,
                      "Top-k rebuild after elimination: refill | shrink")
        ->check(CLI::IsMember({"refill", "shrink"}));
    learn->callback([&] {
        learn_args.elimination = semloc::elimination_mode_from_string(elimination);
        semloc::cmd_learn_landmarks(resolve(learn_common), learn_args);
    });

    CommonFlags eval_common;
    semloc::EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "Translation error and room detection metrics for a match file");
    add_common_options(*evaluate, eval_common);
    evaluate->add_option("--matches", eval_args.matches, "Match file")->required();
    evaluate->add_option("--query-manifest", eval_args.query_manifest, "Query manifest")
        ->required();
    evaluate
        ->add_option("--reference-manifest", eval_args.reference_manifest,
                     "Reference manifest")
        ->required();
    evaluate->add_option("--out", eval_args.output, "JSON report output path");
    evaluate->callback([&] {
        semloc::cmd_evaluate(resolve(eval_common), eval_args, std::cout);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const semloc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

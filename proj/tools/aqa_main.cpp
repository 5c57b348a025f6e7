// Command-line pipeline: synthetic data generation, two-phase training,
// evaluation, clip feedback and report regeneration. Subcommands exchange
// state only through files under a run directory.
//
// Exit codes: 0 ok, 2 configuration, 3 missing dependency, 4 parse/data,
// 5 numeric or shape failure, 1 anything else.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "aqa/errors.hpp"
#include "aqa/pipeline.hpp"
#include "aqa/synthetic.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string run_dir = "run";
    std::string manifest;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> expert_mode;
    std::optional<std::string> activity;
    std::optional<std::size_t> embed_dim;
    std::optional<std::size_t> feature_dim;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_manifest) {
    cmd->add_option("--config", args.config_path, "JSON run configuration");
    cmd->add_option("--run-dir", args.run_dir, "run directory for artifacts");
    if (needs_manifest)
        cmd->add_option("--manifest", args.manifest, "dataset manifest CSV")->required();
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--expert-mode", args.expert_mode, "best|worst|constant");
    cmd->add_option("--activity", args.activity, "diving|vault|custom");
    cmd->add_option("--embed-dim", args.embed_dim, "encoder embedding size M");
    cmd->add_option("--feature-dim", args.feature_dim,
                    "clip feature dimension D (0 = adopt from data)");
}

aqa::RunConfig resolve_config(const CommonArgs& args) {
    aqa::RunConfig config;
    if (!args.config_path.empty()) config = aqa::load_run_config(args.config_path);
    if (args.activity) config.activity = aqa::activity_profile(*args.activity);
    if (args.seed) config.seed = *args.seed;
    if (args.expert_mode) config.expert_mode = aqa::expert_mode_from_string(*args.expert_mode);
    if (args.embed_dim) config.model.embed_dim = *args.embed_dim;
    if (args.feature_dim) config.model.feature_dim = *args.feature_dim;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Action quality assessment by comparison with expert references"};
    app.require_subcommand(1);

    // gen-synthetic
    auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic dataset");
    std::string gen_out = "data";
    std::string gen_config_path;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--out", gen_out, "output dataset directory");
    gen->add_option("--config", gen_config_path, "synthetic config JSON");
    gen->add_option("--seed", gen_seed, "generator seed (overrides config)");

    CommonArgs dml_args, score_args, eval_args, fb_args;
    auto* train_dml = app.add_subcommand("train-dml", "train the similarity module");
    add_common(train_dml, dml_args, true);

    auto* train_score = app.add_subcommand("train-score", "train the regression head");
    add_common(train_score, score_args, true);
    std::string dml_ckpt_arg;
    train_score->add_option("--dml-checkpoint", dml_ckpt_arg,
                            "path to the dml checkpoint (default <run-dir>/checkpoints/dml.aqac)");

    auto* evaluate = app.add_subcommand("evaluate", "score the test split and report metrics");
    add_common(evaluate, eval_args, true);

    auto* feedback = app.add_subcommand("feedback", "per-clip similarity reports");
    add_common(feedback, fb_args, true);
    std::vector<std::string> fb_ids;
    feedback->add_option("--video", fb_ids, "video ids (default: whole test split)");

    auto* report = app.add_subcommand("report", "regenerate reports from stored outputs");
    std::string report_run_dir = "run";
    report->add_option("--run-dir", report_run_dir, "run directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            aqa::SyntheticConfig config;
            if (!gen_config_path.empty())
                config = aqa::synthetic_config_from_json_file(gen_config_path);
            if (gen_seed) config.seed = *gen_seed;
            auto dataset = aqa::generate_dataset(config);
            aqa::write_dataset(dataset, gen_out);
            std::cout << "wrote " << dataset.videos.size() << " videos under " << gen_out
                      << "\n";
        } else if (train_dml->parsed()) {
            auto config = resolve_config(dml_args);
            auto out = aqa::pipeline::train_dml_command(config, dml_args.manifest,
                                                        dml_args.run_dir);
            std::cout << "dml checkpoint: " << out.checkpoint.string()
                      << " (best epoch " << out.result.best_epoch << ", holdout accuracy "
                      << out.result.best_accuracy << ")\n";
            if (out.result.diverged)
                std::cout << "warning: training diverged; kept the last good parameters\n";
        } else if (train_score->parsed()) {
            auto config = resolve_config(score_args);
            auto ckpt = dml_ckpt_arg.empty()
                            ? aqa::pipeline::dml_checkpoint_path(score_args.run_dir)
                            : std::filesystem::path(dml_ckpt_arg);
            auto out = aqa::pipeline::train_score_command(config, score_args.manifest,
                                                          score_args.run_dir, ckpt);
            std::cout << "score checkpoint: " << out.checkpoint.string() << " ("
                      << out.result.examples << " training pairs)\n";
        } else if (evaluate->parsed()) {
            auto config = resolve_config(eval_args);
            auto rep = aqa::pipeline::evaluate_command(config, eval_args.manifest,
                                                       eval_args.run_dir);
            std::cout << "n=" << rep.n << " rho=" << rep.rho << " mse=" << rep.mse << "\n";
        } else if (feedback->parsed()) {
            auto config = resolve_config(fb_args);
            aqa::pipeline::feedback_command(config, fb_args.manifest, fb_args.run_dir,
                                            fb_ids);
            std::cout << "feedback written under " << fb_args.run_dir << "/feedback\n";
        } else if (report->parsed()) {
            aqa::pipeline::report_command(report_run_dir);
            std::cout << "report regenerated under " << report_run_dir << "\n";
        }
    } catch (const aqa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aqa::MissingDependencyError& e) {
        std::cerr << "missing dependency: " << e.what() << "\n";
        return 3;
    } catch (const aqa::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 4;
    } catch (const aqa::ShapeError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return 5;
    } catch (const aqa::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 5;
    } catch (const aqa::StateError& e) {
        std::cerr << "state error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

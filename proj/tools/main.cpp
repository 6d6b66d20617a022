#include <cstdint>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "s2w/acceptance.hpp"
#include "s2w/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"slidewall: shovel-and-grasp pushing, Q-map training and evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* train = app.add_subcommand("train", "run a training configuration");
    train->add_option("config", config_path, "path to key = value config file")->required();

    std::string ckpt_path, suite = "train-dist", regime = "sim", policy, csv_path;
    std::uint64_t eval_seed = 0;
    bool eval_seed_set = false;
    CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on a frozen suite");
    eval->add_option("checkpoint", ckpt_path, "checkpoint file")->required();
    eval->add_option("--suite", suite, "train-dist | unseen-walls")
        ->capture_default_str();
    eval->add_option("--regime", regime, "sim | real")->capture_default_str();
    eval->add_option("--policy", policy,
                     "override policy: dqn | ki-dqn | random-on-object | random-uniform");
    eval->add_option("--eval-seed", eval_seed,
                     "assert the frozen suite seed; mismatch with the checkpoint is an error")
        ->each([&](const std::string&) { eval_seed_set = true; });
    eval->add_option("--csv", csv_path, "append the report as a metrics CSV row");

    std::string viz_ckpt, viz_suite = "train-dist", viz_out = "viz-out";
    std::uint64_t viz_seed = 0;
    int viz_zoom = 0;
    CLI::App* viz = app.add_subcommand("viz", "export observation, mask and Q-map images");
    viz->add_option("checkpoint", viz_ckpt, "checkpoint file")->required();
    viz->add_option("--seed", viz_seed, "scene seed")->required();
    viz->add_option("--suite", viz_suite, "scene distribution: train-dist | unseen-walls")
        ->capture_default_str();
    viz->add_option("--out", viz_out, "output directory")->capture_default_str();
    viz->add_option("--zoom", viz_zoom, "pixels per action cell (default: config viz_zoom)");

    std::string bench_dir = "bench-out";
    CLI::App* bench = app.add_subcommand("bench", "run the acceptance suite");
    bench->add_option("--work-dir", bench_dir, "scratch directory for training artifacts")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*train) return s2w::cmd_train(config_path);
    if (*eval) {
        std::optional<std::uint64_t> seed_opt;
        if (eval_seed_set) seed_opt = eval_seed;
        return s2w::cmd_eval(ckpt_path, suite, regime, policy, seed_opt, csv_path);
    }
    if (*viz) return s2w::cmd_viz(viz_ckpt, viz_seed, viz_suite, viz_out, viz_zoom);
    if (*bench) return s2w::acceptance_main(bench_dir);
    return 1;
}

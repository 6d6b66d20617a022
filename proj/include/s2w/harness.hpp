#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "s2w/learner.hpp"
#include "s2w/net.hpp"
#include "s2w/scene.hpp"
#include "s2w/sim.hpp"

namespace s2w {

/// Complete description of one run: method, budgets, seeds, and every
/// workspace/net/learner knob. Round-trips through the flat key = value text
/// format; serialize_run_config emits the canonical form used for digests.
struct RunConfig {
    Method method = Method::KiDqn;
    std::uint64_t iterations = 5000;
    int eval_every = 200;
    int eval_scene_count = 50;
    int eval_trial_cap = 15;
    std::uint64_t seed = 1;
    std::uint64_t eval_seed = 9001;    // training-distribution suite
    std::uint64_t unseen_seed = 9002;  // unseen-wall suite
    std::string output_dir = "run-out";
    int viz_zoom = 8;
    WorkspaceConfig ws;
    NetConfig net;
    LearnerConfig learn;

    void validate() const;
};

std::string serialize_run_config(const RunConfig& cfg);
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& data);

struct ReplayStats {
    std::uint64_t size = 0;
    std::uint64_t total_inserted = 0;
    double max_priority = 1.0;
    double priority_sum = 0.0;
};

struct Checkpoint {
    std::uint32_t version = 1;
    std::string config_text;  // canonical RunConfig serialization
    std::uint64_t iteration = 0;
    NetParams params;
    NetParams target_params;
    std::string rng_scene;
    std::string rng_explore;
    std::string rng_per;
    ReplayStats replay;

    RunConfig config() const { return parse_run_config(config_text); }
};

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);
/// Load and additionally require the embedded config to digest-match
/// `expect`; a checkpoint written under a different configuration is
/// rejected with a config-mismatch error.
Checkpoint load_checkpoint(const std::string& path, const RunConfig& expect);
Checkpoint snapshot_run(const RunConfig& cfg, const RunState& st);

enum class Suite { TrainDist, UnseenWalls };
std::string suite_name(Suite s);
Suite parse_suite(const std::string& name);
std::string regime_name(Regime r);
Regime parse_regime(const std::string& name);

/// The frozen evaluation scenes for a suite: child seeds of the suite seed.
std::vector<Scene> make_eval_scenes(Suite suite, std::uint64_t suite_seed, int count,
                                    const WorkspaceConfig& ws);

/// A policy maps the current scene to an action; stochastic policies draw
/// from the provided stream.
using Policy = std::function<Action(const Scene&, Rng&)>;

Policy make_greedy_policy(const NetParams& params, const WorkspaceConfig& ws);
Policy make_random_on_object_policy(const WorkspaceConfig& ws);
Policy make_random_uniform_policy(const WorkspaceConfig& ws);
Policy make_policy(Method m, const NetParams& params, const WorkspaceConfig& ws);

struct SceneResult {
    bool success = false;
    int actions_used = 0;
    int collisions = 0;
};

struct EvalReport {
    double success_rate = 0.0;
    double mean_actions = 0.0;
    int collisions = 0;
    std::vector<SceneResult> scenes;
};

/// Run the policy on every scene for up to `cap` actions each. In the Real
/// regime a wall collision ends the scene as a failure. Stochastic policies
/// get a per-scene child stream of policy_seed, so scene order cannot leak
/// randomness between scenes.
EvalReport eval_suite(const Policy& policy, const std::vector<Scene>& scenes, Regime regime,
                      int cap, const WorkspaceConfig& ws, std::uint64_t policy_seed = 7777);

struct TrainResult {
    std::string output_dir;
    std::string final_checkpoint;
    std::vector<std::pair<std::uint64_t, double>> eval_history;  // iteration, success
    double seconds = 0.0;
};

/// Full training run: frozen eval suite, periodic eval rows in metrics.csv,
/// a checkpoint per eval point plus checkpoint_final.ckpt. Deterministic.
TrainResult run_training(const RunConfig& cfg, bool quiet = false);

int cmd_train(const std::string& config_path);
int cmd_eval(const std::string& checkpoint_path, const std::string& suite,
             const std::string& regime, const std::string& policy_name,
             std::optional<std::uint64_t> eval_seed_override, const std::string& csv_path);
int cmd_viz(const std::string& checkpoint_path, std::uint64_t scene_seed,
            const std::string& suite, const std::string& out_dir, int zoom_override);

}  // namespace s2w

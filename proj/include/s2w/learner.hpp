#pragma once

#include <cstdint>
#include <string>

#include "s2w/net.hpp"
#include "s2w/replay.hpp"
#include "s2w/sim.hpp"

namespace s2w {

enum class Method { Dqn, KiDqn, RandomOnObject, RandomUniform };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct LearnerConfig {
    double gamma = 0.95;
    double lr_trunk = 1e-5;
    double lr_head = 1e-4;
    double momentum = 0.9;
    double weight_decay = 2e-5;
    int target_sync_every = 200;
    std::size_t replay_capacity = 2000;
    double per_alpha = 0.6;
    double per_beta_start = 0.4;
    double per_beta_end = 1.0;
    double per_eps = 1e-3;
    double eps_start = 0.5;
    double eps_end = 0.1;
    double eps_fraction = 0.2;  // of total iterations
    int episode_cap = kEpisodeCap;

    void validate() const;
};

/// Exploration epsilon after `done` of `total` iterations: linear from
/// eps_start to eps_end across the first eps_fraction of the run.
double epsilon_at(std::uint64_t done, std::uint64_t total, const LearnerConfig& lc);

/// Importance-weight exponent after `done` of `total` iterations: linear
/// per_beta_start to per_beta_end across the whole run.
double beta_at(std::uint64_t done, std::uint64_t total, const LearnerConfig& lc);

/// Bootstrap target r + gamma * max Q(next; target_params), or r alone on
/// terminal transitions. Throws on NaN in the target network output.
double dqn_target(const Transition& t, const NetParams& target_params,
                  const WorkspaceConfig& ws, double gamma);

/// Per-cell regression problem for one transition. Cells with weight 0 do not
/// contribute; the loss is sum_c weight_c * (target_c - Q_c)^2.
struct CellTargets {
    QMapSet target;
    QMapSet weight;
    double executed_target = 0.0;
};

/// Vanilla update: the executed cell alone carries weight 1 with the TD
/// target.
CellTargets dqn_cell_targets(const Transition& t, const NetParams& target_params,
                             const WorkspaceConfig& ws, double gamma);

/// Knowledge-induced update. Three cases per cell: the executed cell gets the
/// TD target at weight 1 (even if its mask bit is off); other off-mask cells
/// get target 0 at weight 1/|off-mask|, pressing stray value toward zero at a
/// scale independent of mask size; on-mask non-executed cells get weight 0
/// (their stored target is the current prediction, which encodes the same
/// zero-gradient semantics). With an all-true mask this is exactly
/// dqn_cell_targets, which is the reduction property.
CellTargets ki_cell_targets(const Transition& t, const QMapSet& current_q,
                            const NetParams& target_params, const WorkspaceConfig& ws,
                            double gamma);

struct GradResult {
    Gradients grads;
    double td_error = 0.0;  // executed-cell target minus prediction
};

/// Semi-gradient of the weighted cell loss: targets are constants, gradients
/// flow only through the predictions in `qmaps`/`cache`.
GradResult compute_gradients(const NetParams& params, const QMapSet& qmaps,
                             const ForwardCache& cache, const CellTargets& targets,
                             const Action& executed, const WorkspaceConfig& ws);

/// Momentum SGD with per-group learning rates and L2 weight decay folded into
/// the gradient. grad_scale multiplies the loss gradient (importance weight),
/// not the decay term. Throws on non-finite gradients.
void apply_update(NetParams& params, const Gradients& grads, const LearnerConfig& lc,
                  double grad_scale = 1.0);

/// Full mutable state of one training run.
struct RunState {
    WorkspaceConfig ws;
    LearnerConfig lc;
    Method method = Method::KiDqn;
    std::uint64_t total_iterations = 0;
    std::uint64_t iteration = 0;  // completed train steps
    NetParams params;
    NetParams target_params;
    PerBuffer buffer{1, 0.6, 1e-3};
    Rng scene_rng;
    Rng explore_rng;
    Rng per_rng;
    Scene scene;
    int episode_steps = 0;
    std::uint64_t episodes_started = 0;
    std::uint64_t grasp_count = 0;
};

RunState make_run_state(Method method, std::uint64_t seed, std::uint64_t total_iterations,
                        const WorkspaceConfig& ws, const NetConfig& net,
                        const LearnerConfig& lc);

/// One iteration: epsilon-greedy act in the current scene, execute the push
/// (Sim regime), store the transition, one online update on it, one
/// prioritized replay update, target sync on schedule, scene regeneration on
/// terminal or episode cap. Deterministic given the state's seed streams.
void train_step(RunState& st);

}  // namespace s2w

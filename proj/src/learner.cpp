#include "s2w/learner.hpp"

#include <cmath>
#include <stdexcept>

#include "s2w/render.hpp"

namespace s2w {

std::string method_name(Method m) {
    switch (m) {
        case Method::Dqn: return "dqn";
        case Method::KiDqn: return "ki-dqn";
        case Method::RandomOnObject: return "random-on-object";
        case Method::RandomUniform: return "random-uniform";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    if (name == "dqn") return Method::Dqn;
    if (name == "ki-dqn") return Method::KiDqn;
    if (name == "random-on-object") return Method::RandomOnObject;
    if (name == "random-uniform") return Method::RandomUniform;
    throw std::invalid_argument("unknown method '" + name + "'");
}

void LearnerConfig::validate() const {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
    if (lr_trunk <= 0.0 || lr_head <= 0.0) throw std::invalid_argument("learning rates must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw std::invalid_argument("momentum must be in [0,1)");
    if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be nonnegative");
    if (target_sync_every <= 0) throw std::invalid_argument("target_sync_every must be positive");
    if (replay_capacity == 0) throw std::invalid_argument("replay_capacity must be positive");
    if (per_alpha < 0.0 || per_eps <= 0.0) throw std::invalid_argument("bad replay priority parameters");
    if (eps_fraction <= 0.0 || eps_fraction > 1.0)
        throw std::invalid_argument("eps_fraction must be in (0,1]");
    if (episode_cap <= 0) throw std::invalid_argument("episode_cap must be positive");
}

double epsilon_at(std::uint64_t done, std::uint64_t total, const LearnerConfig& lc) {
    const double span = lc.eps_fraction * static_cast<double>(total);
    if (span <= 0.0) return lc.eps_end;
    const double f = std::min(1.0, static_cast<double>(done) / span);
    return lc.eps_start + (lc.eps_end - lc.eps_start) * f;
}

double beta_at(std::uint64_t done, std::uint64_t total, const LearnerConfig& lc) {
    if (total == 0) return lc.per_beta_end;
    const double f = std::min(1.0, static_cast<double>(done) / static_cast<double>(total));
    return lc.per_beta_start + (lc.per_beta_end - lc.per_beta_start) * f;
}

double dqn_target(const Transition& t, const NetParams& target_params,
                  const WorkspaceConfig& ws, double gamma) {
    if (t.terminal) return static_cast<double>(t.reward);
    const Tensor next = expand_obs(t.next_obs);
    const QMapSet q = forward(target_params, next, ws);
    return t.reward + gamma * max_q_value(q);  // max_q_value faults on NaN
}

namespace {

QMapSet zero_maps(const WorkspaceConfig& ws) {
    QMapSet m;
    m.maps.assign(ws.rotations.size(), Grid(ws.action_grid, ws.action_grid));
    return m;
}

}  // namespace

CellTargets dqn_cell_targets(const Transition& t, const NetParams& target_params,
                             const WorkspaceConfig& ws, double gamma) {
    CellTargets ct;
    ct.target = zero_maps(ws);
    ct.weight = zero_maps(ws);
    ct.executed_target = dqn_target(t, target_params, ws, gamma);
    ct.target.at(t.action) = ct.executed_target;
    ct.weight.at(t.action) = 1.0;
    return ct;
}

CellTargets ki_cell_targets(const Transition& t, const QMapSet& current_q,
                            const NetParams& target_params, const WorkspaceConfig& ws,
                            double gamma) {
    if (t.masks.size() != ws.rotations.size())
        throw std::invalid_argument("ki targets: transition lacks masks");
    CellTargets ct;
    ct.target = zero_maps(ws);
    ct.weight = zero_maps(ws);
    ct.executed_target = dqn_target(t, target_params, ws, gamma);

    std::size_t off_count = 0;
    for (std::size_t r = 0; r < t.masks.size(); ++r) {
        const Grid& m = t.masks[r];
        for (int j = 0; j < m.rows; ++j)
            for (int i = 0; i < m.cols; ++i) {
                const bool executed = static_cast<int>(r) == t.action.phi_index &&
                                      j == t.action.j && i == t.action.i;
                if (!executed && m.at(j, i) == 0.0) ++off_count;
            }
    }
    const double off_w = off_count > 0 ? 1.0 / static_cast<double>(off_count) : 0.0;
    for (std::size_t r = 0; r < t.masks.size(); ++r) {
        const Grid& m = t.masks[r];
        for (int j = 0; j < m.rows; ++j)
            for (int i = 0; i < m.cols; ++i) {
                const bool executed = static_cast<int>(r) == t.action.phi_index &&
                                      j == t.action.j && i == t.action.i;
                if (executed) continue;
                if (m.at(j, i) == 0.0) {
                    ct.weight.maps[r].at(j, i) = off_w;
                    // target stays 0: press stray off-object value to zero
                } else {
                    // on-mask, not executed: keep the current prediction,
                    // i.e. contribute nothing
                    ct.target.maps[r].at(j, i) = current_q.maps[r].at(j, i);
                }
            }
    }
    ct.target.at(t.action) = ct.executed_target;
    ct.weight.at(t.action) = 1.0;
    return ct;
}

GradResult compute_gradients(const NetParams& params, const QMapSet& qmaps,
                             const ForwardCache& cache, const CellTargets& targets,
                             const Action& executed, const WorkspaceConfig& ws) {
    QMapSet grad = zero_maps(ws);
    bool any = false;
    for (std::size_t r = 0; r < grad.maps.size(); ++r) {
        const Grid& w = targets.weight.maps[r];
        for (int j = 0; j < w.rows; ++j)
            for (int i = 0; i < w.cols; ++i) {
                const double wc = w.at(j, i);
                if (wc == 0.0) continue;
                any = true;
                grad.maps[r].at(j, i) =
                    2.0 * wc * (qmaps.maps[r].at(j, i) - targets.target.maps[r].at(j, i));
            }
    }
    if (!any) throw std::invalid_argument("compute_gradients: empty contribution set");
    GradResult res;
    res.grads = backward(params, cache, grad, ws);
    res.td_error = targets.executed_target - qmaps.at(executed);
    return res;
}

void apply_update(NetParams& params, const Gradients& grads, const LearnerConfig& lc,
                  double grad_scale) {
    if (grads.size() != params.layer.size())
        throw std::invalid_argument("apply_update: gradient shape mismatch");
    for (std::size_t l = 0; l < params.layer.size(); ++l) {
        const double lr = params.specs[l].trunk_group ? lc.lr_trunk : lc.lr_head;
        ConvParams& p = params.layer[l];
        ConvParams& m = params.momentum[l];
        const ConvParams& g = grads[l];
        for (std::size_t k = 0; k < p.w.size(); ++k) {
            const double ge = g.w[k] * grad_scale + lc.weight_decay * p.w[k];
            if (!std::isfinite(ge)) throw std::runtime_error("divergence fault: non-finite gradient");
            m.w[k] = lc.momentum * m.w[k] + ge;
            p.w[k] -= lr * m.w[k];
        }
        for (std::size_t k = 0; k < p.b.size(); ++k) {
            const double ge = g.b[k] * grad_scale + lc.weight_decay * p.b[k];
            if (!std::isfinite(ge)) throw std::runtime_error("divergence fault: non-finite gradient");
            m.b[k] = lc.momentum * m.b[k] + ge;
            p.b[k] -= lr * m.b[k];
        }
    }
    ++params.stamp;
}

RunState make_run_state(Method method, std::uint64_t seed, std::uint64_t total_iterations,
                        const WorkspaceConfig& ws, const NetConfig& net,
                        const LearnerConfig& lc) {
    if (method != Method::Dqn && method != Method::KiDqn)
        throw std::invalid_argument("training requires method dqn or ki-dqn");
    ws.validate();
    lc.validate();
    RunState st;
    st.ws = ws;
    st.lc = lc;
    st.method = method;
    st.total_iterations = total_iterations;
    st.params = init_params(mix_seed(seed, 1), net, ws);
    st.target_params = st.params;
    st.buffer = PerBuffer(lc.replay_capacity, lc.per_alpha, lc.per_eps);
    st.scene_rng = Rng(mix_seed(seed, 2));
    st.explore_rng = Rng(mix_seed(seed, 3));
    st.per_rng = Rng(mix_seed(seed, 4));
    st.scene = generate_training_scene(st.scene_rng.raw(), ws);
    st.episodes_started = 1;
    return st;
}

namespace {

void one_update(RunState& st, const Transition& t, const QMapSet& qmaps,
                const ForwardCache& cache, std::size_t slot, double grad_scale) {
    CellTargets targets =
        st.method == Method::KiDqn
            ? ki_cell_targets(t, qmaps, st.target_params, st.ws, st.lc.gamma)
            : dqn_cell_targets(t, st.target_params, st.ws, st.lc.gamma);
    GradResult gr = compute_gradients(st.params, qmaps, cache, targets, t.action, st.ws);
    apply_update(st.params, gr.grads, st.lc, grad_scale);
    st.buffer.update_priority(slot, gr.td_error);
}

}  // namespace

void train_step(RunState& st) {
    // Act.
    const Tensor obs = render_observation(st.scene, st.ws);
    std::vector<Grid> masks = make_mask_set(st.scene, st.ws);
    ForwardCache cache;
    const QMapSet qmaps = forward(st.params, obs, st.ws, &cache);
    const double eps = epsilon_at(st.iteration, st.total_iterations, st.lc);
    Action a;
    if (st.explore_rng.bernoulli(eps)) {
        a = action_from_flat(st.explore_rng.uniform_int(st.ws.total_actions()), st.ws);
    } else {
        a = greedy_action(qmaps);
    }

    // Execute and store.
    const PushOutcome out = execute_shovel_grasp(st.scene, a, st.ws, Regime::Sim);
    const bool terminal = out.reward == 1;
    if (terminal) ++st.grasp_count;
    Transition t;
    t.obs = compress_obs(obs);
    t.action = a;
    t.reward = out.reward;
    t.next_obs = compress_obs(render_observation(out.scene, st.ws));
    t.terminal = terminal;
    t.masks = std::move(masks);
    const std::size_t slot = st.buffer.insert(std::move(t));

    // Online update on the new transition (reusing the acting forward), then
    // one prioritized replay update.
    one_update(st, st.buffer[slot], qmaps, cache, slot, 1.0);

    const double beta = beta_at(st.iteration, st.total_iterations, st.lc);
    const PerBuffer::Sample s = st.buffer.sample(st.per_rng, beta);
    const Transition& rt = st.buffer[s.index];
    const Tensor robs = expand_obs(rt.obs);
    ForwardCache rcache;
    const QMapSet rq = forward(st.params, robs, st.ws, &rcache);
    one_update(st, rt, rq, rcache, s.index, s.is_weight);

    ++st.iteration;
    if (st.iteration % static_cast<std::uint64_t>(st.lc.target_sync_every) == 0)
        st.target_params = st.params;

    ++st.episode_steps;
    if (terminal || st.episode_steps >= st.lc.episode_cap) {
        st.scene = generate_training_scene(st.scene_rng.raw(), st.ws);
        st.episode_steps = 0;
        ++st.episodes_started;
    }
}

}  // namespace s2w

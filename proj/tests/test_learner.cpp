#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <vector>

#include "s2w/learner.hpp"
#include "s2w/render.hpp"
#include "s2w/rng.hpp"

using namespace s2w;

namespace {

WorkspaceConfig tiny_ws(std::vector<double> rotations = {0.0, 45.0}) {
    WorkspaceConfig cfg;
    cfg.side_cm = 8.0;
    cfg.action_grid = 4;
    cfg.obs_grid = 8;
    cfg.rotations = std::move(rotations);
    return cfg;
}

NetConfig tiny_net() {
    NetConfig net;
    net.trunk = {{3, 2, 4, true}, {3, 2, 6, true}};
    return net;
}

Tensor random_obs(const WorkspaceConfig& ws, std::uint64_t seed) {
    Rng rng(seed);
    Tensor t(ws.channels, ws.obs_grid, ws.obs_grid);
    for (double& x : t.v) x = rng.uniform();
    return t;
}

NetParams bias_only_params(const WorkspaceConfig& ws, double bias) {
    NetParams p = init_params(1, tiny_net(), ws);
    for (ConvParams& cp : p.layer) {
        for (double& w : cp.w) w = 0.0;
        for (double& b : cp.b) b = 0.0;
    }
    p.layer.back().b[0] = bias;
    return p;
}

Transition make_transition(const WorkspaceConfig& ws, std::uint64_t seed, const Action& a,
                           int reward, bool terminal) {
    Transition t;
    t.obs = compress_obs(random_obs(ws, seed));
    t.next_obs = compress_obs(random_obs(ws, mix_seed(seed, 1)));
    t.action = a;
    t.reward = reward;
    t.terminal = terminal;
    t.masks.assign(ws.rotations.size(), Grid(ws.action_grid, ws.action_grid, 1.0));
    return t;
}

// Minimal hand-built parameter set: one head conv, one weight, one bias.
NetParams scalar_params(double w0, double v0) {
    NetParams p;
    LayerSpec spec;
    spec.in_c = 1;
    spec.out_c = 1;
    spec.kernel = 1;
    spec.stride = 1;
    spec.pad = 0;
    spec.relu = false;
    spec.trunk_group = false;
    p.specs = {spec};
    p.layer = {ConvParams{{w0}, {0.0}}};
    p.momentum = {ConvParams{{v0}, {0.0}}};
    return p;
}

}  // namespace

TEST_CASE("method names round-trip") {
    for (Method m : {Method::Dqn, Method::KiDqn, Method::RandomOnObject, Method::RandomUniform})
        CHECK(parse_method(method_name(m)) == m);
    CHECK_THROWS_AS(parse_method("sarsa"), std::invalid_argument);
}

TEST_CASE("learner config validation") {
    LearnerConfig lc;
    CHECK_NOTHROW(lc.validate());
    lc.gamma = 1.0;
    CHECK_THROWS_AS(lc.validate(), std::invalid_argument);
    lc.gamma = 0.95;
    lc.momentum = 1.0;
    CHECK_THROWS_AS(lc.validate(), std::invalid_argument);
    lc.momentum = 0.9;
    lc.eps_fraction = 0.0;
    CHECK_THROWS_AS(lc.validate(), std::invalid_argument);
    lc.eps_fraction = 0.2;
    lc.replay_capacity = 0;
    CHECK_THROWS_AS(lc.validate(), std::invalid_argument);
}

TEST_CASE("epsilon anneals over the first fraction of the run") {
    const LearnerConfig lc;  // 0.5 -> 0.1 across the first 20%
    CHECK(epsilon_at(0, 5000, lc) == 0.5);
    CHECK(epsilon_at(500, 5000, lc) == doctest::Approx(0.3));
    CHECK(epsilon_at(1000, 5000, lc) == doctest::Approx(0.1));
    CHECK(epsilon_at(4999, 5000, lc) == doctest::Approx(0.1));
}

TEST_CASE("beta anneals over the whole run") {
    const LearnerConfig lc;  // 0.4 -> 1.0
    CHECK(beta_at(0, 5000, lc) == doctest::Approx(0.4));
    CHECK(beta_at(2500, 5000, lc) == doctest::Approx(0.7));
    CHECK(beta_at(5000, 5000, lc) == doctest::Approx(1.0));
}

TEST_CASE("bootstrap target") {
    const WorkspaceConfig ws = tiny_ws();
    const NetParams target = bias_only_params(ws, 0.8);
    const Action a{1, 1, 0};

    // Non-terminal: r + gamma * max Q = 0 + 0.95 * 0.8.
    const Transition t0 = make_transition(ws, 10, a, 0, false);
    CHECK(dqn_target(t0, target, ws, 0.95) == doctest::Approx(0.76).epsilon(1e-12));

    // Terminal grasp: exactly the reward, no bootstrap.
    const Transition t1 = make_transition(ws, 11, a, 1, true);
    CHECK(dqn_target(t1, target, ws, 0.95) == 1.0);
    const Transition t2 = make_transition(ws, 12, a, 0, true);
    CHECK(dqn_target(t2, target, ws, 0.95) == 0.0);
}

TEST_CASE("vanilla cell targets hit only the executed cell") {
    const WorkspaceConfig ws = tiny_ws();
    const NetParams target = bias_only_params(ws, 0.5);
    const Action a{2, 3, 1};
    const Transition t = make_transition(ws, 13, a, 0, false);
    const CellTargets ct = dqn_cell_targets(t, target, ws, 0.95);

    CHECK(ct.executed_target == doctest::Approx(0.475));
    CHECK(ct.weight.at(a) == 1.0);
    CHECK(ct.target.at(a) == ct.executed_target);
    double weight_sum = 0.0;
    for (const Grid& g : ct.weight.maps)
        for (double v : g.v) weight_sum += v;
    CHECK(weight_sum == 1.0);
}

TEST_CASE("knowledge-induced targets: three cell classes") {
    const WorkspaceConfig ws = tiny_ws({0.0});  // single 4x4 map
    const NetParams params = init_params(3, tiny_net(), ws);
    const NetParams target = bias_only_params(ws, 0.5);

    const Action executed{2, 2, 0};
    Transition t = make_transition(ws, 14, executed, 0, false);
    t.masks.assign(1, Grid(4, 4, 0.0));
    t.masks[0].at(0, 0) = 1.0;
    t.masks[0].at(1, 1) = 1.0;
    // Executed cell (2,2) is off-mask: 16 cells - 2 on - 1 executed = 13 off.

    const QMapSet q = forward(params, expand_obs(t.obs), ws);
    const CellTargets ct = ki_cell_targets(t, q, target, ws, 0.95);

    CHECK(ct.weight.at(executed) == 1.0);
    CHECK(ct.target.at(executed) == doctest::Approx(0.475));
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            const Action c{i, j, 0};
            if (c == executed) continue;
            if (t.masks[0].at(j, i) == 1.0) {
                CHECK(ct.weight.at(c) == 0.0);
                CHECK(ct.target.at(c) == q.at(c));  // stored prediction, no pull
            } else {
                CHECK(ct.weight.at(c) == doctest::Approx(1.0 / 13.0).epsilon(1e-15));
                CHECK(ct.target.at(c) == 0.0);
            }
        }

    // Executed on-mask: the off set grows to 14 and the other on cell is free.
    Transition t2 = t;
    t2.action = {0, 0, 0};
    const CellTargets ct2 = ki_cell_targets(t2, q, target, ws, 0.95);
    CHECK(ct2.weight.maps[0].at(0, 0) == 1.0);
    CHECK(ct2.weight.maps[0].at(1, 1) == 0.0);
    CHECK(ct2.weight.maps[0].at(2, 2) == doctest::Approx(1.0 / 14.0).epsilon(1e-15));

    Transition bare = t;
    bare.masks.clear();
    CHECK_THROWS_AS(ki_cell_targets(bare, q, target, ws, 0.95), std::invalid_argument);
}

TEST_CASE("all-true masks reduce the ki update to the vanilla update") {
    const WorkspaceConfig ws = tiny_ws();
    const NetParams params = init_params(21, tiny_net(), ws);
    const NetParams target = init_params(22, tiny_net(), ws);
    const Action a{1, 2, 1};
    const Transition t = make_transition(ws, 23, a, 0, false);  // all-true masks

    const Tensor obs = expand_obs(t.obs);
    ForwardCache cache;
    const QMapSet q = forward(params, obs, ws, &cache);

    const CellTargets dt = dqn_cell_targets(t, target, ws, 0.95);
    const CellTargets kt = ki_cell_targets(t, q, target, ws, 0.95);
    const GradResult gd = compute_gradients(params, q, cache, dt, a, ws);
    const GradResult gk = compute_gradients(params, q, cache, kt, a, ws);

    CHECK(gd.td_error == gk.td_error);
    REQUIRE(gd.grads.size() == gk.grads.size());
    for (std::size_t l = 0; l < gd.grads.size(); ++l) {
        CHECK(gd.grads[l].w == gk.grads[l].w);
        CHECK(gd.grads[l].b == gk.grads[l].b);
    }
}

TEST_CASE("gradients are the backward pass of the weighted residual map") {
    const WorkspaceConfig ws = tiny_ws({0.0});
    const NetParams params = init_params(31, tiny_net(), ws);
    const NetParams target = bias_only_params(ws, 0.25);
    const Action a{3, 0, 0};
    Transition t = make_transition(ws, 32, a, 0, false);
    t.masks.assign(1, Grid(4, 4, 0.0));
    t.masks[0].at(2, 1) = 1.0;

    const Tensor obs = expand_obs(t.obs);
    ForwardCache cache;
    const QMapSet q = forward(params, obs, ws, &cache);
    const CellTargets ct = ki_cell_targets(t, q, target, ws, 0.95);
    const GradResult res = compute_gradients(params, q, cache, ct, a, ws);

    QMapSet manual;
    manual.maps.assign(1, Grid(4, 4, 0.0));
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            const double w = ct.weight.maps[0].at(j, i);
            if (w == 0.0) continue;
            manual.maps[0].at(j, i) = 2.0 * w * (q.maps[0].at(j, i) - ct.target.maps[0].at(j, i));
        }
    const Gradients want = backward(params, cache, manual, ws);
    for (std::size_t l = 0; l < want.size(); ++l) {
        CHECK(res.grads[l].w == want[l].w);
        CHECK(res.grads[l].b == want[l].b);
    }
    CHECK(res.td_error == ct.executed_target - q.at(a));
}

TEST_CASE("targets are constants: terminal gradients ignore the target net") {
    const WorkspaceConfig ws = tiny_ws();
    const NetParams params = init_params(41, tiny_net(), ws);
    const Action a{0, 1, 0};
    const Transition t = make_transition(ws, 42, a, 1, true);

    const Tensor obs = expand_obs(t.obs);
    ForwardCache cache;
    const QMapSet q = forward(params, obs, ws, &cache);

    const CellTargets c1 = dqn_cell_targets(t, bias_only_params(ws, 0.9), ws, 0.95);
    const CellTargets c2 = dqn_cell_targets(t, init_params(43, tiny_net(), ws), ws, 0.95);
    const GradResult g1 = compute_gradients(params, q, cache, c1, a, ws);
    const GradResult g2 = compute_gradients(params, q, cache, c2, a, ws);
    CHECK(g1.td_error == g2.td_error);
    for (std::size_t l = 0; l < g1.grads.size(); ++l) {
        CHECK(g1.grads[l].w == g2.grads[l].w);
        CHECK(g1.grads[l].b == g2.grads[l].b);
    }
}

TEST_CASE("momentum update: velocity accumulates then steps the weight") {
    NetParams p = scalar_params(-0.1, 1.0);
    LearnerConfig lc;
    lc.lr_head = 0.1;
    lc.momentum = 0.9;
    lc.weight_decay = 0.0;
    const Gradients g = {ConvParams{{1.0}, {0.0}}};

    apply_update(p, g, lc);
    CHECK(p.momentum[0].w[0] == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(p.layer[0].w[0] == doctest::Approx(-0.29).epsilon(1e-15));
    CHECK(p.stamp == 1);
}

TEST_CASE("weight decay alone shrinks parameters geometrically") {
    NetParams p = scalar_params(2.0, 0.0);
    LearnerConfig lc;
    lc.lr_head = 0.1;
    lc.momentum = 0.0;
    lc.weight_decay = 0.01;
    const Gradients g = {ConvParams{{0.0}, {0.0}}};
    apply_update(p, g, lc);
    CHECK(p.layer[0].w[0] == doctest::Approx(2.0 * (1.0 - 0.1 * 0.01)).epsilon(1e-15));
}

TEST_CASE("grad scale multiplies the loss term but not the decay") {
    NetParams a = scalar_params(2.0, 0.0);
    NetParams b = scalar_params(2.0, 0.0);
    LearnerConfig lc;
    lc.lr_head = 0.1;
    lc.momentum = 0.0;
    lc.weight_decay = 0.5;
    apply_update(a, {ConvParams{{2.0}, {0.0}}}, lc, 0.5);
    apply_update(b, {ConvParams{{1.0}, {0.0}}}, lc, 1.0);
    CHECK(a.layer[0].w[0] == b.layer[0].w[0]);
}

TEST_CASE("learning-rate groups: trunk and head step at their own rates") {
    const WorkspaceConfig ws = tiny_ws();
    NetParams p = init_params(51, tiny_net(), ws);
    LearnerConfig lc;
    lc.momentum = 0.0;
    lc.weight_decay = 0.0;
    Gradients g = zero_gradients(p);
    for (ConvParams& cp : g)
        for (double& x : cp.w) x = 1.0;

    const NetParams before = p;
    apply_update(p, g, lc);
    for (std::size_t l = 0; l < p.layer.size(); ++l) {
        const double lr = p.specs[l].trunk_group ? lc.lr_trunk : lc.lr_head;
        for (std::size_t k = 0; k < p.layer[l].w.size(); ++k)
            CHECK(p.layer[l].w[k] == doctest::Approx(before.layer[l].w[k] - lr).epsilon(1e-12));
    }
}

TEST_CASE("non-finite gradients are a divergence fault") {
    NetParams p = scalar_params(0.0, 0.0);
    const LearnerConfig lc;
    const Gradients g = {ConvParams{{std::numeric_limits<double>::infinity()}, {0.0}}};
    CHECK_THROWS_WITH_AS(apply_update(p, g, lc), "divergence fault: non-finite gradient",
                         std::runtime_error);
    const Gradients gn = {ConvParams{{std::nan("")}, {0.0}}};
    CHECK_THROWS_AS(apply_update(p, gn, lc), std::runtime_error);
}

TEST_CASE("fresh run state") {
    const WorkspaceConfig ws = tiny_ws();
    LearnerConfig lc;
    lc.replay_capacity = 16;
    const RunState st = make_run_state(Method::KiDqn, 9, 100, ws, tiny_net(), lc);
    CHECK(st.iteration == 0);
    CHECK(st.episodes_started == 1);
    CHECK(st.buffer.empty());
    CHECK(st.params.layer.size() == st.target_params.layer.size());
    for (std::size_t l = 0; l < st.params.layer.size(); ++l)
        CHECK(st.params.layer[l].w == st.target_params.layer[l].w);
    CHECK(st.scene.walls.size() == 1);

    CHECK_THROWS_AS(make_run_state(Method::RandomOnObject, 9, 100, ws, tiny_net(), lc),
                    std::invalid_argument);
}

TEST_CASE("train step: two updates per iteration, replay fills, target syncs") {
    const WorkspaceConfig ws = tiny_ws();
    LearnerConfig lc;
    lc.replay_capacity = 32;
    lc.target_sync_every = 10;
    RunState st = make_run_state(Method::KiDqn, 3, 60, ws, tiny_net(), lc);

    for (int k = 0; k < 10; ++k) train_step(st);
    CHECK(st.iteration == 10);
    CHECK(st.params.stamp == 20);  // online + replay update per step
    CHECK(st.buffer.size() == 10);
    // Iteration 10 is a sync boundary: target equals online bitwise.
    for (std::size_t l = 0; l < st.params.layer.size(); ++l) {
        CHECK(st.target_params.layer[l].w == st.params.layer[l].w);
        CHECK(st.target_params.layer[l].b == st.params.layer[l].b);
    }

    train_step(st);
    bool same = true;
    for (std::size_t l = 0; l < st.params.layer.size(); ++l)
        same = same && st.target_params.layer[l].w == st.params.layer[l].w;
    CHECK_FALSE(same);  // online moved off the frozen copy

    for (int k = 0; k < 49; ++k) train_step(st);
    CHECK(st.buffer.size() == 32);
    CHECK(st.buffer.total_inserted() == 60);
    CHECK(st.episodes_started >= 4);  // episode cap is 15 steps
}

TEST_CASE("training is deterministic per seed") {
    const WorkspaceConfig ws = tiny_ws();
    LearnerConfig lc;
    lc.replay_capacity = 32;
    RunState a = make_run_state(Method::KiDqn, 5, 40, ws, tiny_net(), lc);
    RunState b = make_run_state(Method::KiDqn, 5, 40, ws, tiny_net(), lc);
    RunState c = make_run_state(Method::KiDqn, 6, 40, ws, tiny_net(), lc);
    for (int k = 0; k < 40; ++k) {
        train_step(a);
        train_step(b);
        train_step(c);
    }
    bool ab_same = true, ac_same = true;
    for (std::size_t l = 0; l < a.params.layer.size(); ++l) {
        ab_same = ab_same && a.params.layer[l].w == b.params.layer[l].w;
        ac_same = ac_same && a.params.layer[l].w == c.params.layer[l].w;
    }
    CHECK(ab_same);
    CHECK_FALSE(ac_same);
    CHECK(a.scene == b.scene);
}

TEST_CASE("full exploration draws actions across the whole grid") {
    const WorkspaceConfig ws = tiny_ws();
    LearnerConfig lc;
    lc.replay_capacity = 256;
    lc.eps_start = 1.0;
    lc.eps_end = 1.0;
    RunState st = make_run_state(Method::Dqn, 8, 200, ws, tiny_net(), lc);
    for (int k = 0; k < 200; ++k) train_step(st);
    std::set<int> seen;
    for (std::size_t k = 0; k < st.buffer.size(); ++k)
        seen.insert(action_flat_index(st.buffer[k].action, ws));
    CHECK(seen.size() >= 25);  // 32 possible actions
}

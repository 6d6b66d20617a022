#include "s2w/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "s2w/harness.hpp"
#include "s2w/render.hpp"
#include "s2w/tabular.hpp"
#include "support/oracles.hpp"

namespace s2w {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

/// Tiny configuration for the numerical criteria: M=8 observations, two
/// rotations including the resampled 45 degree path.
WorkspaceConfig tiny_ws() {
    WorkspaceConfig ws;
    ws.action_grid = 4;
    ws.obs_grid = 8;
    ws.rotations = {0.0, 45.0};
    return ws;
}

NetConfig tiny_net() {
    NetConfig net;
    net.trunk = {{3, 2, 6, true}, {3, 2, 8, true}, {3, 1, 8, true}};
    return net;
}

Tensor random_obs(Rng& rng, const WorkspaceConfig& ws) {
    Tensor t(ws.channels, ws.obs_grid, ws.obs_grid);
    for (auto& v : t.v) v = rng.uniform();
    return t;
}

QMapSet random_cotangent(Rng& rng, const WorkspaceConfig& ws) {
    QMapSet w;
    for (std::size_t p = 0; p < ws.rotations.size(); ++p) {
        Grid g(ws.action_grid, ws.action_grid);
        for (auto& v : g.v) v = rng.uniform(-1.0, 1.0);
        w.maps.push_back(g);
    }
    return w;
}

// ---------------------------------------------------------------- criterion 1

CriterionResult criterion_gradients() {
    CriterionResult r{1, "gradient-correctness", false, 0.0, ""};
    const auto t0 = Clock::now();
    const WorkspaceConfig ws = tiny_ws();
    const NetConfig net = tiny_net();

    constexpr double kMargin = 1e-3;     // min |preactivation| to stay kink-free
    constexpr double kParamScale = 1e-2;
    constexpr int kNeeded = 5;

    int accepted = 0;
    int rejected = 0;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; accepted < kNeeded && seed <= 200; ++seed) {
        NetParams params = init_params(seed, net, ws);
        for (auto& cp : params.layer)
            for (auto& w : cp.w) w *= kParamScale;
        Rng rng(mix_seed(seed, 17));
        const Tensor obs = random_obs(rng, ws);
        if (oracle::min_preactivation_margin(params, obs, ws) < kMargin) {
            ++rejected;
            continue;
        }
        const QMapSet cot = random_cotangent(rng, ws);
        const oracle::FdReport rep = oracle::fd_gradient_check(params, obs, cot, ws);
        worst = std::max(worst, rep.max_rel_err);
        checked += rep.checked;
        ++accepted;
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = accepted == kNeeded && worst <= 1e-4;
    r.detail = fmt("seeds %d (skipped %d near a ReLU kink), %zu params checked, max rel err %.3g",
                   accepted, rejected, checked, worst);
    return r;
}

// ---------------------------------------------------------------- criterion 2

CriterionResult criterion_reduction() {
    CriterionResult r{2, "ki-reduces-to-dqn", false, 0.0, ""};
    const auto t0 = Clock::now();
    const WorkspaceConfig ws = tiny_ws();
    const NetConfig net = tiny_net();
    LearnerConfig lc;

    NetParams params = init_params(11, net, ws);
    NetParams target = init_params(12, net, ws);

    double worst = 0.0;
    int count = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Scene scene = k % 2 == 0 ? generate_training_scene(mix_seed(500, k), ws)
                                       : generate_test_scene(mix_seed(500, k), ws);
        Rng rng(mix_seed(501, k));
        const Action a = action_from_flat(
            static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ws.total_actions()))),
            ws);
        const PushOutcome out = execute_shovel_grasp(scene, a, ws, Regime::Sim);

        Transition t;
        t.obs = compress_obs(render_observation(scene, ws));
        t.action = a;
        t.reward = out.reward;
        t.next_obs = compress_obs(render_observation(out.scene, ws));
        t.terminal = out.reward == 1;
        t.masks.assign(ws.rotations.size(), Grid(ws.action_grid, ws.action_grid, 1.0));

        const Tensor obs = expand_obs(t.obs);
        ForwardCache cache;
        const QMapSet q = forward(params, obs, ws, &cache);
        const CellTargets dqn = dqn_cell_targets(t, target, ws, lc.gamma);
        const CellTargets ki = ki_cell_targets(t, q, target, ws, lc.gamma);
        const GradResult gd = compute_gradients(params, q, cache, dqn, a, ws);
        const GradResult gk = compute_gradients(params, q, cache, ki, a, ws);
        worst = std::max(worst, std::abs(gd.td_error - gk.td_error));
        for (std::size_t l = 0; l < gd.grads.size(); ++l) {
            for (std::size_t i = 0; i < gd.grads[l].w.size(); ++i)
                worst = std::max(worst, std::abs(gd.grads[l].w[i] - gk.grads[l].w[i]));
            for (std::size_t i = 0; i < gd.grads[l].b.size(); ++i)
                worst = std::max(worst, std::abs(gd.grads[l].b[i] - gk.grads[l].b[i]));
        }
        ++count;
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = count == 20 && worst <= 1e-12;
    r.detail = fmt("%d transitions, max |KI - DQN| gradient gap %.3g", count, worst);
    return r;
}

// ---------------------------------------------------------------- criterion 3

CriterionResult criterion_tabular() {
    CriterionResult r{3, "tabular-oracle", false, 0.0, ""};
    const auto t0 = Clock::now();
    const TinyMDP mdp = TinyMDP::chain(3, 0.9);
    const ValueIterationResult vi = value_iteration(mdp, 1e-12);

    // The chain is deterministic, so a constant step size makes Q-learning an
    // asynchronous damped value iteration that converges to the exact fixed
    // point (harmonic averaging would still carry its early-sample deficit at
    // this step budget).
    StepSizeRule rule;
    rule.kind = StepSizeRule::Kind::Constant;
    rule.value = 0.5;
    const std::uint64_t steps = 10000;
    const std::vector<double> q = tabular_q_learning(mdp, steps, 42, 0.5, rule);
    double dist = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) dist = std::max(dist, std::abs(q[i] - vi.q[i]));

    // Mask: state 1 allows only the forward action. KI must hold the masked
    // entry at zero while the same entry goes positive for vanilla.
    std::vector<std::uint8_t> masks(static_cast<std::size_t>(mdp.states) * mdp.actions, 1);
    masks[mdp.idx(1, 0)] = 0;
    const std::vector<double> qk = tabular_ki_q_learning(mdp, masks, steps, 42, 0.5, rule);
    const double masked_entry = std::abs(qk[mdp.idx(1, 0)]);
    const double vanilla_entry = std::abs(q[mdp.idx(1, 0)]);

    // Full mask, shared seed: trajectories must match exactly at every step.
    std::vector<std::vector<double>> traj_a, traj_b;
    const std::vector<std::uint8_t> full(static_cast<std::size_t>(mdp.states) * mdp.actions, 1);
    tabular_q_learning(mdp, 2000, 7, 0.3, {}, [&](const std::vector<double>& t) {
        traj_a.push_back(t);
    });
    tabular_ki_q_learning(mdp, full, 2000, 7, 0.3, {}, [&](const std::vector<double>& t) {
        traj_b.push_back(t);
    });
    bool identical = traj_a.size() == traj_b.size();
    for (std::size_t i = 0; identical && i < traj_a.size(); ++i)
        identical = traj_a[i] == traj_b[i];

    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = dist <= 1e-3 && masked_entry < 1e-3 && vanilla_entry > 1e-3 && identical;
    r.detail = fmt("sup|Q-Q*| %.2e, masked entry %.2e (vanilla %.2e), full-mask identity %s",
                   dist, masked_entry, vanilla_entry, identical ? "yes" : "no");
    return r;
}

// ---------------------------------------------------------------- criterion 4

CriterionResult criterion_physics() {
    CriterionResult r{4, "physics-oracle", false, 0.0, ""};
    const auto t0 = Clock::now();
    const WorkspaceConfig ws = WorkspaceConfig::desk_scale();

    double worst = 0.0;
    int pairs = 0, no_contact = 0;
    bool unchanged_ok = true;
    for (std::uint64_t k = 0; k < 200; ++k) {
        const std::uint64_t s = mix_seed(777, k);
        const Scene scene =
            k % 2 == 0 ? generate_training_scene(s, ws) : generate_test_scene(s, ws);
        Rng rng(mix_seed(778, k));
        const Action a = action_from_flat(
            static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ws.total_actions()))),
            ws);
        const PushOutcome out = execute_shovel_grasp(scene, a, ws, Regime::Sim);
        const oracle::FinePush fine = oracle::fine_step_push(scene, a, ws, 0.01);
        worst = std::max(worst, std::abs(out.object_displacement_cm - fine.displacement));
        if (out.kind == PushKind::NoContact) {
            ++no_contact;
            if (!(out.scene == scene) || serialize_scene(out.scene) != serialize_scene(scene))
                unchanged_ok = false;
        }
        ++pairs;
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = pairs == 200 && worst <= 0.05 && unchanged_ok;
    r.detail = fmt("%d pairs, max |analytic - fine-step| %.4f cm, %d no-contact all bit-unchanged: %s",
                   pairs, worst, no_contact, unchanged_ok ? "yes" : "no");
    return r;
}

// ------------------------------------------------------- training run support

struct RunArtifacts {
    RunConfig cfg;
    TrainResult result;
};

RunConfig desk_config(Method m, std::uint64_t seed, std::uint64_t iterations,
                      const std::string& out_dir) {
    RunConfig cfg;
    cfg.method = m;
    cfg.seed = seed;
    cfg.iterations = iterations;
    cfg.ws = WorkspaceConfig::desk_scale();
    cfg.output_dir = out_dir;
    return cfg;
}

/// The five checkpoints with the highest frozen-suite eval score (ties to the
/// earlier iteration), per the run's own metrics history.
std::vector<std::pair<std::uint64_t, double>> top5(const TrainResult& res) {
    auto hist = res.eval_history;
    std::stable_sort(hist.begin(), hist.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (hist.size() > 5) hist.resize(5);
    return hist;
}

double mean_top5_train(const TrainResult& res) {
    double sum = 0.0;
    const auto t = top5(res);
    for (const auto& [it, sc] : t) sum += sc;
    return t.empty() ? 0.0 : sum / static_cast<double>(t.size());
}

/// Mean unseen-suite score of the run's top-5 checkpoints.
double mean_top5_on(const RunArtifacts& run, const std::vector<Scene>& scenes, Regime regime) {
    const auto t = top5(run.result);
    double sum = 0.0;
    for (const auto& [it, sc] : t) {
        char name[40];
        std::snprintf(name, sizeof name, "checkpoint_%06llu.ckpt",
                      static_cast<unsigned long long>(it));
        const Checkpoint ckpt =
            load_checkpoint((fs::path(run.cfg.output_dir) / name).string(), run.cfg);
        const Policy greedy = make_greedy_policy(ckpt.params, run.cfg.ws);
        sum += eval_suite(greedy, scenes, regime, run.cfg.eval_trial_cap, run.cfg.ws)
                   .success_rate;
    }
    return t.empty() ? 0.0 : sum / static_cast<double>(t.size());
}

/// Checkpoint with the best train-dist score across all seeds of one method.
Checkpoint best_checkpoint(const std::vector<RunArtifacts>& runs) {
    const RunArtifacts* best_run = nullptr;
    std::uint64_t best_it = 0;
    double best_score = -1.0;
    for (const RunArtifacts& run : runs) {
        for (const auto& [it, sc] : run.result.eval_history) {
            if (sc > best_score) {
                best_score = sc;
                best_run = &run;
                best_it = it;
            }
        }
    }
    if (!best_run) throw std::runtime_error("no eval history in training runs");
    char name[40];
    std::snprintf(name, sizeof name, "checkpoint_%06llu.ckpt",
                  static_cast<unsigned long long>(best_it));
    return load_checkpoint((fs::path(best_run->cfg.output_dir) / name).string(), best_run->cfg);
}

// --------------------------------------------------------- criteria 5 through 7

struct TrainedContext {
    std::vector<RunArtifacts> ki, dqn;
    double seconds = 0.0;
};

TrainedContext train_all(const std::string& work_dir) {
    TrainedContext ctx;
    const auto t0 = Clock::now();
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        for (Method m : {Method::KiDqn, Method::Dqn}) {
            const std::string dir =
                (fs::path(work_dir) / (method_name(m) + "-seed" + std::to_string(seed))).string();
            RunConfig cfg = desk_config(m, seed, 5000, dir);
            std::printf("  training %s seed %llu ...\n", method_name(m).c_str(),
                        static_cast<unsigned long long>(seed));
            std::fflush(stdout);
            RunArtifacts run{cfg, run_training(cfg, true)};
            std::printf("    top-5 train-dist mean %.3f (%.0f s)\n", mean_top5_train(run.result),
                        run.result.seconds);
            std::fflush(stdout);
            (m == Method::KiDqn ? ctx.ki : ctx.dqn).push_back(std::move(run));
        }
    }
    ctx.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return ctx;
}

CriterionResult criterion_efficacy(const TrainedContext& ctx) {
    CriterionResult r{5, "learning-efficacy", false, 0.0, ""};
    const auto t0 = Clock::now();

    double ki = 0.0;
    for (const RunArtifacts& run : ctx.ki) ki += mean_top5_train(run.result);
    ki /= static_cast<double>(ctx.ki.size());

    const RunConfig& cfg = ctx.ki.front().cfg;
    const std::vector<Scene> scenes =
        make_eval_scenes(Suite::TrainDist, cfg.eval_seed, cfg.eval_scene_count, cfg.ws);
    const double rnd = eval_suite(make_random_on_object_policy(cfg.ws), scenes, Regime::Sim,
                                  cfg.eval_trial_cap, cfg.ws)
                           .success_rate;

    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count() + ctx.seconds;
    r.pass = ki >= 0.80 && ki - rnd >= 0.25;
    r.detail = fmt("ki-dqn %.3f (need >= 0.80), random-on-object %.3f, margin %.3f (need >= 0.25); "
                   "training wall time %.0f s",
                   ki, rnd, ki - rnd, ctx.seconds);
    return r;
}

CriterionResult criterion_generalization(const TrainedContext& ctx) {
    CriterionResult r{6, "generalization-gap", false, 0.0, ""};
    const auto t0 = Clock::now();
    const RunConfig& cfg = ctx.ki.front().cfg;
    const std::vector<Scene> scenes =
        make_eval_scenes(Suite::UnseenWalls, cfg.unseen_seed, cfg.eval_scene_count, cfg.ws);

    double ki_sim = 0.0, dqn_sim = 0.0, ki_real = 0.0, dqn_real = 0.0;
    for (const RunArtifacts& run : ctx.ki) {
        ki_sim += mean_top5_on(run, scenes, Regime::Sim);
        ki_real += mean_top5_on(run, scenes, Regime::Real);
    }
    for (const RunArtifacts& run : ctx.dqn) {
        dqn_sim += mean_top5_on(run, scenes, Regime::Sim);
        dqn_real += mean_top5_on(run, scenes, Regime::Real);
    }
    ki_sim /= static_cast<double>(ctx.ki.size());
    ki_real /= static_cast<double>(ctx.ki.size());
    dqn_sim /= static_cast<double>(ctx.dqn.size());
    dqn_real /= static_cast<double>(ctx.dqn.size());

    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = ki_sim - dqn_sim >= 0.15 && ki_real - dqn_real >= 0.20;
    r.detail = fmt("sim: ki %.3f dqn %.3f gap %.3f (need >= 0.15); real: ki %.3f dqn %.3f gap "
                   "%.3f (need >= 0.20)",
                   ki_sim, dqn_sim, ki_sim - dqn_sim, ki_real, dqn_real, ki_real - dqn_real);
    return r;
}

CriterionResult criterion_suppression(const TrainedContext& ctx) {
    CriterionResult r{7, "off-object-suppression", false, 0.0, ""};
    const auto t0 = Clock::now();
    const WorkspaceConfig& ws = ctx.ki.front().cfg.ws;

    const Checkpoint ki = best_checkpoint(ctx.ki);
    const Checkpoint dqn = best_checkpoint(ctx.dqn);

    double ki_ratio_sum = 0.0;
    int dqn_violations = 0;
    int obs_count = 0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const Scene scene = generate_test_scene(mix_seed(9003, k), ws);
        const Tensor obs = render_observation(scene, ws);
        const std::vector<Grid> masks = make_mask_set(scene, ws);

        const auto ratio = [&](const NetParams& params) {
            const QMapSet q = forward(params, obs, ws);
            double off_sum = 0.0, on_max = -std::numeric_limits<double>::infinity();
            std::size_t off_n = 0;
            for (std::size_t p = 0; p < q.maps.size(); ++p)
                for (std::size_t i = 0; i < q.maps[p].v.size(); ++i) {
                    if (masks[p].v[i] != 0.0) {
                        on_max = std::max(on_max, q.maps[p].v[i]);
                    } else {
                        off_sum += std::abs(q.maps[p].v[i]);
                        ++off_n;
                    }
                }
            if (off_n == 0) return 0.0;
            if (!(on_max > 0.0)) return std::numeric_limits<double>::infinity();
            return (off_sum / static_cast<double>(off_n)) / on_max;
        };
        ki_ratio_sum += ratio(ki.params);
        if (ratio(dqn.params) > 0.10) ++dqn_violations;
        ++obs_count;
    }
    const double ki_mean = ki_ratio_sum / static_cast<double>(obs_count);

    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = ki_mean <= 0.10 && dqn_violations >= 10;
    r.detail = fmt("ki mean off/on ratio %.4f (need <= 0.10); dqn violates the bound on %d/20 "
                   "(need >= 10)",
                   ki_mean, dqn_violations);
    return r;
}

// ---------------------------------------------------------------- criterion 8

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    return sa.str() == sb.str();
}

CriterionResult criterion_determinism(const std::string& work_dir) {
    CriterionResult r{8, "determinism-and-persistence", false, 0.0, ""};
    const auto t0 = Clock::now();
    const fs::path dir = fs::path(work_dir) / "determinism";
    const RunConfig cfg = desk_config(Method::KiDqn, 5, 500, (dir / "run").string());

    run_training(cfg, true);
    const fs::path first = dir / "first.ckpt";
    fs::copy_file(dir / "run" / "checkpoint_final.ckpt", first,
                  fs::copy_options::overwrite_existing);
    fs::remove_all(dir / "run");
    run_training(cfg, true);
    const bool identical = same_bytes(first, dir / "run" / "checkpoint_final.ckpt");

    // Round-trip: load and re-save must reproduce the file byte for byte.
    const Checkpoint loaded = load_checkpoint(first.string());
    const fs::path resaved = dir / "resaved.ckpt";
    save_checkpoint(resaved.string(), loaded);
    const bool roundtrip = same_bytes(first, resaved);

    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    r.pass = identical && roundtrip;
    r.detail = fmt("repeated 500-iteration runs byte-identical: %s; save/load/save byte-exact: %s",
                   identical ? "yes" : "no", roundtrip ? "yes" : "no");
    return r;
}

void print_result(const CriterionResult& r) {
    std::printf("criterion %d [%s]: %s (%.1f s) - %s\n", r.id, r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    std::fflush(stdout);
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::string& work_dir) {
    fs::remove_all(work_dir);
    fs::create_directories(work_dir);

    std::vector<CriterionResult> results;
    const auto run = [&](CriterionResult r) {
        print_result(r);
        results.push_back(std::move(r));
    };

    run(criterion_gradients());
    run(criterion_reduction());
    run(criterion_tabular());
    run(criterion_physics());

    std::printf("training 6 runs for criteria 5-7 (3 seeds x {ki-dqn, dqn}, 5000 iterations "
                "each)...\n");
    std::fflush(stdout);
    const TrainedContext ctx = train_all(work_dir);
    run(criterion_efficacy(ctx));
    run(criterion_generalization(ctx));
    run(criterion_suppression(ctx));

    run(criterion_determinism(work_dir));
    return results;
}

int acceptance_main(const std::string& work_dir) {
    const std::vector<CriterionResult> results = run_acceptance(work_dir);
    int failed = 0;
    for (const CriterionResult& r : results)
        if (!r.pass) ++failed;
    double total = 0.0;
    for (const CriterionResult& r : results) total += r.seconds;
    std::printf("acceptance: %zu/%zu criteria passed (%.0f s total)\n", results.size() - failed,
                results.size(), total);
    return failed == 0 ? 0 : 1;
}

}  // namespace s2w

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "s2w/harness.hpp"
#include "s2w/image.hpp"
#include "s2w/render.hpp"

namespace s2w {
namespace {

namespace fs = std::filesystem;

std::string checkpoint_name(std::uint64_t iteration) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "checkpoint_%06llu.ckpt",
                  static_cast<unsigned long long>(iteration));
    return buf;
}

void append_metrics_row(const std::string& path, std::uint64_t iteration, Suite suite,
                        Regime regime, const EvalReport& rep) {
    const bool fresh = !fs::exists(path);
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("cannot open metrics file: " + path);
    if (fresh) os << "iteration,suite,regime,success_rate,mean_actions,collisions\n";
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu,%s,%s,%.6f,%.4f,%d\n",
                  static_cast<unsigned long long>(iteration), suite_name(suite).c_str(),
                  regime_name(regime).c_str(), rep.success_rate, rep.mean_actions,
                  rep.collisions);
    os << buf;
    if (!os) throw std::runtime_error("metrics write failed: " + path);
}

}  // namespace

std::string suite_name(Suite s) {
    return s == Suite::TrainDist ? "train-dist" : "unseen-walls";
}

Suite parse_suite(const std::string& name) {
    if (name == "train-dist") return Suite::TrainDist;
    if (name == "unseen-walls") return Suite::UnseenWalls;
    throw std::invalid_argument("unknown suite: " + name + " (want train-dist | unseen-walls)");
}

std::string regime_name(Regime r) { return r == Regime::Sim ? "sim" : "real"; }

Regime parse_regime(const std::string& name) {
    if (name == "sim") return Regime::Sim;
    if (name == "real") return Regime::Real;
    throw std::invalid_argument("unknown regime: " + name + " (want sim | real)");
}

std::vector<Scene> make_eval_scenes(Suite suite, std::uint64_t suite_seed, int count,
                                    const WorkspaceConfig& ws) {
    std::vector<Scene> scenes;
    scenes.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const std::uint64_t s = mix_seed(suite_seed, static_cast<std::uint64_t>(k));
        scenes.push_back(suite == Suite::TrainDist ? generate_training_scene(s, ws)
                                                   : generate_test_scene(s, ws));
    }
    return scenes;
}

Policy make_greedy_policy(const NetParams& params, const WorkspaceConfig& ws) {
    return [params, ws](const Scene& scene, Rng&) {
        const Tensor obs = render_observation(scene, ws);
        return greedy_action(forward(params, obs, ws));
    };
}

Policy make_random_on_object_policy(const WorkspaceConfig& ws) {
    return [ws](const Scene& scene, Rng& rng) {
        const std::vector<Grid> masks = make_mask_set(scene, ws);
        std::vector<Action> on;
        for (int p = 0; p < static_cast<int>(masks.size()); ++p)
            for (int j = 0; j < masks[p].rows; ++j)
                for (int i = 0; i < masks[p].cols; ++i)
                    if (masks[p].at(j, i) != 0.0) on.push_back({i, j, p});
        if (on.empty())
            return action_from_flat(static_cast<int>(rng.uniform_index(
                                        static_cast<std::uint64_t>(ws.total_actions()))),
                                    ws);
        return on[rng.uniform_index(on.size())];
    };
}

Policy make_random_uniform_policy(const WorkspaceConfig& ws) {
    return [ws](const Scene&, Rng& rng) {
        return action_from_flat(
            static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(ws.total_actions()))),
            ws);
    };
}

Policy make_policy(Method m, const NetParams& params, const WorkspaceConfig& ws) {
    switch (m) {
        case Method::Dqn:
        case Method::KiDqn:
            return make_greedy_policy(params, ws);
        case Method::RandomOnObject:
            return make_random_on_object_policy(ws);
        case Method::RandomUniform:
            return make_random_uniform_policy(ws);
    }
    throw std::invalid_argument("make_policy: unknown method");
}

EvalReport eval_suite(const Policy& policy, const std::vector<Scene>& scenes, Regime regime,
                      int cap, const WorkspaceConfig& ws, std::uint64_t policy_seed) {
    EvalReport rep;
    rep.scenes.reserve(scenes.size());
    double action_sum = 0.0;
    for (std::size_t idx = 0; idx < scenes.size(); ++idx) {
        Rng rng(mix_seed(policy_seed, idx));
        Scene scene = scenes[idx];
        SceneResult res;
        for (int t = 0; t < cap; ++t) {
            const Action a = policy(scene, rng);
            const PushOutcome out = execute_shovel_grasp(scene, a, ws, regime);
            ++res.actions_used;
            if (out.kind == PushKind::WallCollision) {
                ++res.collisions;
                if (regime == Regime::Real) break;  // instant failure, scene over
            }
            scene = out.scene;
            if (out.kind == PushKind::GraspSuccess) {
                res.success = true;
                break;
            }
        }
        rep.collisions += res.collisions;
        if (res.success) rep.success_rate += 1.0;
        action_sum += res.actions_used;
        rep.scenes.push_back(res);
    }
    if (!scenes.empty()) {
        rep.success_rate /= static_cast<double>(scenes.size());
        rep.mean_actions = action_sum / static_cast<double>(scenes.size());
    }
    return rep;
}

TrainResult run_training(const RunConfig& cfg, bool quiet) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    fs::create_directories(cfg.output_dir);
    const fs::path out(cfg.output_dir);
    {
        std::ofstream os(out / "config.txt", std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("output dir not writable: " + cfg.output_dir);
        os << serialize_run_config(cfg);
    }

    const std::vector<Scene> eval_scenes =
        make_eval_scenes(Suite::TrainDist, cfg.eval_seed, cfg.eval_scene_count, cfg.ws);
    {
        std::ofstream os(out / "eval_scenes.txt", std::ios::binary | std::ios::trunc);
        write_scene_set(os, eval_scenes);
    }

    RunState st = make_run_state(cfg.method, cfg.seed, cfg.iterations, cfg.ws, cfg.net, cfg.learn);
    const std::string metrics_path = (out / "metrics.csv").string();
    if (fs::exists(metrics_path)) fs::remove(metrics_path);

    TrainResult result;
    result.output_dir = cfg.output_dir;

    for (std::uint64_t it = 1; it <= cfg.iterations; ++it) {
        try {
            train_step(st);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("training aborted at iteration " + std::to_string(it) +
                                     ": " + e.what());
        }
        if (it % static_cast<std::uint64_t>(cfg.eval_every) == 0) {
            const Policy greedy = make_greedy_policy(st.params, cfg.ws);
            const EvalReport rep =
                eval_suite(greedy, eval_scenes, Regime::Sim, cfg.eval_trial_cap, cfg.ws);
            append_metrics_row(metrics_path, it, Suite::TrainDist, Regime::Sim, rep);
            const std::string ckpt = (out / checkpoint_name(it)).string();
            save_checkpoint(ckpt, snapshot_run(cfg, st));
            result.eval_history.emplace_back(it, rep.success_rate);
            if (!quiet)
                std::printf("[%s] iter %llu  success %.3f  mean-actions %.2f  collisions %d\n",
                            method_name(cfg.method).c_str(),
                            static_cast<unsigned long long>(it), rep.success_rate,
                            rep.mean_actions, rep.collisions);
        }
    }

    result.final_checkpoint = (out / "checkpoint_final.ckpt").string();
    save_checkpoint(result.final_checkpoint, snapshot_run(cfg, st));
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

int cmd_train(const std::string& config_path) {
    try {
        const RunConfig cfg = load_run_config(config_path);
        const TrainResult res = run_training(cfg, false);
        std::printf("trained %llu iterations in %.1f s; final checkpoint %s\n",
                    static_cast<unsigned long long>(cfg.iterations), res.seconds,
                    res.final_checkpoint.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "train: %s\n", e.what());
        return 1;
    }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& suite_str,
             const std::string& regime_str, const std::string& policy_name,
             std::optional<std::uint64_t> eval_seed_override, const std::string& csv_path) {
    try {
        const Checkpoint ckpt = load_checkpoint(checkpoint_path);
        const RunConfig cfg = ckpt.config();
        const Suite suite = parse_suite(suite_str);
        const Regime regime = parse_regime(regime_str);
        const std::uint64_t suite_seed =
            suite == Suite::TrainDist ? cfg.eval_seed : cfg.unseen_seed;
        if (eval_seed_override && *eval_seed_override != suite_seed)
            throw std::runtime_error(
                "suite seed mismatch: checkpoint config freezes seed " +
                std::to_string(suite_seed) + " for " + suite_name(suite) + ", got " +
                std::to_string(*eval_seed_override));

        const Method m = policy_name.empty() ? cfg.method : parse_method(policy_name);
        const Policy policy = make_policy(m, ckpt.params, cfg.ws);
        const std::vector<Scene> scenes =
            make_eval_scenes(suite, suite_seed, cfg.eval_scene_count, cfg.ws);
        const EvalReport rep =
            eval_suite(policy, scenes, regime, cfg.eval_trial_cap, cfg.ws);

        std::printf("checkpoint %s  iteration %llu  policy %s\n", checkpoint_path.c_str(),
                    static_cast<unsigned long long>(ckpt.iteration), method_name(m).c_str());
        std::printf("suite %s  regime %s  scenes %zu\n", suite_name(suite).c_str(),
                    regime_name(regime).c_str(), scenes.size());
        for (std::size_t i = 0; i < rep.scenes.size(); ++i) {
            const SceneResult& r = rep.scenes[i];
            std::printf("  scene %2zu: %s  actions %2d  collisions %d\n", i,
                        r.success ? "success" : "failure", r.actions_used, r.collisions);
        }
        std::printf("success_rate %.4f  mean_actions %.2f  collisions %d\n", rep.success_rate,
                    rep.mean_actions, rep.collisions);
        if (!csv_path.empty())
            append_metrics_row(csv_path, ckpt.iteration, suite, regime, rep);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "eval: %s\n", e.what());
        return 1;
    }
}

int cmd_viz(const std::string& checkpoint_path, std::uint64_t scene_seed,
            const std::string& suite_str, const std::string& out_dir, int zoom_override) {
    try {
        const Checkpoint ckpt = load_checkpoint(checkpoint_path);
        const RunConfig cfg = ckpt.config();
        const Suite suite = parse_suite(suite_str);
        const int zoom = zoom_override > 0 ? zoom_override : cfg.viz_zoom;
        const WorkspaceConfig& ws = cfg.ws;

        const Scene scene = suite == Suite::TrainDist
                                ? generate_training_scene(scene_seed, ws)
                                : generate_test_scene(scene_seed, ws);
        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        {
            std::ofstream os(dir / "scene.txt", std::ios::binary | std::ios::trunc);
            os << serialize_scene(scene);
        }

        const Tensor obs = render_observation(scene, ws);
        Grid height(ws.obs_grid, ws.obs_grid), intensity(ws.obs_grid, ws.obs_grid);
        for (int r = 0; r < ws.obs_grid; ++r)
            for (int c = 0; c < ws.obs_grid; ++c) {
                height.at(r, c) = obs.at(0, r, c);
                intensity.at(r, c) = obs.at(1, r, c);
            }
        // Observation pixels are half the size of action cells; halve the zoom
        // (min 1) so the files roughly match the heatmaps.
        const int obs_zoom = zoom >= 2 ? zoom / 2 : 1;
        write_pgm((dir / "obs_height.pgm").string(), height, 0.0, 1.0, obs_zoom);
        write_pgm((dir / "obs_intensity.pgm").string(), intensity, 0.0, 1.0, obs_zoom);

        const QMapSet qmaps = forward(ckpt.params, obs, ws);
        const std::vector<Grid> masks = make_mask_set(scene, ws);

        // Joint min-max normalization keeps the rotation maps comparable.
        double lo = qmaps.maps[0].v[0], hi = lo;
        for (const Grid& g : qmaps.maps)
            for (double v : g.v) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }

        const Action best = greedy_action(qmaps);
        const WorldAction wa = action_to_world(best, ws);
        for (std::size_t p = 0; p < qmaps.maps.size(); ++p) {
            const int deg = static_cast<int>(std::lround(ws.rotations[p]));
            char name[64];
            std::snprintf(name, sizeof name, "qmap_phi%03d.ppm", deg);
            Image heat = grid_to_heatmap(qmaps.maps[p], lo, hi, zoom);
            write_ppm((dir / name).string(), heat);

            std::snprintf(name, sizeof name, "mask_phi%03d.pgm", deg);
            write_pgm((dir / name).string(), masks[p], 0.0, 1.0, zoom);

            // Overlay: on-mask cells get a green tint over the heatmap; the
            // greedy action gets the red circle-and-arrow marker.
            Image over = heat;
            for (int j = 0; j < masks[p].rows; ++j)
                for (int i = 0; i < masks[p].cols; ++i) {
                    if (masks[p].at(j, i) == 0.0) continue;
                    double cx, cy;
                    cell_center_px(masks[p].rows, zoom, j, i, cx, cy);
                    for (int dy = 0; dy < zoom; ++dy)
                        for (int dx = 0; dx < zoom; ++dx) {
                            RGB& q = over.at(static_cast<int>(cy - zoom * 0.5) + dy,
                                             static_cast<int>(cx - zoom * 0.5) + dx);
                            q.g = static_cast<std::uint8_t>(q.g / 2 + 96);
                        }
                }
            if (static_cast<std::size_t>(best.phi_index) == p) {
                double cx, cy;
                cell_center_px(masks[p].rows, zoom, best.j, best.i, cx, cy);
                const RGB red{255, 0, 0};
                draw_circle(over, cx, cy, zoom * 1.25, red);
                // Screen y grows downward, world y upward.
                draw_segment(over, cx, cy, cx + wa.direction.x * zoom * 3.0,
                             cy - wa.direction.y * zoom * 3.0, red);
            }
            std::snprintf(name, sizeof name, "overlay_phi%03d.ppm", deg);
            write_ppm((dir / name).string(), over);
        }
        std::printf("viz: scene seed %llu suite %s  greedy action (i=%d, j=%d, phi=%g)\n",
                    static_cast<unsigned long long>(scene_seed), suite_name(suite).c_str(),
                    best.i, best.j, ws.rotations[best.phi_index]);
        std::printf("wrote %s: scene.txt, obs_*.pgm, qmap_phi*.ppm, mask_phi*.pgm, overlay_phi*.ppm\n",
                    out_dir.c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "viz: %s\n", e.what());
        return 1;
    }
}

}  // namespace s2w

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "s2w/grid.hpp"
#include "s2w/harness.hpp"
#include "s2w/render.hpp"
#include "s2w/sim.hpp"
#include "s2w/tabular.hpp"

namespace py = pybind11;
using namespace s2w;

namespace {

py::array_t<double> tensor_to_array(const Tensor& t) {
    py::array_t<double> out({t.c, t.h, t.w});
    std::copy(t.v.begin(), t.v.end(), out.mutable_data());
    return out;
}

Tensor array_to_tensor(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3) throw std::invalid_argument("observation must be a (C, H, W) array");
    Tensor t(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
             static_cast<int>(a.shape(2)));
    std::copy(a.data(), a.data() + a.size(), t.v.begin());
    return t;
}

py::array_t<double> grids_to_array(const std::vector<Grid>& gs) {
    if (gs.empty()) throw std::invalid_argument("empty grid set");
    const int rows = gs[0].rows, cols = gs[0].cols;
    py::array_t<double> out({static_cast<int>(gs.size()), rows, cols});
    double* p = out.mutable_data();
    for (const Grid& g : gs) {
        std::copy(g.v.begin(), g.v.end(), p);
        p += g.v.size();
    }
    return out;
}

QMapSet array_to_qmaps(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 3) throw std::invalid_argument("q maps must be a (P, N, N) array");
    QMapSet q;
    const double* p = a.data();
    for (py::ssize_t k = 0; k < a.shape(0); ++k) {
        Grid g(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(2)));
        std::copy(p, p + g.v.size(), g.v.begin());
        p += g.v.size();
        q.maps.push_back(std::move(g));
    }
    return q;
}

py::array_t<double> qtable_to_array(const std::vector<double>& q, const TinyMDP& mdp) {
    py::array_t<double> out({mdp.states + 0, mdp.actions + 0});
    std::copy(q.begin(), q.end(), out.mutable_data());
    return out;
}

StepSizeRule make_rule(std::optional<double> constant_alpha) {
    StepSizeRule rule;
    if (constant_alpha) {
        rule.kind = StepSizeRule::Kind::Constant;
        rule.value = *constant_alpha;
    }
    return rule;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "slide-to-wall grasping: push simulator, equivariant Q network, trainers";

    py::class_<Pose2D>(m, "Pose2D")
        .def(py::init<>())
        .def(py::init([](double x, double y, double theta_deg) {
                 return Pose2D{x, y, theta_deg};
             }),
             py::arg("x"), py::arg("y"), py::arg("theta_deg") = 0.0)
        .def_readwrite("x", &Pose2D::x)
        .def_readwrite("y", &Pose2D::y)
        .def_readwrite("theta_deg", &Pose2D::theta_deg)
        .def("__repr__", [](const Pose2D& p) {
            return "Pose2D(x=" + std::to_string(p.x) + ", y=" + std::to_string(p.y) +
                   ", theta_deg=" + std::to_string(p.theta_deg) + ")";
        });

    py::class_<SceneObject>(m, "SceneObject")
        .def(py::init<>())
        .def_readwrite("pose", &SceneObject::pose)
        .def_readwrite("width_cm", &SceneObject::width_cm)
        .def_readwrite("length_cm", &SceneObject::length_cm)
        .def_readwrite("height_cm", &SceneObject::height_cm)
        .def_readwrite("intensity", &SceneObject::intensity);

    py::class_<Wall>(m, "Wall")
        .def(py::init<>())
        .def_readwrite("pose", &Wall::pose)
        .def_readwrite("length_cm", &Wall::length_cm)
        .def_readwrite("thickness_cm", &Wall::thickness_cm)
        .def_readwrite("height_cm", &Wall::height_cm)
        .def_readwrite("intensity", &Wall::intensity);

    py::class_<Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("object", &Scene::object)
        .def_readwrite("walls", &Scene::walls)
        .def_readwrite("floor_intensity", &Scene::floor_intensity)
        .def_readwrite("rng_seed", &Scene::rng_seed)
        .def("__eq__", [](const Scene& a, const Scene& b) { return a == b; })
        .def("__str__", &serialize_scene);

    py::class_<WorkspaceConfig>(m, "WorkspaceConfig")
        .def(py::init<>())
        .def_readwrite("side_cm", &WorkspaceConfig::side_cm)
        .def_readwrite("action_grid", &WorkspaceConfig::action_grid)
        .def_readwrite("obs_grid", &WorkspaceConfig::obs_grid)
        .def_readwrite("rotations", &WorkspaceConfig::rotations)
        .def_readwrite("channels", &WorkspaceConfig::channels)
        .def("total_actions", &WorkspaceConfig::total_actions)
        .def("cell_cm", &WorkspaceConfig::cell_cm)
        .def("obs_cell_cm", &WorkspaceConfig::obs_cell_cm)
        .def("scale", &WorkspaceConfig::scale)
        .def("validate", &WorkspaceConfig::validate)
        .def_static("desk_scale", &WorkspaceConfig::desk_scale);

    py::class_<Action>(m, "Action")
        .def(py::init<>())
        .def(py::init([](int i, int j, int phi_index) {
                 return Action{i, j, phi_index};
             }),
             py::arg("i"), py::arg("j"), py::arg("phi_index") = 0)
        .def_readwrite("i", &Action::i)
        .def_readwrite("j", &Action::j)
        .def_readwrite("phi_index", &Action::phi_index)
        .def("__eq__", [](const Action& a, const Action& b) { return a == b; })
        .def("__repr__", [](const Action& a) {
            return "Action(i=" + std::to_string(a.i) + ", j=" + std::to_string(a.j) +
                   ", phi_index=" + std::to_string(a.phi_index) + ")";
        });

    py::class_<WorldAction>(m, "WorldAction")
        .def_property_readonly("point",
                               [](const WorldAction& w) {
                                   return py::make_tuple(w.point.x, w.point.y);
                               })
        .def_property_readonly("direction",
                               [](const WorldAction& w) {
                                   return py::make_tuple(w.direction.x, w.direction.y);
                               })
        .def_readonly("phi_deg", &WorldAction::phi_deg);

    py::enum_<Regime>(m, "Regime")
        .value("SIM", Regime::Sim)
        .value("REAL", Regime::Real);

    py::enum_<PushKind>(m, "PushKind")
        .value("GRASP_SUCCESS", PushKind::GraspSuccess)
        .value("OBJECT_MOVED", PushKind::ObjectMoved)
        .value("NO_CONTACT", PushKind::NoContact)
        .value("WALL_COLLISION", PushKind::WallCollision);

    py::class_<PushOutcome>(m, "PushOutcome")
        .def_readonly("kind", &PushOutcome::kind)
        .def_readonly("reward", &PushOutcome::reward)
        .def_readonly("object_displacement_cm", &PushOutcome::object_displacement_cm)
        .def_readonly("scene", &PushOutcome::scene);

    py::class_<ConvSpec>(m, "ConvSpec")
        .def(py::init<>())
        .def(py::init([](int kernel, int stride, int out_channels, bool relu) {
                 return ConvSpec{kernel, stride, out_channels, relu};
             }),
             py::arg("kernel"), py::arg("stride"), py::arg("out_channels"),
             py::arg("relu") = true)
        .def_readwrite("kernel", &ConvSpec::kernel)
        .def_readwrite("stride", &ConvSpec::stride)
        .def_readwrite("out_channels", &ConvSpec::out_channels)
        .def_readwrite("relu", &ConvSpec::relu);

    py::class_<NetConfig>(m, "NetConfig")
        .def(py::init<>())
        .def_readwrite("trunk", &NetConfig::trunk)
        .def_readwrite("head_pairs", &NetConfig::head_pairs)
        .def_static("defaults", &NetConfig::defaults);

    py::class_<NetParams>(m, "NetParams")
        .def_readonly("stamp", &NetParams::stamp)
        .def("parameter_count", &NetParams::parameter_count);

    py::class_<LearnerConfig>(m, "LearnerConfig")
        .def(py::init<>())
        .def_readwrite("gamma", &LearnerConfig::gamma)
        .def_readwrite("lr_trunk", &LearnerConfig::lr_trunk)
        .def_readwrite("lr_head", &LearnerConfig::lr_head)
        .def_readwrite("momentum", &LearnerConfig::momentum)
        .def_readwrite("weight_decay", &LearnerConfig::weight_decay)
        .def_readwrite("target_sync_every", &LearnerConfig::target_sync_every)
        .def_readwrite("replay_capacity", &LearnerConfig::replay_capacity)
        .def_readwrite("per_alpha", &LearnerConfig::per_alpha)
        .def_readwrite("per_beta_start", &LearnerConfig::per_beta_start)
        .def_readwrite("per_beta_end", &LearnerConfig::per_beta_end)
        .def_readwrite("per_eps", &LearnerConfig::per_eps)
        .def_readwrite("eps_start", &LearnerConfig::eps_start)
        .def_readwrite("eps_end", &LearnerConfig::eps_end)
        .def_readwrite("eps_fraction", &LearnerConfig::eps_fraction)
        .def_readwrite("episode_cap", &LearnerConfig::episode_cap);

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_property(
            "method", [](const RunConfig& c) { return method_name(c.method); },
            [](RunConfig& c, const std::string& name) { c.method = parse_method(name); })
        .def_readwrite("iterations", &RunConfig::iterations)
        .def_readwrite("eval_every", &RunConfig::eval_every)
        .def_readwrite("eval_scene_count", &RunConfig::eval_scene_count)
        .def_readwrite("eval_trial_cap", &RunConfig::eval_trial_cap)
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("eval_seed", &RunConfig::eval_seed)
        .def_readwrite("unseen_seed", &RunConfig::unseen_seed)
        .def_readwrite("output_dir", &RunConfig::output_dir)
        .def_readwrite("viz_zoom", &RunConfig::viz_zoom)
        .def_readwrite("ws", &RunConfig::ws)
        .def_readwrite("net", &RunConfig::net)
        .def_readwrite("learn", &RunConfig::learn)
        .def("validate", &RunConfig::validate);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("output_dir", &TrainResult::output_dir)
        .def_readonly("final_checkpoint", &TrainResult::final_checkpoint)
        .def_readonly("eval_history", &TrainResult::eval_history)
        .def_readonly("seconds", &TrainResult::seconds);

    py::class_<Checkpoint>(m, "Checkpoint")
        .def_readonly("version", &Checkpoint::version)
        .def_readonly("config_text", &Checkpoint::config_text)
        .def_readonly("iteration", &Checkpoint::iteration)
        .def_readonly("params", &Checkpoint::params)
        .def_readonly("target_params", &Checkpoint::target_params)
        .def("config", &Checkpoint::config);

    py::class_<SceneResult>(m, "SceneResult")
        .def_readonly("success", &SceneResult::success)
        .def_readonly("actions_used", &SceneResult::actions_used)
        .def_readonly("collisions", &SceneResult::collisions);

    py::class_<EvalReport>(m, "EvalReport")
        .def_readonly("success_rate", &EvalReport::success_rate)
        .def_readonly("mean_actions", &EvalReport::mean_actions)
        .def_readonly("collisions", &EvalReport::collisions)
        .def_readonly("scenes", &EvalReport::scenes);

    py::class_<TinyMDP>(m, "TinyMDP")
        .def_readonly("states", &TinyMDP::states)
        .def_readonly("actions", &TinyMDP::actions)
        .def_readonly("gamma", &TinyMDP::gamma)
        .def_static("chain", &TinyMDP::chain, py::arg("n"), py::arg("gamma"));

    m.def("generate_training_scene", &generate_training_scene, py::arg("seed"), py::arg("ws"));
    m.def("generate_test_scene", &generate_test_scene, py::arg("seed"), py::arg("ws"));
    m.def("serialize_scene", &serialize_scene, py::arg("scene"));
    m.def("parse_scene", &parse_scene, py::arg("text"));

    m.def(
        "render_observation",
        [](const Scene& scene, const WorkspaceConfig& ws) {
            return tensor_to_array(render_observation(scene, ws));
        },
        py::arg("scene"), py::arg("ws"),
        "Top-down (2, M, M) observation: scaled heights and surface intensities.");
    m.def(
        "make_mask_set",
        [](const Scene& scene, const WorkspaceConfig& ws) {
            return grids_to_array(make_mask_set(scene, ws));
        },
        py::arg("scene"), py::arg("ws"),
        "Binary (P, N, N) object masks, one per configured rotation.");

    m.def("execute_shovel_grasp", &execute_shovel_grasp, py::arg("scene"), py::arg("action"),
          py::arg("ws"), py::arg("regime") = Regime::Sim);
    m.def("grasp_success", &grasp_success, py::arg("scene"), py::arg("action"), py::arg("ws"));
    m.def("action_to_world", &action_to_world, py::arg("action"), py::arg("ws"));
    m.def("action_flat_index", &action_flat_index, py::arg("action"), py::arg("ws"));
    m.def("action_from_flat", &action_from_flat, py::arg("flat"), py::arg("ws"));

    m.def("init_params", &init_params, py::arg("seed"), py::arg("net"), py::arg("ws"));
    m.def(
        "forward",
        [](const NetParams& params,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& obs,
           const WorkspaceConfig& ws) {
            QMapSet q = forward(params, array_to_tensor(obs), ws);
            return grids_to_array(q.maps);
        },
        py::arg("params"), py::arg("obs"), py::arg("ws"),
        "Q value maps as a (P, N, N) array.");
    m.def(
        "greedy_action",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& qmaps) {
            return greedy_action(array_to_qmaps(qmaps));
        },
        py::arg("qmaps"));

    m.def("serialize_run_config", &serialize_run_config, py::arg("config"));
    m.def("parse_run_config", &parse_run_config, py::arg("text"));
    m.def("load_run_config", &load_run_config, py::arg("path"));
    m.def("run_training", &run_training, py::arg("config"), py::arg("quiet") = true,
          "Full deterministic training run; writes metrics and checkpoints to "
          "config.output_dir.");
    m.def("load_checkpoint", py::overload_cast<const std::string&>(&load_checkpoint),
          py::arg("path"));
    m.def("save_checkpoint", &save_checkpoint, py::arg("path"), py::arg("checkpoint"));

    m.def(
        "make_eval_scenes",
        [](const std::string& suite, std::uint64_t suite_seed, int count,
           const WorkspaceConfig& ws) {
            return make_eval_scenes(parse_suite(suite), suite_seed, count, ws);
        },
        py::arg("suite"), py::arg("suite_seed"), py::arg("count"), py::arg("ws"));
    m.def(
        "eval_policy",
        [](const std::string& policy, const NetParams& params, const std::vector<Scene>& scenes,
           const std::string& regime, int cap, const WorkspaceConfig& ws,
           std::uint64_t policy_seed) {
            return eval_suite(make_policy(parse_method(policy), params, ws), scenes,
                              parse_regime(regime), cap, ws, policy_seed);
        },
        py::arg("policy"), py::arg("params"), py::arg("scenes"), py::arg("regime"),
        py::arg("cap"), py::arg("ws"), py::arg("policy_seed") = 7777,
        "Run a named policy (dqn | ki-dqn | random-on-object | random-uniform) over the "
        "scene list.");

    m.def(
        "value_iteration",
        [](const TinyMDP& mdp, double tol) {
            ValueIterationResult r = value_iteration(mdp, tol);
            return py::make_tuple(qtable_to_array(r.q, mdp), r.residuals);
        },
        py::arg("mdp"), py::arg("tol") = 1e-12);
    m.def(
        "tabular_q_learning",
        [](const TinyMDP& mdp, std::uint64_t steps, std::uint64_t seed, double epsilon,
           std::optional<double> constant_alpha) {
            return qtable_to_array(
                tabular_q_learning(mdp, steps, seed, epsilon, make_rule(constant_alpha)), mdp);
        },
        py::arg("mdp"), py::arg("steps"), py::arg("seed"), py::arg("epsilon") = 0.3,
        py::arg("constant_alpha") = py::none(),
        "Tabular control run; constant_alpha=None uses per-visit harmonic step sizes.");
    m.def(
        "tabular_ki_q_learning",
        [](const TinyMDP& mdp, const std::vector<std::uint8_t>& masks, std::uint64_t steps,
           std::uint64_t seed, double epsilon, std::optional<double> constant_alpha) {
            return qtable_to_array(
                tabular_ki_q_learning(mdp, masks, steps, seed, epsilon,
                                      make_rule(constant_alpha)),
                mdp);
        },
        py::arg("mdp"), py::arg("masks"), py::arg("steps"), py::arg("seed"),
        py::arg("epsilon") = 0.3, py::arg("constant_alpha") = py::none());
}

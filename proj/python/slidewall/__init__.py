"""Slide-to-wall grasping: quasi-static push simulator, rotation-equivariant
Q network, and the DQN / knowledge-induced DQN trainers, exposed from the C++
core."""

from slidewall._core import (
    Action,
    Checkpoint,
    ConvSpec,
    EvalReport,
    LearnerConfig,
    NetConfig,
    NetParams,
    Pose2D,
    PushKind,
    PushOutcome,
    Regime,
    RunConfig,
    Scene,
    SceneObject,
    SceneResult,
    TinyMDP,
    TrainResult,
    Wall,
    WorkspaceConfig,
    WorldAction,
    action_flat_index,
    action_from_flat,
    action_to_world,
    eval_policy,
    execute_shovel_grasp,
    forward,
    generate_test_scene,
    generate_training_scene,
    grasp_success,
    greedy_action,
    init_params,
    load_checkpoint,
    load_run_config,
    make_eval_scenes,
    make_mask_set,
    parse_run_config,
    parse_scene,
    render_observation,
    run_training,
    save_checkpoint,
    serialize_run_config,
    serialize_scene,
    tabular_ki_q_learning,
    tabular_q_learning,
    value_iteration,
)

__all__ = [
    "Action",
    "Checkpoint",
    "ConvSpec",
    "EvalReport",
    "LearnerConfig",
    "NetConfig",
    "NetParams",
    "Pose2D",
    "PushKind",
    "PushOutcome",
    "Regime",
    "RunConfig",
    "Scene",
    "SceneObject",
    "SceneResult",
    "TinyMDP",
    "TrainResult",
    "Wall",
    "WorkspaceConfig",
    "WorldAction",
    "action_flat_index",
    "action_from_flat",
    "action_to_world",
    "eval_policy",
    "execute_shovel_grasp",
    "forward",
    "generate_test_scene",
    "generate_training_scene",
    "grasp_success",
    "greedy_action",
    "init_params",
    "load_checkpoint",
    "load_run_config",
    "make_eval_scenes",
    "make_mask_set",
    "parse_run_config",
    "parse_scene",
    "render_observation",
    "run_training",
    "save_checkpoint",
    "serialize_run_config",
    "serialize_scene",
    "tabular_ki_q_learning",
    "tabular_q_learning",
    "value_iteration",
]

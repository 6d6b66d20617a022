#pragma once

#include <cstdint>

#include "s2w/config.hpp"
#include "s2w/grid.hpp"
#include "s2w/scene.hpp"

namespace s2w {

/// Collision handling regime. Sim lets episodes continue after a tip-wall
/// collision (scene unchanged); Real means the caller must treat the episode
/// as failed. The outcome record itself is identical in both regimes.
enum class Regime { Sim, Real };

enum class PushKind { GraspSuccess, ObjectMoved, NoContact, WallCollision };

struct PushOutcome {
    PushKind kind = PushKind::NoContact;
    int reward = 0;  // 1 iff kind == GraspSuccess
    double object_displacement_cm = 0.0;
    Scene scene;  // post-action world state
};

/// Motion-primitive constants (cm values at the 40 cm reference scale; all
/// scale linearly with cfg.side_cm).
inline constexpr double kRetreatCm = 10.0;
inline constexpr double kContactEpsCm = 0.5;
inline constexpr double kThetaTolDeg = 30.0;
inline constexpr double kMinWallHeightCm = 0.5;
inline constexpr int kEpisodeCap = 15;

/// Execute a shovel-grasp primitive: the tip retreats kRetreatCm behind the
/// action point along the push direction, sweeps forward to it, and drags the
/// object quasi-statically (sticking contact, no free-space rotation). A tip
/// path blocked by a wall before touching the object is a WallCollision; a
/// path that never meets the object is NoContact. Object translation stops at
/// the first wall contact or workspace boundary; on wall contact the object
/// snaps flush against the wall face (the snap is skipped if it would leave
/// the workspace or overlap a wall). Deterministic and pure.
PushOutcome execute_shovel_grasp(const Scene& scene, const Action& a,
                                 const WorkspaceConfig& cfg, Regime regime);

/// Grasp predicate at the moment the tip reaches the action point: the point
/// lies in the object footprint; the object is within kContactEpsCm of some
/// wall; the push direction is within kThetaTolDeg of that wall's inward
/// normal; and that wall is at least kMinWallHeightCm tall.
bool grasp_success(const Scene& scene, const Action& a, const WorkspaceConfig& cfg);

/// One tall wall near the corner the push directions point toward (inward
/// normal uniform on [180, 270] deg, inner face 1-8 cm from the corner; the
/// wall may extend past the workspace edge, like a desk-edge fence), plus a
/// box object at a uniform collision-free pose strictly inside the workspace.
Scene generate_training_scene(std::uint64_t seed, const WorkspaceConfig& cfg);

/// One or two short walls (length U[10,20] cm, height U[0.5,3] cm, arbitrary
/// orientation, fully inside the workspace); object distribution as training.
Scene generate_test_scene(std::uint64_t seed, const WorkspaceConfig& cfg);

/// Gap between the object footprint and the wall face plane, measured along
/// the wall's normal toward the object (0 when flush, negative only within
/// numerical slack). Used by progress tests and the grasp predicate's
/// contact check is the full footprint distance, not this.
double wall_face_gap(const SceneObject& object, const Wall& wall);

}  // namespace s2w

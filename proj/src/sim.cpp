#include "s2w/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "s2w/rng.hpp"

namespace s2w {

namespace {

// Sign of the side of the wall centerline the object sits on (+1 along the
// wall normal). Exactly-centered degenerates to +1; it cannot occur for
// non-overlapping scenes.
double object_side_sign(const OrientedRect& obj, const OrientedRect& wall) {
    const double d = (obj.center - wall.center).dot(wall.normal());
    return d < 0.0 ? -1.0 : 1.0;
}

Vec2 wall_inward_normal(const OrientedRect& obj, const OrientedRect& wall) {
    // Points from the object into the wall face it would contact.
    return wall.normal() * -object_side_sign(obj, wall);
}

bool scene_pose_valid(const Scene& s, const OrientedRect& fp, double side) {
    if (!rect_inside_workspace(fp, side)) return false;
    for (const Wall& w : s.walls) {
        if (rects_overlap(fp, w.footprint())) return false;
    }
    return true;
}

// Nearest orientation to `current_deg` among wall-axis alignments (the wall
// axis plus any quarter turn).
double snapped_angle(double current_deg, double wall_axis_deg) {
    double best = current_deg;
    double best_abs = 1e18;
    for (int k = 0; k < 4; ++k) {
        const double cand = normalize_deg(wall_axis_deg + 90.0 * k);
        const double d = std::abs(angle_diff_deg(current_deg, cand));
        if (d < best_abs) {
            best_abs = d;
            best = cand;
        }
    }
    return best;
}

}  // namespace

double wall_face_gap(const SceneObject& object, const Wall& wall) {
    const OrientedRect obj = object.footprint();
    const OrientedRect wf = wall.footprint();
    const Vec2 n_in = wall_inward_normal(obj, wf);
    const double sep = (wf.center - obj.center).dot(n_in);
    return sep - projection_radius(obj, n_in) - wf.half_wid;
}

PushOutcome execute_shovel_grasp(const Scene& scene, const Action& a,
                                 const WorkspaceConfig& cfg, Regime) {
    const WorldAction wa = action_to_world(a, cfg);  // throws on malformed action
    const double retreat = kRetreatCm * cfg.scale();
    const Vec2 p = wa.point;
    const Vec2 u = wa.direction;
    const Vec2 start = p - u * retreat;

    PushOutcome out;
    out.scene = scene;

    // First thing the tip meets along its sweep decides the branch: a wall
    // ahead of the object blocks the primitive outright; an object hit starts
    // the push; neither is a no-op.
    const double t_obj = segment_rect_entry(start, p, scene.object.footprint());
    double t_wall = -1.0;
    for (const Wall& w : scene.walls) {
        const double t = segment_rect_entry(start, p, w.footprint());
        if (t >= 0.0 && (t_wall < 0.0 || t < t_wall)) t_wall = t;
    }
    if (t_wall >= 0.0 && (t_obj < 0.0 || t_wall <= t_obj)) {
        out.kind = PushKind::WallCollision;
        return out;
    }
    if (t_obj < 0.0) {
        out.kind = PushKind::NoContact;
        return out;
    }

    // Sticking push: the object translates with the tip for the remainder of
    // the sweep, stopping early at the first wall contact or workspace edge.
    const double push_avail = retreat * (1.0 - t_obj);
    const OrientedRect fp = scene.object.footprint();
    double s_wall = std::numeric_limits<double>::infinity();
    int wall_hit = -1;
    for (std::size_t k = 0; k < scene.walls.size(); ++k) {
        const double s = sweep_rect_contact(fp, u, push_avail, scene.walls[k].footprint());
        if (s < s_wall) {
            s_wall = s;
            wall_hit = static_cast<int>(k);
        }
    }
    const double s_ws = sweep_workspace_limit(fp, u, push_avail, cfg.side_cm);
    const double delta = std::min({push_avail, s_wall, s_ws});

    out.object_displacement_cm = delta;
    out.scene.object.pose.x += delta * u.x;
    out.scene.object.pose.y += delta * u.y;

    if (wall_hit >= 0 && s_wall <= delta + 1e-12) {
        // Wall contact: snap the object's orientation into alignment with the
        // wall axis and seat it flush on the contact face. Keep the contact
        // pose instead if the seated pose would violate containment (end or
        // corner contacts can do that).
        const Wall& w = scene.walls[static_cast<std::size_t>(wall_hit)];
        const OrientedRect wf = w.footprint();
        const OrientedRect moved = out.scene.object.footprint();
        const double sgn = object_side_sign(moved, wf);
        const Vec2 n = wf.normal();
        const Vec2 axis = wf.axis();

        SceneObject seated = out.scene.object;
        seated.pose.theta_deg = snapped_angle(moved.axis_deg, wf.axis_deg);
        const OrientedRect snapped_shape{{0.0, 0.0}, seated.pose.theta_deg,
                                         seated.width_cm * 0.5, seated.length_cm * 0.5};
        const double req = wf.half_wid + projection_radius(snapped_shape, n);
        const double t_par = (moved.center - wf.center).dot(axis);
        const Vec2 c = wf.center + axis * t_par + n * (sgn * req);
        seated.pose.x = c.x;
        seated.pose.y = c.y;

        Scene trial = out.scene;
        trial.object = seated;
        if (scene_pose_valid(trial, seated.footprint(), cfg.side_cm)) out.scene.object = seated;
    }

    if (grasp_success(out.scene, a, cfg)) {
        out.kind = PushKind::GraspSuccess;
        out.reward = 1;
    } else {
        out.kind = PushKind::ObjectMoved;
    }
    return out;
}

bool grasp_success(const Scene& scene, const Action& a, const WorkspaceConfig& cfg) {
    const WorldAction wa = action_to_world(a, cfg);
    const OrientedRect fp = scene.object.footprint();
    if (!fp.contains(wa.point)) return false;
    const double eps = kContactEpsCm * cfg.scale();
    const double min_h = kMinWallHeightCm * cfg.scale();
    const double cos_tol = std::cos(deg_to_rad(kThetaTolDeg));
    for (const Wall& w : scene.walls) {
        if (rect_distance(fp, w.footprint()) > eps) continue;
        const Vec2 n_in = wall_inward_normal(fp, w.footprint());
        if (wa.direction.dot(n_in) >= cos_tol && w.height_cm >= min_h) return true;
    }
    return false;
}

namespace {

// Object pose rejection sampling shared by both generators. Draw order is
// part of the determinism contract: theta, x, y per attempt. A cramped wall
// layout can make placement fail, in which case the caller redraws the walls.
bool place_object(Scene& s, Rng& rng, const WorkspaceConfig& cfg) {
    const double hl = s.object.width_cm * 0.5;
    const double hw = s.object.length_cm * 0.5;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double theta = rng.uniform(0.0, 360.0);
        const double rad = deg_to_rad(theta);
        const double ex = hl * std::abs(std::cos(rad)) + hw * std::abs(std::sin(rad));
        const double ey = hl * std::abs(std::sin(rad)) + hw * std::abs(std::cos(rad));
        const double x = rng.uniform(ex, cfg.side_cm - ex);
        const double y = rng.uniform(ey, cfg.side_cm - ey);
        s.object.pose = {x, y, theta};
        bool clear = true;
        for (const Wall& w : s.walls) {
            if (rects_overlap(s.object.footprint(), w.footprint())) {
                clear = false;
                break;
            }
        }
        if (clear) return true;
    }
    return false;
}

constexpr int kSceneLayoutTries = 64;

}  // namespace

Scene generate_training_scene(std::uint64_t seed, const WorkspaceConfig& cfg) {
    const double sc = cfg.scale();
    Rng rng(seed);
    Scene s;
    s.rng_seed = seed;
    s.floor_intensity = rng.uniform();

    for (int layout = 0; layout < kSceneLayoutTries; ++layout) {
        s.walls.clear();

        // Tall wall fencing the corner at the origin: inward normal (pointing
        // at the corner) uniform over the quarter the push directions cover,
        // inner face 1 to 8 cm from the corner. The far side may cross the
        // workspace edge; only the object must stay inside.
        Wall w;
        w.intensity = rng.uniform();
        const double n_in_deg = rng.uniform(180.0, 270.0);
        const double face_dist = rng.uniform(1.0, 8.0) * sc;
        w.length_cm = 30.0 * sc;
        w.thickness_cm = 5.0 * sc;
        w.height_cm = 25.0 * sc;
        const double n_out_deg = n_in_deg - 180.0;
        const Vec2 n_out = unit_from_deg(n_out_deg);
        const Vec2 center = n_out * (face_dist - w.thickness_cm * 0.5);
        w.pose = {center.x, center.y, normalize_deg(n_out_deg + 90.0)};
        s.walls.push_back(w);

        s.object.width_cm = 15.0 * sc;
        s.object.length_cm = 15.0 * sc;
        s.object.height_cm = 3.0 * sc;
        s.object.intensity = rng.uniform();
        if (place_object(s, rng, cfg)) return s;
    }
    throw std::runtime_error("scene generation: no feasible training layout");
}

Scene generate_test_scene(std::uint64_t seed, const WorkspaceConfig& cfg) {
    const double sc = cfg.scale();
    Rng rng(seed);
    Scene s;
    s.rng_seed = seed;
    s.floor_intensity = rng.uniform();

    // The wall count is drawn once; a layout that leaves no room for the
    // object is redrawn wholesale so every returned scene is feasible.
    const int wall_count = rng.bernoulli(0.5) ? 1 : 2;
    for (int layout = 0; layout < kSceneLayoutTries; ++layout) {
        s.walls.clear();
        bool walls_ok = true;
        for (int k = 0; k < wall_count && walls_ok; ++k) {
            Wall w;
            w.intensity = rng.uniform();
            w.height_cm = rng.uniform(0.5, 3.0) * sc;
            w.length_cm = rng.uniform(10.0, 20.0) * sc;
            w.thickness_cm = 5.0 * sc;
            bool placed = false;
            for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
                const double theta = rng.uniform(0.0, 180.0);
                const double rad = deg_to_rad(theta);
                const double hl = w.length_cm * 0.5;
                const double hw = w.thickness_cm * 0.5;
                const double ex = hl * std::abs(std::cos(rad)) + hw * std::abs(std::sin(rad));
                const double ey = hl * std::abs(std::sin(rad)) + hw * std::abs(std::cos(rad));
                const double x = rng.uniform(ex, cfg.side_cm - ex);
                const double y = rng.uniform(ey, cfg.side_cm - ey);
                w.pose = {x, y, theta};
                placed = true;
                for (const Wall& other : s.walls) {
                    if (rects_overlap(w.footprint(), other.footprint())) {
                        placed = false;
                        break;
                    }
                }
            }
            if (placed)
                s.walls.push_back(w);
            else
                walls_ok = false;
        }
        if (!walls_ok) continue;

        s.object.width_cm = 15.0 * sc;
        s.object.length_cm = 15.0 * sc;
        s.object.height_cm = 3.0 * sc;
        s.object.intensity = rng.uniform();
        if (place_object(s, rng, cfg)) return s;
    }
    throw std::runtime_error("scene generation: no feasible test layout");
}

}  // namespace s2w

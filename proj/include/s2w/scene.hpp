#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "s2w/config.hpp"
#include "s2w/geometry.hpp"

namespace s2w {

/// Rectangular rigid object to be grasped. Pose is the footprint center;
/// width spans the local axis at theta_deg, length the perpendicular.
struct SceneObject {
    Pose2D pose;
    double width_cm = 15.0;
    double length_cm = 15.0;
    double height_cm = 3.0;
    double intensity = 0.5;

    OrientedRect footprint() const {
        return {{pose.x, pose.y}, pose.theta_deg, width_cm * 0.5, length_cm * 0.5};
    }
};

/// Static wall segment. Pose center is the footprint center; the long axis
/// runs along theta_deg, thickness across it.
struct Wall {
    Pose2D pose;
    double length_cm = 30.0;
    double thickness_cm = 5.0;
    double height_cm = 25.0;
    double intensity = 0.8;

    OrientedRect footprint() const {
        return {{pose.x, pose.y}, pose.theta_deg, length_cm * 0.5, thickness_cm * 0.5};
    }
};

struct Scene {
    SceneObject object;
    std::vector<Wall> walls;
    double floor_intensity = 0.2;
    std::uint64_t rng_seed = 0;

    bool operator==(const Scene& o) const;
};

/// Text form, one scene: versioned header, one line per field group, doubles
/// printed with %.17g so parsing restores bit-identical values.
std::string serialize_scene(const Scene& s);
Scene parse_scene(const std::string& text);

/// Multiple scenes in one stream (used for the persisted evaluation suites).
void write_scene_set(std::ostream& os, const std::vector<Scene>& scenes);
std::vector<Scene> read_scene_set(std::istream& is);

}  // namespace s2w

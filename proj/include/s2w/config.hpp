#pragma once

#include <stdexcept>
#include <vector>

namespace s2w {

/// Push direction for rotation map phi is (kPushDirBaseDeg - phi) in world
/// degrees, so the default rotation set {0, 45, 90} pushes at {270, 225, 180}:
/// toward the wall corner at the workspace origin.
inline constexpr double kPushDirBaseDeg = 270.0;

/// Heightmap channel divisor: wall-top height in cm that maps to 1.0.
inline constexpr double kHeightScaleCm = 25.0;

/// Workspace and discretization parameters shared by the simulator, renderer
/// and Q-function. obs_grid must be exactly 2 * action_grid (the Q head
/// upsamples once).
struct WorkspaceConfig {
    double side_cm = 40.0;
    int action_grid = 40;                      // N: actions per rotation = N*N
    int obs_grid = 80;                         // M = 2N observation resolution
    std::vector<double> rotations = {0.0, 45.0, 90.0};  // degrees, in [0, 180)
    int channels = 2;                          // heightmap + intensity

    int total_actions() const {
        return action_grid * action_grid * static_cast<int>(rotations.size());
    }
    double cell_cm() const { return side_cm / action_grid; }
    double obs_cell_cm() const { return side_cm / obs_grid; }
    /// All physical constants scale linearly with workspace side.
    double scale() const { return side_cm / 40.0; }

    void validate() const {
        if (side_cm <= 0.0) throw std::invalid_argument("side_cm must be positive");
        if (action_grid <= 0) throw std::invalid_argument("action_grid must be positive");
        if (obs_grid != 2 * action_grid)
            throw std::invalid_argument("obs_grid must be exactly 2 * action_grid");
        if (channels != 2) throw std::invalid_argument("channels must be 2");
        if (rotations.empty()) throw std::invalid_argument("rotations must be non-empty");
        for (double r : rotations) {
            if (r < 0.0 || r >= 180.0)
                throw std::invalid_argument("rotations must lie in [0, 180)");
        }
    }

    static WorkspaceConfig desk_scale() {
        WorkspaceConfig c;
        c.action_grid = 20;
        c.obs_grid = 40;
        return c;
    }
};

}  // namespace s2w

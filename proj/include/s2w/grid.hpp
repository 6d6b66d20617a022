#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "s2w/config.hpp"
#include "s2w/geometry.hpp"

namespace s2w {

/// Dense row-major 2D grid of doubles. Row r corresponds to world-y band
/// [r*cell, (r+1)*cell), column c to world-x likewise: cell (r, c) has its
/// center at world point ((c+0.5)*cell, (r+0.5)*cell).
struct Grid {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Grid() = default;
    Grid(int r, int c, double fill = 0.0) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }
    bool square() const { return rows == cols; }
};

enum class Interp { Nearest, Bilinear };

/// Rotate a square grid counterclockwise by angle_deg about its center (the
/// point (S/2, S/2) in cell units). Output cells sample the source at the
/// inverse-rotated position; samples outside the source footprint are zero.
/// Bit-exact identity at 0 degrees in both modes.
Grid rotate_grid(const Grid& in, double angle_deg, Interp mode);

/// Exact adjoint (transpose) of rotate_grid for the same angle and mode:
/// scatters each output cell's cotangent back through the sampling weights.
/// For every pair of grids g, h: <rotate(g), h> == <g, rotate_adjoint(h)>.
Grid rotate_grid_adjoint(const Grid& grad_out, double angle_deg, Interp mode);

/// Discrete SaG action: cell (i, j) on the rotation map with angle
/// rotations[phi_index]. i indexes world-x (columns), j world-y (rows).
struct Action {
    int i = 0;
    int j = 0;
    int phi_index = 0;

    bool operator==(const Action& o) const {
        return i == o.i && j == o.j && phi_index == o.phi_index;
    }
};

/// Flat index layout: phi-major, then row j, then column i.
int action_flat_index(const Action& a, const WorkspaceConfig& cfg);
Action action_from_flat(int flat, const WorkspaceConfig& cfg);

struct WorldAction {
    Vec2 point;      // tip target position, cm
    Vec2 direction;  // unit push direction
    double phi_deg = 0.0;
};

/// Map an action to its world-frame push point and direction. The point is
/// the cell center of the phi-rotated frame carried back to the world by the
/// inverse rotation about the workspace center; the direction is
/// kPushDirBaseDeg - phi.
WorldAction action_to_world(const Action& a, const WorkspaceConfig& cfg);

}  // namespace s2w

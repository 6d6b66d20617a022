#pragma once

#include <vector>

#include "s2w/config.hpp"
#include "s2w/grid.hpp"
#include "s2w/scene.hpp"
#include "s2w/tensor.hpp"

namespace s2w {

/// Top-down orthographic observation, C x M x M. Channel 0: tallest entity
/// height over the cell center, divided by kHeightScaleCm (walls taller than
/// the scale exceed 1.0 by design). Channel 1: intensity of the topmost
/// entity, floor intensity on empty cells.
Tensor render_observation(const Scene& scene, const WorkspaceConfig& cfg);

/// Binary action mask for one rotation: rasterize the object footprint at
/// observation resolution, rotate by phi (nearest neighbor), then downsample
/// 2x with a >= 2-of-4 subcell vote. Cells are 0.0 / 1.0.
Grid rasterize_object_mask(const Scene& scene, double phi_deg, const WorkspaceConfig& cfg);

/// Masks for every configured rotation, index-aligned with QMapSet.
std::vector<Grid> make_mask_set(const Scene& scene, const WorkspaceConfig& cfg);

}  // namespace s2w

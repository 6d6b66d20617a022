#include "s2w/render.hpp"

namespace s2w {

Tensor render_observation(const Scene& scene, const WorkspaceConfig& cfg) {
    const int M = cfg.obs_grid;
    const double cell = cfg.obs_cell_cm();
    Tensor obs(cfg.channels, M, M);
    const OrientedRect obj = scene.object.footprint();
    std::vector<OrientedRect> wfs;
    wfs.reserve(scene.walls.size());
    for (const Wall& w : scene.walls) wfs.push_back(w.footprint());

    for (int r = 0; r < M; ++r) {
        for (int c = 0; c < M; ++c) {
            const Vec2 p{(c + 0.5) * cell, (r + 0.5) * cell};
            double height = 0.0;
            double intensity = scene.floor_intensity;
            for (std::size_t k = 0; k < wfs.size(); ++k) {
                if (scene.walls[k].height_cm > height && wfs[k].contains(p)) {
                    height = scene.walls[k].height_cm;
                    intensity = scene.walls[k].intensity;
                }
            }
            if (scene.object.height_cm > height && obj.contains(p)) {
                height = scene.object.height_cm;
                intensity = scene.object.intensity;
            }
            obs.at(0, r, c) = height / (kHeightScaleCm * cfg.scale());
            obs.at(1, r, c) = intensity;
        }
    }
    return obs;
}

Grid rasterize_object_mask(const Scene& scene, double phi_deg, const WorkspaceConfig& cfg) {
    const int M = cfg.obs_grid;
    const int N = cfg.action_grid;
    const double cell = cfg.obs_cell_cm();
    Grid fine(M, M);
    const OrientedRect obj = scene.object.footprint();
    for (int r = 0; r < M; ++r) {
        for (int c = 0; c < M; ++c) {
            const Vec2 p{(c + 0.5) * cell, (r + 0.5) * cell};
            if (obj.contains(p)) fine.at(r, c) = 1.0;
        }
    }
    const Grid rotated = rotate_grid(fine, phi_deg, Interp::Nearest);
    Grid mask(N, N);
    for (int j = 0; j < N; ++j) {
        for (int i = 0; i < N; ++i) {
            int votes = 0;
            for (int dy = 0; dy < 2; ++dy)
                for (int dx = 0; dx < 2; ++dx)
                    if (rotated.at(2 * j + dy, 2 * i + dx) != 0.0) ++votes;
            mask.at(j, i) = votes >= 2 ? 1.0 : 0.0;
        }
    }
    return mask;
}

std::vector<Grid> make_mask_set(const Scene& scene, const WorkspaceConfig& cfg) {
    std::vector<Grid> masks;
    masks.reserve(cfg.rotations.size());
    for (double phi : cfg.rotations) masks.push_back(rasterize_object_mask(scene, phi, cfg));
    return masks;
}

}  // namespace s2w

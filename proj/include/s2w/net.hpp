#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s2w/config.hpp"
#include "s2w/grid.hpp"
#include "s2w/tensor.hpp"

namespace s2w {

/// One trunk convolution: kernel in {1, 3} (3x3 layers use padding 1, 1x1
/// none), stride in {1, 2}, optional ReLU.
struct ConvSpec {
    int kernel = 3;
    int stride = 1;
    int out_channels = 16;
    bool relu = true;
};

/// Network shape: trunk convs run on the rotated observation; the head is
/// head_pairs repetitions of [2x nearest upsample, 1x1 conv] applied after the
/// features are rotated back. Intermediate head pairs keep the channel count
/// with ReLU; the final pair maps linearly to one channel.
struct NetConfig {
    std::vector<ConvSpec> trunk;
    int head_pairs = 1;

    static NetConfig defaults() {
        NetConfig c;
        c.trunk = {{3, 2, 16, true}, {3, 2, 32, true}, {3, 1, 32, true}};
        return c;
    }
};

/// Flattened per-layer execution plan (trunk convs then head convs).
struct LayerSpec {
    int in_c = 0;
    int out_c = 0;
    int kernel = 3;
    int stride = 1;
    int pad = 0;
    bool relu = false;
    bool trunk_group = true;     // selects the learning-rate group
    bool upsample_before = false;  // head convs follow a 2x upsample
};

struct ConvParams {
    std::vector<double> w;  // (out_c, in_c, k, k) row-major
    std::vector<double> b;  // (out_c)
};

struct NetParams {
    std::vector<LayerSpec> specs;
    std::vector<ConvParams> layer;
    std::vector<ConvParams> momentum;
    std::uint64_t stamp = 0;  // bumped on every update; guards stale caches

    std::size_t parameter_count() const;
};

using Gradients = std::vector<ConvParams>;  // same shapes as NetParams::layer

/// One N x N value grid per rotation, aligned with the action grid: map cell
/// (row j, col i) of maps[phi_index] is Action{i, j, phi_index}.
struct QMapSet {
    std::vector<Grid> maps;

    double at(const Action& a) const { return maps[a.phi_index].at(a.j, a.i); }
    double& at(const Action& a) { return maps[a.phi_index].at(a.j, a.i); }
};

/// Everything backward needs: per rotation, the input fed to each conv (after
/// any upsample) and each conv's preactivation.
struct ForwardCache {
    std::uint64_t stamp = 0;
    std::vector<std::vector<Tensor>> conv_inputs;  // [rotation][conv]
    std::vector<std::vector<Tensor>> preacts;      // [rotation][conv]
};

/// Build the layer plan and validate that the spatial composition maps
/// obs_grid to action_grid exactly. Throws std::invalid_argument otherwise.
std::vector<LayerSpec> build_layer_specs(const NetConfig& net, const WorkspaceConfig& ws);

/// He fan-in uniform weights (variance 2/fan_in), zero biases and momentum.
/// Deterministic per seed.
NetParams init_params(std::uint64_t seed, const NetConfig& net, const WorkspaceConfig& ws);

/// Per rotation phi: rotate the observation by phi (bilinear), run the trunk,
/// rotate features back by -phi, run the head. The 0-degree path performs no
/// resampling at all.
QMapSet forward(const NetParams& params, const Tensor& obs, const WorkspaceConfig& ws,
                ForwardCache* cache = nullptr);

/// Exact gradients of sum(grad_qmaps . qmaps) with respect to every
/// parameter. The cache must come from a forward on the same params value.
Gradients backward(const NetParams& params, const ForwardCache& cache,
                   const QMapSet& grad_qmaps, const WorkspaceConfig& ws);

Gradients zero_gradients(const NetParams& params);

/// Argmax over all cells; ties break to the smallest flat index
/// (rotation-major, then row, then column). NaN anywhere is a divergence
/// fault and throws.
Action greedy_action(const QMapSet& qmaps);

/// Argmax restricted to true mask cells, same tie-break. Throws if the mask
/// has no true cell.
Action masked_greedy_action(const QMapSet& qmaps, const std::vector<Grid>& masks);

double max_q_value(const QMapSet& qmaps);

}  // namespace s2w

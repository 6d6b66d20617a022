#include "s2w/net.hpp"

#include <cmath>
#include <stdexcept>

#include "s2w/rng.hpp"

namespace s2w {

namespace {

int conv_out_dim(int in, int k, int s, int p) { return (in + 2 * p - k) / s + 1; }

Tensor conv2d(const Tensor& in, const ConvParams& cp, const LayerSpec& sp) {
    const int oh = conv_out_dim(in.h, sp.kernel, sp.stride, sp.pad);
    const int ow = conv_out_dim(in.w, sp.kernel, sp.stride, sp.pad);
    Tensor out(sp.out_c, oh, ow);
    const int k = sp.kernel;
    for (int oc = 0; oc < sp.out_c; ++oc) {
        const double bias = cp.b[oc];
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double acc = bias;
                const int y0 = oy * sp.stride - sp.pad;
                const int x0 = ox * sp.stride - sp.pad;
                for (int ic = 0; ic < sp.in_c; ++ic) {
                    const std::size_t wbase = (static_cast<std::size_t>(oc) * sp.in_c + ic) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = y0 + ky;
                        if (iy < 0 || iy >= in.h) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = x0 + kx;
                            if (ix < 0 || ix >= in.w) continue;
                            acc += cp.w[wbase + ky * k + kx] * in.at(ic, iy, ix);
                        }
                    }
                }
                out.at(oc, oy, ox) = acc;
            }
        }
    }
    return out;
}

// Accumulates dW/db into grad and returns dInput, all for the same conv that
// produced dz from `in`.
Tensor conv2d_backward(const Tensor& in, const Tensor& dz, const ConvParams& cp,
                       const LayerSpec& sp, ConvParams& grad, bool need_dinput) {
    Tensor din;
    if (need_dinput) din = Tensor(in.c, in.h, in.w);
    const int k = sp.kernel;
    for (int oc = 0; oc < sp.out_c; ++oc) {
        for (int oy = 0; oy < dz.h; ++oy) {
            for (int ox = 0; ox < dz.w; ++ox) {
                const double g = dz.at(oc, oy, ox);
                if (g == 0.0) continue;
                grad.b[oc] += g;
                const int y0 = oy * sp.stride - sp.pad;
                const int x0 = ox * sp.stride - sp.pad;
                for (int ic = 0; ic < sp.in_c; ++ic) {
                    const std::size_t wbase = (static_cast<std::size_t>(oc) * sp.in_c + ic) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = y0 + ky;
                        if (iy < 0 || iy >= in.h) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = x0 + kx;
                            if (ix < 0 || ix >= in.w) continue;
                            grad.w[wbase + ky * k + kx] += g * in.at(ic, iy, ix);
                            if (need_dinput) din.at(ic, iy, ix) += g * cp.w[wbase + ky * k + kx];
                        }
                    }
                }
            }
        }
    }
    return din;
}

Tensor upsample2x(const Tensor& in) {
    Tensor out(in.c, in.h * 2, in.w * 2);
    for (int c = 0; c < in.c; ++c)
        for (int y = 0; y < out.h; ++y)
            for (int x = 0; x < out.w; ++x) out.at(c, y, x) = in.at(c, y / 2, x / 2);
    return out;
}

Tensor upsample2x_adjoint(const Tensor& dout) {
    Tensor din(dout.c, dout.h / 2, dout.w / 2);
    for (int c = 0; c < dout.c; ++c)
        for (int y = 0; y < dout.h; ++y)
            for (int x = 0; x < dout.w; ++x) din.at(c, y / 2, x / 2) += dout.at(c, y, x);
    return din;
}

Tensor rotate_tensor(const Tensor& t, double angle_deg, Interp mode, bool adjoint) {
    if (angle_deg == 0.0) return t;  // the 0-degree path must be resampling-free
    Tensor out(t.c, t.h, t.w);
    Grid plane(t.h, t.w);
    for (int c = 0; c < t.c; ++c) {
        std::copy(t.v.begin() + c * plane.v.size(), t.v.begin() + (c + 1) * plane.v.size(),
                  plane.v.begin());
        const Grid r = adjoint ? rotate_grid_adjoint(plane, angle_deg, mode)
                               : rotate_grid(plane, angle_deg, mode);
        std::copy(r.v.begin(), r.v.end(), out.v.begin() + c * plane.v.size());
    }
    return out;
}

void apply_relu(Tensor& t) {
    for (double& x : t.v)
        if (x < 0.0) x = 0.0;
}

}  // namespace

std::size_t NetParams::parameter_count() const {
    std::size_t n = 0;
    for (const ConvParams& l : layer) n += l.w.size() + l.b.size();
    return n;
}

std::vector<LayerSpec> build_layer_specs(const NetConfig& net, const WorkspaceConfig& ws) {
    if (net.trunk.empty()) throw std::invalid_argument("net: trunk must be non-empty");
    if (net.head_pairs < 1) throw std::invalid_argument("net: head_pairs must be >= 1");
    std::vector<LayerSpec> specs;
    int ch = ws.channels;
    int dim = ws.obs_grid;
    for (const ConvSpec& c : net.trunk) {
        if (c.kernel != 1 && c.kernel != 3)
            throw std::invalid_argument("net: trunk kernels must be 1 or 3");
        if (c.stride != 1 && c.stride != 2)
            throw std::invalid_argument("net: trunk strides must be 1 or 2");
        LayerSpec s;
        s.in_c = ch;
        s.out_c = c.out_channels;
        s.kernel = c.kernel;
        s.stride = c.stride;
        s.pad = c.kernel == 3 ? 1 : 0;
        s.relu = c.relu;
        s.trunk_group = true;
        specs.push_back(s);
        ch = c.out_channels;
        dim = conv_out_dim(dim, s.kernel, s.stride, s.pad);
        if (dim < 1) throw std::invalid_argument("net: trunk collapses the spatial grid");
    }
    for (int p = 0; p < net.head_pairs; ++p) {
        const bool last = p == net.head_pairs - 1;
        LayerSpec s;
        s.in_c = ch;
        s.out_c = last ? 1 : ch;
        s.kernel = 1;
        s.stride = 1;
        s.pad = 0;
        s.relu = !last;
        s.trunk_group = false;
        s.upsample_before = true;
        specs.push_back(s);
        ch = s.out_c;
        dim *= 2;
    }
    if (dim != ws.action_grid)
        throw std::invalid_argument("net: layer composition maps obs_grid to " +
                                    std::to_string(dim) + ", expected action_grid " +
                                    std::to_string(ws.action_grid));
    return specs;
}

NetParams init_params(std::uint64_t seed, const NetConfig& net, const WorkspaceConfig& ws) {
    NetParams p;
    p.specs = build_layer_specs(net, ws);
    Rng rng(seed);
    for (const LayerSpec& s : p.specs) {
        ConvParams cp;
        const std::size_t nw =
            static_cast<std::size_t>(s.out_c) * s.in_c * s.kernel * s.kernel;
        cp.w.resize(nw);
        cp.b.assign(static_cast<std::size_t>(s.out_c), 0.0);
        const double fan_in = static_cast<double>(s.in_c) * s.kernel * s.kernel;
        const double bound = std::sqrt(6.0 / fan_in);
        for (double& w : cp.w) w = rng.uniform(-bound, bound);
        p.layer.push_back(cp);
        ConvParams zero = cp;
        std::fill(zero.w.begin(), zero.w.end(), 0.0);
        p.momentum.push_back(zero);
    }
    return p;
}

QMapSet forward(const NetParams& params, const Tensor& obs, const WorkspaceConfig& ws,
                ForwardCache* cache) {
    if (obs.c != ws.channels || obs.h != ws.obs_grid || obs.w != ws.obs_grid)
        throw std::invalid_argument("forward: observation shape does not match config");
    const std::size_t R = ws.rotations.size();
    QMapSet qs;
    qs.maps.resize(R);
    if (cache) {
        cache->stamp = params.stamp;
        cache->conv_inputs.assign(R, {});
        cache->preacts.assign(R, {});
    }
    for (std::size_t r = 0; r < R; ++r) {
        const double phi = ws.rotations[r];
        Tensor x = rotate_tensor(obs, phi, Interp::Bilinear, false);
        bool unrotated = false;
        for (std::size_t l = 0; l < params.specs.size(); ++l) {
            const LayerSpec& s = params.specs[l];
            if (!s.trunk_group && !unrotated) {
                x = rotate_tensor(x, -phi, Interp::Bilinear, false);
                unrotated = true;
            }
            if (s.upsample_before) x = upsample2x(x);
            if (cache) cache->conv_inputs[r].push_back(x);
            Tensor z = conv2d(x, params.layer[l], s);
            if (cache) cache->preacts[r].push_back(z);
            if (s.relu) apply_relu(z);
            x = std::move(z);
        }
        Grid map(x.h, x.w);
        map.v = x.v;
        qs.maps[r] = std::move(map);
    }
    return qs;
}

Gradients zero_gradients(const NetParams& params) {
    Gradients g;
    for (const ConvParams& l : params.layer) {
        ConvParams z;
        z.w.assign(l.w.size(), 0.0);
        z.b.assign(l.b.size(), 0.0);
        g.push_back(z);
    }
    return g;
}

Gradients backward(const NetParams& params, const ForwardCache& cache,
                   const QMapSet& grad_qmaps, const WorkspaceConfig& ws) {
    if (cache.stamp != params.stamp)
        throw std::runtime_error("backward: cache is stale (params changed since forward)");
    if (grad_qmaps.maps.size() != ws.rotations.size() ||
        cache.conv_inputs.size() != ws.rotations.size())
        throw std::invalid_argument("backward: rotation count mismatch");

    Gradients grads = zero_gradients(params);
    const int L = static_cast<int>(params.specs.size());
    for (std::size_t r = 0; r < ws.rotations.size(); ++r) {
        const double phi = ws.rotations[r];
        const Grid& gmap = grad_qmaps.maps[r];
        Tensor grad(1, gmap.rows, gmap.cols);
        grad.v = gmap.v;
        bool all_zero = true;
        for (double x : grad.v)
            if (x != 0.0) {
                all_zero = false;
                break;
            }
        if (all_zero) continue;

        // Walk the plan backward; the trunk/head boundary re-applies the
        // feature rotation adjoint, the first trunk layer skips dInput.
        for (int l = L - 1; l >= 0; --l) {
            const LayerSpec& s = params.specs[l];
            if (s.relu) {
                const Tensor& z = cache.preacts[r][l];
                for (std::size_t k = 0; k < grad.v.size(); ++k)
                    if (z.v[k] <= 0.0) grad.v[k] = 0.0;
            }
            const bool first_trunk_conv = l == 0;
            grad = conv2d_backward(cache.conv_inputs[r][l], grad, params.layer[l], s, grads[l],
                                   !first_trunk_conv);
            if (first_trunk_conv) break;
            if (s.upsample_before) grad = upsample2x_adjoint(grad);
            if (!s.trunk_group && (l == 0 || params.specs[l - 1].trunk_group)) {
                // Crossing the unrotate boundary: adjoint of rotate by -phi.
                grad = rotate_tensor(grad, -phi, Interp::Bilinear, true);
            }
        }
    }
    return grads;
}

namespace {

Action scan_argmax(const QMapSet& qmaps, const std::vector<Grid>* masks) {
    if (qmaps.maps.empty()) throw std::invalid_argument("greedy_action: empty map set");
    Action best;
    double best_v = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t r = 0; r < qmaps.maps.size(); ++r) {
        const Grid& m = qmaps.maps[r];
        for (int j = 0; j < m.rows; ++j) {
            for (int i = 0; i < m.cols; ++i) {
                const double v = m.at(j, i);
                if (std::isnan(v))
                    throw std::runtime_error("divergence fault: NaN in Q maps");
                if (masks && (*masks)[r].at(j, i) == 0.0) continue;
                if (!found || v > best_v) {
                    found = true;
                    best_v = v;
                    best = {i, j, static_cast<int>(r)};
                }
            }
        }
    }
    if (!found) throw std::invalid_argument("masked_greedy_action: mask has no true cell");
    return best;
}

}  // namespace

Action greedy_action(const QMapSet& qmaps) { return scan_argmax(qmaps, nullptr); }

Action masked_greedy_action(const QMapSet& qmaps, const std::vector<Grid>& masks) {
    if (masks.size() != qmaps.maps.size())
        throw std::invalid_argument("masked_greedy_action: mask count mismatch");
    return scan_argmax(qmaps, &masks);
}

double max_q_value(const QMapSet& qmaps) {
    const Action a = greedy_action(qmaps);
    return qmaps.at(a);
}

}  // namespace s2w

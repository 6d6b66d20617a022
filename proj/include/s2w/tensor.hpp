#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace s2w {

/// Dense channel-major (C, H, W) tensor of doubles.
struct Tensor {
    int c = 0;
    int h = 0;
    int w = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int c_, int h_, int w_, double fill = 0.0)
        : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, fill) {}

    std::size_t idx(int ci, int y, int x) const {
        return (static_cast<std::size_t>(ci) * h + y) * w + x;
    }
    double& at(int ci, int y, int x) { return v[idx(ci, y, x)]; }
    double at(int ci, int y, int x) const { return v[idx(ci, y, x)]; }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

}  // namespace s2w

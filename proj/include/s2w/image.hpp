#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "s2w/grid.hpp"

namespace s2w {

struct RGB {
    std::uint8_t r = 0, g = 0, b = 0;
};

/// Raster image; row 0 is the top scanline of the written file.
struct Image {
    int w = 0, h = 0;
    std::vector<RGB> px;

    Image() = default;
    Image(int w_, int h_, RGB fill = {}) : w(w_), h(h_), px(static_cast<std::size_t>(w_) * h_, fill) {}
    RGB& at(int y, int x) { return px[static_cast<std::size_t>(y) * w + x]; }
};

/// Two-segment heat palette on t in [0,1]: black to pure red on [0, 1/2],
/// red to white on [1/2, 1].
RGB heat_color(double t);

/// Grid to grayscale, value range [lo, hi] clamped, each cell zoom x zoom
/// pixels. Grid row 0 (world y = 0) becomes the bottom of the image.
Image grid_to_gray(const Grid& g, double lo, double hi, int zoom);

/// Same geometry with the heat palette. A degenerate range renders black.
Image grid_to_heatmap(const Grid& g, double lo, double hi, int zoom);

/// Circle outline and line segment in pixel coordinates (top-left origin).
void draw_circle(Image& im, double cx, double cy, double radius, RGB color);
void draw_segment(Image& im, double x0, double y0, double x1, double y1, RGB color);

/// Center of grid cell (row, col) in pixel coordinates of an image produced
/// by grid_to_* with the given grid height and zoom.
void cell_center_px(int rows, int zoom, int row, int col, double& px, double& py);

void write_ppm(const std::string& path, const Image& im);
void write_pgm(const std::string& path, const Grid& g, double lo, double hi, int zoom);

}  // namespace s2w

#include "s2w/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace s2w {

RGB heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    RGB c;
    if (t < 0.5) {
        c.r = static_cast<std::uint8_t>(std::lround(2.0 * t * 255.0));
    } else {
        c.r = 255;
        const double u = 2.0 * t - 1.0;
        c.g = static_cast<std::uint8_t>(std::lround(u * 255.0));
        c.b = c.g;
    }
    return c;
}

namespace {

double normalized(double v, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
}

template <typename ColorFn>
Image grid_to_image(const Grid& g, double lo, double hi, int zoom, ColorFn color) {
    if (zoom < 1) throw std::invalid_argument("image zoom must be >= 1");
    Image im(g.cols * zoom, g.rows * zoom);
    for (int py = 0; py < im.h; ++py) {
        const int r = g.rows - 1 - py / zoom;  // world y up = image up
        for (int px = 0; px < im.w; ++px) {
            const int c = px / zoom;
            im.at(py, px) = color(normalized(g.at(r, c), lo, hi));
        }
    }
    return im;
}

}  // namespace

Image grid_to_gray(const Grid& g, double lo, double hi, int zoom) {
    return grid_to_image(g, lo, hi, zoom, [](double t) {
        const auto v = static_cast<std::uint8_t>(std::lround(t * 255.0));
        return RGB{v, v, v};
    });
}

Image grid_to_heatmap(const Grid& g, double lo, double hi, int zoom) {
    return grid_to_image(g, lo, hi, zoom, heat_color);
}

void draw_circle(Image& im, double cx, double cy, double radius, RGB color) {
    const int steps = std::max(16, static_cast<int>(radius * 8.0));
    for (int k = 0; k < steps; ++k) {
        const double a = 2.0 * 3.14159265358979323846 * k / steps;
        const int x = static_cast<int>(std::lround(cx + radius * std::cos(a)));
        const int y = static_cast<int>(std::lround(cy + radius * std::sin(a)));
        if (x >= 0 && x < im.w && y >= 0 && y < im.h) im.at(y, x) = color;
    }
}

void draw_segment(Image& im, double x0, double y0, double x1, double y1, RGB color) {
    const double dx = x1 - x0, dy = y1 - y0;
    const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
    for (int k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        const int x = static_cast<int>(std::lround(x0 + t * dx));
        const int y = static_cast<int>(std::lround(y0 + t * dy));
        if (x >= 0 && x < im.w && y >= 0 && y < im.h) im.at(y, x) = color;
    }
}

void cell_center_px(int rows, int zoom, int row, int col, double& px, double& py) {
    px = (col + 0.5) * zoom;
    py = (rows - 1 - row + 0.5) * zoom;
}

void write_ppm(const std::string& path, const Image& im) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write image file " + path);
    f << "P6\n" << im.w << " " << im.h << "\n255\n";
    for (const RGB& p : im.px) {
        f.put(static_cast<char>(p.r));
        f.put(static_cast<char>(p.g));
        f.put(static_cast<char>(p.b));
    }
    if (!f) throw std::runtime_error("short write on image file " + path);
}

void write_pgm(const std::string& path, const Grid& g, double lo, double hi, int zoom) {
    const Image im = grid_to_gray(g, lo, hi, zoom);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write image file " + path);
    f << "P5\n" << im.w << " " << im.h << "\n255\n";
    for (const RGB& p : im.px) f.put(static_cast<char>(p.r));
    if (!f) throw std::runtime_error("short write on image file " + path);
}

}  // namespace s2w

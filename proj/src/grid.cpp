#include "s2w/grid.hpp"

#include <cmath>

namespace s2w {

namespace {

struct RotCoeff {
    double c, s, cen;
};

RotCoeff coeff(const Grid& g, double angle_deg) {
    const double r = deg_to_rad(angle_deg);
    return {std::cos(r), std::sin(r), g.rows * 0.5};
}

// Source-coordinate of output cell (r, c): the output cell center pulled back
// through the inverse rotation. x runs along columns, y along rows.
inline void source_point(const RotCoeff& k, int r, int c, double& sx, double& sy) {
    const double px = (c + 0.5) - k.cen;
    const double py = (r + 0.5) - k.cen;
    sx = k.c * px + k.s * py + k.cen;
    sy = -k.s * px + k.c * py + k.cen;
}

}  // namespace

Grid rotate_grid(const Grid& in, double angle_deg, Interp mode) {
    if (!in.square()) throw std::invalid_argument("rotate_grid: grid must be square");
    const int S = in.rows;
    Grid out(S, S);
    const RotCoeff k = coeff(in, angle_deg);
    for (int r = 0; r < S; ++r) {
        for (int c = 0; c < S; ++c) {
            double sx, sy;
            source_point(k, r, c, sx, sy);
            if (mode == Interp::Nearest) {
                const int si = static_cast<int>(std::floor(sx));
                const int sj = static_cast<int>(std::floor(sy));
                if (si >= 0 && si < S && sj >= 0 && sj < S) out.at(r, c) = in.at(sj, si);
            } else {
                const double u = sx - 0.5, w = sy - 0.5;
                const int i0 = static_cast<int>(std::floor(u));
                const int j0 = static_cast<int>(std::floor(w));
                const double fx = u - i0, fy = w - j0;
                double acc = 0.0;
                for (int dj = 0; dj < 2; ++dj) {
                    for (int di = 0; di < 2; ++di) {
                        const int ii = i0 + di, jj = j0 + dj;
                        if (ii < 0 || ii >= S || jj < 0 || jj >= S) continue;
                        const double wgt = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy);
                        acc += wgt * in.at(jj, ii);
                    }
                }
                out.at(r, c) = acc;
            }
        }
    }
    return out;
}

Grid rotate_grid_adjoint(const Grid& grad_out, double angle_deg, Interp mode) {
    if (!grad_out.square()) throw std::invalid_argument("rotate_grid_adjoint: grid must be square");
    const int S = grad_out.rows;
    Grid grad_in(S, S);
    const RotCoeff k = coeff(grad_out, angle_deg);
    for (int r = 0; r < S; ++r) {
        for (int c = 0; c < S; ++c) {
            const double g = grad_out.at(r, c);
            if (g == 0.0) continue;
            double sx, sy;
            source_point(k, r, c, sx, sy);
            if (mode == Interp::Nearest) {
                const int si = static_cast<int>(std::floor(sx));
                const int sj = static_cast<int>(std::floor(sy));
                if (si >= 0 && si < S && sj >= 0 && sj < S) grad_in.at(sj, si) += g;
            } else {
                const double u = sx - 0.5, w = sy - 0.5;
                const int i0 = static_cast<int>(std::floor(u));
                const int j0 = static_cast<int>(std::floor(w));
                const double fx = u - i0, fy = w - j0;
                for (int dj = 0; dj < 2; ++dj) {
                    for (int di = 0; di < 2; ++di) {
                        const int ii = i0 + di, jj = j0 + dj;
                        if (ii < 0 || ii >= S || jj < 0 || jj >= S) continue;
                        const double wgt = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy);
                        grad_in.at(jj, ii) += wgt * g;
                    }
                }
            }
        }
    }
    return grad_in;
}

int action_flat_index(const Action& a, const WorkspaceConfig& cfg) {
    const int n = cfg.action_grid;
    if (a.i < 0 || a.i >= n || a.j < 0 || a.j >= n || a.phi_index < 0 ||
        a.phi_index >= static_cast<int>(cfg.rotations.size()))
        throw std::out_of_range("action_flat_index: action outside grid");
    return (a.phi_index * n + a.j) * n + a.i;
}

Action action_from_flat(int flat, const WorkspaceConfig& cfg) {
    const int n = cfg.action_grid;
    if (flat < 0 || flat >= cfg.total_actions())
        throw std::out_of_range("action_from_flat: index outside action set");
    Action a;
    a.i = flat % n;
    a.j = (flat / n) % n;
    a.phi_index = flat / (n * n);
    return a;
}

WorldAction action_to_world(const Action& a, const WorkspaceConfig& cfg) {
    const int n = cfg.action_grid;
    if (a.i < 0 || a.i >= n || a.j < 0 || a.j >= n || a.phi_index < 0 ||
        a.phi_index >= static_cast<int>(cfg.rotations.size()))
        throw std::out_of_range("action_to_world: action outside grid");
    const double phi = cfg.rotations[a.phi_index];
    const double cell = cfg.cell_cm();
    const Vec2 cen{cfg.side_cm * 0.5, cfg.side_cm * 0.5};
    const Vec2 q{(a.i + 0.5) * cell, (a.j + 0.5) * cell};
    WorldAction w;
    w.phi_deg = phi;
    w.point = rotate_vec(q - cen, -phi) + cen;
    w.direction = unit_from_deg(kPushDirBaseDeg - phi);
    return w;
}

}  // namespace s2w

#include "s2w/geometry.hpp"

#include <algorithm>

namespace s2w {

double normalize_deg(double deg) {
    double d = std::fmod(deg, 360.0);
    if (d < 0.0) d += 360.0;
    if (d == 360.0) d = 0.0;  // fmod can land exactly on 360-epsilon rounding
    return d;
}

double angle_diff_deg(double a, double b) {
    double d = std::fmod(a - b, 360.0);
    if (d <= -180.0) d += 360.0;
    if (d > 180.0) d -= 360.0;
    return d;
}

Vec2 rotate_vec(Vec2 v, double angle_deg) {
    const double r = deg_to_rad(angle_deg);
    const double c = std::cos(r), s = std::sin(r);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

std::array<Vec2, 4> OrientedRect::corners() const {
    const Vec2 a = axis() * half_len;
    const Vec2 n = normal() * half_wid;
    return {center + a + n, center + a - n, center - a - n, center - a + n};
}

bool OrientedRect::contains(Vec2 p) const {
    const Vec2 d = p - center;
    const double eps = 1e-12;
    return std::abs(d.dot(axis())) <= half_len + eps &&
           std::abs(d.dot(normal())) <= half_wid + eps;
}

double projection_radius(const OrientedRect& r, Vec2 n) {
    return r.half_len * std::abs(r.axis().dot(n)) + r.half_wid * std::abs(r.normal().dot(n));
}

bool rects_overlap(const OrientedRect& a, const OrientedRect& b, double eps) {
    const std::array<Vec2, 4> axes = {a.axis(), a.normal(), b.axis(), b.normal()};
    const Vec2 d = b.center - a.center;
    for (const Vec2& n : axes) {
        const double dist = std::abs(d.dot(n));
        if (dist >= projection_radius(a, n) + projection_radius(b, n) - eps) return false;
    }
    return true;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 q = a + ab * t;
    return (p - q).norm();
}

}  // namespace

double rect_distance(const OrientedRect& a, const OrientedRect& b) {
    if (rects_overlap(a, b, 0.0)) return 0.0;
    const auto ca = a.corners();
    const auto cb = b.corners();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, point_segment_distance(ca[i], cb[j], cb[(j + 1) % 4]));
            best = std::min(best, point_segment_distance(cb[i], ca[j], ca[(j + 1) % 4]));
        }
    }
    return best;
}

double segment_rect_entry(Vec2 a, Vec2 b, const OrientedRect& rect) {
    // Clip the segment against the rect's two local slabs.
    const Vec2 ax = rect.axis();
    const Vec2 nm = rect.normal();
    const Vec2 da = a - rect.center;
    const Vec2 db = b - rect.center;
    const double s0[2] = {da.dot(ax), da.dot(nm)};
    const double s1[2] = {db.dot(ax), db.dot(nm)};
    const double half[2] = {rect.half_len, rect.half_wid};

    double t0 = 0.0, t1 = 1.0;
    for (int k = 0; k < 2; ++k) {
        const double d = s1[k] - s0[k];
        if (std::abs(d) < 1e-15) {
            if (std::abs(s0[k]) > half[k]) return -1.0;
            continue;
        }
        double ta = (-half[k] - s0[k]) / d;
        double tb = (half[k] - s0[k]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return -1.0;
    }
    return t0;
}

double sweep_rect_contact(const OrientedRect& moving, Vec2 u, double max_dist,
                          const OrientedRect& fixed) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::array<Vec2, 4> axes = {moving.axis(), moving.normal(), fixed.axis(),
                                      fixed.normal()};
    double enter = 0.0;
    double exit = inf;
    for (const Vec2& n : axes) {
        const double pc = (fixed.center - moving.center).dot(n);
        const double r = projection_radius(moving, n) + projection_radius(fixed, n);
        const double v = u.dot(n);
        if (std::abs(v) < 1e-12) {
            if (std::abs(pc) > r) return inf;
            continue;
        }
        // Overlap on this axis while s*v is within [pc - r, pc + r].
        double e = (pc - r) / v;
        double x = (pc + r) / v;
        if (e > x) std::swap(e, x);
        enter = std::max(enter, e);
        exit = std::min(exit, x);
        if (enter > exit) return inf;
    }
    if (exit < 0.0) return inf;
    const double s = std::max(enter, 0.0);
    return s <= max_dist ? s : inf;
}

double sweep_workspace_limit(const OrientedRect& rect, Vec2 u, double max_dist, double side) {
    double limit = max_dist;
    for (const Vec2& p : rect.corners()) {
        if (u.x > 1e-12) limit = std::min(limit, (side - p.x) / u.x);
        if (u.x < -1e-12) limit = std::min(limit, (0.0 - p.x) / u.x);
        if (u.y > 1e-12) limit = std::min(limit, (side - p.y) / u.y);
        if (u.y < -1e-12) limit = std::min(limit, (0.0 - p.y) / u.y);
    }
    return std::max(limit, 0.0);
}

bool rect_inside_workspace(const OrientedRect& rect, double side, double eps) {
    for (const Vec2& p : rect.corners()) {
        if (p.x < -eps || p.x > side + eps || p.y < -eps || p.y > side + eps) return false;
    }
    return true;
}

}  // namespace s2w

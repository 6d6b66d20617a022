#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace s2w {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

/// Normalize an angle in degrees to [0, 360).
double normalize_deg(double deg);

/// Signed smallest difference a - b in degrees, in (-180, 180].
double angle_diff_deg(double a, double b);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 perp() const { return {-y, x}; }
};

inline Vec2 unit_from_deg(double deg) {
    const double r = deg_to_rad(deg);
    return {std::cos(r), std::sin(r)};
}

/// Rotate v by angle_deg counterclockwise.
Vec2 rotate_vec(Vec2 v, double angle_deg);

struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double theta_deg = 0.0;
};

/// Oriented rectangle. Local +X (the axis direction, at axis_deg) spans
/// half_len; local +Y spans half_wid.
struct OrientedRect {
    Vec2 center;
    double axis_deg = 0.0;
    double half_len = 0.0;
    double half_wid = 0.0;

    Vec2 axis() const { return unit_from_deg(axis_deg); }
    Vec2 normal() const { return axis().perp(); }
    std::array<Vec2, 4> corners() const;
    bool contains(Vec2 p) const;  // closed: boundary points count
};

/// Projection radius of a rect onto unit direction n.
double projection_radius(const OrientedRect& r, Vec2 n);

/// Separating-axis overlap test. Touching rectangles (separation == sum of
/// radii, within eps) do not count as overlapping.
bool rects_overlap(const OrientedRect& a, const OrientedRect& b, double eps = 1e-9);

/// Minimum distance between two rectangle footprints; 0 if they overlap or touch.
double rect_distance(const OrientedRect& a, const OrientedRect& b);

/// Earliest parameter t in [0,1] at which segment a + t*(b-a) enters the rect,
/// or a negative value if the segment misses it. A start point already inside
/// yields t = 0.
double segment_rect_entry(Vec2 a, Vec2 b, const OrientedRect& rect);

/// First contact distance when `moving` slides along unit direction u for up
/// to max_dist against static rect `fixed`. Returns +inf if no contact occurs
/// within max_dist; 0 if already touching/overlapping.
double sweep_rect_contact(const OrientedRect& moving, Vec2 u, double max_dist,
                          const OrientedRect& fixed);

/// Largest slide distance along u (up to max_dist) keeping rect inside the
/// axis-aligned square [0, side] x [0, side].
double sweep_workspace_limit(const OrientedRect& rect, Vec2 u, double max_dist, double side);

/// True if every corner of rect lies inside [0, side]^2 (with tolerance eps
/// outward, so exactly-on-boundary counts as inside).
bool rect_inside_workspace(const OrientedRect& rect, double side, double eps = 1e-9);

}  // namespace s2w

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

namespace sasrl {

struct Point2 {
    double x = 0.0, y = 0.0;
};

inline double dist2(const Point2& a, const Point2& b) {
    double dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double dist(const Point2& a, const Point2& b) { return std::sqrt(dist2(a, b)); }

// Earliest parameter t in [0,1] at which segment p0 + t*(p1-p0) enters the
// disc (center c, radius r), or nullopt if the segment misses it.
inline std::optional<double> segment_disc_hit(const Point2& p0, const Point2& p1,
                                              const Point2& c, double r) {
    double dx = p1.x - p0.x, dy = p1.y - p0.y;
    double fx = p0.x - c.x, fy = p0.y - c.y;
    double a = dx * dx + dy * dy;
    double b = 2.0 * (fx * dx + fy * dy);
    double cc = fx * fx + fy * fy - r * r;
    if (cc <= 0.0) return 0.0;  // starts inside
    if (a <= 0.0) return std::nullopt;
    double disc = b * b - 4.0 * a * cc;
    if (disc < 0.0) return std::nullopt;
    double sq = std::sqrt(disc);
    double t0 = (-b - sq) / (2.0 * a);
    if (t0 >= 0.0 && t0 <= 1.0) return t0;
    double t1 = (-b + sq) / (2.0 * a);
    if (t1 >= 0.0 && t1 <= 1.0 && t0 < 0.0) return 0.0;  // started past entry, inside
    return std::nullopt;
}

// Parameter t along segment a at which it crosses segment b, or nullopt.
inline std::optional<double> segment_segment_hit(const Point2& a0, const Point2& a1,
                                                 const Point2& b0, const Point2& b1) {
    double rx = a1.x - a0.x, ry = a1.y - a0.y;
    double sx = b1.x - b0.x, sy = b1.y - b0.y;
    double denom = rx * sy - ry * sx;
    if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
    double qx = b0.x - a0.x, qy = b0.y - a0.y;
    double t = (qx * sy - qy * sx) / denom;
    double u = (qx * ry - qy * rx) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
    return t;
}

// Deterministic low-discrepancy pattern of n points inside the unit disc.
// Point 0 is always the origin; the rest follow a sunflower spiral.
// Cached per n: projection queries this inside training loops.
inline const std::vector<Point2>& unit_disc_pattern(int n) {
    thread_local std::vector<std::pair<int, std::vector<Point2>>> cache;
    for (const auto& [count, pts] : cache)
        if (count == n) return pts;
    std::vector<Point2> pts;
    pts.reserve(static_cast<size_t>(std::max(n, 0)));
    if (n > 0) {
        pts.push_back({0.0, 0.0});
        constexpr double kGoldenAngle = 2.399963229728653;
        for (int i = 1; i < n; ++i) {
            double r = std::sqrt(static_cast<double>(i) / (n - 1));
            double th = i * kGoldenAngle;
            pts.push_back({r * std::cos(th), r * std::sin(th)});
        }
    }
    cache.emplace_back(n, std::move(pts));
    return cache.back().second;
}

}  // namespace sasrl

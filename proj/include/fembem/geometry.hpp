#pragma once

#include <cmath>

namespace fembem {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
// scalar 2D cross product a.x*b.y - a.y*b.x
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

inline Point2 midpoint(Point2 a, Point2 b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

// distance from p to the closed segment [a,b]
inline double segment_distance(Point2 p, Point2 a, Point2 b) {
    Point2 d = b - a;
    double len2 = dot(d, d);
    if (len2 == 0.0) return dist(p, a);
    double t = dot(p - a, d) / len2;
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return dist(p, a + t * d);
}

// distance between two closed segments
inline double segment_segment_distance(Point2 a1, Point2 b1, Point2 a2, Point2 b2) {
    // proper intersection would give zero; for boundary meshes segments only
    // touch at shared vertices, so endpoint projections cover all cases
    double d = segment_distance(a1, a2, b2);
    d = std::min(d, segment_distance(b1, a2, b2));
    d = std::min(d, segment_distance(a2, a1, b1));
    d = std::min(d, segment_distance(b2, a1, b1));
    return d;
}

} // namespace fembem

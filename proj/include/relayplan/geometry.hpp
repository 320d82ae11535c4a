#pragma once

#include <span>
#include <vector>

namespace relayplan {

/// Absolute tolerance (meters) for every geometric comparison.
inline constexpr double kGeomEps = 1e-9;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

double dist(Point a, Point b);

/// Within kGeomEps of each other.
bool near(Point a, Point b);

/// Open planar curve, at least two vertices, no zero-length segments.
class Polyline {
public:
    /// Throws std::invalid_argument when fewer than 2 vertices remain or a
    /// coordinate is not finite. Consecutive duplicates are rejected.
    explicit Polyline(std::vector<Point> vertices);

    std::span<const Point> vertices() const { return vertices_; }
    const Point& front() const { return vertices_.front(); }
    const Point& back() const { return vertices_.back(); }
    std::size_t size() const { return vertices_.size(); }

private:
    std::vector<Point> vertices_;
};

/// Drops consecutive vertices closer than kGeomEps; the result may still be
/// too short for a Polyline.
std::vector<Point> dedupe_consecutive(std::span<const Point> points);

double polyline_length(const Polyline& p);

double point_to_segment_distance(Point q, Point a, Point b);

/// Distance to the continuous curve, not only its vertices.
double point_to_polyline_distance(Point q, const Polyline& p);

/// Points at arc length 0, step, 2*step, ... plus the final vertex.
/// Throws std::invalid_argument when step <= 0.
std::vector<Point> sample_polyline(const Polyline& p, double step);

/// Relay positions along p so that no hop exceeds spacing. Interior vertices
/// of p are relays; each segment gets ceil(len/spacing) - 1 extra points at
/// multiples of spacing from its start. Endpoints of p are not returned.
/// Throws std::invalid_argument when spacing <= 0.
std::vector<Point> place_relays(const Polyline& p, double spacing);

}  // namespace relayplan

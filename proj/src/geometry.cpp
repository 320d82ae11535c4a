#include "relayplan/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relayplan {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

bool near(Point a, Point b) { return dist(a, b) <= kGeomEps; }

Polyline::Polyline(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) throw std::invalid_argument("polyline needs at least two vertices");
    for (const auto& v : vertices_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw std::invalid_argument("polyline vertex is not finite");
    }
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (dist(vertices_[i - 1], vertices_[i]) <= kGeomEps)
            throw std::invalid_argument("polyline has a zero-length segment");
    }
}

std::vector<Point> dedupe_consecutive(std::span<const Point> points) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        if (out.empty() || !near(out.back(), p)) out.push_back(p);
    }
    return out;
}

double polyline_length(const Polyline& p) {
    double total = 0.0;
    auto v = p.vertices();
    for (std::size_t i = 1; i < v.size(); ++i) total += dist(v[i - 1], v[i]);
    return total;
}

double point_to_segment_distance(Point q, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0) return dist(q, a);
    const Point aq = q - a;
    const double t = std::clamp((aq.x * ab.x + aq.y * ab.y) / len2, 0.0, 1.0);
    return dist(q, a + t * ab);
}

double point_to_polyline_distance(Point q, const Polyline& p) {
    double best = std::numeric_limits<double>::infinity();
    auto v = p.vertices();
    for (std::size_t i = 1; i < v.size(); ++i)
        best = std::min(best, point_to_segment_distance(q, v[i - 1], v[i]));
    return best;
}

std::vector<Point> sample_polyline(const Polyline& p, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("sample step must be positive");
    auto v = p.vertices();
    std::vector<Point> out{v.front()};
    // Arc length still to travel before the next sample.
    double pending = step;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const Point a = v[i - 1];
        const Point b = v[i];
        const double len = dist(a, b);
        double at = 0.0;
        while (len - at >= pending - kGeomEps) {
            at += pending;
            pending = step;
            const double t = std::min(at / len, 1.0);
            out.push_back(a + t * (b - a));
        }
        pending -= len - at;
        if (pending <= kGeomEps) pending = step;
    }
    if (!near(out.back(), v.back())) out.push_back(v.back());
    return out;
}

std::vector<Point> place_relays(const Polyline& p, double spacing) {
    if (!(spacing > 0.0)) throw std::invalid_argument("relay spacing must be positive");
    auto v = p.vertices();
    std::vector<Point> out;
    for (std::size_t i = 1; i < v.size(); ++i) {
        const Point a = v[i - 1];
        const Point b = v[i];
        const double len = dist(a, b);
        const auto hops = static_cast<long>(std::ceil(len / spacing - kGeomEps));
        for (long k = 1; k < hops; ++k) out.push_back(a + (k * spacing / len) * (b - a));
        if (i + 1 < v.size()) out.push_back(b);
    }
    return out;
}

}  // namespace relayplan

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace polyfuse {

namespace {

void require_nondegenerate(const Segment& seg) {
    if (seg.a == seg.b) {
        throw Error(ErrorCode::degenerate_input, "segment endpoints coincide");
    }
}

}  // namespace

double distance(const PlanarPoint& a, const PlanarPoint& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

Polyline::Polyline(std::vector<PlanarPoint> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "polyline needs at least 2 vertices");
    }
    cumulative_.resize(vertices_.size());
    cumulative_[0] = 0.0;
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (vertices_[i] == vertices_[i - 1]) {
            throw Error(ErrorCode::invalid_argument,
                        "polyline has equal consecutive vertices at index " + std::to_string(i));
        }
        cumulative_[i] = cumulative_[i - 1] + distance(vertices_[i - 1], vertices_[i]);
    }
}

Segment Polyline::segment(std::size_t k) const {
    return {vertices_[k], vertices_[k + 1]};
}

PlanarPoint Polyline::point_at(double arc) const {
    if (arc <= 0.0) return vertices_.front();
    if (arc >= length()) return vertices_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), arc);
    const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    const double seg_len = cumulative_[k + 1] - cumulative_[k];
    const double t = (arc - cumulative_[k]) / seg_len;
    const PlanarPoint& a = vertices_[k];
    const PlanarPoint& b = vertices_[k + 1];
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

double line_distance(const PlanarPoint& p, const Segment& seg) {
    require_nondegenerate(seg);
    const double dx = seg.b.x - seg.a.x;
    const double dy = seg.b.y - seg.a.y;
    const double numerator = std::abs(dx * p.y - dy * p.x + seg.a.x * seg.b.y - seg.a.y * seg.b.x);
    return numerator / std::hypot(dx, dy);
}

Projection segment_distance(const PlanarPoint& p, const Segment& seg) {
    require_nondegenerate(seg);
    const double dx = seg.b.x - seg.a.x;
    const double dy = seg.b.y - seg.a.y;
    const double len2 = dx * dx + dy * dy;
    double t = ((p.x - seg.a.x) * dx + (p.y - seg.a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = seg.a.x + t * dx;
    const double cy = seg.a.y + t * dy;
    return {std::hypot(p.x - cx, p.y - cy), t, 0};
}

Projection project_to_polyline(const PlanarPoint& p, const Polyline& line) {
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < line.segment_count(); ++k) {
        Projection proj = segment_distance(p, line.segment(k));
        if (proj.distance < best.distance) {
            best = proj;
            best.segment_index = k;
        }
    }
    return best;
}

double arc_position(const Polyline& line, const Projection& proj) {
    const std::size_t k = proj.segment_index;
    const double seg_len = line.cumulative_lengths()[k + 1] - line.cumulative_lengths()[k];
    return line.cumulative_lengths()[k] + proj.param * seg_len;
}

std::vector<Projection> project_points(std::span<const PlanarPoint> points, const Polyline& line) {
    std::vector<Projection> out;
    out.reserve(points.size());
    for (const PlanarPoint& p : points) out.push_back(project_to_polyline(p, line));
    return out;
}

Partition assign_points(std::span<const PlanarPoint> points, const Polyline& line) {
    if (points.empty()) {
        throw Error(ErrorCode::invalid_argument, "no points to assign");
    }
    Partition part;
    part.assignment.reserve(points.size());
    for (const PlanarPoint& p : points) {
        part.assignment.push_back(project_to_polyline(p, line).segment_index);
    }
    return part;
}

double mean_lateral_error(std::span<const PlanarPoint> points, const Polyline& line) {
    if (points.empty()) {
        throw Error(ErrorCode::invalid_argument, "mean lateral error of an empty point set");
    }
    double sum = 0.0;
    for (const PlanarPoint& p : points) sum += project_to_polyline(p, line).distance;
    return sum / static_cast<double>(points.size());
}

double max_lateral_error(std::span<const PlanarPoint> points, const Polyline& line) {
    if (points.empty()) {
        throw Error(ErrorCode::invalid_argument, "max lateral error of an empty point set");
    }
    double worst = 0.0;
    for (const PlanarPoint& p : points) worst = std::max(worst, project_to_polyline(p, line).distance);
    return worst;
}

}  // namespace polyfuse

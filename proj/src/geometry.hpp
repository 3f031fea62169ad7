#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polyfuse {

/// A position in a local planar frame, meters east (x) and north (y).
struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const PlanarPoint& a, const PlanarPoint& b) {
        return a.x == b.x && a.y == b.y;
    }
};

double distance(const PlanarPoint& a, const PlanarPoint& b);

/// Directed segment with strictly positive length (a != b).
struct Segment {
    PlanarPoint a;
    PlanarPoint b;
};

/// Closest-approach record of a point against a segment or polyline.
/// param is the clamped position along the segment in [0, 1].
struct Projection {
    double distance = 0.0;
    double param = 0.0;
    std::size_t segment_index = 0;
};

/// Ordered vertex chain; segment k joins vertices k and k+1.
/// Invariants: >= 2 vertices, no two consecutive vertices equal.
class Polyline {
public:
    explicit Polyline(std::vector<PlanarPoint> vertices);

    const std::vector<PlanarPoint>& vertices() const noexcept { return vertices_; }
    std::size_t vertex_count() const noexcept { return vertices_.size(); }
    std::size_t segment_count() const noexcept { return vertices_.size() - 1; }
    Segment segment(std::size_t k) const;

    /// Cumulative arc length per vertex; front() == 0, back() == length().
    const std::vector<double>& cumulative_lengths() const noexcept { return cumulative_; }
    double length() const noexcept { return cumulative_.back(); }

    /// Point at arc-length position s, clamped to [0, length()].
    PlanarPoint point_at(double arc) const;

private:
    std::vector<PlanarPoint> vertices_;
    std::vector<double> cumulative_;
};

/// Point-to-segment assignment; assignment[i] is the segment index nearest
/// to point i, ties resolved toward the lowest index.
struct Partition {
    std::vector<std::size_t> assignment;
};

/// Perpendicular distance from p to the infinite line through seg.
/// Throws Error{degenerate_input} when seg.a == seg.b.
double line_distance(const PlanarPoint& p, const Segment& seg);

/// Clamped distance from p to the segment itself, with the projection
/// parameter in [0, 1]. Throws Error{degenerate_input} when seg.a == seg.b.
Projection segment_distance(const PlanarPoint& p, const Segment& seg);

/// Nearest segment of the polyline under clamped distance, lowest index wins ties.
Projection project_to_polyline(const PlanarPoint& p, const Polyline& line);

/// Arc-length position of a projection on the polyline it was computed against.
double arc_position(const Polyline& line, const Projection& proj);

/// Per-point projections onto the nearest polyline segment.
std::vector<Projection> project_points(std::span<const PlanarPoint> points, const Polyline& line);

Partition assign_points(std::span<const PlanarPoint> points, const Polyline& line);

double mean_lateral_error(std::span<const PlanarPoint> points, const Polyline& line);
double max_lateral_error(std::span<const PlanarPoint> points, const Polyline& line);

}  // namespace polyfuse

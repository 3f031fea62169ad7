#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"
#include "rng.hpp"

namespace polyfuse {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double stadium_perimeter(const GeneratorConfig& cfg) {
    return 2.0 * cfg.straight_length + 2.0 * std::numbers::pi * cfg.radius;
}

// Stadium curve: bottom straight (0,0)->(L,0), right cap around (L,R),
// top straight (L,2R)->(0,2R), left cap around (0,R). Arc starts at (0,0).
PlanarPoint stadium_point(const GeneratorConfig& cfg, double arc) {
    const double l = cfg.straight_length;
    const double r = cfg.radius;
    const double half_cap = std::numbers::pi * r;
    if (arc < l) return {arc, 0.0};
    arc -= l;
    if (arc < half_cap) {
        const double theta = arc / r;
        return {l + r * std::sin(theta), r - r * std::cos(theta)};
    }
    arc -= half_cap;
    if (arc < l) return {l - arc, 2.0 * r};
    arc -= l;
    const double theta = arc / r;
    return {-r * std::sin(theta), r + r * std::cos(theta)};
}

Polyline densify_polyline(const std::vector<PlanarPoint>& vertices, double max_spacing) {
    const Polyline base(vertices);
    std::vector<PlanarPoint> dense;
    for (std::size_t k = 0; k < base.segment_count(); ++k) {
        const Segment seg = base.segment(k);
        const double len = distance(seg.a, seg.b);
        const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_spacing)));
        for (int i = 0; i < pieces; ++i) {
            const double t = static_cast<double>(i) / pieces;
            dense.push_back({seg.a.x + t * (seg.b.x - seg.a.x), seg.a.y + t * (seg.b.y - seg.a.y)});
        }
    }
    dense.push_back(base.vertices().back());
    return Polyline(std::move(dense));
}

void validate_generator_config(const GeneratorConfig& cfg) {
    if (cfg.num_tracks < 1) throw Error(ErrorCode::config, "num_tracks must be >= 1");
    if (cfg.points_per_track < 2) throw Error(ErrorCode::config, "points_per_track must be >= 2");
    if (cfg.noise_sigma < 0.0) throw Error(ErrorCode::config, "noise_sigma must be >= 0");
    if (cfg.shape == ShapeKind::stadium) {
        if (cfg.straight_length <= 0.0 || cfg.radius <= 0.0) {
            throw Error(ErrorCode::config, "stadium dimensions must be positive");
        }
    } else if (cfg.shape_vertices.size() < 2) {
        throw Error(ErrorCode::config, "polyline shape needs at least 2 vertices");
    }
}

}  // namespace

void validate(const Trajectory& track) {
    if (track.points.size() < 2) {
        throw Error(ErrorCode::invalid_argument,
                    "track '" + track.track_id + "' has fewer than 2 points");
    }
    if (!track.timestamps.empty()) {
        if (track.timestamps.size() != track.points.size()) {
            throw Error(ErrorCode::invalid_argument,
                        "track '" + track.track_id + "' timestamps do not match points");
        }
        for (std::size_t i = 1; i < track.timestamps.size(); ++i) {
            if (track.timestamps[i] <= track.timestamps[i - 1]) {
                throw Error(ErrorCode::invalid_argument,
                            "track '" + track.track_id + "' timestamps are not strictly increasing");
            }
        }
    }
}

PlanarPoint project_to_local(double latitude, double longitude, const GeoOrigin& origin) {
    if (std::abs(latitude - origin.latitude) > 1.0 || std::abs(longitude - origin.longitude) > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "fix at (" + std::to_string(latitude) + ", " + std::to_string(longitude) +
                        ") is more than 1 degree from the projection origin");
    }
    const double x = kEarthRadiusMeters * (longitude - origin.longitude) * kDegToRad *
                     std::cos(origin.latitude * kDegToRad);
    const double y = kEarthRadiusMeters * (latitude - origin.latitude) * kDegToRad;
    return {x, y};
}

std::vector<PlanarPoint> project_to_local(const std::vector<RawFix>& fixes, const GeoOrigin& origin) {
    std::vector<PlanarPoint> out;
    out.reserve(fixes.size());
    for (const RawFix& fix : fixes) out.push_back(project_to_local(fix.latitude, fix.longitude, origin));
    return out;
}

void to_geographic(const PlanarPoint& p, const GeoOrigin& origin, double& latitude, double& longitude) {
    latitude = origin.latitude + p.y / (kEarthRadiusMeters * kDegToRad);
    longitude = origin.longitude +
                p.x / (kEarthRadiusMeters * kDegToRad * std::cos(origin.latitude * kDegToRad));
}

std::vector<std::uint8_t> detect_outliers(const Trajectory& track,
                                          std::optional<double> speed_cap,
                                          std::optional<double> mad_k) {
    validate(track);
    if (speed_cap && *speed_cap <= 0.0) throw Error(ErrorCode::config, "speed_cap must be positive");
    if (mad_k && *mad_k <= 0.0) throw Error(ErrorCode::config, "mad_k must be positive");

    const std::size_t n = track.points.size();
    std::vector<std::uint8_t> flags(n, 0);
    if (n < 3) return flags;

    if (speed_cap && !track.timestamps.empty()) {
        for (std::size_t j = 1; j < n; ++j) {
            const double dt = track.timestamps[j] - track.timestamps[j - 1];
            const double speed = distance(track.points[j], track.points[j - 1]) / dt;
            if (speed > *speed_cap) flags[j] = 1;
        }
    }

    if (mad_k) {
        std::vector<double> deviation(n, 0.0);
        for (std::size_t j = 1; j + 1 < n; ++j) {
            const PlanarPoint& prev = track.points[j - 1];
            const PlanarPoint& next = track.points[j + 1];
            deviation[j] = (prev == next) ? distance(track.points[j], prev)
                                          : segment_distance(track.points[j], {prev, next}).distance;
        }
        std::vector<double> interior(deviation.begin() + 1, deviation.end() - 1);
        std::nth_element(interior.begin(), interior.begin() + interior.size() / 2, interior.end());
        const double median = interior[interior.size() / 2];
        for (std::size_t j = 1; j + 1 < n; ++j) {
            if (deviation[j] > *mad_k * median) flags[j] = 1;
        }
    }
    return flags;
}

Polyline shape_ground_truth(const GeneratorConfig& cfg) {
    validate_generator_config(cfg);
    if (cfg.shape == ShapeKind::polyline) {
        return densify_polyline(cfg.shape_vertices, 0.25);
    }
    const double perimeter = stadium_perimeter(cfg);
    const int pieces = std::max(64, static_cast<int>(std::ceil(perimeter / 0.25)));
    std::vector<PlanarPoint> verts;
    verts.reserve(pieces + 1);
    for (int i = 0; i < pieces; ++i) {
        verts.push_back(stadium_point(cfg, perimeter * i / pieces));
    }
    verts.push_back(verts.front());  // close the loop
    return Polyline(std::move(verts));
}

SyntheticDataset generate_tracks(const GeneratorConfig& cfg) {
    validate_generator_config(cfg);
    Polyline truth = shape_ground_truth(cfg);

    const bool closed = cfg.shape == ShapeKind::stadium;
    const double total = truth.length();
    const int m = cfg.points_per_track;
    // Closed shapes sample [0, P) without repeating the start; open shapes
    // include both endpoints. Positions are taken on the ground-truth
    // polyline itself so zero-noise tracks lie exactly on it.
    const double spacing = closed ? total / m : total / (m - 1);

    std::vector<Trajectory> tracks;
    tracks.reserve(cfg.num_tracks);
    for (int t = 0; t < cfg.num_tracks; ++t) {
        Trajectory track;
        track.track_id = "track" + std::string(t < 10 ? "0" : "") + std::to_string(t);
        NormalSampler noise(splitmix64(cfg.seed ^ fnv1a64(track.track_id)));
        track.points.reserve(m);
        for (int i = 0; i < m; ++i) {
            const PlanarPoint base = truth.point_at(std::min(spacing * i, total));
            track.points.push_back(
                {base.x + cfg.noise_sigma * noise.next(), base.y + cfg.noise_sigma * noise.next()});
        }
        tracks.push_back(std::move(track));
    }
    return {std::move(tracks), std::move(truth), cfg};
}

}  // namespace polyfuse

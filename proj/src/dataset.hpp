#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace polyfuse {

/// Geographic anchor of a local planar frame.
struct GeoOrigin {
    double latitude = 0.0;
    double longitude = 0.0;
};

/// One raw GPS fix as read from a file, before projection.
struct RawFix {
    double latitude = 0.0;
    double longitude = 0.0;
    std::optional<double> timestamp;  // epoch seconds
    std::string track_id;
};

/// One measurement pass over the path, already projected to planar meters.
/// timestamps is empty or parallel to points and strictly increasing.
struct Trajectory {
    std::string track_id;
    std::vector<PlanarPoint> points;
    std::vector<double> timestamps;
};

void validate(const Trajectory& track);

enum class ShapeKind { stadium, polyline };

struct GeneratorConfig {
    ShapeKind shape = ShapeKind::stadium;
    double straight_length = 100.0;  // stadium straights, meters
    double radius = 30.0;            // stadium cap radius, meters
    std::vector<PlanarPoint> shape_vertices;  // for ShapeKind::polyline
    int num_tracks = 10;
    int points_per_track = 160;
    double noise_sigma = 2.0;
    std::uint64_t seed = 42;
};

struct SyntheticDataset {
    std::vector<Trajectory> tracks;
    Polyline ground_truth;
    GeneratorConfig config;
};

constexpr double kEarthRadiusMeters = 6371000.0;

/// Equirectangular local tangent plane:
///   x = R * dlon_rad * cos(lat0), y = R * dlat_rad.
/// Fixes farther than 1 degree from the origin are rejected.
std::vector<PlanarPoint> project_to_local(const std::vector<RawFix>& fixes, const GeoOrigin& origin);
PlanarPoint project_to_local(double latitude, double longitude, const GeoOrigin& origin);

/// Inverse of project_to_local for the same origin.
void to_geographic(const PlanarPoint& p, const GeoOrigin& origin, double& latitude, double& longitude);

/// Flags suspect fixes. Rule (a): implied speed from the previous point
/// exceeds speed_cap (needs timestamps). Rule (b): distance to the segment
/// joining the two neighbors exceeds mad_k times the track median of those
/// distances; endpoints are exempt from rule (b). Pass nullopt to disable
/// either gate. Tracks shorter than 3 points return all-false flags.
std::vector<std::uint8_t> detect_outliers(const Trajectory& track,
                                          std::optional<double> speed_cap,
                                          std::optional<double> mad_k);

/// Samples points_per_track arc-length-uniform positions along the shape and
/// perturbs each with isotropic Gaussian noise. Per-track noise streams are
/// derived from (seed, track_id), so datasets are reproducible bit for bit.
SyntheticDataset generate_tracks(const GeneratorConfig& config);

/// The generator's noise-free curve, densely sampled.
Polyline shape_ground_truth(const GeneratorConfig& config);

}  // namespace polyfuse

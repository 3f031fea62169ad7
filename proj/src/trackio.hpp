#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "geometry.hpp"

namespace polyfuse {

enum class FileFormat { csv, geojson, gpx };

FileFormat format_from_name(const std::string& name);
std::optional<FileFormat> format_from_extension(const std::string& path);

struct TrackFile {
    std::vector<Trajectory> tracks;
    GeoOrigin origin;
};

/// Reads trajectories and projects them into a local planar frame. The frame
/// origin defaults to the first fix in the file. CSV expects the header
/// `track_id,lat,lon[,timestamp]` with ISO-8601 or epoch-second timestamps;
/// GeoJSON expects a FeatureCollection of LineString features with a
/// `track_id` property; GPX reads trk/trkseg/trkpt elements.
TrackFile read_tracks(const std::string& path, FileFormat format,
                      std::optional<GeoOrigin> origin = std::nullopt);

/// Writes trajectories as geographic coordinates (CSV or GeoJSON), 9 decimal
/// digits per coordinate.
void write_tracks(const std::string& path, std::span<const Trajectory> tracks,
                  const GeoOrigin& origin, FileFormat format);

/// Reads a fused polyline (CSV single-track file or GeoJSON LineString) into
/// the planar frame anchored at origin.
Polyline read_polyline(const std::string& path, FileFormat format, const GeoOrigin& origin);

/// Writes a polyline as geographic coordinates: CSV rows with track_id
/// `polyline`, or a single GeoJSON LineString.
void write_polyline(const std::string& path, const Polyline& line, const GeoOrigin& origin,
                    FileFormat format);

}  // namespace polyfuse

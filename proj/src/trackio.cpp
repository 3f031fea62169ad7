#include "trackio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "error.hpp"
#include "json.hpp"

namespace polyfuse {

namespace {

using nlohmann::json;

FileFormat require_geo_format(FileFormat format, const char* what) {
    if (format == FileFormat::gpx) {
        throw Error(ErrorCode::invalid_argument, std::string(what) + " does not support gpx output");
    }
    return format;
}

std::string format_coord(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
    return out;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line, const std::string& message) {
    throw Error(ErrorCode::parse, path + ": line " + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back("");
    return fields;
}

std::optional<double> parse_number(const std::string& text) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) return std::nullopt;
        return value;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
long long days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

// ISO-8601 subset: YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM|-HH:MM].
std::optional<double> parse_iso8601(const std::string& text) {
    int year = 0, month = 0, day = 0, hour = 0, minute = 0;
    double second = 0.0;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%dT%d:%d:%lf%n", &year, &month, &day, &hour, &minute,
                    &second, &consumed) != 6) {
        return std::nullopt;
    }
    double offset = 0.0;
    const std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!rest.empty() && rest != "Z") {
        int oh = 0, om = 0;
        if (std::sscanf(rest.c_str(), "%d:%d", &oh, &om) != 2) return std::nullopt;
        offset = (std::abs(oh) * 3600.0 + om * 60.0) * (oh < 0 || rest[0] == '-' ? -1.0 : 1.0);
    }
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
    const double days = static_cast<double>(
        days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)));
    return days * 86400.0 + hour * 3600.0 + minute * 60.0 + second - offset;
}

std::optional<double> parse_timestamp(const std::string& text) {
    if (const auto epoch = parse_number(text)) return epoch;
    return parse_iso8601(text);
}

struct FixRows {
    std::vector<RawFix> fixes;
};

FixRows read_csv_fixes(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw Error(ErrorCode::parse, path + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv(line);
    const bool with_ts = header.size() == 4;
    if (!(header.size() == 3 || with_ts) || header[0] != "track_id" || header[1] != "lat" ||
        header[2] != "lon" || (with_ts && header[3] != "timestamp")) {
        parse_fail(path, line_no, "expected header track_id,lat,lon[,timestamp]");
    }

    FixRows rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size()) {
            parse_fail(path, line_no,
                       "expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        }
        RawFix fix;
        fix.track_id = fields[0];
        const auto lat = parse_number(fields[1]);
        if (!lat || *lat < -90.0 || *lat > 90.0) parse_fail(path, line_no, "invalid latitude '" + fields[1] + "'");
        const auto lon = parse_number(fields[2]);
        if (!lon || *lon < -180.0 || *lon > 180.0) parse_fail(path, line_no, "invalid longitude '" + fields[2] + "'");
        fix.latitude = *lat;
        fix.longitude = *lon;
        if (with_ts && !fields[3].empty()) {
            const auto ts = parse_timestamp(fields[3]);
            if (!ts) parse_fail(path, line_no, "invalid timestamp '" + fields[3] + "'");
            fix.timestamp = ts;
        }
        rows.fixes.push_back(std::move(fix));
    }
    if (rows.fixes.empty()) throw Error(ErrorCode::parse, path + ": no data rows");
    return rows;
}

FixRows read_geojson_fixes(const std::string& path) {
    std::ifstream in = open_input(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse, path + ": " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection") {
        throw Error(ErrorCode::parse, path + ": expected a FeatureCollection");
    }
    FixRows rows;
    std::size_t feature_no = 0;
    for (const json& feature : doc.at("features")) {
        const json& geom = feature.at("geometry");
        if (geom.value("type", "") != "LineString") {
            throw Error(ErrorCode::parse, path + ": feature " + std::to_string(feature_no) +
                                              " is not a LineString");
        }
        std::string track_id = "track" + std::to_string(feature_no);
        if (feature.contains("properties") && feature["properties"].is_object()) {
            track_id = feature["properties"].value("track_id", track_id);
        }
        for (const json& coord : geom.at("coordinates")) {
            RawFix fix;
            fix.track_id = track_id;
            fix.longitude = coord.at(0).get<double>();
            fix.latitude = coord.at(1).get<double>();
            rows.fixes.push_back(std::move(fix));
        }
        ++feature_no;
    }
    if (rows.fixes.empty()) throw Error(ErrorCode::parse, path + ": no coordinates");
    return rows;
}

FixRows read_gpx_fixes(const std::string& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_xml(path, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(ErrorCode::parse, path + ": " + e.what());
    }
    FixRows rows;
    const auto gpx = tree.get_child_optional("gpx");
    if (!gpx) throw Error(ErrorCode::parse, path + ": missing <gpx> root element");
    std::size_t track_no = 0;
    for (const auto& [key, trk] : *gpx) {
        if (key != "trk") continue;
        const std::string track_id = trk.get<std::string>("name", "trk" + std::to_string(track_no));
        for (const auto& [seg_key, seg] : trk) {
            if (seg_key != "trkseg") continue;
            for (const auto& [pt_key, point] : seg) {
                if (pt_key != "trkpt") continue;
                RawFix fix;
                fix.track_id = track_id;
                fix.latitude = point.get<double>("<xmlattr>.lat");
                fix.longitude = point.get<double>("<xmlattr>.lon");
                if (const auto time = point.get_optional<std::string>("time")) {
                    fix.timestamp = parse_timestamp(*time);
                }
                rows.fixes.push_back(std::move(fix));
            }
        }
        ++track_no;
    }
    if (rows.fixes.empty()) throw Error(ErrorCode::parse, path + ": no track points");
    return rows;
}

}  // namespace

FileFormat format_from_name(const std::string& name) {
    if (name == "csv") return FileFormat::csv;
    if (name == "geojson") return FileFormat::geojson;
    if (name == "gpx") return FileFormat::gpx;
    throw Error(ErrorCode::invalid_argument, "unknown format '" + name + "' (expected csv, geojson or gpx)");
}

std::optional<FileFormat> format_from_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return std::nullopt;
    const std::string ext = path.substr(dot + 1);
    if (ext == "csv") return FileFormat::csv;
    if (ext == "geojson" || ext == "json") return FileFormat::geojson;
    if (ext == "gpx") return FileFormat::gpx;
    return std::nullopt;
}

TrackFile read_tracks(const std::string& path, FileFormat format, std::optional<GeoOrigin> origin) {
    FixRows rows;
    switch (format) {
        case FileFormat::csv: rows = read_csv_fixes(path); break;
        case FileFormat::geojson: rows = read_geojson_fixes(path); break;
        case FileFormat::gpx: rows = read_gpx_fixes(path); break;
    }

    TrackFile out;
    out.origin = origin.value_or(GeoOrigin{rows.fixes.front().latitude, rows.fixes.front().longitude});

    std::vector<std::string> order;
    for (const RawFix& fix : rows.fixes) {
        auto it = std::find_if(out.tracks.begin(), out.tracks.end(),
                               [&](const Trajectory& t) { return t.track_id == fix.track_id; });
        if (it == out.tracks.end()) {
            out.tracks.push_back(Trajectory{fix.track_id, {}, {}});
            it = out.tracks.end() - 1;
        }
        it->points.push_back(project_to_local(fix.latitude, fix.longitude, out.origin));
        if (fix.timestamp) it->timestamps.push_back(*fix.timestamp);
    }
    for (const Trajectory& t : out.tracks) validate(t);
    return out;
}

void write_tracks(const std::string& path, std::span<const Trajectory> tracks,
                  const GeoOrigin& origin, FileFormat format) {
    require_geo_format(format, "write_tracks");
    std::ofstream out = open_output(path);

    if (format == FileFormat::csv) {
        bool with_ts = false;
        for (const Trajectory& t : tracks) with_ts = with_ts || !t.timestamps.empty();
        out << (with_ts ? "track_id,lat,lon,timestamp" : "track_id,lat,lon") << '\n';
        for (const Trajectory& t : tracks) {
            for (std::size_t i = 0; i < t.points.size(); ++i) {
                double lat = 0.0, lon = 0.0;
                to_geographic(t.points[i], origin, lat, lon);
                out << t.track_id << ',' << format_coord(lat) << ',' << format_coord(lon);
                if (with_ts) {
                    out << ',';
                    if (i < t.timestamps.size()) {
                        char buf[40];
                        std::snprintf(buf, sizeof(buf), "%.3f", t.timestamps[i]);
                        out << buf;
                    }
                }
                out << '\n';
            }
        }
        return;
    }

    json features = json::array();
    for (const Trajectory& t : tracks) {
        json coords = json::array();
        for (const PlanarPoint& p : t.points) {
            double lat = 0.0, lon = 0.0;
            to_geographic(p, origin, lat, lon);
            coords.push_back(json::array({json::parse(format_coord(lon)), json::parse(format_coord(lat))}));
        }
        features.push_back(json{{"type", "Feature"},
                                {"properties", {{"track_id", t.track_id}}},
                                {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    }
    const json doc{{"type", "FeatureCollection"}, {"features", features}};
    out << doc.dump(2) << '\n';
}

Polyline read_polyline(const std::string& path, FileFormat format, const GeoOrigin& origin) {
    require_geo_format(format, "read_polyline");
    std::vector<PlanarPoint> verts;

    if (format == FileFormat::csv) {
        const FixRows rows = read_csv_fixes(path);
        for (const RawFix& fix : rows.fixes) {
            if (fix.track_id != rows.fixes.front().track_id) {
                throw Error(ErrorCode::parse, path + ": polyline file contains multiple track ids");
            }
            verts.push_back(project_to_local(fix.latitude, fix.longitude, origin));
        }
    } else {
        std::ifstream in = open_input(path);
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::parse, path + ": " + e.what());
        }
        // Accept a bare LineString, a Feature or a one-feature collection.
        const json* geom = &doc;
        if (doc.value("type", "") == "FeatureCollection") {
            if (doc.at("features").size() != 1) {
                throw Error(ErrorCode::parse, path + ": expected exactly one LineString feature");
            }
            geom = &doc.at("features").at(0).at("geometry");
        } else if (doc.value("type", "") == "Feature") {
            geom = &doc.at("geometry");
        }
        if (geom->value("type", "") != "LineString") {
            throw Error(ErrorCode::parse, path + ": expected a LineString");
        }
        for (const json& coord : geom->at("coordinates")) {
            verts.push_back(project_to_local(coord.at(1).get<double>(), coord.at(0).get<double>(), origin));
        }
    }
    if (verts.size() < 2) throw Error(ErrorCode::parse, path + ": polyline needs at least 2 vertices");
    return Polyline(std::move(verts));
}

void write_polyline(const std::string& path, const Polyline& line, const GeoOrigin& origin,
                    FileFormat format) {
    require_geo_format(format, "write_polyline");
    std::ofstream out = open_output(path);
    if (format == FileFormat::csv) {
        out << "track_id,lat,lon\n";
        for (const PlanarPoint& p : line.vertices()) {
            double lat = 0.0, lon = 0.0;
            to_geographic(p, origin, lat, lon);
            out << "polyline," << format_coord(lat) << ',' << format_coord(lon) << '\n';
        }
        return;
    }
    json coords = json::array();
    for (const PlanarPoint& p : line.vertices()) {
        double lat = 0.0, lon = 0.0;
        to_geographic(p, origin, lat, lon);
        coords.push_back(json::array({json::parse(format_coord(lon)), json::parse(format_coord(lat))}));
    }
    const json doc{{"type", "LineString"}, {"coordinates", coords}};
    out << doc.dump(2) << '\n';
}

}  // namespace polyfuse

#include "polyfuse/polyfuse.h"

#include <algorithm>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "fusion.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "trackio.hpp"
#include "version.hpp"

using namespace polyfuse;

struct pf_dataset {
    std::vector<Trajectory> tracks;
    std::optional<Polyline> ground_truth;
    GeoOrigin origin;

    std::vector<PlanarPoint> merged() const {
        std::vector<PlanarPoint> points;
        for (const Trajectory& t : tracks) points.insert(points.end(), t.points.begin(), t.points.end());
        return points;
    }
};

struct pf_polyline {
    Polyline line;
};

struct pf_result {
    FusionResult result;
    pf_polyline polyline_view;
};

namespace {

thread_local std::string g_last_error;

pf_status set_error(pf_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

pf_status status_from(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return PF_ERROR_INVALID_ARGUMENT;
        case ErrorCode::degenerate_input: return PF_ERROR_DEGENERATE_INPUT;
        case ErrorCode::config: return PF_ERROR_CONFIG;
        case ErrorCode::parse: return PF_ERROR_PARSE;
        case ErrorCode::io: return PF_ERROR_IO;
        case ErrorCode::internal: return PF_ERROR_INTERNAL;
    }
    return PF_ERROR_INTERNAL;
}

template <typename Fn>
pf_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        return set_error(status_from(e.code()), e.what());
    } catch (const std::exception& e) {
        return set_error(PF_ERROR_INTERNAL, e.what());
    } catch (...) {
        return set_error(PF_ERROR_INTERNAL, "unknown error");
    }
}

pf_status require(bool condition, const char* message) {
    return condition ? PF_OK : set_error(PF_ERROR_INVALID_ARGUMENT, message);
}

FusionConfig to_config(const pf_fusion_config& c) {
    FusionConfig cfg;
    cfg.error_threshold_e = c.error_threshold_e;
    cfg.radius_sigma = c.radius_sigma;
    cfg.block_width_w = c.block_width_w;
    cfg.step_s = c.step_s;
    cfg.cluster_gap = c.cluster_gap;
    cfg.dp_epsilon = c.dp_epsilon;
    cfg.max_vertices = static_cast<std::size_t>(c.max_vertices);
    cfg.max_iterations = static_cast<std::size_t>(c.max_iterations);
    return cfg;
}

FileFormat resolve_format(const char* format, const char* path) {
    if (format != nullptr) return format_from_name(format);
    if (const auto inferred = format_from_extension(path)) return *inferred;
    throw Error(ErrorCode::invalid_argument,
                std::string("cannot infer format from '") + path + "'; pass csv, geojson or gpx");
}

pf_metrics to_c_metrics(const MetricsReport& r) {
    pf_metrics m;
    m.runtime_seconds = r.runtime_t;
    m.storage_points = r.storage_i;
    m.total_points = r.total_n;
    m.reduction_percent = r.reduction_r;
    m.mean_error_m = r.mean_error;
    m.max_error_m = r.max_error;
    return m;
}

}  // namespace

extern "C" {

const char* pf_version(void) { return kVersion; }

const char* pf_last_error(void) { return g_last_error.c_str(); }

pf_fusion_config pf_fusion_config_default(void) {
    const FusionConfig cfg;
    pf_fusion_config c;
    c.error_threshold_e = cfg.error_threshold_e;
    c.radius_sigma = cfg.radius_sigma;
    c.block_width_w = cfg.block_width_w;
    c.step_s = cfg.step_s;
    c.cluster_gap = cfg.cluster_gap;
    c.dp_epsilon = cfg.dp_epsilon;
    c.max_vertices = cfg.max_vertices;
    c.max_iterations = cfg.max_iterations;
    return c;
}

pf_generate_params pf_generate_params_default(void) {
    const GeneratorConfig cfg;
    pf_generate_params p;
    p.shape = PF_SHAPE_STADIUM;
    p.straight_length = cfg.straight_length;
    p.radius = cfg.radius;
    p.shape_xy = nullptr;
    p.shape_vertex_count = 0;
    p.num_tracks = cfg.num_tracks;
    p.points_per_track = cfg.points_per_track;
    p.noise_sigma = cfg.noise_sigma;
    p.seed = cfg.seed;
    p.origin_lat = 0.0;
    p.origin_lon = 0.0;
    return p;
}

pf_status pf_dataset_generate(const pf_generate_params* params, pf_dataset** out) {
    if (pf_status s = require(params && out, "params and out must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        GeneratorConfig cfg;
        cfg.shape = params->shape == PF_SHAPE_POLYLINE ? ShapeKind::polyline : ShapeKind::stadium;
        cfg.straight_length = params->straight_length;
        cfg.radius = params->radius;
        if (cfg.shape == ShapeKind::polyline) {
            if (params->shape_xy == nullptr) {
                throw Error(ErrorCode::invalid_argument, "shape_xy must not be NULL for polyline shapes");
            }
            for (std::size_t i = 0; i < params->shape_vertex_count; ++i) {
                cfg.shape_vertices.push_back({params->shape_xy[2 * i], params->shape_xy[2 * i + 1]});
            }
        }
        cfg.num_tracks = params->num_tracks;
        cfg.points_per_track = params->points_per_track;
        cfg.noise_sigma = params->noise_sigma;
        cfg.seed = params->seed;

        SyntheticDataset data = generate_tracks(cfg);
        *out = new pf_dataset{std::move(data.tracks), std::move(data.ground_truth),
                              GeoOrigin{params->origin_lat, params->origin_lon}};
        return PF_OK;
    });
}

pf_status pf_dataset_read(const char* path, const char* format, pf_dataset** out) {
    if (pf_status s = require(path && out, "path and out must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        TrackFile file = read_tracks(path, resolve_format(format, path));
        *out = new pf_dataset{std::move(file.tracks), std::nullopt, file.origin};
        return PF_OK;
    });
}

pf_status pf_dataset_write(const pf_dataset* dataset, const char* path, const char* format) {
    if (pf_status s = require(dataset && path, "dataset and path must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        write_tracks(path, dataset->tracks, dataset->origin, resolve_format(format, path));
        return PF_OK;
    });
}

void pf_dataset_free(pf_dataset* dataset) { delete dataset; }

size_t pf_dataset_track_count(const pf_dataset* dataset) {
    return dataset ? dataset->tracks.size() : 0;
}

size_t pf_dataset_point_count(const pf_dataset* dataset) {
    if (!dataset) return 0;
    size_t n = 0;
    for (const Trajectory& t : dataset->tracks) n += t.points.size();
    return n;
}

size_t pf_dataset_track_point_count(const pf_dataset* dataset, size_t track) {
    if (!dataset || track >= dataset->tracks.size()) return 0;
    return dataset->tracks[track].points.size();
}

pf_status pf_dataset_track_points(const pf_dataset* dataset, size_t track, double* xy,
                                  size_t capacity) {
    if (pf_status s = require(dataset && xy, "dataset and xy must not be NULL"); s != PF_OK) return s;
    if (pf_status s = require(track < dataset->tracks.size(), "track index out of range"); s != PF_OK) return s;
    const std::vector<PlanarPoint>& pts = dataset->tracks[track].points;
    if (pf_status s = require(capacity >= 2 * pts.size(), "xy buffer too small"); s != PF_OK) return s;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        xy[2 * i] = pts[i].x;
        xy[2 * i + 1] = pts[i].y;
    }
    return PF_OK;
}

const char* pf_dataset_track_id(const pf_dataset* dataset, size_t track) {
    if (!dataset || track >= dataset->tracks.size()) return nullptr;
    return dataset->tracks[track].track_id.c_str();
}

pf_status pf_dataset_origin(const pf_dataset* dataset, double* lat, double* lon) {
    if (pf_status s = require(dataset && lat && lon, "arguments must not be NULL"); s != PF_OK) return s;
    *lat = dataset->origin.latitude;
    *lon = dataset->origin.longitude;
    return PF_OK;
}

const pf_polyline* pf_dataset_ground_truth(const pf_dataset* dataset) {
    if (!dataset || !dataset->ground_truth) return nullptr;
    // pf_polyline wraps a Polyline as its first and only member.
    static_assert(sizeof(pf_polyline) == sizeof(Polyline));
    return reinterpret_cast<const pf_polyline*>(&*dataset->ground_truth);
}

pf_status pf_detect_outliers(const pf_dataset* dataset, size_t track, double speed_cap,
                             double mad_k, uint8_t* flags, size_t capacity) {
    if (pf_status s = require(dataset && flags, "dataset and flags must not be NULL"); s != PF_OK) return s;
    if (pf_status s = require(track < dataset->tracks.size(), "track index out of range"); s != PF_OK) return s;
    const Trajectory& t = dataset->tracks[track];
    if (pf_status s = require(capacity >= t.points.size(), "flags buffer too small"); s != PF_OK) return s;
    return guarded([&] {
        const std::vector<std::uint8_t> result =
            detect_outliers(t, speed_cap > 0.0 ? std::optional<double>(speed_cap) : std::nullopt,
                            mad_k > 0.0 ? std::optional<double>(mad_k) : std::nullopt);
        std::memcpy(flags, result.data(), result.size());
        return PF_OK;
    });
}

pf_status pf_dataset_filter_outliers(const pf_dataset* dataset, double speed_cap, double mad_k,
                                     pf_dataset** out, size_t* removed) {
    if (pf_status s = require(dataset && out, "dataset and out must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        auto filtered = new pf_dataset{{}, dataset->ground_truth, dataset->origin};
        size_t dropped = 0;
        try {
            for (const Trajectory& t : dataset->tracks) {
                const std::vector<std::uint8_t> flags = detect_outliers(
                    t, speed_cap > 0.0 ? std::optional<double>(speed_cap) : std::nullopt,
                    mad_k > 0.0 ? std::optional<double>(mad_k) : std::nullopt);
                Trajectory kept{t.track_id, {}, {}};
                for (std::size_t i = 0; i < t.points.size(); ++i) {
                    if (flags[i]) {
                        ++dropped;
                        continue;
                    }
                    kept.points.push_back(t.points[i]);
                    if (!t.timestamps.empty()) kept.timestamps.push_back(t.timestamps[i]);
                }
                validate(kept);
                filtered->tracks.push_back(std::move(kept));
            }
        } catch (...) {
            delete filtered;
            throw;
        }
        *out = filtered;
        if (removed) *removed = dropped;
        return PF_OK;
    });
}

pf_status pf_fuse(const pf_dataset* dataset, pf_algorithm algorithm,
                  const pf_fusion_config* config, pf_result** out) {
    if (pf_status s = require(dataset && config && out, "dataset, config and out must not be NULL");
        s != PF_OK) {
        return s;
    }
    return guarded([&] {
        Algorithm algo;
        switch (algorithm) {
            case PF_ALGO_MDA: algo = Algorithm::mda; break;
            case PF_ALGO_ARA: algo = Algorithm::ara; break;
            case PF_ALGO_DPA: algo = Algorithm::dpa; break;
            default:
                throw Error(ErrorCode::invalid_argument, "unknown algorithm tag");
        }
        FusionResult result = fuse(std::span<const Trajectory>(dataset->tracks), algo, to_config(*config));
        Polyline view = result.polyline;
        *out = new pf_result{std::move(result), pf_polyline{std::move(view)}};
        return PF_OK;
    });
}

void pf_result_free(pf_result* result) { delete result; }

const pf_polyline* pf_result_polyline(const pf_result* result) {
    return result ? &result->polyline_view : nullptr;
}

const char* pf_result_algorithm(const pf_result* result) {
    return result ? algorithm_name(result->result.algorithm) : nullptr;
}

uint64_t pf_result_iterations(const pf_result* result) {
    return result ? result->result.iterations : 0;
}

int pf_result_converged(const pf_result* result) {
    return result && result->result.converged ? 1 : 0;
}

double pf_result_runtime_seconds(const pf_result* result) {
    return result ? result->result.runtime_seconds : 0.0;
}

size_t pf_result_error_trace(const pf_result* result, double* values, size_t capacity) {
    if (!result) return 0;
    const std::vector<double>& trace = result->result.error_trace;
    if (values) {
        const size_t n = std::min(capacity, trace.size());
        for (size_t i = 0; i < n; ++i) values[i] = trace[i];
    }
    return trace.size();
}

pf_status pf_polyline_create(const double* xy, size_t vertex_count, pf_polyline** out) {
    if (pf_status s = require(xy && out, "xy and out must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        std::vector<PlanarPoint> verts;
        verts.reserve(vertex_count);
        for (size_t i = 0; i < vertex_count; ++i) verts.push_back({xy[2 * i], xy[2 * i + 1]});
        *out = new pf_polyline{Polyline(std::move(verts))};
        return PF_OK;
    });
}

pf_status pf_polyline_read(const char* path, const char* format, double origin_lat,
                           double origin_lon, pf_polyline** out) {
    if (pf_status s = require(path && out, "path and out must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        *out = new pf_polyline{
            read_polyline(path, resolve_format(format, path), GeoOrigin{origin_lat, origin_lon})};
        return PF_OK;
    });
}

pf_status pf_polyline_write(const pf_polyline* line, const char* path, const char* format,
                            double origin_lat, double origin_lon) {
    if (pf_status s = require(line && path, "line and path must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        write_polyline(path, line->line, GeoOrigin{origin_lat, origin_lon},
                       resolve_format(format, path));
        return PF_OK;
    });
}

size_t pf_polyline_vertex_count(const pf_polyline* line) {
    return line ? line->line.vertex_count() : 0;
}

pf_status pf_polyline_vertices(const pf_polyline* line, double* xy, size_t capacity) {
    if (pf_status s = require(line && xy, "line and xy must not be NULL"); s != PF_OK) return s;
    const std::vector<PlanarPoint>& verts = line->line.vertices();
    if (pf_status s = require(capacity >= 2 * verts.size(), "xy buffer too small"); s != PF_OK) return s;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        xy[2 * i] = verts[i].x;
        xy[2 * i + 1] = verts[i].y;
    }
    return PF_OK;
}

double pf_polyline_length(const pf_polyline* line) { return line ? line->line.length() : 0.0; }

void pf_polyline_free(pf_polyline* line) { delete line; }

pf_status pf_evaluate(const pf_dataset* dataset, const pf_result* result, pf_metrics* out) {
    if (pf_status s = require(dataset && result && out, "arguments must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        const std::vector<PlanarPoint> points = dataset->merged();
        *out = to_c_metrics(evaluate(points, result->result));
        return PF_OK;
    });
}

pf_status pf_evaluate_polyline(const pf_dataset* dataset, const pf_polyline* line, pf_metrics* out) {
    if (pf_status s = require(dataset && line && out, "arguments must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        const std::vector<PlanarPoint> points = dataset->merged();
        *out = to_c_metrics(evaluate_polyline(points, line->line, "", 0.0));
        return PF_OK;
    });
}

pf_status pf_compare_render(const pf_metrics* metrics, const char* const* names, size_t count,
                            int* runtime_ordering_holds, int* error_ordering_holds, char** text) {
    if (pf_status s = require(metrics && names, "metrics and names must not be NULL"); s != PF_OK) return s;
    return guarded([&] {
        std::vector<MetricsReport> reports;
        for (size_t i = 0; i < count; ++i) {
            MetricsReport r;
            r.algorithm = names[i] ? names[i] : "";
            r.runtime_t = metrics[i].runtime_seconds;
            r.storage_i = metrics[i].storage_points;
            r.total_n = metrics[i].total_points;
            r.reduction_r = metrics[i].reduction_percent;
            r.mean_error = metrics[i].mean_error_m;
            r.max_error = metrics[i].max_error_m;
            reports.push_back(std::move(r));
        }
        const ComparisonTable table = compare(reports);
        if (runtime_ordering_holds) {
            *runtime_ordering_holds = table.ordering_checked && table.runtime_ordering_holds ? 1 : 0;
        }
        if (error_ordering_holds) {
            *error_ordering_holds = table.ordering_checked && table.error_ordering_holds ? 1 : 0;
        }
        if (text) {
            const std::string rendered = table.render_text();
            char* buffer = new char[rendered.size() + 1];
            std::memcpy(buffer, rendered.c_str(), rendered.size() + 1);
            *text = buffer;
        }
        return PF_OK;
    });
}

pf_status pf_metrics_rows_render(const pf_metrics* metrics, const char* const* names, size_t count,
                                 char** text) {
    if (pf_status s = require(metrics && names && text, "metrics, names and text must not be NULL");
        s != PF_OK) {
        return s;
    }
    return guarded([&] {
        std::string rendered = metrics_row_header() + "\n";
        for (size_t i = 0; i < count; ++i) {
            MetricsReport r;
            r.algorithm = names[i] ? names[i] : "";
            r.runtime_t = metrics[i].runtime_seconds;
            r.storage_i = metrics[i].storage_points;
            r.total_n = metrics[i].total_points;
            r.reduction_r = metrics[i].reduction_percent;
            r.mean_error = metrics[i].mean_error_m;
            r.max_error = metrics[i].max_error_m;
            rendered += metrics_row(r) + "\n";
        }
        char* buffer = new char[rendered.size() + 1];
        std::memcpy(buffer, rendered.c_str(), rendered.size() + 1);
        *text = buffer;
        return PF_OK;
    });
}

void pf_string_free(char* text) { delete[] text; }

}  // extern "C"

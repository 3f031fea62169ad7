/* polyfuse - multi-track GPS trajectory fusion into compact polyline skeletons.
 *
 * C API over the C++ core. All functions return pf_status unless they are
 * trivial accessors; on failure pf_last_error() describes the problem for the
 * calling thread. Handles are opaque and freed with their matching *_free.
 * All coordinates crossing this API are planar meters; geographic conversion
 * happens only inside the file readers and writers.
 */

#ifndef POLYFUSE_H
#define POLYFUSE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
    PF_OK = 0,
    PF_ERROR_INVALID_ARGUMENT = 1,
    PF_ERROR_DEGENERATE_INPUT = 2,
    PF_ERROR_CONFIG = 3,
    PF_ERROR_PARSE = 4,
    PF_ERROR_IO = 5,
    PF_ERROR_INTERNAL = 6
} pf_status;

typedef enum pf_algorithm {
    PF_ALGO_MDA = 0,
    PF_ALGO_ARA = 1,
    PF_ALGO_DPA = 2
} pf_algorithm;

typedef enum pf_shape {
    PF_SHAPE_STADIUM = 0,
    PF_SHAPE_POLYLINE = 1
} pf_shape;

typedef struct pf_dataset pf_dataset;
typedef struct pf_polyline pf_polyline;
typedef struct pf_result pf_result;

const char* pf_version(void);

/* Message for the most recent failure on the calling thread. */
const char* pf_last_error(void);

typedef struct pf_fusion_config {
    double error_threshold_e; /* convergence target for the mean lateral error, m */
    double radius_sigma;      /* centroid gather radius around the worst point, m */
    double block_width_w;     /* sweep window width, m */
    double step_s;            /* sweep advance per block, m; must not exceed block_width_w */
    double cluster_gap;       /* y-gap splitting a window into clusters, m */
    double dp_epsilon;        /* chord-deviation tolerance, m */
    uint64_t max_vertices;
    uint64_t max_iterations;
} pf_fusion_config;

pf_fusion_config pf_fusion_config_default(void);

typedef struct pf_generate_params {
    pf_shape shape;
    double straight_length;  /* stadium straights, m */
    double radius;           /* stadium cap radius, m */
    const double* shape_xy;  /* PF_SHAPE_POLYLINE: interleaved x,y vertices */
    size_t shape_vertex_count;
    int32_t num_tracks;
    int32_t points_per_track;
    double noise_sigma;      /* per-axis Gaussian noise, m */
    uint64_t seed;
    double origin_lat;       /* geographic anchor used when writing files */
    double origin_lon;
} pf_generate_params;

pf_generate_params pf_generate_params_default(void);

/* Datasets */
pf_status pf_dataset_generate(const pf_generate_params* params, pf_dataset** out);
/* format: "csv", "geojson", "gpx" or NULL to infer from the extension. */
pf_status pf_dataset_read(const char* path, const char* format, pf_dataset** out);
pf_status pf_dataset_write(const pf_dataset* dataset, const char* path, const char* format);
void pf_dataset_free(pf_dataset* dataset);

size_t pf_dataset_track_count(const pf_dataset* dataset);
size_t pf_dataset_point_count(const pf_dataset* dataset);
size_t pf_dataset_track_point_count(const pf_dataset* dataset, size_t track);
/* Fills xy with interleaved x,y pairs; capacity counts doubles. */
pf_status pf_dataset_track_points(const pf_dataset* dataset, size_t track, double* xy,
                                  size_t capacity);
const char* pf_dataset_track_id(const pf_dataset* dataset, size_t track);
pf_status pf_dataset_origin(const pf_dataset* dataset, double* lat, double* lon);
/* Borrowed handle, NULL when the dataset has no ground truth. */
const pf_polyline* pf_dataset_ground_truth(const pf_dataset* dataset);

/* Outlier handling. speed_cap <= 0 or mad_k <= 0 disables that gate. */
pf_status pf_detect_outliers(const pf_dataset* dataset, size_t track, double speed_cap,
                             double mad_k, uint8_t* flags, size_t capacity);
pf_status pf_dataset_filter_outliers(const pf_dataset* dataset, double speed_cap, double mad_k,
                                     pf_dataset** out, size_t* removed);

/* Fusion */
pf_status pf_fuse(const pf_dataset* dataset, pf_algorithm algorithm,
                  const pf_fusion_config* config, pf_result** out);
void pf_result_free(pf_result* result);
const pf_polyline* pf_result_polyline(const pf_result* result); /* borrowed */
const char* pf_result_algorithm(const pf_result* result);
uint64_t pf_result_iterations(const pf_result* result);
int pf_result_converged(const pf_result* result);
double pf_result_runtime_seconds(const pf_result* result);
/* Copies up to capacity entries, returns the full trace length. */
size_t pf_result_error_trace(const pf_result* result, double* values, size_t capacity);

/* Polylines */
pf_status pf_polyline_create(const double* xy, size_t vertex_count, pf_polyline** out);
pf_status pf_polyline_read(const char* path, const char* format, double origin_lat,
                           double origin_lon, pf_polyline** out);
pf_status pf_polyline_write(const pf_polyline* line, const char* path, const char* format,
                            double origin_lat, double origin_lon);
size_t pf_polyline_vertex_count(const pf_polyline* line);
pf_status pf_polyline_vertices(const pf_polyline* line, double* xy, size_t capacity);
double pf_polyline_length(const pf_polyline* line);
void pf_polyline_free(pf_polyline* line);

/* Metrics */
typedef struct pf_metrics {
    double runtime_seconds;
    uint64_t storage_points;   /* polyline vertex count i */
    uint64_t total_points;     /* dataset point count n */
    double reduction_percent;  /* (i/n)*100 */
    double mean_error_m;
    double max_error_m;
} pf_metrics;

pf_status pf_evaluate(const pf_dataset* dataset, const pf_result* result, pf_metrics* out);
pf_status pf_evaluate_polyline(const pf_dataset* dataset, const pf_polyline* line, pf_metrics* out);

/* Renders the comparison table for reports over the same dataset.
 * names[i] labels metrics[i] ("MDA", "ARA", "DPA"). The orderings are
 * reported only when exactly those three algorithms are present; pass NULL
 * for flags you do not need. *text is heap-allocated; free with
 * pf_string_free. */
pf_status pf_compare_render(const pf_metrics* metrics, const char* const* names, size_t count,
                            int* runtime_ordering_holds, int* error_ordering_holds, char** text);

/* Machine-readable report: the header line plus one comma-separated row per
 * metrics record. *text is heap-allocated; free with pf_string_free. */
pf_status pf_metrics_rows_render(const pf_metrics* metrics, const char* const* names, size_t count,
                                 char** text);
void pf_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POLYFUSE_H */

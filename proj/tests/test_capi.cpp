#include "polyfuse/polyfuse.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <unistd.h>
#include <string>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("polyfuse_capi_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

pf_dataset* make_dataset(uint64_t seed, int tracks = 4, int points = 80) {
    pf_generate_params params = pf_generate_params_default();
    params.num_tracks = tracks;
    params.points_per_track = points;
    params.seed = seed;
    pf_dataset* ds = nullptr;
    REQUIRE(pf_dataset_generate(&params, &ds) == PF_OK);
    return ds;
}

}  // namespace

TEST_CASE("version and defaults are available") {
    CHECK(std::string(pf_version()) == "0.1.0");
    const pf_fusion_config cfg = pf_fusion_config_default();
    CHECK(cfg.error_threshold_e > 0.0);
    CHECK(cfg.step_s <= cfg.block_width_w);
    const pf_generate_params gen = pf_generate_params_default();
    CHECK(gen.num_tracks == 10);
    CHECK(gen.points_per_track == 160);
}

TEST_CASE("null arguments fail with a message instead of crashing") {
    CHECK(pf_dataset_generate(nullptr, nullptr) == PF_ERROR_INVALID_ARGUMENT);
    CHECK(std::strlen(pf_last_error()) > 0);
    CHECK(pf_fuse(nullptr, PF_ALGO_MDA, nullptr, nullptr) == PF_ERROR_INVALID_ARGUMENT);
    CHECK(pf_dataset_read(nullptr, nullptr, nullptr) == PF_ERROR_INVALID_ARGUMENT);
}

TEST_CASE("generate, inspect and free a dataset") {
    pf_dataset* ds = make_dataset(7);
    CHECK(pf_dataset_track_count(ds) == 4);
    CHECK(pf_dataset_point_count(ds) == 4 * 80);
    CHECK(pf_dataset_track_point_count(ds, 0) == 80);
    CHECK(std::string(pf_dataset_track_id(ds, 0)) == "track00");

    std::vector<double> xy(2 * 80);
    CHECK(pf_dataset_track_points(ds, 0, xy.data(), xy.size()) == PF_OK);
    CHECK(pf_dataset_track_points(ds, 0, xy.data(), 3) == PF_ERROR_INVALID_ARGUMENT);
    CHECK(pf_dataset_track_points(ds, 99, xy.data(), xy.size()) == PF_ERROR_INVALID_ARGUMENT);

    const pf_polyline* truth = pf_dataset_ground_truth(ds);
    REQUIRE(truth != nullptr);
    CHECK(pf_polyline_vertex_count(truth) > 100);
    CHECK(pf_polyline_length(truth) > 0.0);

    double lat = -1.0, lon = -1.0;
    CHECK(pf_dataset_origin(ds, &lat, &lon) == PF_OK);
    CHECK(lat == 0.0);
    CHECK(lon == 0.0);
    pf_dataset_free(ds);
}

TEST_CASE("fusion through the c api produces a usable result") {
    pf_dataset* ds = make_dataset(11);
    const pf_fusion_config cfg = pf_fusion_config_default();

    for (const pf_algorithm algo : {PF_ALGO_MDA, PF_ALGO_ARA, PF_ALGO_DPA}) {
        pf_result* result = nullptr;
        REQUIRE(pf_fuse(ds, algo, &cfg, &result) == PF_OK);
        const pf_polyline* line = pf_result_polyline(result);
        REQUIRE(line != nullptr);
        CHECK(pf_polyline_vertex_count(line) >= 2);
        CHECK(pf_result_runtime_seconds(result) >= 0.0);
        CHECK(pf_result_error_trace(result, nullptr, 0) >= 1);

        pf_metrics metrics;
        REQUIRE(pf_evaluate(ds, result, &metrics) == PF_OK);
        CHECK(metrics.total_points == pf_dataset_point_count(ds));
        CHECK(metrics.storage_points == pf_polyline_vertex_count(line));
        CHECK(metrics.reduction_percent ==
              static_cast<double>(metrics.storage_points) /
                  static_cast<double>(metrics.total_points) * 100.0);
        CHECK(metrics.max_error_m >= metrics.mean_error_m);
        pf_result_free(result);
    }
    pf_dataset_free(ds);
}

TEST_CASE("invalid config surfaces as a config error") {
    pf_dataset* ds = make_dataset(13);
    pf_fusion_config cfg = pf_fusion_config_default();
    cfg.radius_sigma = -1.0;
    pf_result* result = nullptr;
    CHECK(pf_fuse(ds, PF_ALGO_MDA, &cfg, &result) == PF_ERROR_CONFIG);
    CHECK(std::string(pf_last_error()).find("radius_sigma") != std::string::npos);
    pf_dataset_free(ds);
}

TEST_CASE("datasets and polylines round-trip through files") {
    TempDir dir;
    pf_dataset* ds = make_dataset(17, 2, 40);
    const std::string csv = dir.file("tracks.csv");
    REQUIRE(pf_dataset_write(ds, csv.c_str(), nullptr) == PF_OK);

    pf_dataset* back = nullptr;
    REQUIRE(pf_dataset_read(csv.c_str(), "csv", &back) == PF_OK);
    CHECK(pf_dataset_track_count(back) == 2);
    CHECK(pf_dataset_point_count(back) == 80);
    CHECK(pf_dataset_ground_truth(back) == nullptr);

    const pf_fusion_config cfg = pf_fusion_config_default();
    pf_result* result = nullptr;
    REQUIRE(pf_fuse(back, PF_ALGO_ARA, &cfg, &result) == PF_OK);

    double lat = 0.0, lon = 0.0;
    REQUIRE(pf_dataset_origin(back, &lat, &lon) == PF_OK);
    const std::string out = dir.file("fused.geojson");
    REQUIRE(pf_polyline_write(pf_result_polyline(result), out.c_str(), "geojson", lat, lon) == PF_OK);

    pf_polyline* line = nullptr;
    REQUIRE(pf_polyline_read(out.c_str(), nullptr, lat, lon, &line) == PF_OK);
    CHECK(pf_polyline_vertex_count(line) == pf_polyline_vertex_count(pf_result_polyline(result)));

    pf_polyline_free(line);
    pf_result_free(result);
    pf_dataset_free(back);
    pf_dataset_free(ds);
}

TEST_CASE("outlier filtering drops injected spikes") {
    TempDir dir;
    // Build a csv with one teleported row inside a smooth track.
    pf_dataset* ds = make_dataset(19, 1, 60);
    std::vector<double> xy(2 * 60);
    REQUIRE(pf_dataset_track_points(ds, 0, xy.data(), xy.size()) == PF_OK);

    uint8_t flags[60];
    REQUIRE(pf_detect_outliers(ds, 0, 0.0, 6.0, flags, 60) == PF_OK);

    pf_dataset* filtered = nullptr;
    size_t removed = 123456;
    REQUIRE(pf_dataset_filter_outliers(ds, 0.0, 6.0, &filtered, &removed) == PF_OK);
    size_t flagged = 0;
    for (const uint8_t f : flags) flagged += f;
    CHECK(removed == flagged);
    CHECK(pf_dataset_point_count(filtered) == 60 - removed);

    pf_dataset_free(filtered);
    pf_dataset_free(ds);
}

TEST_CASE("compare renders a table and ordering flags") {
    pf_dataset* ds = make_dataset(23);
    const pf_fusion_config cfg = pf_fusion_config_default();

    pf_metrics metrics[3];
    const char* names[3] = {"MDA", "ARA", "DPA"};
    const pf_algorithm algos[3] = {PF_ALGO_MDA, PF_ALGO_ARA, PF_ALGO_DPA};
    for (int i = 0; i < 3; ++i) {
        pf_result* result = nullptr;
        REQUIRE(pf_fuse(ds, algos[i], &cfg, &result) == PF_OK);
        REQUIRE(pf_evaluate(ds, result, &metrics[i]) == PF_OK);
        pf_result_free(result);
    }

    int runtime_flag = -1, error_flag = -1;
    char* text = nullptr;
    REQUIRE(pf_compare_render(metrics, names, 3, &runtime_flag, &error_flag, &text) == PF_OK);
    REQUIRE(text != nullptr);
    CHECK(std::string(text).find("algorithm") != std::string::npos);
    CHECK((runtime_flag == 0 || runtime_flag == 1));
    CHECK((error_flag == 0 || error_flag == 1));
    pf_string_free(text);
    pf_dataset_free(ds);
}

TEST_CASE("metrics rows render with the fixed header") {
    pf_metrics m{};
    m.runtime_seconds = 0.5;
    m.storage_points = 10;
    m.total_points = 100;
    m.reduction_percent = 10.0;
    m.mean_error_m = 1.25;
    m.max_error_m = 3.5;
    const char* name = "MDA";
    char* text = nullptr;
    REQUIRE(pf_metrics_rows_render(&m, &name, 1, &text) == PF_OK);
    const std::string rows(text);
    pf_string_free(text);
    CHECK(rows.find("algorithm,runtime_s,storage_i,total_n,reduction_pct,mean_error_m,max_error_m") == 0);
    CHECK(rows.find("MDA,0.500000,10,100,10.000000,1.250000000,3.500000000") != std::string::npos);
}

TEST_CASE("fusion via the c api is deterministic") {
    pf_dataset* ds = make_dataset(29);
    const pf_fusion_config cfg = pf_fusion_config_default();
    pf_result *a = nullptr, *b = nullptr;
    REQUIRE(pf_fuse(ds, PF_ALGO_MDA, &cfg, &a) == PF_OK);
    REQUIRE(pf_fuse(ds, PF_ALGO_MDA, &cfg, &b) == PF_OK);
    const size_t n = pf_polyline_vertex_count(pf_result_polyline(a));
    REQUIRE(pf_polyline_vertex_count(pf_result_polyline(b)) == n);
    std::vector<double> xa(2 * n), xb(2 * n);
    REQUIRE(pf_polyline_vertices(pf_result_polyline(a), xa.data(), xa.size()) == PF_OK);
    REQUIRE(pf_polyline_vertices(pf_result_polyline(b), xb.data(), xb.size()) == PF_OK);
    CHECK(xa == xb);
    pf_result_free(a);
    pf_result_free(b);
    pf_dataset_free(ds);
}

// polyfuse command line: generate synthetic datasets, fuse tracks with one of
// the three algorithms, compare all three, and evaluate polylines against
// point sets. Links the C API only.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "manifest.hpp"
#include "polyfuse/polyfuse.h"
#include "svg.hpp"

namespace fs = std::filesystem;
using polyfuse_cli::SvgLayer;

namespace {

// Exit codes, stable per error class (see README).
constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;   // invalid or degenerate input data
constexpr int kExitConfig = 4;  // algorithm configuration rejected
constexpr int kExitParse = 5;   // malformed file
constexpr int kExitIo = 6;      // filesystem failure
constexpr int kExitInternal = 7;

int exit_code_for(pf_status status) {
    switch (status) {
        case PF_OK: return kExitOk;
        case PF_ERROR_INVALID_ARGUMENT:
        case PF_ERROR_DEGENERATE_INPUT: return kExitInput;
        case PF_ERROR_CONFIG: return kExitConfig;
        case PF_ERROR_PARSE: return kExitParse;
        case PF_ERROR_IO: return kExitIo;
        default: return kExitInternal;
    }
}

[[noreturn]] void fail(pf_status status, const std::string& context) {
    std::cerr << "polyfuse: " << context << ": " << pf_last_error() << '\n';
    std::exit(exit_code_for(status));
}

struct DatasetHandle {
    pf_dataset* ptr = nullptr;
    ~DatasetHandle() { pf_dataset_free(ptr); }
};

struct ResultHandle {
    pf_result* ptr = nullptr;
    ~ResultHandle() { pf_result_free(ptr); }
};

struct PolylineHandle {
    pf_polyline* ptr = nullptr;
    ~PolylineHandle() { pf_polyline_free(ptr); }
};

struct CommonOptions {
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 42;
};

struct FusionFlags {
    pf_fusion_config config = pf_fusion_config_default();
    bool cluster_gap_set = false;
    bool filter_outliers = false;
    double speed_cap = 0.0;  // <= 0 disables the speed gate
    double mad_k = 6.0;
    bool no_timing = false;
};

void add_fusion_flags(CLI::App* cmd, FusionFlags& flags) {
    cmd->add_option("--error", flags.config.error_threshold_e,
                    "Mean lateral error convergence target, meters");
    cmd->add_option("--sigma", flags.config.radius_sigma,
                    "Centroid gather radius around the worst-fit point, meters");
    cmd->add_option("--block-width", flags.config.block_width_w, "Sweep window width, meters");
    cmd->add_option("--step", flags.config.step_s, "Sweep step per block, meters");
    cmd->add_option("--cluster-gap", flags.config.cluster_gap,
                    "y-gap that splits a window into clusters (defaults to --error)")
        ->each([&flags](const std::string&) { flags.cluster_gap_set = true; });
    cmd->add_option("--epsilon", flags.config.dp_epsilon, "Chord-deviation tolerance, meters");
    cmd->add_option("--max-vertices", flags.config.max_vertices, "Vertex cap for fused polylines");
    cmd->add_option("--max-iterations", flags.config.max_iterations, "Insertion cap for MDA");
    cmd->add_flag("--filter-outliers", flags.filter_outliers,
                  "Drop flagged outlier fixes before fusing");
    cmd->add_option("--speed-cap", flags.speed_cap,
                    "Outlier speed gate, m/s (needs timestamps; <=0 disables)");
    cmd->add_option("--mad-k", flags.mad_k, "Outlier deviation gate multiplier (<=0 disables)");
    cmd->add_flag("--no-timing", flags.no_timing,
                  "Write runtimes as 0 so repeated runs are byte-identical");
}

void finalize_config(FusionFlags& flags) {
    if (!flags.cluster_gap_set) flags.config.cluster_gap = flags.config.error_threshold_e;
}

nlohmann::json config_json(const pf_fusion_config& c) {
    return {{"error_threshold_e", c.error_threshold_e},
            {"radius_sigma", c.radius_sigma},
            {"block_width_w", c.block_width_w},
            {"step_s", c.step_s},
            {"cluster_gap", c.cluster_gap},
            {"dp_epsilon", c.dp_epsilon},
            {"max_vertices", c.max_vertices},
            {"max_iterations", c.max_iterations}};
}

std::string ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        std::cerr << "polyfuse: cannot create output directory '" << dir << "': " << ec.message()
                  << '\n';
        std::exit(kExitIo);
    }
    return dir;
}

DatasetHandle load_dataset(const std::string& path, const FusionFlags& flags) {
    DatasetHandle ds;
    if (const pf_status s = pf_dataset_read(path.c_str(), nullptr, &ds.ptr); s != PF_OK) {
        fail(s, "reading '" + path + "'");
    }
    if (flags.filter_outliers) {
        DatasetHandle filtered;
        size_t removed = 0;
        if (const pf_status s = pf_dataset_filter_outliers(ds.ptr, flags.speed_cap, flags.mad_k,
                                                           &filtered.ptr, &removed);
            s != PF_OK) {
            fail(s, "filtering outliers");
        }
        std::cerr << "polyfuse: dropped " << removed << " flagged fixes\n";
        std::swap(ds.ptr, filtered.ptr);
    }
    return ds;
}

std::vector<std::pair<double, double>> dataset_points(const pf_dataset* ds) {
    std::vector<std::pair<double, double>> pts;
    const size_t tracks = pf_dataset_track_count(ds);
    for (size_t t = 0; t < tracks; ++t) {
        const size_t n = pf_dataset_track_point_count(ds, t);
        std::vector<double> xy(2 * n);
        if (pf_dataset_track_points(ds, t, xy.data(), xy.size()) != PF_OK) continue;
        for (size_t i = 0; i < n; ++i) pts.emplace_back(xy[2 * i], xy[2 * i + 1]);
    }
    return pts;
}

std::vector<std::pair<double, double>> polyline_points(const pf_polyline* line) {
    const size_t n = pf_polyline_vertex_count(line);
    std::vector<double> xy(2 * n);
    std::vector<std::pair<double, double>> pts;
    if (pf_polyline_vertices(line, xy.data(), xy.size()) != PF_OK) return pts;
    for (size_t i = 0; i < n; ++i) pts.emplace_back(xy[2 * i], xy[2 * i + 1]);
    return pts;
}

std::string metrics_rows(const pf_metrics* metrics, const char* const* names, std::size_t count) {
    char* text = nullptr;
    if (pf_metrics_rows_render(metrics, names, count, &text) != PF_OK) {
        fail(PF_ERROR_INTERNAL, "rendering report rows");
    }
    std::string rows(text);
    pf_string_free(text);
    return rows;
}

void write_file(const std::string& path, const std::string& text) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::cerr << "polyfuse: cannot write '" << path << "'\n";
        std::exit(kExitIo);
    }
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

int run_generate(const CommonOptions& common, int tracks, int points, double noise,
                 const std::string& shape, double straight, double radius, double origin_lat,
                 double origin_lon, const std::vector<std::string>& argv) {
    pf_generate_params params = pf_generate_params_default();
    params.num_tracks = tracks;
    params.points_per_track = points;
    params.noise_sigma = noise;
    params.seed = common.seed;
    params.straight_length = straight;
    params.radius = radius;
    params.origin_lat = origin_lat;
    params.origin_lon = origin_lon;
    if (shape != "stadium") {
        std::cerr << "polyfuse: unknown shape '" << shape << "' (only stadium is built in)\n";
        return kExitUsage;
    }

    DatasetHandle ds;
    if (const pf_status s = pf_dataset_generate(&params, &ds.ptr); s != PF_OK) {
        fail(s, "generating dataset");
    }

    const std::string dir = ensure_out_dir(common.out_dir);
    const std::string data_path =
        (fs::path(dir) / ("dataset." + common.format)).string();
    if (const pf_status s = pf_dataset_write(ds.ptr, data_path.c_str(), common.format.c_str());
        s != PF_OK) {
        fail(s, "writing '" + data_path + "'");
    }
    const std::string truth_path = (fs::path(dir) / "ground_truth.geojson").string();
    if (const pf_status s = pf_polyline_write(pf_dataset_ground_truth(ds.ptr), truth_path.c_str(),
                                              "geojson", origin_lat, origin_lon);
        s != PF_OK) {
        fail(s, "writing '" + truth_path + "'");
    }

    const nlohmann::json cfg{{"tracks", tracks},        {"points_per_track", points},
                             {"noise_sigma", noise},    {"shape", shape},
                             {"straight", straight},    {"radius", radius},
                             {"origin_lat", origin_lat}, {"origin_lon", origin_lon}};
    polyfuse_cli::write_manifest((fs::path(dir) / "manifest.json").string(), "generate", argv,
                                 common.seed, cfg, {}, {data_path, truth_path});

    std::cout << "wrote " << data_path << " (" << pf_dataset_point_count(ds.ptr) << " points, "
              << pf_dataset_track_count(ds.ptr) << " tracks)\n";
    std::cout << "wrote " << truth_path << '\n';
    return kExitOk;
}

int run_fuse(const CommonOptions& common, const std::string& input, const std::string& algo_name,
             FusionFlags& flags, const std::vector<std::string>& argv) {
    finalize_config(flags);
    pf_algorithm algo;
    if (algo_name == "mda") {
        algo = PF_ALGO_MDA;
    } else if (algo_name == "ara") {
        algo = PF_ALGO_ARA;
    } else if (algo_name == "dpa") {
        algo = PF_ALGO_DPA;
    } else {
        std::cerr << "polyfuse: unknown algorithm '" << algo_name << "'\n";
        return kExitUsage;
    }

    DatasetHandle ds = load_dataset(input, flags);
    ResultHandle result;
    if (const pf_status s = pf_fuse(ds.ptr, algo, &flags.config, &result.ptr); s != PF_OK) {
        fail(s, "fusing with " + algo_name);
    }
    pf_metrics metrics;
    if (const pf_status s = pf_evaluate(ds.ptr, result.ptr, &metrics); s != PF_OK) {
        fail(s, "evaluating result");
    }
    if (flags.no_timing) metrics.runtime_seconds = 0.0;

    double lat = 0.0, lon = 0.0;
    pf_dataset_origin(ds.ptr, &lat, &lon);
    const std::string dir = ensure_out_dir(common.out_dir);
    const std::string line_path =
        (fs::path(dir) / ("fused_" + algo_name + "." + common.format)).string();
    if (const pf_status s = pf_polyline_write(pf_result_polyline(result.ptr), line_path.c_str(),
                                              common.format.c_str(), lat, lon);
        s != PF_OK) {
        fail(s, "writing '" + line_path + "'");
    }

    const std::string name = pf_result_algorithm(result.ptr);
    const char* row_name = name.c_str();
    const std::string report_path = (fs::path(dir) / "report.csv").string();
    write_file(report_path, metrics_rows(&metrics, &row_name, 1));
    polyfuse_cli::write_manifest((fs::path(dir) / "manifest.json").string(), "fuse", argv,
                                 common.seed, config_json(flags.config), {input},
                                 {line_path, report_path});

    std::cout << name << ": " << (pf_result_converged(result.ptr) ? "converged" : "not converged")
              << " after " << pf_result_iterations(result.ptr) << " iterations\n";
    std::cout << "vertices " << metrics.storage_points << " / points " << metrics.total_points
              << " (reduction " << metrics.reduction_percent << " %)\n";
    std::printf("mean error %.4f m, max error %.4f m, runtime %.6f s\n", metrics.mean_error_m,
                metrics.max_error_m, metrics.runtime_seconds);
    std::cout << "wrote " << line_path << '\n';
    return kExitOk;
}

int run_compare(const CommonOptions& common, const std::string& input,
                const std::string& truth_path, FusionFlags& flags,
                const std::vector<std::string>& argv) {
    finalize_config(flags);
    DatasetHandle ds = load_dataset(input, flags);
    double lat = 0.0, lon = 0.0;
    pf_dataset_origin(ds.ptr, &lat, &lon);
    const std::string dir = ensure_out_dir(common.out_dir);

    const char* names[3] = {"MDA", "ARA", "DPA"};
    const char* lower[3] = {"mda", "ara", "dpa"};
    const pf_algorithm algos[3] = {PF_ALGO_MDA, PF_ALGO_ARA, PF_ALGO_DPA};

    std::vector<SvgLayer> layers;
    layers.push_back({"points", "#9aa0a6", false, true, dataset_points(ds.ptr)});
    const char* colors[3] = {"#d93025", "#1a73e8", "#f9ab00"};

    pf_metrics metrics[3];
    bool ok[3] = {false, false, false};
    std::string failures[3];
    std::string convergence[3];
    std::vector<std::string> outputs;
    pf_status first_failure = PF_OK;

    for (int i = 0; i < 3; ++i) {
        ResultHandle result;
        const pf_status s = pf_fuse(ds.ptr, algos[i], &flags.config, &result.ptr);
        if (s != PF_OK) {
            failures[i] = pf_last_error();
            if (first_failure == PF_OK) first_failure = s;
            continue;
        }
        if (pf_evaluate(ds.ptr, result.ptr, &metrics[i]) != PF_OK) {
            failures[i] = pf_last_error();
            if (first_failure == PF_OK) first_failure = PF_ERROR_INTERNAL;
            continue;
        }
        if (flags.no_timing) metrics[i].runtime_seconds = 0.0;
        convergence[i] = pf_result_converged(result.ptr) ? "converged" : "not converged";
        convergence[i] += " after " + std::to_string(pf_result_iterations(result.ptr)) + " iterations";
        ok[i] = true;

        const std::string line_path =
            (fs::path(dir) / ("fused_" + std::string(lower[i]) + "." + common.format)).string();
        if (const pf_status ws = pf_polyline_write(pf_result_polyline(result.ptr),
                                                   line_path.c_str(), common.format.c_str(), lat, lon);
            ws != PF_OK) {
            fail(ws, "writing '" + line_path + "'");
        }
        outputs.push_back(line_path);
        layers.push_back({names[i], colors[i], false, false,
                          polyline_points(pf_result_polyline(result.ptr))});
    }

    if (!truth_path.empty()) {
        PolylineHandle truth;
        if (const pf_status s = pf_polyline_read(truth_path.c_str(), nullptr, lat, lon, &truth.ptr);
            s != PF_OK) {
            fail(s, "reading '" + truth_path + "'");
        }
        layers.push_back({"ground truth", "#202124", true, false, polyline_points(truth.ptr)});
    }

    // Table over the successful runs; per-row failure notes for the rest.
    std::vector<pf_metrics> table_metrics;
    std::vector<const char*> table_names;
    for (int i = 0; i < 3; ++i) {
        if (!ok[i]) continue;
        table_metrics.push_back(metrics[i]);
        table_names.push_back(names[i]);
    }
    if (table_metrics.size() >= 2) {
        char* text = nullptr;
        int runtime_flag = 0, error_flag = 0;
        if (pf_compare_render(table_metrics.data(), table_names.data(), table_metrics.size(),
                              &runtime_flag, &error_flag, &text) == PF_OK) {
            std::cout << text;
            pf_string_free(text);
        }
    }
    for (int i = 0; i < 3; ++i) {
        if (ok[i]) {
            std::cout << names[i] << ": " << convergence[i] << '\n';
        } else {
            std::cout << names[i] << ": failed: " << failures[i] << '\n';
        }
    }

    const std::string report_path = (fs::path(dir) / "report.csv").string();
    write_file(report_path,
               metrics_rows(table_metrics.data(), table_names.data(), table_metrics.size()));
    outputs.push_back(report_path);

    const std::string svg_path = (fs::path(dir) / "comparison.svg").string();
    polyfuse_cli::write_svg(svg_path, layers);
    outputs.push_back(svg_path);

    std::vector<std::string> inputs{input};
    if (!truth_path.empty()) inputs.push_back(truth_path);
    polyfuse_cli::write_manifest((fs::path(dir) / "manifest.json").string(), "compare", argv,
                                 common.seed, config_json(flags.config), inputs, outputs);

    std::cout << "wrote " << svg_path << '\n';
    return exit_code_for(first_failure);
}

int run_eval(const CommonOptions& common, const std::string& points_path,
             const std::string& line_path, bool write_outputs,
             const std::vector<std::string>& argv) {
    DatasetHandle ds;
    if (const pf_status s = pf_dataset_read(points_path.c_str(), nullptr, &ds.ptr); s != PF_OK) {
        fail(s, "reading '" + points_path + "'");
    }
    double lat = 0.0, lon = 0.0;
    pf_dataset_origin(ds.ptr, &lat, &lon);

    PolylineHandle line;
    if (const pf_status s = pf_polyline_read(line_path.c_str(), nullptr, lat, lon, &line.ptr);
        s != PF_OK) {
        fail(s, "reading '" + line_path + "'");
    }

    pf_metrics metrics;
    if (const pf_status s = pf_evaluate_polyline(ds.ptr, line.ptr, &metrics); s != PF_OK) {
        fail(s, "evaluating polyline");
    }

    std::cout << "points " << metrics.total_points << ", vertices " << metrics.storage_points
              << '\n';
    std::printf("reduction %.4f %%\nmean error %.4f m\nmax error %.4f m\n",
                metrics.reduction_percent, metrics.mean_error_m, metrics.max_error_m);

    if (write_outputs) {
        const std::string dir = ensure_out_dir(common.out_dir);
        const std::string report_path = (fs::path(dir) / "report.csv").string();
        const char* row_name = "polyline";
        write_file(report_path, metrics_rows(&metrics, &row_name, 1));
        polyfuse_cli::write_manifest((fs::path(dir) / "manifest.json").string(), "eval", argv,
                                     common.seed, nlohmann::json::object(),
                                     {points_path, line_path}, {report_path});
        std::cout << "wrote " << report_path << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyfuse: fuse multi-track GPS data into polyline skeletons"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand
    app.set_version_flag("--version", std::string(pf_version()));

    CommonOptions common;
    app.add_option("--seed", common.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--out", common.out_dir, "Output directory")->capture_default_str();
    app.add_option("--format", common.format, "Output format: csv or geojson")
        ->check(CLI::IsMember({"csv", "geojson"}))
        ->capture_default_str();

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a synthetic dataset");
    int tracks = 10, points = 160;
    double noise = 2.0, straight = 100.0, radius = 30.0, origin_lat = 0.0, origin_lon = 0.0;
    std::string shape = "stadium";
    generate->add_option("--tracks", tracks, "Number of tracks")->capture_default_str();
    generate->add_option("--points", points, "Points per track")->capture_default_str();
    generate->add_option("--noise", noise, "Gaussian noise sigma, meters")->capture_default_str();
    generate->add_option("--shape", shape, "Ground-truth shape")->capture_default_str();
    generate->add_option("--straight", straight, "Stadium straight length, meters")
        ->capture_default_str();
    generate->add_option("--radius", radius, "Stadium cap radius, meters")->capture_default_str();
    generate->add_option("--origin-lat", origin_lat, "Geographic anchor latitude")
        ->capture_default_str();
    generate->add_option("--origin-lon", origin_lon, "Geographic anchor longitude")
        ->capture_default_str();

    // fuse
    auto* fuse_cmd = app.add_subcommand("fuse", "Fuse tracks with one algorithm");
    std::string fuse_input, fuse_algo;
    FusionFlags fuse_flags;
    fuse_cmd->add_option("input", fuse_input, "Input tracks (csv, geojson or gpx)")->required();
    fuse_cmd->add_option("--algo", fuse_algo, "Algorithm: mda, ara or dpa")->required();
    add_fusion_flags(fuse_cmd, fuse_flags);

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "Run all three algorithms and compare");
    std::string compare_input, compare_truth;
    FusionFlags compare_flags;
    compare_cmd->add_option("input", compare_input, "Input tracks (csv, geojson or gpx)")
        ->required();
    compare_cmd->add_option("--truth", compare_truth, "Ground-truth polyline (geojson or csv)");
    add_fusion_flags(compare_cmd, compare_flags);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a polyline against a point set");
    std::string eval_points, eval_line;
    bool eval_write = false;
    eval_cmd->add_option("points", eval_points, "Point set file")->required();
    eval_cmd->add_option("polyline", eval_line, "Polyline file")->required();
    eval_cmd->add_flag("--write", eval_write, "Also write report.csv and manifest to --out");

    std::vector<std::string> raw_args(argv, argv + argc);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) {
            return run_generate(common, tracks, points, noise, shape, straight, radius, origin_lat,
                                origin_lon, raw_args);
        }
        if (fuse_cmd->parsed()) {
            return run_fuse(common, fuse_input, fuse_algo, fuse_flags, raw_args);
        }
        if (compare_cmd->parsed()) {
            return run_compare(common, compare_input, compare_truth, compare_flags, raw_args);
        }
        if (eval_cmd->parsed()) {
            return run_eval(common, eval_points, eval_line, eval_write, raw_args);
        }
    } catch (const std::exception& e) {
        std::cerr << "polyfuse: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitUsage;
}

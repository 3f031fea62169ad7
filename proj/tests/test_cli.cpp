// End-to-end checks of the command-line tool named by POLYFUSE_CLI.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "geometry.hpp"
#include "trackio.hpp"

using namespace polyfuse;
namespace fs = std::filesystem;

namespace {

std::string cli() {
    const char* env = std::getenv("POLYFUSE_CLI");
    REQUIRE_MESSAGE(env != nullptr, "POLYFUSE_CLI must point at the binary");
    return env;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("polyfuse_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

struct Run {
    int exit_code;
    std::string output;
};

Run run(const std::string& args, const fs::path& dir) {
    static int counter = 0;
    const fs::path log = dir / ("run_" + std::to_string(counter++) + ".log");
    const int raw = std::system((cli() + " " + args + " > " + log.string() + " 2>&1").c_str());
    std::ifstream in(log);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1,
            {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()}};
}

std::vector<std::vector<std::string>> parse_csv(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

TEST_CASE("cli pipeline: generate, fuse, eval agree with each other") {
    TempDir dir;
    const fs::path gen = dir.path / "gen";
    REQUIRE(run("generate --tracks 5 --points 80 --noise 1.5 --seed 7 --out " + gen.string(),
                dir.path)
                .exit_code == 0);
    const std::string dataset = (gen / "dataset.csv").string();

    const fs::path fused = dir.path / "fused";
    const Run fuse_run = run("fuse " + dataset + " --algo mda --error 1.0 --sigma 3.0 --out " +
                                 fused.string(),
                             dir.path);
    CHECK(fuse_run.exit_code == 0);
    CHECK(fuse_run.output.find("converged") != std::string::npos);

    // Standalone evaluation of the written polyline reproduces the embedded
    // report up to the 9-digit file rounding (runtime excluded).
    const fs::path eval_dir = dir.path / "eval";
    const Run eval_run = run("eval " + dataset + " " + (fused / "fused_mda.csv").string() +
                                 " --write --out " + eval_dir.string(),
                             dir.path);
    CHECK(eval_run.exit_code == 0);

    const auto fuse_rows = parse_csv(fused / "report.csv");
    const auto eval_rows = parse_csv(eval_dir / "report.csv");
    REQUIRE(fuse_rows.size() == 2);
    REQUIRE(eval_rows.size() == 2);
    REQUIRE(fuse_rows[0].size() == 7);
    CHECK(fuse_rows[1][2] == eval_rows[1][2]);  // storage_i
    CHECK(fuse_rows[1][3] == eval_rows[1][3]);  // total_n
    CHECK(fuse_rows[1][4] == eval_rows[1][4]);  // reduction_pct
    CHECK(std::abs(std::stod(fuse_rows[1][5]) - std::stod(eval_rows[1][5])) <= 1e-3);
    CHECK(std::abs(std::stod(fuse_rows[1][6]) - std::stod(eval_rows[1][6])) <= 1e-3);
}

TEST_CASE("cli eval of the points against themselves reports full storage and zero error") {
    TempDir dir;
    const fs::path csv = dir.path / "points.csv";
    {
        std::ofstream out(csv);
        out << "track_id,lat,lon\n";
        for (int i = 0; i < 20; ++i) {
            out << "a,0.0000" << 10 + i << "000,0.000" << 100 + i * 3 << "000\n";
        }
    }
    const Run eval_run = run("eval " + csv.string() + " " + csv.string(), dir.path);
    CHECK(eval_run.exit_code == 0);
    CHECK(eval_run.output.find("reduction 100.0000 %") != std::string::npos);
    CHECK(eval_run.output.find("mean error 0.0000 m") != std::string::npos);
}

TEST_CASE("cli dpa with a huge epsilon keeps only the endpoints") {
    TempDir dir;
    const fs::path gen = dir.path / "gen";
    REQUIRE(run("generate --tracks 3 --points 50 --noise 2 --seed 11 --out " + gen.string(),
                dir.path)
                .exit_code == 0);
    const fs::path fused = dir.path / "dpa";
    const Run r = run("fuse " + (gen / "dataset.csv").string() +
                          " --algo dpa --epsilon 1e9 --out " + fused.string(),
                      dir.path);
    CHECK(r.exit_code == 0);

    const TrackFile points = read_tracks((gen / "dataset.csv").string(), FileFormat::csv);
    const Polyline line =
        read_polyline((fused / "fused_dpa.csv").string(), FileFormat::csv, points.origin);
    CHECK(line.vertex_count() == 2);
}

TEST_CASE("cli compare reports a per-algorithm failure without aborting the others") {
    TempDir dir;
    // Three points inside one sweep window: the block sweep cannot form a
    // polyline, the other two algorithms still run.
    const fs::path csv = dir.path / "tiny.csv";
    {
        std::ofstream out(csv);
        out << "track_id,lat,lon\n";
        out << "a,0.000000000,0.000000000\n";
        out << "a,0.000000400,0.000000400\n";
        out << "a,0.000000100,0.000000800\n";
    }
    const fs::path out_dir = dir.path / "cmp";
    const Run r = run("compare " + csv.string() + " --out " + out_dir.string(), dir.path);
    CHECK(r.exit_code != 0);
    CHECK(r.output.find("ARA: failed") != std::string::npos);
    CHECK(fs::exists(out_dir / "fused_mda.csv"));
    CHECK(fs::exists(out_dir / "fused_dpa.csv"));
    CHECK_FALSE(fs::exists(out_dir / "fused_ara.csv"));
    CHECK(fs::exists(out_dir / "comparison.svg"));
    // Report rows cover exactly the algorithms that ran.
    const auto rows = parse_csv(out_dir / "report.csv");
    CHECK(rows.size() == 3);  // header + MDA + DPA
}

TEST_CASE("cli compare with ground truth renders every svg layer") {
    TempDir dir;
    const fs::path gen = dir.path / "gen";
    REQUIRE(run("generate --tracks 4 --points 70 --noise 2 --seed 3 --out " + gen.string(),
                dir.path)
                .exit_code == 0);
    const fs::path out_dir = dir.path / "cmp";
    const Run r = run("compare " + (gen / "dataset.csv").string() + " --truth " +
                          (gen / "ground_truth.geojson").string() + " --out " + out_dir.string(),
                      dir.path);
    CHECK(r.exit_code == 0);
    std::ifstream in(out_dir / "comparison.svg");
    const std::string svg{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    for (const char* label : {"points", "MDA", "ARA", "DPA", "ground truth"}) {
        CHECK(svg.find(label) != std::string::npos);
    }
    // One path element per layer.
    std::size_t paths = 0;
    for (std::size_t pos = svg.find("<path"); pos != std::string::npos;
         pos = svg.find("<path", pos + 1)) {
        ++paths;
    }
    CHECK(paths == 5);
}

TEST_CASE("cli rejects unknown flags and algorithms with a usage error") {
    TempDir dir;
    CHECK(run("fuse missing.csv --algo newton", dir.path).exit_code != 0);
    CHECK(run("frobnicate", dir.path).exit_code != 0);
}

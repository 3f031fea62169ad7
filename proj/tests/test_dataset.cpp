#include "dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "error.hpp"
#include "geometry.hpp"

using namespace polyfuse;

namespace {

// Great-circle distance oracle (haversine) for the projection accuracy check.
double haversine(double lat1, double lon1, double lat2, double lon2) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * deg;
    const double dlon = (lon2 - lon1) * deg;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * deg) * std::cos(lat2 * deg) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(a));
}

// Gently curving track; the sine keeps the neighbor-chord deviations nonzero
// so the median gate has a meaningful scale.
Trajectory smooth_track(int n, double step, double wiggle) {
    Trajectory t{"s", {}, {}};
    for (int i = 0; i < n; ++i) {
        t.points.push_back({i * step, wiggle * std::sin(1.7 * i)});
        t.timestamps.push_back(static_cast<double>(i));
    }
    return t;
}

}  // namespace

TEST_CASE("projection maps the origin to (0, 0)") {
    const GeoOrigin origin{39.95, 116.34};
    const PlanarPoint p = project_to_local(origin.latitude, origin.longitude, origin);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
}

TEST_CASE("projection of one degree north matches the arc-length oracle") {
    // 6371000 * pi / 180, computed independently before the build.
    const GeoOrigin origin{10.0, 20.0};
    const PlanarPoint p = project_to_local(11.0, 20.0, origin);
    CHECK(p.y == doctest::Approx(111194.92664455873).epsilon(1e-12));
    CHECK(p.x == doctest::Approx(0.0));
}

TEST_CASE("projection round-trips through the inverse within 1e-9 degrees") {
    const GeoOrigin origin{47.3769, 8.5417};
    const double lat = 47.38112, lon = 8.55401;
    const PlanarPoint p = project_to_local(lat, lon, origin);
    double lat2 = 0.0, lon2 = 0.0;
    to_geographic(p, origin, lat2, lon2);
    CHECK(std::abs(lat2 - lat) <= 1e-9);
    CHECK(std::abs(lon2 - lon) <= 1e-9);
}

TEST_CASE("projection rejects fixes beyond the small-area bound") {
    const GeoOrigin origin{0.0, 0.0};
    CHECK_THROWS_AS(project_to_local(1.5, 0.0, origin), Error);
}

TEST_CASE("projection preserves small distances against the great-circle oracle") {
    const GeoOrigin origin{39.95, 116.34};
    const double lat1 = 39.9521, lon1 = 116.3417;
    const double lat2 = 39.9476, lon2 = 116.3468;
    const PlanarPoint p1 = project_to_local(lat1, lon1, origin);
    const PlanarPoint p2 = project_to_local(lat2, lon2, origin);
    const double planar = distance(p1, p2);
    const double great_circle = haversine(lat1, lon1, lat2, lon2);
    CHECK(std::abs(planar - great_circle) / great_circle <= 1e-3);
}

TEST_CASE("smooth tracks produce no outlier flags") {
    const Trajectory t = smooth_track(50, 2.0, 0.1);
    const auto flags = detect_outliers(t, 100.0, 6.0);
    for (const auto f : flags) CHECK(f == 0);
}

TEST_CASE("a teleported point is flagged and nothing else") {
    // Track with ~1 m of deterministic wiggle and one 500 m spike.
    Trajectory t = smooth_track(50, 2.0, 1.0);
    t.points[20].y += 500.0;
    const auto flags = detect_outliers(t, std::nullopt, 6.0);
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i == 20) {
            CHECK(flags[i] == 1);
        } else {
            CHECK(flags[i] == 0);
        }
    }
}

TEST_CASE("the speed gate flags an implausible jump") {
    Trajectory t = smooth_track(10, 1.0, 0.5);
    t.points[5].x += 1000.0;
    const auto flags = detect_outliers(t, 50.0, std::nullopt);
    CHECK(flags[5] == 1);
}

TEST_CASE("outlier flags are invariant under translation") {
    Trajectory t = smooth_track(40, 3.0, 1.0);
    t.points[7].y -= 80.0;
    t.points[31].y += 120.0;
    const auto base = detect_outliers(t, 100.0, 6.0);

    Trajectory shifted = t;
    for (PlanarPoint& p : shifted.points) {
        p.x += 1234.5;
        p.y -= 987.25;
    }
    CHECK(detect_outliers(shifted, 100.0, 6.0) == base);
}

TEST_CASE("removing flagged points does not raise the median deviation") {
    Trajectory t = smooth_track(60, 2.0, 1.0);
    t.points[10].y += 300.0;
    t.points[40].y -= 250.0;

    const auto median_dev = [](const Trajectory& track) {
        std::vector<double> dev;
        for (std::size_t j = 1; j + 1 < track.points.size(); ++j) {
            dev.push_back(
                segment_distance(track.points[j], {track.points[j - 1], track.points[j + 1]}).distance);
        }
        std::sort(dev.begin(), dev.end());
        return dev[dev.size() / 2];
    };

    const double before = median_dev(t);
    const auto flags = detect_outliers(t, std::nullopt, 6.0);
    Trajectory filtered{"f", {}, {}};
    for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (!flags[i]) filtered.points.push_back(t.points[i]);
    }
    CHECK(median_dev(filtered) <= before + 1e-12);
}

TEST_CASE("short tracks return all-false flags") {
    Trajectory t{"short", {{0, 0}, {1, 1}}, {}};
    const auto flags = detect_outliers(t, 10.0, 6.0);
    CHECK(flags == std::vector<std::uint8_t>{0, 0});
}

TEST_CASE("zero-noise generation lies exactly on the ground truth") {
    GeneratorConfig cfg;
    cfg.num_tracks = 2;
    cfg.points_per_track = 50;
    cfg.noise_sigma = 0.0;
    const SyntheticDataset data = generate_tracks(cfg);
    for (const Trajectory& t : data.tracks) {
        CHECK(max_lateral_error(t.points, data.ground_truth) <= 1e-9);
    }
}

TEST_CASE("the default generator matches the target scale") {
    const GeneratorConfig cfg;
    const SyntheticDataset data = generate_tracks(cfg);
    CHECK(data.tracks.size() == 10);
    std::size_t total = 0;
    for (const Trajectory& t : data.tracks) total += t.points.size();
    CHECK(total == 1600);
}

TEST_CASE("generation is reproducible bit for bit") {
    GeneratorConfig cfg;
    cfg.num_tracks = 3;
    cfg.points_per_track = 64;
    cfg.seed = 999;
    const SyntheticDataset a = generate_tracks(cfg);
    const SyntheticDataset b = generate_tracks(cfg);
    for (std::size_t t = 0; t < a.tracks.size(); ++t) {
        REQUIRE(a.tracks[t].points.size() == b.tracks[t].points.size());
        for (std::size_t i = 0; i < a.tracks[t].points.size(); ++i) {
            CHECK(a.tracks[t].points[i] == b.tracks[t].points[i]);
        }
    }

    GeneratorConfig other = cfg;
    other.seed = 1000;
    const SyntheticDataset c = generate_tracks(other);
    bool any_difference = false;
    for (std::size_t i = 0; i < c.tracks[0].points.size(); ++i) {
        any_difference = any_difference || !(c.tracks[0].points[i] == a.tracks[0].points[i]);
    }
    CHECK(any_difference);
}

TEST_CASE("mean distance to a straight ground truth matches the half-normal oracle") {
    // For isotropic per-axis sigma against a locally straight curve the mean
    // point-to-curve distance is sigma * sqrt(2/pi); verified by Monte Carlo
    // before the build.
    GeneratorConfig cfg;
    cfg.shape = ShapeKind::polyline;
    cfg.shape_vertices = {{0.0, 0.0}, {100000.0, 0.0}};
    cfg.num_tracks = 1;
    cfg.points_per_track = 100000;
    cfg.noise_sigma = 2.0;
    cfg.seed = 4242;
    const SyntheticDataset data = generate_tracks(cfg);

    double sum = 0.0;
    for (const PlanarPoint& p : data.tracks[0].points) sum += std::abs(p.y);
    const double mean = sum / static_cast<double>(data.tracks[0].points.size());
    const double expected = 2.0 * std::sqrt(2.0 / std::numbers::pi);
    CHECK(std::abs(mean - expected) / expected <= 0.02);
}

TEST_CASE("generator validates its configuration") {
    GeneratorConfig cfg;
    cfg.num_tracks = 0;
    CHECK_THROWS_AS(generate_tracks(cfg), Error);
    cfg = GeneratorConfig{};
    cfg.radius = -1.0;
    CHECK_THROWS_AS(generate_tracks(cfg), Error);
    cfg = GeneratorConfig{};
    cfg.shape = ShapeKind::polyline;  // no vertices supplied
    CHECK_THROWS_AS(generate_tracks(cfg), Error);
}

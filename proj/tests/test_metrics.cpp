#include "metrics.hpp"

#include <algorithm>
#include <random>

#include "doctest.h"
#include "error.hpp"

using namespace polyfuse;

namespace {

MetricsReport make_report(const std::string& name, double runtime, std::size_t i, std::size_t n,
                          double mean, double max) {
    MetricsReport r;
    r.algorithm = name;
    r.runtime_t = runtime;
    r.storage_i = i;
    r.total_n = n;
    r.reduction_r = static_cast<double>(i) / static_cast<double>(n) * 100.0;
    r.mean_error = mean;
    r.max_error = max;
    return r;
}

}  // namespace

TEST_CASE("evaluate reports the reduction rate exactly") {
    // 50 vertices over 1599 points: (50/1599)*100.
    std::vector<PlanarPoint> points;
    for (int i = 0; i < 1599; ++i) points.push_back({static_cast<double>(i), 0.0});
    std::vector<PlanarPoint> verts;
    for (int i = 0; i < 50; ++i) verts.push_back({static_cast<double>(i * 32), 0.0});
    const Polyline line(verts);

    const MetricsReport report = evaluate_polyline(points, line, "MDA", 0.25);
    CHECK(report.storage_i == 50);
    CHECK(report.total_n == 1599);
    CHECK(report.reduction_r == 50.0 / 1599.0 * 100.0);
    CHECK(report.reduction_r == doctest::Approx(3.1270).epsilon(1e-4));
    CHECK(report.runtime_t == 0.25);
}

TEST_CASE("an interpolating polyline scores zero error") {
    const std::vector<PlanarPoint> points{{0, 0}, {1, 1}, {2, 0}};
    const Polyline line({{0, 0}, {1, 1}, {2, 0}});
    const MetricsReport report = evaluate_polyline(points, line, "DPA", 0.0);
    CHECK(report.mean_error == doctest::Approx(0.0));
    CHECK(report.max_error == doctest::Approx(0.0));
    CHECK(report.reduction_r == doctest::Approx(100.0));
}

TEST_CASE("evaluate recomputes the mean error from scratch") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> coord(0.0, 50.0);
    std::vector<PlanarPoint> points;
    for (int i = 0; i < 200; ++i) points.push_back({coord(rng), coord(rng) / 10.0});
    const Polyline line({{0, 0}, {25, 3}, {50, 0}});

    FusionResult result{line, Algorithm::ara, 5, true, 0.125, {0.0}};
    const MetricsReport report = evaluate(points, result);
    CHECK(report.mean_error == doctest::Approx(mean_lateral_error(points, line)).epsilon(1e-15));
    CHECK(report.max_error == doctest::Approx(max_lateral_error(points, line)).epsilon(1e-15));
    CHECK(report.algorithm == "ARA");
    CHECK(report.runtime_t == 0.125);
}

TEST_CASE("evaluate is invariant under point permutation") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coord(0.0, 40.0);
    std::vector<PlanarPoint> points;
    for (int i = 0; i < 100; ++i) points.push_back({coord(rng), coord(rng) / 5.0});
    const Polyline line({{0, 0}, {40, 8}});

    const MetricsReport base = evaluate_polyline(points, line, "X", 0.0);
    std::shuffle(points.begin(), points.end(), rng);
    const MetricsReport shuffled = evaluate_polyline(points, line, "X", 0.0);
    CHECK(base.mean_error == doctest::Approx(shuffled.mean_error).epsilon(1e-12));
    CHECK(base.max_error == shuffled.max_error);
    CHECK(base.reduction_r == shuffled.reduction_r);
}

TEST_CASE("evaluate rejects an empty point set") {
    const Polyline line({{0, 0}, {1, 0}});
    const std::vector<PlanarPoint> empty;
    CHECK_THROWS_AS(evaluate_polyline(empty, line, "X", 0.0), Error);
}

TEST_CASE("compare ranks runtimes and flags the reference ordering") {
    const std::vector<MetricsReport> reports{
        make_report("MDA", 3.0, 40, 1000, 1.5, 4.0),
        make_report("ARA", 2.0, 50, 1000, 1.2, 3.5),
        make_report("DPA", 1.0, 30, 1000, 2.5, 9.0),
    };
    const ComparisonTable table = compare(reports);
    // runtime ranks: DPA(1) < ARA(2) < MDA(3)
    CHECK(table.ranks[0][0] == 3);
    CHECK(table.ranks[0][1] == 2);
    CHECK(table.ranks[0][2] == 1);
    CHECK(table.ordering_checked);
    CHECK(table.runtime_ordering_holds);
    CHECK(table.error_ordering_holds);

    const std::string text = table.render_text();
    CHECK(text.find("holds") != std::string::npos);
    const std::string rows = table.render_rows();
    CHECK(rows.find(metrics_row_header()) == 0);
    CHECK(std::count(rows.begin(), rows.end(), '\n') == 4);
}

TEST_CASE("compare breaks ties by algorithm name") {
    const std::vector<MetricsReport> reports{
        make_report("B", 1.0, 10, 100, 1.0, 2.0),
        make_report("A", 1.0, 10, 100, 1.0, 2.0),
    };
    const ComparisonTable table = compare(reports);
    for (std::size_t m = 0; m < ComparisonTable::kMetrics.size(); ++m) {
        CHECK(table.ranks[m][0] == 2);  // B after A on equal values
        CHECK(table.ranks[m][1] == 1);
    }
    CHECK_FALSE(table.ordering_checked);
}

TEST_CASE("compare reports a violated ordering") {
    const std::vector<MetricsReport> reports{
        make_report("MDA", 1.0, 40, 1000, 1.0, 4.0),
        make_report("ARA", 2.0, 50, 1000, 1.2, 3.5),
        make_report("DPA", 3.0, 30, 1000, 0.5, 9.0),
    };
    const ComparisonTable table = compare(reports);
    CHECK(table.ordering_checked);
    CHECK_FALSE(table.runtime_ordering_holds);
    CHECK_FALSE(table.error_ordering_holds);
    CHECK(table.render_text().find("violated") != std::string::npos);
}

TEST_CASE("compare rejects mismatched datasets and short lists") {
    const std::vector<MetricsReport> mismatched{
        make_report("MDA", 1.0, 40, 1000, 1.0, 4.0),
        make_report("ARA", 2.0, 50, 999, 1.2, 3.5),
    };
    CHECK_THROWS_AS(compare(mismatched), Error);
    const std::vector<MetricsReport> single{make_report("MDA", 1.0, 40, 1000, 1.0, 4.0)};
    CHECK_THROWS_AS(compare(single), Error);
}

TEST_CASE("compare leaves its input reports untouched") {
    const std::vector<MetricsReport> reports{
        make_report("MDA", 3.0, 40, 1000, 1.5, 4.0),
        make_report("ARA", 2.0, 50, 1000, 1.2, 3.5),
    };
    const std::vector<MetricsReport> copy = reports;
    (void)compare(reports);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        CHECK(reports[i].algorithm == copy[i].algorithm);
        CHECK(reports[i].runtime_t == copy[i].runtime_t);
        CHECK(reports[i].reduction_r == copy[i].reduction_r);
    }
}

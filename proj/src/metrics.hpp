#pragma once

#include <array>
#include <string>
#include <vector>

#include "fusion.hpp"
#include "geometry.hpp"

namespace polyfuse {

/// The five-metric record for one fusion run: runtime t, storage i,
/// reduction rate r = (i/n)*100, mean lateral error and max lateral error.
struct MetricsReport {
    std::string algorithm;
    double runtime_t = 0.0;       // seconds
    std::size_t storage_i = 0;    // polyline vertex count
    std::size_t total_n = 0;      // input point count
    double reduction_r = 0.0;     // percent
    double mean_error = 0.0;      // meters
    double max_error = 0.0;       // meters
};

MetricsReport evaluate(std::span<const PlanarPoint> points, const FusionResult& result);
MetricsReport evaluate_polyline(std::span<const PlanarPoint> points, const Polyline& line,
                                const std::string& algorithm, double runtime_seconds);

struct ComparisonTable {
    static constexpr std::array<const char*, 5> kMetrics = {
        "runtime_t", "storage_i", "reduction_r", "mean_error", "max_error"};

    std::vector<MetricsReport> reports;  // input order preserved
    /// ranks[m][i]: rank (1 = smallest) of reports[i] under metric m; ties
    /// resolve by ascending algorithm name.
    std::array<std::vector<int>, 5> ranks;

    /// Set when the reports are exactly {MDA, ARA, DPA}.
    bool ordering_checked = false;
    bool runtime_ordering_holds = false;  // DPA < ARA < MDA
    bool error_ordering_holds = false;    // ARA <= MDA <= DPA

    std::string render_text() const;
    /// One header line plus one comma-separated row per report.
    std::string render_rows() const;
};

/// Header matching ComparisonTable::render_rows for standalone reports.
std::string metrics_row_header();
std::string metrics_row(const MetricsReport& report);

ComparisonTable compare(const std::vector<MetricsReport>& reports);

}  // namespace polyfuse

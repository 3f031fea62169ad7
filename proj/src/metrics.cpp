#include "metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "error.hpp"

namespace polyfuse {

namespace {

double metric_value(const MetricsReport& r, std::size_t metric) {
    switch (metric) {
        case 0: return r.runtime_t;
        case 1: return static_cast<double>(r.storage_i);
        case 2: return r.reduction_r;
        case 3: return r.mean_error;
        default: return r.max_error;
    }
}

const MetricsReport* find_report(const std::vector<MetricsReport>& reports, const char* name) {
    for (const MetricsReport& r : reports) {
        if (r.algorithm == name) return &r;
    }
    return nullptr;
}

std::string format_double(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace

MetricsReport evaluate_polyline(std::span<const PlanarPoint> points, const Polyline& line,
                                const std::string& algorithm, double runtime_seconds) {
    if (points.empty()) {
        throw Error(ErrorCode::invalid_argument, "cannot evaluate metrics over an empty point set");
    }
    MetricsReport report;
    report.algorithm = algorithm;
    report.runtime_t = runtime_seconds;
    report.storage_i = line.vertex_count();
    report.total_n = points.size();
    report.reduction_r =
        static_cast<double>(report.storage_i) / static_cast<double>(report.total_n) * 100.0;
    report.mean_error = mean_lateral_error(points, line);
    report.max_error = max_lateral_error(points, line);
    return report;
}

MetricsReport evaluate(std::span<const PlanarPoint> points, const FusionResult& result) {
    return evaluate_polyline(points, result.polyline, algorithm_name(result.algorithm),
                             result.runtime_seconds);
}

ComparisonTable compare(const std::vector<MetricsReport>& reports) {
    if (reports.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "comparison needs at least 2 reports");
    }
    for (const MetricsReport& r : reports) {
        if (r.total_n != reports.front().total_n) {
            throw Error(ErrorCode::invalid_argument,
                        "reports cover different datasets (total_n mismatch)");
        }
    }

    ComparisonTable table;
    table.reports = reports;
    for (std::size_t m = 0; m < ComparisonTable::kMetrics.size(); ++m) {
        std::vector<std::size_t> order(reports.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = metric_value(reports[a], m);
            const double vb = metric_value(reports[b], m);
            if (va != vb) return va < vb;
            return reports[a].algorithm < reports[b].algorithm;
        });
        table.ranks[m].resize(reports.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            table.ranks[m][order[pos]] = static_cast<int>(pos) + 1;
        }
    }

    const MetricsReport* mda = find_report(reports, "MDA");
    const MetricsReport* ara = find_report(reports, "ARA");
    const MetricsReport* dpa = find_report(reports, "DPA");
    if (mda && ara && dpa && reports.size() == 3) {
        table.ordering_checked = true;
        table.runtime_ordering_holds =
            dpa->runtime_t < ara->runtime_t && ara->runtime_t < mda->runtime_t;
        table.error_ordering_holds =
            ara->mean_error <= mda->mean_error && mda->mean_error <= dpa->mean_error;
    }
    return table;
}

std::string metrics_row_header() {
    return "algorithm,runtime_s,storage_i,total_n,reduction_pct,mean_error_m,max_error_m";
}

std::string metrics_row(const MetricsReport& r) {
    std::ostringstream out;
    out << r.algorithm << ',' << format_double(r.runtime_t, 6) << ',' << r.storage_i << ','
        << r.total_n << ',' << format_double(r.reduction_r, 6) << ','
        << format_double(r.mean_error, 9) << ',' << format_double(r.max_error, 9);
    return out.str();
}

std::string ComparisonTable::render_rows() const {
    std::ostringstream out;
    out << metrics_row_header() << '\n';
    for (const MetricsReport& r : reports) out << metrics_row(r) << '\n';
    return out.str();
}

std::string ComparisonTable::render_text() const {
    std::vector<std::array<std::string, 7>> cells;
    cells.push_back({"algorithm", "runtime_s", "storage_i", "total_n", "reduction_pct",
                     "mean_error_m", "max_error_m"});
    for (const MetricsReport& r : reports) {
        cells.push_back({r.algorithm, format_double(r.runtime_t, 6), std::to_string(r.storage_i),
                         std::to_string(r.total_n), format_double(r.reduction_r, 4),
                         format_double(r.mean_error, 4), format_double(r.max_error, 4)});
    }
    std::array<std::size_t, 7> widths{};
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
    }

    std::ostringstream out;
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c] << std::string(widths[c] - row[c].size() + 2, ' ');
        }
        out << '\n';
    }

    for (std::size_t m = 0; m < kMetrics.size(); ++m) {
        out << "rank " << kMetrics[m] << " (1 = smallest):";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            out << ' ' << reports[i].algorithm << '=' << ranks[m][i];
        }
        out << '\n';
    }
    if (ordering_checked) {
        out << "reference ordering runtime (DPA < ARA < MDA): "
            << (runtime_ordering_holds ? "holds" : "violated") << '\n';
        out << "reference ordering mean error (ARA <= MDA <= DPA): "
            << (error_ordering_holds ? "holds" : "violated") << '\n';
    }
    return out.str();
}

}  // namespace polyfuse

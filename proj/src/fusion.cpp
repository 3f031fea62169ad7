#include "fusion.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <stack>
#include <utility>

#include "error.hpp"

namespace polyfuse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CloudStats {
    std::vector<Projection> projections;
    double mean = 0.0;
    std::size_t worst_index = 0;
};

CloudStats project_cloud(std::span<const PlanarPoint> points, const Polyline& line) {
    CloudStats stats;
    stats.projections = project_points(points, line);
    double sum = 0.0;
    double worst = -1.0;
    for (std::size_t i = 0; i < stats.projections.size(); ++i) {
        const double d = stats.projections[i].distance;
        sum += d;
        if (d > worst) {
            worst = d;
            stats.worst_index = i;
        }
    }
    stats.mean = sum / static_cast<double>(stats.projections.size());
    return stats;
}

bool less_xy(const PlanarPoint& a, const PlanarPoint& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// Greedy nearest-neighbor chain starting from the lowest-(x, y) candidate.
std::vector<PlanarPoint> chain_candidates(std::vector<PlanarPoint> candidates) {
    std::sort(candidates.begin(), candidates.end(), less_xy);
    std::vector<PlanarPoint> chain;
    chain.reserve(candidates.size());
    std::vector<char> used(candidates.size(), 0);
    std::size_t current = 0;
    used[0] = 1;
    chain.push_back(candidates[0]);
    for (std::size_t step = 1; step < candidates.size(); ++step) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_i = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            const double d = distance(candidates[current], candidates[i]);
            if (d < best) {
                best = d;
                best_i = i;
            }
        }
        used[best_i] = 1;
        if (!(candidates[best_i] == chain.back())) chain.push_back(candidates[best_i]);
        current = best_i;
    }
    return chain;
}

std::vector<PlanarPoint> drop_collinear(const std::vector<PlanarPoint>& chain) {
    if (chain.size() < 3) return chain;
    std::vector<PlanarPoint> kept;
    kept.push_back(chain.front());
    for (std::size_t i = 1; i + 1 < chain.size(); ++i) {
        const PlanarPoint& next = chain[i + 1];
        if (kept.back() == next) {
            kept.push_back(chain[i]);
            continue;
        }
        if (segment_distance(chain[i], {kept.back(), next}).distance > 1e-9) {
            kept.push_back(chain[i]);
        }
    }
    kept.push_back(chain.back());
    return kept;
}

// Stretches the first/last vertex along its segment line so points that
// project beyond the chain ends fall inside the polyline.
void cover_overhang(std::vector<PlanarPoint>& verts, std::span<const PlanarPoint> points) {
    const Polyline line(verts);
    const std::vector<Projection> projections = project_points(points, line);

    const auto unclamped_param = [](const PlanarPoint& p, const Segment& s) {
        const double dx = s.b.x - s.a.x;
        const double dy = s.b.y - s.a.y;
        return ((p.x - s.a.x) * dx + (p.y - s.a.y) * dy) / (dx * dx + dy * dy);
    };

    const Segment first = line.segment(0);
    const Segment last = line.segment(line.segment_count() - 1);
    double min_t = 0.0;
    double max_t = 1.0;
    for (std::size_t i = 0; i < projections.size(); ++i) {
        const Projection& proj = projections[i];
        if (proj.segment_index == 0 && proj.param <= 0.0) {
            min_t = std::min(min_t, unclamped_param(points[i], first));
        }
        if (proj.segment_index == line.segment_count() - 1 && proj.param >= 1.0) {
            max_t = std::max(max_t, unclamped_param(points[i], last));
        }
    }
    if (min_t < 0.0) {
        verts.front() = {first.a.x + min_t * (first.b.x - first.a.x),
                         first.a.y + min_t * (first.b.y - first.a.y)};
    }
    if (max_t > 1.0) {
        verts.back() = {last.a.x + max_t * (last.b.x - last.a.x),
                        last.a.y + max_t * (last.b.y - last.a.y)};
    }
}

Polyline polyline_from_kept(std::span<const PlanarPoint> ordered,
                            const std::vector<std::size_t>& kept) {
    std::vector<PlanarPoint> verts;
    verts.reserve(kept.size());
    for (const std::size_t idx : kept) {
        if (!verts.empty() && verts.back() == ordered[idx]) continue;
        verts.push_back(ordered[idx]);
    }
    if (verts.size() < 2) {
        throw Error(ErrorCode::degenerate_input, "all points in the sequence coincide");
    }
    return Polyline(std::move(verts));
}

}  // namespace

const char* algorithm_name(Algorithm algo) {
    switch (algo) {
        case Algorithm::mda: return "MDA";
        case Algorithm::ara: return "ARA";
        case Algorithm::dpa: return "DPA";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& name) {
    std::string lower;
    for (const char c : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "mda") return Algorithm::mda;
    if (lower == "ara") return Algorithm::ara;
    if (lower == "dpa") return Algorithm::dpa;
    throw Error(ErrorCode::invalid_argument, "unknown algorithm '" + name + "' (expected mda, ara or dpa)");
}

void FusionConfig::validate() const {
    if (error_threshold_e <= 0.0) throw Error(ErrorCode::config, "error_threshold_e must be positive");
    if (radius_sigma <= 0.0) throw Error(ErrorCode::config, "radius_sigma must be positive");
    if (block_width_w <= 0.0) throw Error(ErrorCode::config, "block_width_w must be positive");
    if (step_s <= 0.0) throw Error(ErrorCode::config, "step_s must be positive");
    if (step_s > block_width_w) throw Error(ErrorCode::config, "step_s must not exceed block_width_w");
    if (cluster_gap <= 0.0) throw Error(ErrorCode::config, "cluster_gap must be positive");
    if (dp_epsilon <= 0.0) throw Error(ErrorCode::config, "dp_epsilon must be positive");
    if (max_vertices < 2) throw Error(ErrorCode::config, "max_vertices must be at least 2");
    if (max_iterations < 1) throw Error(ErrorCode::config, "max_iterations must be at least 1");
}

FusionResult mda_fuse(std::span<const PlanarPoint> points, const PlanarPoint& start,
                      const PlanarPoint& end, const FusionConfig& config) {
    config.validate();
    if (points.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "MDA needs at least 2 points");
    }
    if (start == end) {
        throw Error(ErrorCode::degenerate_input, "MDA start and end vertices coincide");
    }

    const auto t0 = Clock::now();
    std::vector<PlanarPoint> verts{start, end};
    std::vector<double> trace;
    std::size_t insertions = 0;
    bool converged = false;

    for (;;) {
        const Polyline line(verts);
        const CloudStats stats = project_cloud(points, line);
        trace.push_back(stats.mean);
        if (stats.mean <= config.error_threshold_e) {
            converged = true;
            break;
        }
        if (verts.size() >= config.max_vertices || insertions >= config.max_iterations) break;

        const PlanarPoint& worst = points[stats.worst_index];
        double sx = 0.0, sy = 0.0;
        std::size_t count = 0;
        for (const PlanarPoint& p : points) {
            if (distance(p, worst) <= config.radius_sigma) {
                sx += p.x;
                sy += p.y;
                ++count;
            }
        }
        if (count == 0) {
            throw Error(ErrorCode::degenerate_input,
                        "no data points within radius_sigma=" + std::to_string(config.radius_sigma) +
                            " of the worst-fit point (" + std::to_string(worst.x) + ", " +
                            std::to_string(worst.y) + ")");
        }
        PlanarPoint centroid{sx / static_cast<double>(count), sy / static_cast<double>(count)};

        const Projection proj = project_to_polyline(centroid, line);
        const std::size_t at = proj.segment_index + 1;
        if (distance(centroid, verts[at - 1]) <= 1e-12 || distance(centroid, verts[at]) <= 1e-12) {
            break;  // insertion would duplicate a vertex; no further progress possible
        }
        verts.insert(verts.begin() + static_cast<std::ptrdiff_t>(at), centroid);
        ++insertions;

        // One local refinement pass: re-center the new vertex on the points
        // currently assigned to its two incident segments.
        const Polyline inserted(verts);
        const std::vector<Projection> assigned = project_points(points, inserted);
        sx = 0.0;
        sy = 0.0;
        count = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const std::size_t k = assigned[i].segment_index;
            if ((k == at - 1 || k == at) && distance(points[i], verts[at]) <= config.radius_sigma) {
                sx += points[i].x;
                sy += points[i].y;
                ++count;
            }
        }
        if (count > 0) {
            const PlanarPoint refined{sx / static_cast<double>(count), sy / static_cast<double>(count)};
            if (distance(refined, verts[at - 1]) > 1e-12 && distance(refined, verts[at + 1]) > 1e-12) {
                verts[at] = refined;
            }
        }
    }

    const double runtime = seconds_since(t0);
    return {Polyline(std::move(verts)), Algorithm::mda, insertions, converged, runtime, std::move(trace)};
}

std::vector<PlanarPoint> ara_candidates(std::span<const PlanarPoint> points,
                                        const FusionConfig& config) {
    config.validate();
    if (points.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "block sweep needs at least 2 points");
    }
    double min_x = points[0].x, max_x = points[0].x;
    for (const PlanarPoint& p : points) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
    }
    if (max_x - min_x <= 0.0) {
        throw Error(ErrorCode::invalid_argument,
                    "point x-extent is zero; rotate y-aligned data before the sweep");
    }

    std::vector<PlanarPoint> raw_candidates;
    for (std::size_t k = 0;; ++k) {
        const double w0 = min_x + static_cast<double>(k) * config.step_s;
        if (w0 > max_x) break;
        const double w1 = w0 + config.block_width_w;

        std::vector<PlanarPoint> window;
        for (const PlanarPoint& p : points) {
            if (p.x >= w0 && p.x < w1) window.push_back(p);
        }
        if (window.empty()) continue;
        std::stable_sort(window.begin(), window.end(),
                         [](const PlanarPoint& a, const PlanarPoint& b) { return a.y < b.y; });

        double sx = 0.0, sy = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < window.size(); ++i) {
            if (n > 0 && window[i].y - window[i - 1].y > config.cluster_gap) {
                raw_candidates.push_back({sx / static_cast<double>(n), sy / static_cast<double>(n)});
                sx = sy = 0.0;
                n = 0;
            }
            sx += window[i].x;
            sy += window[i].y;
            ++n;
        }
        raw_candidates.push_back({sx / static_cast<double>(n), sy / static_cast<double>(n)});
    }

    // Overlapping windows emit near-duplicates; fold candidates closer than
    // s/2 into the mean of the merged group.
    struct Group {
        double sx = 0.0, sy = 0.0;
        std::size_t n = 0;
        PlanarPoint mean() const { return {sx / static_cast<double>(n), sy / static_cast<double>(n)}; }
    };
    std::vector<Group> groups;
    const double merge_radius = config.step_s / 2.0;
    for (const PlanarPoint& cand : raw_candidates) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_g = groups.size();
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double d = distance(cand, groups[g].mean());
            if (d < best) {
                best = d;
                best_g = g;
            }
        }
        if (best_g == groups.size() || best >= merge_radius) {
            groups.push_back({cand.x, cand.y, 1});
        } else {
            groups[best_g].sx += cand.x;
            groups[best_g].sy += cand.y;
            groups[best_g].n += 1;
        }
    }

    std::vector<PlanarPoint> merged;
    merged.reserve(groups.size());
    for (const Group& g : groups) merged.push_back(g.mean());
    return merged;
}

FusionResult ara_fuse(std::span<const PlanarPoint> points, const FusionConfig& config) {
    const auto t0 = Clock::now();
    std::vector<PlanarPoint> candidates = ara_candidates(points, config);
    std::size_t windows = candidates.empty() ? 0 : candidates.size();
    if (candidates.size() < 2) {
        throw Error(ErrorCode::config,
                    "block sweep produced fewer than 2 vertices; reduce block_width_w or step_s");
    }
    std::vector<PlanarPoint> verts = drop_collinear(chain_candidates(std::move(candidates)));
    if (verts.size() < 2) {
        throw Error(ErrorCode::config, "block sweep collapsed to a single vertex");
    }
    cover_overhang(verts, points);
    Polyline line(std::move(verts));
    const double runtime = seconds_since(t0);

    const double err = mean_lateral_error(points, line);
    FusionResult result{std::move(line), Algorithm::ara, windows,
                        err <= config.error_threshold_e, runtime, {err}};
    return result;
}

std::vector<std::size_t> dp_keep_indices(std::span<const PlanarPoint> ordered, double epsilon) {
    if (ordered.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "simplification needs at least 2 points");
    }
    if (epsilon <= 0.0) {
        throw Error(ErrorCode::config, "epsilon must be positive");
    }
    std::vector<char> keep(ordered.size(), 0);
    keep.front() = keep.back() = 1;
    std::stack<std::pair<std::size_t, std::size_t>> ranges;
    ranges.push({0, ordered.size() - 1});
    while (!ranges.empty()) {
        const auto [i, j] = ranges.top();
        ranges.pop();
        if (j <= i + 1) continue;
        const bool degenerate = ordered[i] == ordered[j];
        double worst = -1.0;
        std::size_t worst_k = i;
        for (std::size_t k = i + 1; k < j; ++k) {
            const double d = degenerate ? distance(ordered[k], ordered[i])
                                        : line_distance(ordered[k], {ordered[i], ordered[j]});
            if (d > worst) {
                worst = d;
                worst_k = k;
            }
        }
        if (worst > epsilon) {
            keep[worst_k] = 1;
            ranges.push({i, worst_k});
            ranges.push({worst_k, j});
        }
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i]) kept.push_back(i);
    }
    return kept;
}

Polyline dp_simplify(std::span<const PlanarPoint> ordered, double epsilon) {
    return polyline_from_kept(ordered, dp_keep_indices(ordered, epsilon));
}

std::vector<PlanarPoint> order_for_dp(std::span<const Trajectory> tracks, const Polyline& seed_line) {
    if (tracks.empty()) {
        throw Error(ErrorCode::invalid_argument, "no tracks to order");
    }
    std::vector<PlanarPoint> all;
    for (const Trajectory& t : tracks) all.insert(all.end(), t.points.begin(), t.points.end());

    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        keys.emplace_back(arc_position(seed_line, project_to_polyline(all[i], seed_line)), i);
    }
    std::sort(keys.begin(), keys.end());

    std::vector<PlanarPoint> ordered;
    ordered.reserve(all.size());
    for (const auto& [key, idx] : keys) ordered.push_back(all[idx]);
    return ordered;
}

namespace {

PlanarPoint mean_of(const std::vector<PlanarPoint>& pts) {
    double sx = 0.0, sy = 0.0;
    for (const PlanarPoint& p : pts) {
        sx += p.x;
        sy += p.y;
    }
    return {sx / static_cast<double>(pts.size()), sy / static_cast<double>(pts.size())};
}

void enforce_vertex_cap(const FusionResult& result, const FusionConfig& config) {
    if (result.polyline.vertex_count() > config.max_vertices) {
        throw Error(ErrorCode::config,
                    "fused polyline has " + std::to_string(result.polyline.vertex_count()) +
                        " vertices, above max_vertices=" + std::to_string(config.max_vertices));
    }
}

}  // namespace

FusionResult fuse(std::span<const Trajectory> tracks, Algorithm algorithm,
                  const FusionConfig& config) {
    if (tracks.empty()) {
        throw Error(ErrorCode::invalid_argument, "no tracks to fuse");
    }
    for (const Trajectory& t : tracks) validate(t);

    std::vector<PlanarPoint> points;
    for (const Trajectory& t : tracks) points.insert(points.end(), t.points.begin(), t.points.end());

    std::vector<PlanarPoint> firsts, lasts;
    for (const Trajectory& t : tracks) {
        firsts.push_back(t.points.front());
        lasts.push_back(t.points.back());
    }
    const PlanarPoint start = mean_of(firsts);
    const PlanarPoint end = mean_of(lasts);

    switch (algorithm) {
        case Algorithm::mda: {
            const FusionResult result = mda_fuse(points, start, end, config);
            return result;
        }
        case Algorithm::ara: {
            FusionResult result = ara_fuse(points, config);
            enforce_vertex_cap(result, config);
            return result;
        }
        case Algorithm::dpa: {
            config.validate();
            if (start == end) {
                throw Error(ErrorCode::degenerate_input,
                            "derived start and end vertices coincide; pass explicit endpoints");
            }
            const auto t0 = Clock::now();
            const Polyline seed({start, end});
            const std::vector<PlanarPoint> ordered = order_for_dp(tracks, seed);
            const std::vector<std::size_t> kept = dp_keep_indices(ordered, config.dp_epsilon);
            Polyline line = polyline_from_kept(ordered, kept);
            const double runtime = seconds_since(t0);

            const double err = mean_lateral_error(points, line);
            FusionResult result{std::move(line), Algorithm::dpa,
                                kept.size() >= 2 ? kept.size() - 2 : 0,
                                err <= config.error_threshold_e, runtime, {err}};
            enforce_vertex_cap(result, config);
            return result;
        }
    }
    throw Error(ErrorCode::invalid_argument, "unknown algorithm");
}

FusionResult fuse(std::span<const PlanarPoint> points, Algorithm algorithm,
                  const FusionConfig& config) {
    Trajectory track{"points", {points.begin(), points.end()}, {}};
    const std::vector<Trajectory> tracks{std::move(track)};
    return fuse(std::span<const Trajectory>(tracks), algorithm, config);
}

}  // namespace polyfuse

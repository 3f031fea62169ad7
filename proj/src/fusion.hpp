#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "geometry.hpp"

namespace polyfuse {

enum class Algorithm { mda, ara, dpa };

const char* algorithm_name(Algorithm algo);
Algorithm algorithm_from_name(const std::string& name);

struct FusionConfig {
    double error_threshold_e = 2.5;  // convergence target for the mean lateral error, meters
    double radius_sigma = 3.0;       // centroid gather radius around the worst point, meters
    double block_width_w = 10.0;     // sweep window width, meters
    double step_s = 10.0;            // sweep advance per block, meters
    double cluster_gap = 2.5;        // y-gap that splits a window into clusters, meters
    double dp_epsilon = 40.0;        // chord-deviation tolerance, meters
    std::size_t max_vertices = 2000;
    std::size_t max_iterations = 2000;

    void validate() const;
};

struct FusionResult {
    Polyline polyline;
    Algorithm algorithm = Algorithm::mda;
    std::size_t iterations = 0;
    bool converged = false;
    double runtime_seconds = 0.0;
    /// Mean lateral error after each iteration; the final entry is the
    /// result's error, and converged implies it is <= error_threshold_e.
    std::vector<double> error_trace;
};

/// Iterative worst-point refinement: starts from the start-end chord and
/// inserts the centroid of the neighborhood around the point with the
/// largest lateral error until the mean error reaches the threshold or a
/// cap is hit. Start and end vertices are never moved.
FusionResult mda_fuse(std::span<const PlanarPoint> points, const PlanarPoint& start,
                      const PlanarPoint& end, const FusionConfig& config);

/// Candidate vertices of the block sweep: a window of width w advances along
/// x by step s; each window is split into clusters on y-gaps larger than
/// cluster_gap and every cluster contributes its centroid; candidates closer
/// than s/2 are merged into their mean.
std::vector<PlanarPoint> ara_candidates(std::span<const PlanarPoint> points,
                                        const FusionConfig& config);

/// Block sweep fit: chains the sweep candidates nearest-neighbor from the
/// lowest-x one, drops exactly collinear interior vertices, and stretches the
/// terminal segments over points that project beyond the chain ends. Data
/// whose principal direction is y-aligned should be rotated by the caller
/// first.
FusionResult ara_fuse(std::span<const PlanarPoint> points, const FusionConfig& config);

/// Indices kept by chord-deviation simplification of an ordered sequence.
std::vector<std::size_t> dp_keep_indices(std::span<const PlanarPoint> ordered, double epsilon);

/// Douglas-Peucker simplification; the result is a subsequence of the input
/// containing both endpoints.
Polyline dp_simplify(std::span<const PlanarPoint> ordered, double epsilon);

/// All track points sorted by arc-length position of their projection onto
/// seed_line; ties keep the original (concatenated) order.
std::vector<PlanarPoint> order_for_dp(std::span<const Trajectory> tracks, const Polyline& seed_line);

/// Runs the selected algorithm over the merged tracks. MDA endpoints default
/// to the centroids of the per-track first and last fixes; DPA orders the
/// merged cloud along the start-end chord before simplifying.
FusionResult fuse(std::span<const Trajectory> tracks, Algorithm algorithm,
                  const FusionConfig& config);
FusionResult fuse(std::span<const PlanarPoint> points, Algorithm algorithm,
                  const FusionConfig& config);

}  // namespace polyfuse

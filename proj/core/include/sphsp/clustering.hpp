#pragma once

#include "sphsp/features.hpp"
#include "sphsp/sampling.hpp"
#include "sphsp/soft_assignment.hpp"

#include <span>
#include <vector>

namespace sphsp {

/// Weighted squared Euclidean distance over `dims` channels.
inline double weighted_sq_distance(const double* f, const double* c, const double* w, int dims) {
    double s = 0.0;
    for (int d = 0; d < dims; ++d) {
        const double diff = f[d] - c[d];
        s += w[d] * diff * diff;
    }
    return s;
}

/// Clustering state: K centroids over the full feature width, unit
/// barycenters, the current labels and the fixed candidate structure.
struct SuperpixelState {
    ClusterInit init;
    int dims = 0;
    std::vector<double> centroids;  // K x dims
    std::vector<SpherePoint> barycenters;
    Segmentation labels;
    int iterations = 0;

    int superpixel_count() const { return init.superpixel_count(); }
    std::span<const double> centroid(int k) const {
        return {centroids.data() + static_cast<std::size_t>(k) * dims, static_cast<std::size_t>(dims)};
    }
};

/// Initial label map, fixed neighbour table and average-pooled centroids.
SuperpixelState initialize_state(const FeatureStack& stack, ClusterInit init);
SuperpixelState initialize_state(const FeatureStack& stack, const SeedSet& seeds);

/// Nearest candidate centroid per pixel under the weighted distance
/// (colour + learned channels weight 1, position channels `spatial_weight`).
Segmentation assign_hard(const FeatureStack& stack, const SuperpixelState& state,
                         double spatial_weight);

struct CentroidUpdate {
    std::vector<double> centroids;
    std::vector<SpherePoint> barycenters;
};

/// Per-label mean features and renormalised mean positions. Empty labels (and
/// degenerate zero-mean positions) carry over the previous values.
CentroidUpdate update_centroids(const FeatureStack& stack, const Segmentation& labels, int k,
                                std::span<const double> previous_centroids,
                                std::span<const SpherePoint> previous_barycenters);

/// Sum over pixels of the distance to the centroid of their label.
double clustering_objective(const FeatureStack& stack, const SuperpixelState& state,
                            double spatial_weight);

struct HardClusterOptions {
    int iterations = 10;
    double spatial_weight = 10.0;
};

/// T rounds of (assign_hard; update_centroids). When `objective_trace` is set,
/// the objective after every round is appended to it.
SuperpixelState cluster_hard(const FeatureStack& stack, const SeedSet& seeds,
                             const HardClusterOptions& options,
                             std::vector<double>* objective_trace = nullptr);
SuperpixelState cluster_hard(const FeatureStack& stack, ClusterInit init,
                             const HardClusterOptions& options,
                             std::vector<double>* objective_trace = nullptr);

/// Candidate with the largest weight per pixel, lowest slot on ties.
Segmentation hard_from_soft(const SoftAssignment& soft);

/// Default minimum component size: N / (4K), at least 1.
int default_min_segment_size(const GridShape& shape, int k);

/// Each label ends up as one 4-connected region on the column-wrapped grid.
/// Non-largest fragments and fragments below `min_size` are merged into the
/// adjacent region whose barycenter is nearest on the sphere.
Segmentation enforce_connectivity(const Segmentation& labels, int min_size);

/// 4-connected components with column wrap. Returns per-pixel component ids
/// (0..count-1 in scan order of first pixel).
struct Components {
    std::vector<int> ids;
    int count = 0;
};
Components connected_components(const Segmentation& labels);

}  // namespace sphsp

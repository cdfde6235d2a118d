#pragma once

#include "sphsp/clustering.hpp"
#include "sphsp/soft_assignment.hpp"

#include <span>
#include <vector>

namespace sphsp {

struct SoftClusterOptions {
    int iterations = 3;
    double temperature = 1.0;
    double spatial_weight = 10.0;
};

/// Softmax over candidates of -D(p, c) / temperature, with D the weighted
/// distance of assign_hard and centroids given explicitly.
SoftAssignment soft_assign(const FeatureStack& stack, const ClusterInit& init,
                           std::span<const double> centroids, double temperature,
                           double spatial_weight);
SoftAssignment soft_assign(const FeatureStack& stack, const SuperpixelState& state,
                           double temperature, double spatial_weight);

/// Column-normalised weighted means of features; zero-mass superpixels keep
/// their previous centroid and barycenter.
CentroidUpdate soft_update(const FeatureStack& stack, const SoftAssignment& soft, int k,
                           std::span<const double> previous_centroids,
                           std::span<const SpherePoint> previous_barycenters);

/// Per-superpixel column mass sum_p w(p, k).
std::vector<double> column_mass(const SoftAssignment& soft);

struct SoftClusterResult {
    SoftAssignment soft;
    SuperpixelState state;  // final centroids; labels = hard_from_soft(soft)
};

/// `iterations` rounds of (soft_assign; soft_update). The returned
/// assignment is the one computed in the last round.
SoftClusterResult soft_cluster(const FeatureStack& stack, ClusterInit init,
                               const SoftClusterOptions& options);
SoftClusterResult soft_cluster(const FeatureStack& stack, const SeedSet& seeds,
                               const SoftClusterOptions& options);

}  // namespace sphsp

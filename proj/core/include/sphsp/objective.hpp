#pragma once

#include "sphsp/soft_clustering.hpp"

#include <vector>

namespace sphsp {

inline constexpr double kLogEpsilon = 1e-12;

struct LossReport {
    double l_seg = 0.0;
    double l_compact = 0.0;
    double lambda = 1.0;
    double total = 0.0;
};

/// Cross-entropy between ground truth and its reconstruction through the
/// superpixels: one-hot labels are soft-pooled per superpixel, scattered back
/// through the same weights and scored with -log(y[gt] + 1e-12), averaged.
/// `classes` <= 0 means gt.label_bound().
double loss_seg(const SoftAssignment& soft, const Segmentation& gt, int classes = 0);

/// Mean squared distance between each pixel position and the soft position
/// centroid of its argmax superpixel. Centroids are not renormalised.
double loss_compact(const SoftAssignment& soft, const SphereGrid& grid);

struct ObjectiveOptions {
    SoftClusterOptions cluster;
    double lambda = 1.0;
};

LossReport loss_total(const FeatureStack& stack, const ClusterInit& init, const Segmentation& gt,
                      const ObjectiveOptions& options);

struct LossGradient {
    LossReport report;
    /// d(total)/d(features), laid out like FeatureStack::values().
    std::vector<double> features;
};

/// Exact reverse-mode derivative through the unrolled soft clustering.
/// Candidate sets and the argmax index of the compactness term are constants.
LossGradient loss_gradient(const FeatureStack& stack, const ClusterInit& init,
                           const Segmentation& gt, const ObjectiveOptions& options);

}  // namespace sphsp

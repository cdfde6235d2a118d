#pragma once

#include "sphsp/clustering.hpp"
#include "sphsp/conv.hpp"
#include "sphsp/soft_clustering.hpp"

#include <optional>

namespace sphsp {

/// Normalised Lab + xyz, with the net's output appended when a net is given.
/// The net sees the three normalised Lab channels.
FeatureStack compute_features(const EquirectImage& rgb, const SphereGrid& grid,
                              const FeatureNet* net = nullptr);

struct SegmentOptions {
    int superpixels = 500;
    HardClusterOptions hard{};
    /// Soft clustering followed by hard_from_soft instead of hard iterations.
    bool soft_mode = false;
    SoftClusterOptions soft{};
    bool connectivity = true;
    /// <= 0 selects default_min_segment_size.
    int min_size = 0;
};

/// RGB image to connected superpixel labels. `seeds` overrides the default
/// Hammersley seeds (used for rotated-seed equivariance checks).
Segmentation segment_image(const EquirectImage& rgb, const SegmentOptions& options,
                           const FeatureNet* net = nullptr, const SeedSet* seeds = nullptr);

/// Same as segment_image but starting from a prepared feature stack.
Segmentation segment_features(const FeatureStack& stack, const SegmentOptions& options,
                              const SeedSet* seeds = nullptr);

}  // namespace sphsp

#include "sphsp/pipeline.hpp"

#include "sphsp/error.hpp"

namespace sphsp {

FeatureStack compute_features(const EquirectImage& rgb, const SphereGrid& grid, const FeatureNet* net) {
    const EquirectImage lab = rgb_to_lab(rgb);
    if (net == nullptr || net->empty()) {
        return build_feature_stack(lab, grid);
    }
    const EquirectImage learned = feature_net_forward(normalized_lab(lab), *net);
    return build_feature_stack(lab, grid, &learned);
}

Segmentation segment_features(const FeatureStack& stack, const SegmentOptions& options,
                              const SeedSet* seeds) {
    require(options.superpixels >= 1, "segment: superpixel count must be >= 1");
    const SeedSet own = seeds == nullptr ? hammersley_sphere(options.superpixels) : SeedSet{};
    const SeedSet& used = seeds == nullptr ? own : *seeds;
    Segmentation labels;
    if (options.soft_mode) {
        labels = soft_cluster(stack, used, options.soft).state.labels;
    } else {
        labels = cluster_hard(stack, used, options.hard).labels;
    }
    if (options.connectivity) {
        const int min_size = options.min_size > 0 ? options.min_size
                                                  : default_min_segment_size(stack.shape(), used.size());
        labels = enforce_connectivity(labels, min_size);
    }
    return labels;
}

Segmentation segment_image(const EquirectImage& rgb, const SegmentOptions& options,
                           const FeatureNet* net, const SeedSet* seeds) {
    const SphereGrid grid(rgb.shape());
    return segment_features(compute_features(rgb, grid, net), options, seeds);
}

}  // namespace sphsp

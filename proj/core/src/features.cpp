#include "sphsp/features.hpp"

#include "sphsp/error.hpp"

#include <algorithm>

namespace sphsp {

FeatureStack build_feature_stack(const EquirectImage& lab, const SphereGrid& grid,
                                 const EquirectImage* learned) {
    require(lab.channels() == 3, "build_feature_stack: Lab image must have 3 channels");
    require_same_shape(lab.shape(), grid.shape(), "build_feature_stack");
    int extra = 0;
    if (learned != nullptr) {
        require_same_shape(learned->shape(), grid.shape(), "build_feature_stack (learned)");
        extra = learned->channels();
    }
    FeatureStack stack(grid.shape(), kBaseChannels + extra);
    for (std::size_t i = 0; i < stack.pixel_count(); ++i) {
        auto dst = stack.pixel(i);
        const auto src = lab.pixel(i);
        dst[0] = normalize_lightness(src[0]);
        dst[1] = normalize_chroma(src[1]);
        dst[2] = normalize_chroma(src[2]);
        dst[3] = grid[i].x;
        dst[4] = grid[i].y;
        dst[5] = grid[i].z;
        if (extra > 0) {
            const auto l = learned->pixel(i);
            std::copy(l.begin(), l.end(), dst.begin() + kBaseChannels);
        }
    }
    return stack;
}

std::vector<double> channel_weights(int dims, double spatial_weight) {
    std::vector<double> w(static_cast<std::size_t>(dims), 1.0);
    for (int d = kPositionOffset; d < kPositionOffset + 3 && d < dims; ++d) {
        w[static_cast<std::size_t>(d)] = spatial_weight;
    }
    return w;
}

}  // namespace sphsp

#pragma once

#include "sphsp/geometry.hpp"
#include "sphsp/image.hpp"

#include <array>
#include <optional>
#include <span>
#include <vector>

namespace sphsp {

/// sRGB (8-bit scale, D65) to CIE L*a*b*. Input must have 3 channels.
EquirectImage rgb_to_lab(const EquirectImage& rgb);

/// Inverse of rgb_to_lab for one colour, on the 8-bit scale and unclamped
/// (components outside [0, 255] mean the colour is out of gamut).
std::array<double, 3> lab_to_rgb(double L, double a, double b);

/// Channel layout of a feature stack.
inline constexpr int kColorChannels = 3;
inline constexpr int kPositionOffset = 3;
inline constexpr int kBaseChannels = 6;
/// Default total feature width (6 base + 14 learned).
inline constexpr int kDefaultFeatureWidth = 20;

/// Affine maps of Lab into [-1, 1] using fixed bounds L in [0, 100],
/// a, b in [-128, 127]. Values outside the bounds are clamped.
double normalize_lightness(double L);
double normalize_chroma(double ab);

/// Lab rescaled channel-wise to [-1, 1].
EquirectImage normalized_lab(const EquirectImage& lab);

/// Per-pixel feature vectors: [3 colour | 3 position | learned...].
class FeatureStack {
public:
    FeatureStack() = default;
    FeatureStack(const GridShape& shape, int dims)
        : shape_(shape), dims_(dims), values_(shape.pixel_count() * static_cast<std::size_t>(dims)) {}

    const GridShape& shape() const { return shape_; }
    int dims() const { return dims_; }
    int learned_dims() const { return dims_ - kBaseChannels; }
    std::size_t pixel_count() const { return shape_.pixel_count(); }

    std::span<double> pixel(std::size_t i) {
        return {values_.data() + i * static_cast<std::size_t>(dims_), static_cast<std::size_t>(dims_)};
    }
    std::span<const double> pixel(std::size_t i) const {
        return {values_.data() + i * static_cast<std::size_t>(dims_), static_cast<std::size_t>(dims_)};
    }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }

    SpherePoint position(std::size_t i) const {
        const double* p = values_.data() + i * static_cast<std::size_t>(dims_) + kPositionOffset;
        return {p[0], p[1], p[2]};
    }

private:
    GridShape shape_;
    int dims_ = kBaseChannels;
    std::vector<double> values_;
};

/// Concatenates normalised Lab, the grid's xyz and optional learned channels.
FeatureStack build_feature_stack(const EquirectImage& lab, const SphereGrid& grid,
                                 const EquirectImage* learned = nullptr);

/// Per-channel weights of the clustering distance: 1 for colour and learned
/// channels, `spatial_weight` for the three position channels.
std::vector<double> channel_weights(int dims, double spatial_weight);

}  // namespace sphsp

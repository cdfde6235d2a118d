#pragma once

#include "sphsp/geometry.hpp"

#include <span>
#include <vector>

namespace sphsp {

/// Row-stochastic association of each pixel with its candidate superpixels.
/// Every row has the same width (min(9, K)); candidates come from the
/// neighbour list of the pixel's initial superpixel.
class SoftAssignment {
public:
    SoftAssignment() = default;
    SoftAssignment(const GridShape& shape, int width, int superpixels)
        : shape_(shape), width_(width), superpixels_(superpixels),
          candidates_(shape.pixel_count() * static_cast<std::size_t>(width)),
          weights_(shape.pixel_count() * static_cast<std::size_t>(width)) {}

    const GridShape& shape() const { return shape_; }
    std::size_t pixel_count() const { return shape_.pixel_count(); }
    int width() const { return width_; }
    int superpixel_count() const { return superpixels_; }

    std::span<int> candidates(std::size_t p) {
        return {candidates_.data() + p * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const int> candidates(std::size_t p) const {
        return {candidates_.data() + p * width_, static_cast<std::size_t>(width_)};
    }
    std::span<double> weights(std::size_t p) {
        return {weights_.data() + p * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const double> weights(std::size_t p) const {
        return {weights_.data() + p * width_, static_cast<std::size_t>(width_)};
    }

    /// Column index (0..width-1) of the largest weight, lowest on ties.
    int argmax_slot(std::size_t p) const;
    /// Largest |row sum - 1| over all rows.
    double max_row_error() const;

private:
    GridShape shape_;
    int width_ = 0;
    int superpixels_ = 0;
    std::vector<int> candidates_;
    std::vector<double> weights_;
};

}  // namespace sphsp

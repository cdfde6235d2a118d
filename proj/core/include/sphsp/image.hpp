#pragma once

#include "sphsp/error.hpp"
#include "sphsp/geometry.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sphsp {

/// H x W raster with interleaved channels stored as doubles. Colour images
/// hold 8-bit intensities in [0, 255]; feature rasters hold arbitrary reals.
class EquirectImage {
public:
    EquirectImage() = default;
    EquirectImage(const GridShape& shape, int channels, double fill = 0.0)
        : shape_(shape), channels_(channels),
          data_(shape.pixel_count() * static_cast<std::size_t>(channels), fill) {
        require(channels >= 1, "EquirectImage: channel count must be >= 1");
    }

    const GridShape& shape() const { return shape_; }
    int height() const { return shape_.height(); }
    int width() const { return shape_.width(); }
    int channels() const { return channels_; }
    std::size_t pixel_count() const { return shape_.pixel_count(); }

    double& at(int col, int row, int c) {
        return data_[shape_.index(col, row) * static_cast<std::size_t>(channels_) +
                     static_cast<std::size_t>(c)];
    }
    double at(int col, int row, int c) const {
        return data_[shape_.index(col, row) * static_cast<std::size_t>(channels_) +
                     static_cast<std::size_t>(c)];
    }
    std::span<double> pixel(std::size_t i) {
        return {data_.data() + i * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }
    std::span<const double> pixel(std::size_t i) const {
        return {data_.data() + i * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    friend bool operator==(const EquirectImage&, const EquirectImage&) = default;

private:
    GridShape shape_;
    int channels_ = 1;
    std::vector<double> data_;
};

/// One integer label per pixel.
class Segmentation {
public:
    using Label = std::int32_t;

    Segmentation() = default;
    explicit Segmentation(const GridShape& shape, Label fill = 0)
        : shape_(shape), labels_(shape.pixel_count(), fill) {}
    Segmentation(const GridShape& shape, std::vector<Label> labels)
        : shape_(shape), labels_(std::move(labels)) {
        require(labels_.size() == shape_.pixel_count(),
                "Segmentation: label count does not match grid");
    }

    const GridShape& shape() const { return shape_; }
    int height() const { return shape_.height(); }
    int width() const { return shape_.width(); }
    std::size_t size() const { return labels_.size(); }

    Label& operator[](std::size_t i) { return labels_[i]; }
    Label operator[](std::size_t i) const { return labels_[i]; }
    Label& at(int col, int row) { return labels_[shape_.index(col, row)]; }
    Label at(int col, int row) const { return labels_[shape_.index(col, row)]; }

    std::vector<Label>& labels() { return labels_; }
    const std::vector<Label>& labels() const { return labels_; }

    /// Largest label + 1 (0 for an empty map).
    int label_bound() const;
    /// Number of distinct label values present.
    int distinct_count() const;

    friend bool operator==(const Segmentation&, const Segmentation&) = default;

private:
    GridShape shape_;
    std::vector<Label> labels_;
};

inline void require_same_shape(const GridShape& a, const GridShape& b, const std::string& what) {
    require(a == b, what + ": shape mismatch (" + std::to_string(a.height()) + "x" +
                        std::to_string(a.width()) + " vs " + std::to_string(b.height()) +
                        "x" + std::to_string(b.width()) + ")");
}

}  // namespace sphsp

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sphsp {

/// Equirectangular raster dimensions: rows span the polar angle [0, pi],
/// columns span the azimuth [0, 2pi) and wrap around.
class GridShape {
public:
    GridShape() = default;
    GridShape(int height, int width);

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    /// True when width != 2 * height. Everything still works, the flag is
    /// only informational.
    bool non_canonical() const { return width_ != 2 * height_; }

    std::size_t index(int col, int row) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }
    int wrap_col(int col) const {
        const int m = col % width_;
        return m < 0 ? m + width_ : m;
    }

    friend bool operator==(const GridShape&, const GridShape&) = default;

private:
    int height_ = 2;
    int width_ = 4;
};

struct PixelIndex {
    int col = 0;  // j
    int row = 0;  // i
    friend bool operator==(const PixelIndex&, const PixelIndex&) = default;
};

struct SpherePoint {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;

    double norm() const;
    /// Returns this point scaled to unit length. Undefined for the origin.
    SpherePoint normalized() const;
    friend bool operator==(const SpherePoint&, const SpherePoint&) = default;
};

/// Pixel centre (col + 0.5, row + 0.5) mapped onto the unit sphere:
/// phi = (row + 0.5) pi / h, theta = (col + 0.5) 2pi / w.
SpherePoint pixel_to_sphere(PixelIndex p, const GridShape& shape);

/// Quantizes a unit vector back to the pixel containing it. Exact inverse of
/// pixel_to_sphere on pixel centres.
PixelIndex sphere_to_pixel(const SpherePoint& X, const GridShape& shape);

/// Continuous pixel coordinates (centres at integers) of a unit vector.
/// Column is in [-0.5, w - 0.5), row in [-0.5, h - 0.5].
struct ContinuousPixel {
    double col;
    double row;
};
ContinuousPixel sphere_to_continuous(const SpherePoint& X, const GridShape& shape);

double chord_distance(const SpherePoint& a, const SpherePoint& b);
double squared_chord_distance(const SpherePoint& a, const SpherePoint& b);

/// Rotation about the z axis by `angle` radians.
SpherePoint rotate_azimuth(const SpherePoint& p, double angle);

/// Per-pixel unit-sphere coordinates of a grid, row-major. Immutable.
class SphereGrid {
public:
    explicit SphereGrid(const GridShape& shape);

    const GridShape& shape() const { return shape_; }
    std::size_t size() const { return coords_.size(); }
    const SpherePoint& operator[](std::size_t i) const { return coords_[i]; }
    const SpherePoint& at(int col, int row) const { return coords_[shape_.index(col, row)]; }
    std::span<const SpherePoint> coords() const { return coords_; }

private:
    GridShape shape_;
    std::vector<SpherePoint> coords_;
};

}  // namespace sphsp

#include "sphsp/geometry.hpp"

#include "sphsp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sphsp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

GridShape::GridShape(int height, int width) : height_(height), width_(width) {
    require(height >= 2 && width >= 2,
            "GridShape: height and width must be >= 2, got " + std::to_string(height) +
                "x" + std::to_string(width));
}

double SpherePoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

SpherePoint SpherePoint::normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
}

SpherePoint pixel_to_sphere(PixelIndex p, const GridShape& shape) {
    if (p.col < 0 || p.col >= shape.width() || p.row < 0 || p.row >= shape.height()) {
        throw InvalidInput("pixel_to_sphere: pixel (" + std::to_string(p.col) + ", " +
                           std::to_string(p.row) + ") outside grid");
    }
    const double phi = (p.row + 0.5) * kPi / shape.height();
    const double theta = (p.col + 0.5) * kTwoPi / shape.width();
    const double s = std::sin(phi);
    return {s * std::cos(theta), s * std::sin(theta), std::cos(phi)};
}

namespace {

struct Angles {
    double theta;
    double phi;
};

Angles angles_of(const SpherePoint& X) {
    if (!std::isfinite(X.x) || !std::isfinite(X.y) || !std::isfinite(X.z)) {
        throw InvalidInput("sphere_to_pixel: non-finite coordinates");
    }
    double theta = std::atan2(X.y, X.x);
    if (theta < 0.0) {
        theta += kTwoPi;
    }
    if (theta >= kTwoPi) {
        theta -= kTwoPi;
    }
    const double phi = std::acos(std::clamp(X.z, -1.0, 1.0));
    return {theta, phi};
}

}  // namespace

PixelIndex sphere_to_pixel(const SpherePoint& X, const GridShape& shape) {
    const Angles a = angles_of(X);
    const int w = shape.width();
    const int h = shape.height();
    const int col = std::clamp(static_cast<int>(std::floor(a.theta * w / kTwoPi)), 0, w - 1);
    const int row = std::clamp(static_cast<int>(std::floor(a.phi * h / kPi)), 0, h - 1);
    return {col, row};
}

ContinuousPixel sphere_to_continuous(const SpherePoint& X, const GridShape& shape) {
    const Angles a = angles_of(X);
    return {a.theta * shape.width() / kTwoPi - 0.5, a.phi * shape.height() / kPi - 0.5};
}

double squared_chord_distance(const SpherePoint& a, const SpherePoint& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double chord_distance(const SpherePoint& a, const SpherePoint& b) {
    return std::sqrt(squared_chord_distance(a, b));
}

SpherePoint rotate_azimuth(const SpherePoint& p, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y, p.z};
}

SphereGrid::SphereGrid(const GridShape& shape) : shape_(shape), coords_(shape.pixel_count()) {
    for (int row = 0; row < shape.height(); ++row) {
        for (int col = 0; col < shape.width(); ++col) {
            coords_[shape.index(col, row)] = pixel_to_sphere({col, row}, shape);
        }
    }
}

}  // namespace sphsp

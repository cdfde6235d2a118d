#pragma once

#include "sphsp/image.hpp"

#include <filesystem>

namespace sphsp {

/// Reads an 8/16-bit PNG or a binary PPM (P6) / PGM (P5) as an RGB image on
/// the 8-bit intensity scale. Grey inputs are replicated, alpha is dropped.
EquirectImage read_rgb_image(const std::filesystem::path& path);

/// Writes an RGB image as 8-bit PNG, or PPM when the extension is .ppm.
/// Values are rounded and clamped to [0, 255].
void write_rgb_image(const std::filesystem::path& path, const EquirectImage& image);

/// Reads a single-channel 8- or 16-bit PNG as labels.
Segmentation read_label_image(const std::filesystem::path& path);

/// 16-bit greyscale PNG. Labels must lie in [0, 65535].
void write_label_image(const std::filesystem::path& path, const Segmentation& labels);

/// Comma-separated rows of labels, one line per image row.
void write_label_csv(const std::filesystem::path& path, const Segmentation& labels);

/// Copy of `image` with superpixel boundary pixels painted in `colour`.
EquirectImage draw_boundaries(const EquirectImage& image, const Segmentation& labels,
                              double r = 255.0, double g = 0.0, double b = 0.0);

/// Bilinear resize with wrapped columns (images) / nearest (labels).
EquirectImage resize_image(const EquirectImage& image, const GridShape& shape);
Segmentation resize_labels(const Segmentation& labels, const GridShape& shape);

}  // namespace sphsp

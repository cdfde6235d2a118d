#pragma once

#include "sphsp/image.hpp"

#include <cstdint>
#include <string>

namespace sphsp {

/// Parameters of one augmented sample. Ranges follow the training setup:
/// blur sigma in [0, 2] px, noise sigma in [0, 20] intensity levels,
/// stretch factors in [0.5, 2].
struct AugmentSpec {
    double blur_sigma = 0.0;
    double noise_sigma = 0.0;
    bool flip = false;
    int roll_shift = 0;
    bool crop_mirror = false;
    int crop_offset = 0;
    double stretch_kx = 1.0;
    double stretch_ky = 1.0;
    std::uint64_t seed = 0;

    /// Throws InvalidInput on out-of-range fields. Width-dependent fields are
    /// checked when width > 0.
    void validate(int width = 0) const;

    friend bool operator==(const AugmentSpec&, const AugmentSpec&) = default;
};

/// Draws a spec: blur and noise uniform in their ranges, flip / roll /
/// crop&mirror each with probability 0.5, stretch factors uniform in [0.5, 2].
AugmentSpec random_augment_spec(std::uint64_t seed, int width);

std::string augment_spec_to_json(const AugmentSpec& spec);
AugmentSpec augment_spec_from_json(const std::string& text);

/// Separable Gaussian (kernel truncated at 3 sigma, unit sum); columns wrap,
/// rows replicate. sigma = 0 returns the input unchanged.
EquirectImage gaussian_blur(const EquirectImage& image, double sigma);

/// Adds i.i.d. N(0, sigma^2) per channel and clamps to [0, 255].
EquirectImage gaussian_noise(const EquirectImage& image, double sigma, std::uint64_t seed);

/// Geometric operations act identically on image and labels.
struct AugmentedPair {
    EquirectImage image;
    Segmentation labels;
};

/// Column j -> w - 1 - j.
AugmentedPair hflip(const EquirectImage& image, const Segmentation& labels);
/// Column j -> (j + shift) mod w.
AugmentedPair roll(const EquirectImage& image, const Segmentation& labels, int shift);
/// Half-width crop starting at `offset` (wrapping) followed by its mirror.
AugmentedPair crop_mirror(const EquirectImage& image, const Segmentation& labels, int offset);
/// Inverse warp: each output direction (x, y, z) samples the input at
/// (x / kx, y / ky, z) renormalised; bilinear for the image, nearest for labels.
AugmentedPair pano_stretch(const EquirectImage& image, const Segmentation& labels, double kx, double ky);

/// stretch -> crop&mirror -> roll -> flip -> blur -> noise. Labels skip the
/// photometric steps.
AugmentedPair compose_augmentations(const AugmentSpec& spec, const EquirectImage& image,
                                    const Segmentation& labels);

}  // namespace sphsp

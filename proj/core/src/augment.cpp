#include "sphsp/augment.hpp"

#include "sphsp/error.hpp"
#include "sphsp/geometry.hpp"
#include "sphsp/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>

namespace sphsp {

void AugmentSpec::validate(int width) const {
    require(blur_sigma >= 0.0 && blur_sigma <= 2.0, "augment: blur sigma must be in [0, 2]");
    require(noise_sigma >= 0.0 && noise_sigma <= 20.0, "augment: noise sigma must be in [0, 20]");
    require(stretch_kx >= 0.5 && stretch_kx <= 2.0 && stretch_ky >= 0.5 && stretch_ky <= 2.0,
            "augment: stretch factors must be in [0.5, 2]");
    require(roll_shift >= 0 && crop_offset >= 0, "augment: shifts must be non-negative");
    if (width > 0) {
        require(roll_shift < width, "augment: roll shift must be < width");
        require(crop_offset < width, "augment: crop offset must be < width");
        require(!crop_mirror || width % 2 == 0, "augment: crop & mirror needs an even width");
    }
}

AugmentSpec random_augment_spec(std::uint64_t seed, int width) {
    require(width >= 2, "random_augment_spec: width must be >= 2");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> column(0, width - 1);
    AugmentSpec spec;
    spec.blur_sigma = 2.0 * unit(rng);
    spec.noise_sigma = 20.0 * unit(rng);
    spec.flip = unit(rng) < 0.5;
    spec.roll_shift = unit(rng) < 0.5 ? column(rng) : 0;
    spec.crop_mirror = width % 2 == 0 && unit(rng) < 0.5;
    spec.crop_offset = spec.crop_mirror ? column(rng) : 0;
    spec.stretch_kx = 0.5 + 1.5 * unit(rng);
    spec.stretch_ky = 0.5 + 1.5 * unit(rng);
    spec.seed = rng();
    return spec;
}

std::string augment_spec_to_json(const AugmentSpec& spec) {
    const nlohmann::json j = {{"blur_sigma", spec.blur_sigma},   {"noise_sigma", spec.noise_sigma},
                              {"flip", spec.flip},               {"roll_shift", spec.roll_shift},
                              {"crop_mirror", spec.crop_mirror}, {"crop_offset", spec.crop_offset},
                              {"stretch_kx", spec.stretch_kx},   {"stretch_ky", spec.stretch_ky},
                              {"seed", spec.seed}};
    return j.dump(2);
}

AugmentSpec augment_spec_from_json(const std::string& text) {
    AugmentSpec spec;
    try {
        const auto j = nlohmann::json::parse(text);
        spec.blur_sigma = j.value("blur_sigma", 0.0);
        spec.noise_sigma = j.value("noise_sigma", 0.0);
        spec.flip = j.value("flip", false);
        spec.roll_shift = j.value("roll_shift", 0);
        spec.crop_mirror = j.value("crop_mirror", false);
        spec.crop_offset = j.value("crop_offset", 0);
        spec.stretch_kx = j.value("stretch_kx", 1.0);
        spec.stretch_ky = j.value("stretch_ky", 1.0);
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("augment spec: malformed JSON: ") + e.what());
    }
    spec.validate();
    return spec;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        const double v = std::exp(-0.5 * t * t / (sigma * sigma));
        k[static_cast<std::size_t>(t + radius)] = v;
        sum += v;
    }
    for (double& v : k) {
        v /= sum;
    }
    return k;
}

/// Applies a column permutation src_col = source(dst_col) to image and labels.
template <typename SourceCol>
AugmentedPair permute_columns(const EquirectImage& image, const Segmentation& labels, SourceCol source) {
    require_same_shape(image.shape(), labels.shape(), "augment");
    AugmentedPair out{EquirectImage(image.shape(), image.channels()), Segmentation(labels.shape())};
    for (int row = 0; row < image.height(); ++row) {
        for (int col = 0; col < image.width(); ++col) {
            const int sc = source(col);
            const auto src = image.pixel(image.shape().index(sc, row));
            auto dst = out.image.pixel(image.shape().index(col, row));
            std::copy(src.begin(), src.end(), dst.begin());
            out.labels.at(col, row) = labels.at(sc, row);
        }
    }
    return out;
}

}  // namespace

EquirectImage gaussian_blur(const EquirectImage& image, double sigma) {
    require(sigma >= 0.0, "gaussian_blur: sigma must be >= 0");
    if (sigma == 0.0) {
        return image;
    }
    const auto kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);
    const int h = image.height();
    const int w = image.width();
    const int ch = image.channels();
    const GridShape& shape = image.shape();

    EquirectImage horizontal(shape, ch);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row) {
            for (int col = 0; col < w; ++col) {
                for (int c = 0; c < ch; ++c) {
                    double s = 0.0;
                    for (int t = -radius; t <= radius; ++t) {
                        s += kernel[static_cast<std::size_t>(t + radius)] *
                             image.at(shape.wrap_col(col + t), static_cast<int>(row), c);
                    }
                    horizontal.at(col, static_cast<int>(row), c) = s;
                }
            }
        }
    });
    EquirectImage out(shape, ch);
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row) {
            for (int col = 0; col < w; ++col) {
                for (int c = 0; c < ch; ++c) {
                    double s = 0.0;
                    for (int t = -radius; t <= radius; ++t) {
                        const int r = std::clamp(static_cast<int>(row) + t, 0, h - 1);
                        s += kernel[static_cast<std::size_t>(t + radius)] * horizontal.at(col, r, c);
                    }
                    out.at(col, static_cast<int>(row), c) = s;
                }
            }
        }
    });
    return out;
}

EquirectImage gaussian_noise(const EquirectImage& image, double sigma, std::uint64_t seed) {
    require(sigma >= 0.0, "gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) {
        return image;
    }
    EquirectImage out = image;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (double& v : out.data()) {
        v = std::clamp(v + normal(rng), 0.0, 255.0);
    }
    return out;
}

AugmentedPair hflip(const EquirectImage& image, const Segmentation& labels) {
    const int w = image.width();
    return permute_columns(image, labels, [w](int col) { return w - 1 - col; });
}

AugmentedPair roll(const EquirectImage& image, const Segmentation& labels, int shift) {
    const int w = image.width();
    require(shift >= 0 && shift < w, "roll: shift must be in [0, w)");
    // Output column (j + s) mod w takes input column j.
    return permute_columns(image, labels, [w, shift](int col) { return ((col - shift) % w + w) % w; });
}

AugmentedPair crop_mirror(const EquirectImage& image, const Segmentation& labels, int offset) {
    const int w = image.width();
    require(w % 2 == 0, "crop_mirror: width must be even");
    require(offset >= 0 && offset < w, "crop_mirror: offset must be in [0, w)");
    const int half = w / 2;
    return permute_columns(image, labels, [w, half, offset](int col) {
        const int t = col < half ? col : w - 1 - col;
        return (offset + t) % w;
    });
}

AugmentedPair pano_stretch(const EquirectImage& image, const Segmentation& labels, double kx, double ky) {
    require(kx > 0.0 && ky > 0.0, "pano_stretch: factors must be positive");
    require_same_shape(image.shape(), labels.shape(), "pano_stretch");
    const GridShape& shape = image.shape();
    const int h = shape.height();
    const int w = shape.width();
    const int ch = image.channels();
    AugmentedPair out{EquirectImage(shape, ch), Segmentation(shape)};
    constexpr double kSnap = 1e-9;
    auto snap = [](double v) {
        const double r = std::round(v);
        return std::abs(v - r) < kSnap ? r : v;
    };

    parallel_for(shape.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const int row = static_cast<int>(p / static_cast<std::size_t>(w));
            const int col = static_cast<int>(p % static_cast<std::size_t>(w));
            const SpherePoint X = pixel_to_sphere({col, row}, shape);
            const SpherePoint warped = SpherePoint{X.x / kx, X.y / ky, X.z}.normalized();
            const ContinuousPixel src = sphere_to_continuous(warped, shape);
            const double u = snap(src.col);
            const double v = std::clamp(snap(src.row), 0.0, static_cast<double>(h - 1));

            const double u0 = std::floor(u);
            const double v0 = std::floor(v);
            const double fu = u - u0;
            const double fv = v - v0;
            const int c0 = shape.wrap_col(static_cast<int>(u0));
            const int c1 = shape.wrap_col(static_cast<int>(u0) + 1);
            const int r0 = static_cast<int>(v0);
            const int r1 = std::min(r0 + 1, h - 1);
            auto dst = out.image.pixel(p);
            for (int c = 0; c < ch; ++c) {
                const double top = (1.0 - fu) * image.at(c0, r0, c) + fu * image.at(c1, r0, c);
                const double bottom = (1.0 - fu) * image.at(c0, r1, c) + fu * image.at(c1, r1, c);
                dst[c] = (1.0 - fv) * top + fv * bottom;
            }
            const int nc = shape.wrap_col(static_cast<int>(std::lround(u)));
            const int nr = std::clamp(static_cast<int>(std::lround(v)), 0, h - 1);
            out.labels[p] = labels.at(nc, nr);
        }
    });
    return out;
}

AugmentedPair compose_augmentations(const AugmentSpec& spec, const EquirectImage& image,
                                    const Segmentation& labels) {
    spec.validate(image.width());
    require_same_shape(image.shape(), labels.shape(), "compose_augmentations");
    AugmentedPair cur{image, labels};
    if (spec.stretch_kx != 1.0 || spec.stretch_ky != 1.0) {
        cur = pano_stretch(cur.image, cur.labels, spec.stretch_kx, spec.stretch_ky);
    }
    if (spec.crop_mirror) {
        cur = crop_mirror(cur.image, cur.labels, spec.crop_offset);
    }
    if (spec.roll_shift != 0) {
        cur = roll(cur.image, cur.labels, spec.roll_shift);
    }
    if (spec.flip) {
        cur = hflip(cur.image, cur.labels);
    }
    cur.image = gaussian_blur(cur.image, spec.blur_sigma);
    cur.image = gaussian_noise(cur.image, spec.noise_sigma, spec.seed);
    return cur;
}

}  // namespace sphsp

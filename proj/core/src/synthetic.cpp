#include "sphsp/synthetic.hpp"

#include "sphsp/error.hpp"
#include "sphsp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sphsp {

SynthSample make_band_image(const SynthOptions& options, std::uint64_t index) {
    require(options.nlat >= 1 && options.nlon >= 1, "synth: nlat and nlon must be >= 1");
    require(options.noise >= 0.0, "synth: noise must be >= 0");
    const GridShape shape(options.height, options.width);
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    constexpr double pi = std::numbers::pi;

    std::vector<double> lat_cuts;
    for (int b = 1; b < options.nlat; ++b) {
        lat_cuts.push_back(pi * (b + 0.5 * (unit(rng) - 0.5)) / options.nlat);
    }
    std::vector<double> lon_cuts;
    if (options.nlon > 1) {
        const double offset = 2.0 * pi * unit(rng);
        for (int s = 0; s < options.nlon; ++s) {
            double cut = offset + 2.0 * pi * (s + 0.5 * (unit(rng) - 0.5)) / options.nlon;
            lon_cuts.push_back(std::fmod(cut, 2.0 * pi));
        }
        std::sort(lon_cuts.begin(), lon_cuts.end());
    }
    const int classes = options.nlat * options.nlon;
    // Uniform in a Lab box, rejecting colours outside the sRGB gamut.
    std::uniform_real_distribution<double> lightness(20.0, 90.0);
    std::uniform_real_distribution<double> chroma(-80.0, 80.0);
    std::vector<double> palette;
    palette.reserve(static_cast<std::size_t>(classes) * 3);
    while (palette.size() < static_cast<std::size_t>(classes) * 3) {
        const double L = lightness(rng);
        const double a = chroma(rng);
        const double b = chroma(rng);
        const std::array<double, 3> rgb = lab_to_rgb(L, a, b);
        if (std::all_of(rgb.begin(), rgb.end(), [](double v) { return v >= 0.0 && v <= 255.0; })) {
            palette.insert(palette.end(), rgb.begin(), rgb.end());
        }
    }

    SynthSample sample{EquirectImage(shape, 3), Segmentation(shape)};
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int row = 0; row < shape.height(); ++row) {
        const double phi = (row + 0.5) * pi / shape.height();
        const int band = static_cast<int>(std::upper_bound(lat_cuts.begin(), lat_cuts.end(), phi) - lat_cuts.begin());
        for (int col = 0; col < shape.width(); ++col) {
            const double theta = (col + 0.5) * 2.0 * pi / shape.width();
            int sector = 0;
            if (!lon_cuts.empty()) {
                sector = static_cast<int>(std::upper_bound(lon_cuts.begin(), lon_cuts.end(), theta) - lon_cuts.begin()) - 1;
                if (sector < 0) {
                    sector = options.nlon - 1;
                }
            }
            const int cls = band * options.nlon + sector;
            sample.gt.at(col, row) = cls;
            for (int c = 0; c < 3; ++c) {
                double v = palette[static_cast<std::size_t>(cls) * 3 + c];
                if (options.noise > 0.0) {
                    v += options.noise * noise(rng);
                }
                sample.rgb.at(col, row, c) = std::clamp(std::round(v), 0.0, 255.0);
            }
        }
    }
    return sample;
}

std::vector<SynthSample> make_band_dataset(const SynthOptions& options, int count,
                                           std::uint64_t first_index) {
    std::vector<SynthSample> out;
    out.reserve(static_cast<std::size_t>(std::max(0, count)));
    for (int i = 0; i < count; ++i) {
        out.push_back(make_band_image(options, first_index + static_cast<std::uint64_t>(i)));
    }
    return out;
}

}  // namespace sphsp

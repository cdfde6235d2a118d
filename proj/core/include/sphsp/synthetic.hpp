#pragma once

#include "sphsp/image.hpp"

#include <cstdint>
#include <vector>

namespace sphsp {

/// Band-partition test scenes: `nlat` latitude bands times `nlon` azimuthal
/// sectors, one random colour per class plus Gaussian pixel noise.
struct SynthOptions {
    int height = 64;
    int width = 128;
    int nlat = 2;
    int nlon = 3;
    double noise = 10.0;
    std::uint64_t seed = 0;
};

struct SynthSample {
    EquirectImage rgb;  // 8-bit RGB, integer-valued
    Segmentation gt;    // classes in [0, nlat * nlon)
};

/// Sample `index` of the stream defined by options.seed.
SynthSample make_band_image(const SynthOptions& options, std::uint64_t index);
std::vector<SynthSample> make_band_dataset(const SynthOptions& options, int count,
                                           std::uint64_t first_index = 0);

}  // namespace sphsp

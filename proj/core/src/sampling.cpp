#include "sphsp/sampling.hpp"

#include "sphsp/error.hpp"
#include "sphsp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace sphsp {

double radical_inverse_base2(std::uint32_t t) {
    std::uint32_t bits = t;
    bits = (bits << 16u) | (bits >> 16u);
    bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
    bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
    bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
    bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
    return static_cast<double>(bits) * 0x1p-32;
}

SeedSet hammersley_sphere(int k) {
    require(k >= 1 && k <= 65535,
            "hammersley_sphere: k must be in [1, 65535], got " + std::to_string(k));
    SeedSet seeds;
    seeds.points.reserve(static_cast<std::size_t>(k));
    for (int t = 0; t < k; ++t) {
        const double z = 1.0 - 2.0 * (t + 0.5) / k;
        const double theta =
            2.0 * std::numbers::pi * radical_inverse_base2(static_cast<std::uint32_t>(t));
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        seeds.points.push_back({r * std::cos(theta), r * std::sin(theta), z});
    }
    return seeds;
}

SeedSet rotate_seeds(const SeedSet& seeds, int shift, int width) {
    const double angle = 2.0 * std::numbers::pi * shift / width;
    SeedSet out;
    out.points.reserve(seeds.points.size());
    for (const auto& p : seeds.points) {
        out.points.push_back(rotate_azimuth(p, angle));
    }
    return out;
}

Segmentation initial_label_map(const SeedSet& seeds, const SphereGrid& grid) {
    require(seeds.size() >= 1, "initial_label_map: empty seed set");
    Segmentation labels(grid.shape());
    const auto& pts = seeds.points;
    parallel_for(grid.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const SpherePoint& X = grid[i];
            double best = std::numeric_limits<double>::infinity();
            int best_index = 0;
            for (std::size_t s = 0; s < pts.size(); ++s) {
                const double d = squared_chord_distance(X, pts[s]);
                if (d < best) {
                    best = d;
                    best_index = static_cast<int>(s);
                }
            }
            labels[i] = best_index;
        }
    });
    return labels;
}

std::vector<double> initial_superpixel_features(std::span<const double> features, int dims,
                                                const Segmentation& labels, int k) {
    require(dims >= 1, "initial_superpixel_features: dims must be >= 1");
    require(features.size() == labels.size() * static_cast<std::size_t>(dims),
            "initial_superpixel_features: feature count does not match label map");
    std::vector<double> sums(static_cast<std::size_t>(k) * dims, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const int label = labels[p];
        require(label >= 0 && label < k, "initial_superpixel_features: label out of range");
        ++counts[static_cast<std::size_t>(label)];
        double* dst = sums.data() + static_cast<std::size_t>(label) * dims;
        const double* src = features.data() + p * dims;
        for (int d = 0; d < dims; ++d) {
            dst[d] += src[d];
        }
    }
    for (int c = 0; c < k; ++c) {
        if (counts[static_cast<std::size_t>(c)] == 0) {
            throw InvalidInput("initial_superpixel_features: superpixel " + std::to_string(c) +
                               " has no pixels");
        }
        const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        for (int d = 0; d < dims; ++d) {
            sums[static_cast<std::size_t>(c) * dims + d] *= inv;
        }
    }
    return sums;
}

std::vector<SpherePoint> label_barycenters(const Segmentation& labels, const SphereGrid& grid,
                                           int k, std::span<const SpherePoint> fallback) {
    require_same_shape(labels.shape(), grid.shape(), "label_barycenters");
    std::vector<SpherePoint> sums(static_cast<std::size_t>(k), SpherePoint{0.0, 0.0, 0.0});
    for (std::size_t p = 0; p < labels.size(); ++p) {
        auto& s = sums[static_cast<std::size_t>(labels[p])];
        s.x += grid[p].x;
        s.y += grid[p].y;
        s.z += grid[p].z;
    }
    for (int c = 0; c < k; ++c) {
        auto& s = sums[static_cast<std::size_t>(c)];
        if (s.norm() > 0.0) {
            s = s.normalized();
        } else if (static_cast<std::size_t>(c) < fallback.size()) {
            s = fallback[static_cast<std::size_t>(c)];
        } else {
            throw InvalidInput("label_barycenters: superpixel " + std::to_string(c) +
                               " has no defined barycenter");
        }
    }
    return sums;
}

NeighborTable::NeighborTable(std::span<const SpherePoint> barycenters)
    : count_(static_cast<int>(barycenters.size())),
      width_(std::min(kNeighborhoodSize, static_cast<int>(barycenters.size()))) {
    require(count_ >= 1, "build_neighbor_table: no superpixels");
    entries_.resize(static_cast<std::size_t>(count_) * width_);
    parallel_for(static_cast<std::size_t>(count_), [&](std::size_t begin, std::size_t end) {
        std::vector<std::pair<double, int>> ranked(static_cast<std::size_t>(count_));
        for (std::size_t a = begin; a < end; ++a) {
            for (int b = 0; b < count_; ++b) {
                const double d = (static_cast<std::size_t>(b) == a)
                                     ? -1.0
                                     : squared_chord_distance(barycenters[a], barycenters[b]);
                ranked[static_cast<std::size_t>(b)] = {d, b};
            }
            std::partial_sort(ranked.begin(), ranked.begin() + width_, ranked.end());
            for (int n = 0; n < width_; ++n) {
                entries_[a * width_ + n] = ranked[static_cast<std::size_t>(n)].second;
            }
        }
    });
}

ClusterInit make_cluster_init(const SeedSet& seeds, const SphereGrid& grid) {
    ClusterInit init;
    const int k = seeds.size();
    init.initial_labels = initial_label_map(seeds, grid);
    init.barycenters = label_barycenters(init.initial_labels, grid, k, seeds.points);
    init.neighbors = NeighborTable(init.barycenters);
    init.pixel_counts.assign(static_cast<std::size_t>(k), 0);
    for (std::size_t p = 0; p < init.initial_labels.size(); ++p) {
        ++init.pixel_counts[static_cast<std::size_t>(init.initial_labels[p])];
    }
    return init;
}

}  // namespace sphsp

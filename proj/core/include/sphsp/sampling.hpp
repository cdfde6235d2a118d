#pragma once

#include "sphsp/geometry.hpp"
#include "sphsp/image.hpp"

#include <array>
#include <span>
#include <vector>

namespace sphsp {

/// Size of the candidate neighbourhood (self included).
inline constexpr int kNeighborhoodSize = 9;

/// Deterministic seed points on the unit sphere, z strictly decreasing.
struct SeedSet {
    std::vector<SpherePoint> points;
    int size() const { return static_cast<int>(points.size()); }
};

/// Base-2 radical inverse (bit reversal of t read as a binary fraction).
double radical_inverse_base2(std::uint32_t t);

/// Hammersley points lifted to the sphere with the cylindrical equal-area map:
/// z = 1 - 2 (t + 0.5) / k, theta = 2 pi radical_inverse(t).
SeedSet hammersley_sphere(int k);

/// Rotates every seed about the polar axis; used to follow a horizontal roll
/// of `shift` columns on a grid of width `width`.
SeedSet rotate_seeds(const SeedSet& seeds, int shift, int width);

/// Nearest seed (chord distance, lowest index on ties) for every pixel.
Segmentation initial_label_map(const SeedSet& seeds, const SphereGrid& grid);

/// Per-label mean of row-major per-pixel features (`dims` values per pixel).
/// Throws InvalidInput naming the first empty label.
std::vector<double> initial_superpixel_features(std::span<const double> features, int dims,
                                                const Segmentation& labels, int k);

/// Renormalised mean pixel position per label; a label with no pixels (or a
/// zero mean) gets `fallback[label]` when provided, else throws.
std::vector<SpherePoint> label_barycenters(const Segmentation& labels, const SphereGrid& grid,
                                           int k,
                                           std::span<const SpherePoint> fallback = {});

/// For each superpixel, the min(9, K) nearest barycenters by chord distance,
/// sorted ascending with index tie-break. Self is always first.
class NeighborTable {
public:
    NeighborTable() = default;
    explicit NeighborTable(std::span<const SpherePoint> barycenters);

    int superpixel_count() const { return count_; }
    int width() const { return width_; }
    std::span<const int> neighbors(int superpixel) const {
        return {entries_.data() + static_cast<std::size_t>(superpixel) * width_,
                static_cast<std::size_t>(width_)};
    }

private:
    int count_ = 0;
    int width_ = 0;
    std::vector<int> entries_;
};

inline NeighborTable build_neighbor_table(std::span<const SpherePoint> barycenters) {
    return NeighborTable(barycenters);
}

/// Everything that depends only on the grid and the seeds: the initial label
/// map, its barycenters and the fixed neighbour table. Reusable across images
/// of the same shape.
struct ClusterInit {
    Segmentation initial_labels;
    std::vector<SpherePoint> barycenters;
    NeighborTable neighbors;
    std::vector<int> pixel_counts;

    int superpixel_count() const { return neighbors.superpixel_count(); }
    std::span<const int> candidates(std::size_t pixel) const {
        return neighbors.neighbors(initial_labels[pixel]);
    }
};

ClusterInit make_cluster_init(const SeedSet& seeds, const SphereGrid& grid);

}  // namespace sphsp

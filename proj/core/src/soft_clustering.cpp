#include "sphsp/soft_clustering.hpp"

#include "sphsp/error.hpp"
#include "sphsp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sphsp {

int SoftAssignment::argmax_slot(std::size_t p) const {
    const auto w = weights(p);
    const auto c = candidates(p);
    int best = 0;
    for (int a = 1; a < width_; ++a) {
        if (w[a] > w[best] || (w[a] == w[best] && c[a] < c[best])) {
            best = a;
        }
    }
    return best;
}

double SoftAssignment::max_row_error() const {
    double worst = 0.0;
    for (std::size_t p = 0; p < pixel_count(); ++p) {
        double s = 0.0;
        for (double v : weights(p)) {
            s += v;
        }
        worst = std::max(worst, std::abs(s - 1.0));
    }
    return worst;
}

SoftAssignment soft_assign(const FeatureStack& stack, const ClusterInit& init,
                           std::span<const double> centroids, double temperature,
                           double spatial_weight) {
    require(temperature > 0.0, "soft_assign: temperature must be positive");
    require_same_shape(stack.shape(), init.initial_labels.shape(), "soft_assign");
    const int dims = stack.dims();
    const int k = init.superpixel_count();
    require(centroids.size() == static_cast<std::size_t>(k) * dims,
            "soft_assign: centroid array has wrong size");
    const auto weights = channel_weights(dims, spatial_weight);
    const int width = init.neighbors.width();
    SoftAssignment soft(stack.shape(), width, k);
    parallel_for(stack.pixel_count(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> dist(static_cast<std::size_t>(width));
        for (std::size_t p = begin; p < end; ++p) {
            const auto cand = init.candidates(p);
            auto out_c = soft.candidates(p);
            auto out_w = soft.weights(p);
            const double* f = stack.pixel(p).data();
            double dmin = std::numeric_limits<double>::infinity();
            for (int a = 0; a < width; ++a) {
                out_c[a] = cand[a];
                dist[a] = weighted_sq_distance(f, centroids.data() + static_cast<std::size_t>(cand[a]) * dims,
                                               weights.data(), dims);
                dmin = std::min(dmin, dist[a]);
            }
            double z = 0.0;
            for (int a = 0; a < width; ++a) {
                out_w[a] = std::exp(-(dist[a] - dmin) / temperature);
                z += out_w[a];
            }
            for (int a = 0; a < width; ++a) {
                out_w[a] /= z;
            }
        }
    });
    return soft;
}

SoftAssignment soft_assign(const FeatureStack& stack, const SuperpixelState& state,
                           double temperature, double spatial_weight) {
    return soft_assign(stack, state.init, state.centroids, temperature, spatial_weight);
}

std::vector<double> column_mass(const SoftAssignment& soft) {
    std::vector<double> mass(static_cast<std::size_t>(soft.superpixel_count()), 0.0);
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        const auto c = soft.candidates(p);
        const auto w = soft.weights(p);
        for (int a = 0; a < soft.width(); ++a) {
            mass[static_cast<std::size_t>(c[a])] += w[a];
        }
    }
    return mass;
}

CentroidUpdate soft_update(const FeatureStack& stack, const SoftAssignment& soft, int k,
                           std::span<const double> previous_centroids,
                           std::span<const SpherePoint> previous_barycenters) {
    require_same_shape(stack.shape(), soft.shape(), "soft_update");
    const int dims = stack.dims();
    require(previous_centroids.size() == static_cast<std::size_t>(k) * dims,
            "soft_update: previous centroids have wrong size");
    require(previous_barycenters.size() == static_cast<std::size_t>(k),
            "soft_update: previous barycenters have wrong size");
    CentroidUpdate out;
    out.centroids.assign(static_cast<std::size_t>(k) * dims, 0.0);
    std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        const auto c = soft.candidates(p);
        const auto w = soft.weights(p);
        const auto f = stack.pixel(p);
        for (int a = 0; a < soft.width(); ++a) {
            const auto label = static_cast<std::size_t>(c[a]);
            mass[label] += w[a];
            double* dst = out.centroids.data() + label * dims;
            for (int d = 0; d < dims; ++d) {
                dst[d] += w[a] * f[d];
            }
        }
    }
    out.barycenters.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const auto ci = static_cast<std::size_t>(c);
        double* dst = out.centroids.data() + ci * dims;
        if (mass[ci] <= 0.0) {
            std::copy_n(previous_centroids.data() + ci * dims, dims, dst);
            out.barycenters[ci] = previous_barycenters[ci];
            continue;
        }
        const double inv = 1.0 / mass[ci];
        for (int d = 0; d < dims; ++d) {
            dst[d] *= inv;
        }
        const SpherePoint mean{dst[kPositionOffset], dst[kPositionOffset + 1], dst[kPositionOffset + 2]};
        out.barycenters[ci] = mean.norm() > 0.0 ? mean.normalized() : previous_barycenters[ci];
    }
    return out;
}

SoftClusterResult soft_cluster(const FeatureStack& stack, ClusterInit init,
                               const SoftClusterOptions& options) {
    require(options.iterations >= 1, "soft_cluster: iterations must be >= 1");
    SoftClusterResult result;
    result.state = initialize_state(stack, std::move(init));
    SuperpixelState& state = result.state;
    const int k = state.superpixel_count();
    for (int t = 0; t < options.iterations; ++t) {
        result.soft = soft_assign(stack, state, options.temperature, options.spatial_weight);
        auto update = soft_update(stack, result.soft, k, state.centroids, state.barycenters);
        state.centroids = std::move(update.centroids);
        state.barycenters = std::move(update.barycenters);
        ++state.iterations;
    }
    state.labels = hard_from_soft(result.soft);
    return result;
}

SoftClusterResult soft_cluster(const FeatureStack& stack, const SeedSet& seeds,
                               const SoftClusterOptions& options) {
    return soft_cluster(stack, make_cluster_init(seeds, SphereGrid(stack.shape())), options);
}

}  // namespace sphsp

#include "sphsp/clustering.hpp"

#include "sphsp/error.hpp"
#include "sphsp/parallel.hpp"

#include <algorithm>
#include <limits>

namespace sphsp {

SuperpixelState initialize_state(const FeatureStack& stack, ClusterInit init) {
    require_same_shape(stack.shape(), init.initial_labels.shape(), "initialize_state");
    require(stack.dims() >= kBaseChannels, "initialize_state: feature stack lacks position channels");
    SuperpixelState state;
    const int k = init.superpixel_count();
    state.dims = stack.dims();
    state.centroids = initial_superpixel_features(stack.values(), stack.dims(), init.initial_labels, k);
    state.barycenters = init.barycenters;
    state.labels = init.initial_labels;
    state.init = std::move(init);
    return state;
}

SuperpixelState initialize_state(const FeatureStack& stack, const SeedSet& seeds) {
    return initialize_state(stack, make_cluster_init(seeds, SphereGrid(stack.shape())));
}

Segmentation assign_hard(const FeatureStack& stack, const SuperpixelState& state,
                         double spatial_weight) {
    require_same_shape(stack.shape(), state.labels.shape(), "assign_hard");
    require(stack.dims() == state.dims, "assign_hard: feature width does not match centroids");
    const auto weights = channel_weights(stack.dims(), spatial_weight);
    const int dims = stack.dims();
    Segmentation out(stack.shape());
    parallel_for(stack.pixel_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const double* f = stack.pixel(p).data();
            double best = std::numeric_limits<double>::infinity();
            int best_label = -1;
            for (int c : state.init.candidates(p)) {
                const double d = weighted_sq_distance(f, state.centroid(c).data(), weights.data(), dims);
                if (d < best || (d == best && c < best_label)) {
                    best = d;
                    best_label = c;
                }
            }
            out[p] = best_label;
        }
    });
    return out;
}

CentroidUpdate update_centroids(const FeatureStack& stack, const Segmentation& labels, int k,
                                std::span<const double> previous_centroids,
                                std::span<const SpherePoint> previous_barycenters) {
    require_same_shape(stack.shape(), labels.shape(), "update_centroids");
    const int dims = stack.dims();
    require(previous_centroids.size() == static_cast<std::size_t>(k) * dims,
            "update_centroids: previous centroids have wrong size");
    require(previous_barycenters.size() == static_cast<std::size_t>(k),
            "update_centroids: previous barycenters have wrong size");
    CentroidUpdate out;
    out.centroids.assign(static_cast<std::size_t>(k) * dims, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        const int label = labels[p];
        require(label >= 0 && label < k, "update_centroids: label out of range");
        ++counts[static_cast<std::size_t>(label)];
        double* dst = out.centroids.data() + static_cast<std::size_t>(label) * dims;
        const auto src = stack.pixel(p);
        for (int d = 0; d < dims; ++d) {
            dst[d] += src[d];
        }
    }
    out.barycenters.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        double* dst = out.centroids.data() + static_cast<std::size_t>(c) * dims;
        const std::size_t n = counts[static_cast<std::size_t>(c)];
        if (n == 0) {
            std::copy_n(previous_centroids.data() + static_cast<std::size_t>(c) * dims, dims, dst);
            out.barycenters[static_cast<std::size_t>(c)] = previous_barycenters[static_cast<std::size_t>(c)];
            continue;
        }
        const double inv = 1.0 / static_cast<double>(n);
        for (int d = 0; d < dims; ++d) {
            dst[d] *= inv;
        }
        const SpherePoint mean{dst[kPositionOffset], dst[kPositionOffset + 1], dst[kPositionOffset + 2]};
        out.barycenters[static_cast<std::size_t>(c)] =
            mean.norm() > 0.0 ? mean.normalized() : previous_barycenters[static_cast<std::size_t>(c)];
    }
    return out;
}

double clustering_objective(const FeatureStack& stack, const SuperpixelState& state,
                            double spatial_weight) {
    const auto weights = channel_weights(stack.dims(), spatial_weight);
    double total = 0.0;
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        total += weighted_sq_distance(stack.pixel(p).data(), state.centroid(state.labels[p]).data(),
                                      weights.data(), stack.dims());
    }
    return total;
}

SuperpixelState cluster_hard(const FeatureStack& stack, ClusterInit init,
                             const HardClusterOptions& options, std::vector<double>* objective_trace) {
    require(options.iterations >= 1, "cluster_hard: iterations must be >= 1");
    require(options.spatial_weight >= 0.0, "cluster_hard: spatial weight must be >= 0");
    SuperpixelState state = initialize_state(stack, std::move(init));
    const int k = state.superpixel_count();
    for (int t = 0; t < options.iterations; ++t) {
        state.labels = assign_hard(stack, state, options.spatial_weight);
        auto update = update_centroids(stack, state.labels, k, state.centroids, state.barycenters);
        state.centroids = std::move(update.centroids);
        state.barycenters = std::move(update.barycenters);
        ++state.iterations;
        if (objective_trace != nullptr) {
            objective_trace->push_back(clustering_objective(stack, state, options.spatial_weight));
        }
    }
    return state;
}

SuperpixelState cluster_hard(const FeatureStack& stack, const SeedSet& seeds,
                             const HardClusterOptions& options, std::vector<double>* objective_trace) {
    return cluster_hard(stack, make_cluster_init(seeds, SphereGrid(stack.shape())), options,
                        objective_trace);
}

Segmentation hard_from_soft(const SoftAssignment& soft) {
    Segmentation out(soft.shape());
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        out[p] = soft.candidates(p)[static_cast<std::size_t>(soft.argmax_slot(p))];
    }
    return out;
}

int default_min_segment_size(const GridShape& shape, int k) {
    return std::max(1, static_cast<int>(shape.pixel_count() / (4 * static_cast<std::size_t>(std::max(1, k)))));
}

}  // namespace sphsp

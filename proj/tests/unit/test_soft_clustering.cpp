#include <sphsp/clustering.hpp>
#include <sphsp/pipeline.hpp>
#include <sphsp/soft_clustering.hpp>
#include <sphsp/synthetic.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace sphsp;

namespace {

FeatureStack sample_stack(int h, int w, std::uint64_t seed) {
    SynthOptions o;
    o.height = h;
    o.width = w;
    o.seed = seed;
    const EquirectImage rgb = make_band_image(o, 0).rgb;
    return compute_features(rgb, SphereGrid(rgb.shape()));
}

double row_entropy(const SoftAssignment& s, std::size_t p) {
    double e = 0.0;
    for (double w : s.weights(p)) {
        if (w > 0) {
            e -= w * std::log(w);
        }
    }
    return e;
}

}  // namespace

TEST(SoftAssign, MatchesExtendedPrecisionSoftmax) {
    const FeatureStack stack = sample_stack(4, 8, 1);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(4));
    const SoftAssignment s = soft_assign(stack, state, 1.0, 10.0);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        std::vector<long double> e;
        long double z = 0;
        for (int c : s.candidates(p)) {
            long double d = 0;
            for (int k = 0; k < stack.dims(); ++k) {
                const long double diff = static_cast<long double>(stack.pixel(p)[static_cast<std::size_t>(k)]) -
                                         state.centroid(c)[static_cast<std::size_t>(k)];
                d += (k >= 3 && k < 6 ? 10.0L : 1.0L) * diff * diff;
            }
            e.push_back(std::exp(-d));
            z += e.back();
        }
        for (std::size_t j = 0; j < e.size(); ++j) {
            EXPECT_NEAR(s.weights(p)[j], static_cast<double>(e[j] / z), 1e-12);
        }
    }
}

TEST(SoftAssign, RowsAreStochastic) {
    const FeatureStack stack = sample_stack(16, 32, 2);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(20));
    for (double tau : {1e-4, 0.1, 1.0, 100.0}) {
        const SoftAssignment s = soft_assign(stack, state, tau, 10.0);
        EXPECT_LE(s.max_row_error(), 1e-12);
        for (std::size_t p = 0; p < s.pixel_count(); ++p) {
            for (double w : s.weights(p)) {
                EXPECT_GE(w, 0.0);
                EXPECT_TRUE(std::isfinite(w));
            }
        }
    }
}

TEST(SoftAssign, EntropyGrowsWithTemperature) {
    const FeatureStack stack = sample_stack(8, 16, 3);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(12));
    const SoftAssignment a = soft_assign(stack, state, 0.05, 10.0);
    const SoftAssignment b = soft_assign(stack, state, 0.1, 10.0);
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        EXPECT_GT(row_entropy(b, p), row_entropy(a, p));
    }
}

TEST(SoftAssign, ArgmaxAgreesWithHardAssignment) {
    const FeatureStack stack = sample_stack(16, 32, 4);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(15));
    const Segmentation hard = assign_hard(stack, state, 10.0);
    const Segmentation soft = hard_from_soft(soft_assign(stack, state, 0.5, 10.0));
    EXPECT_EQ(hard, soft);
}

TEST(SoftAssign, ArgmaxTieGoesToTheLowestSuperpixel) {
    SoftAssignment s(GridShape(2, 2), 3, 10);
    for (std::size_t p = 0; p < 4; ++p) {
        s.candidates(p)[0] = 7;
        s.candidates(p)[1] = 2;
        s.candidates(p)[2] = 5;
        s.weights(p)[0] = 0.4;
        s.weights(p)[1] = 0.4;
        s.weights(p)[2] = 0.2;
    }
    EXPECT_EQ(s.argmax_slot(0), 1);
    EXPECT_EQ(hard_from_soft(s)[0], 2);
}

TEST(SoftUpdate, WeightedMeans) {
    const FeatureStack stack = sample_stack(8, 16, 5);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(6));
    const SoftAssignment s = soft_assign(stack, state, 1.0, 10.0);
    const CentroidUpdate u = soft_update(stack, s, 6, state.centroids, state.barycenters);
    const int dims = stack.dims();
    std::vector<double> num(static_cast<std::size_t>(6 * dims), 0.0), mass(6, 0.0);
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        for (int j = 0; j < s.width(); ++j) {
            const int c = s.candidates(p)[static_cast<std::size_t>(j)];
            const double w = s.weights(p)[static_cast<std::size_t>(j)];
            mass[static_cast<std::size_t>(c)] += w;
            for (int d = 0; d < dims; ++d) {
                num[static_cast<std::size_t>(c * dims + d)] += w * stack.pixel(p)[static_cast<std::size_t>(d)];
            }
        }
    }
    const auto colmass = column_mass(s);
    for (int c = 0; c < 6; ++c) {
        EXPECT_NEAR(colmass[static_cast<std::size_t>(c)], mass[static_cast<std::size_t>(c)], 1e-10);
        for (int d = 0; d < dims; ++d) {
            EXPECT_NEAR(u.centroids[static_cast<std::size_t>(c * dims + d)],
                        num[static_cast<std::size_t>(c * dims + d)] / mass[static_cast<std::size_t>(c)], 1e-12);
        }
        EXPECT_NEAR(u.barycenters[static_cast<std::size_t>(c)].norm(), 1.0, 1e-12);
    }
}

TEST(SoftCluster, OneRoundIsTheInitialAssignment) {
    const FeatureStack stack = sample_stack(8, 16, 6);
    const SeedSet seeds = hammersley_sphere(8);
    const SuperpixelState state = initialize_state(stack, seeds);
    SoftClusterOptions o;
    o.iterations = 1;
    const SoftClusterResult r = soft_cluster(stack, seeds, o);
    const SoftAssignment direct = soft_assign(stack, state, o.temperature, o.spatial_weight);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        for (int j = 0; j < direct.width(); ++j) {
            EXPECT_EQ(r.soft.weights(p)[static_cast<std::size_t>(j)], direct.weights(p)[static_cast<std::size_t>(j)]);
        }
    }
}

TEST(SoftCluster, SharpTemperatureReproducesHardClustering) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const FeatureStack stack = sample_stack(32, 64, 20 + seed);
        const SeedSet seeds = hammersley_sphere(24);
        SoftClusterOptions so;
        so.temperature = 1e-6;
        HardClusterOptions ho;
        ho.iterations = so.iterations;
        EXPECT_EQ(hard_from_soft(soft_cluster(stack, seeds, so).soft), cluster_hard(stack, seeds, ho).labels);
    }
}

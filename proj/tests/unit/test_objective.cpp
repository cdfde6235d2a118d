#include <sphsp/error.hpp>
#include <sphsp/objective.hpp>
#include <sphsp/pipeline.hpp>
#include <sphsp/synthetic.hpp>
#include <sphsp/trainer.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace sphsp;

namespace {

// Random row-stochastic assignment with distinct candidates.
SoftAssignment random_soft(const GridShape& shape, int k, int width, std::uint64_t seed) {
    SoftAssignment s(shape, width, k);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        std::vector<int> ids(static_cast<std::size_t>(k));
        std::iota(ids.begin(), ids.end(), 0);
        std::shuffle(ids.begin(), ids.end(), rng);
        double z = 0.0;
        for (int j = 0; j < width; ++j) {
            s.candidates(p)[static_cast<std::size_t>(j)] = ids[static_cast<std::size_t>(j)];
            s.weights(p)[static_cast<std::size_t>(j)] = u(rng);
            z += s.weights(p)[static_cast<std::size_t>(j)];
        }
        for (double& w : s.weights(p)) {
            w /= z;
        }
    }
    return s;
}

double brute_seg(const SoftAssignment& s, const Segmentation& gt, int classes) {
    const int k = s.superpixel_count();
    std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
    std::vector<double> pooled(static_cast<std::size_t>(k * classes), 0.0);
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        for (int j = 0; j < s.width(); ++j) {
            const int c = s.candidates(p)[static_cast<std::size_t>(j)];
            mass[static_cast<std::size_t>(c)] += s.weights(p)[static_cast<std::size_t>(j)];
            pooled[static_cast<std::size_t>(c * classes + gt[p])] += s.weights(p)[static_cast<std::size_t>(j)];
        }
    }
    double loss = 0.0;
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        double y = 0.0;
        for (int j = 0; j < s.width(); ++j) {
            const int c = s.candidates(p)[static_cast<std::size_t>(j)];
            if (mass[static_cast<std::size_t>(c)] > 0) {
                y += s.weights(p)[static_cast<std::size_t>(j)] * pooled[static_cast<std::size_t>(c * classes + gt[p])] /
                     mass[static_cast<std::size_t>(c)];
            }
        }
        loss -= std::log(y + 1e-12);
    }
    return loss / static_cast<double>(s.pixel_count());
}

double brute_compact(const SoftAssignment& s, const SphereGrid& grid) {
    const int k = s.superpixel_count();
    std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
    std::vector<SpherePoint> pos(static_cast<std::size_t>(k), {0, 0, 0});
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        for (int j = 0; j < s.width(); ++j) {
            const int c = s.candidates(p)[static_cast<std::size_t>(j)];
            const double w = s.weights(p)[static_cast<std::size_t>(j)];
            mass[static_cast<std::size_t>(c)] += w;
            pos[static_cast<std::size_t>(c)].x += w * grid[p].x;
            pos[static_cast<std::size_t>(c)].y += w * grid[p].y;
            pos[static_cast<std::size_t>(c)].z += w * grid[p].z;
        }
    }
    double loss = 0.0;
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        int best = 0;
        for (int j = 1; j < s.width(); ++j) {
            if (s.weights(p)[static_cast<std::size_t>(j)] > s.weights(p)[static_cast<std::size_t>(best)]) {
                best = j;
            }
        }
        const std::size_t c = static_cast<std::size_t>(s.candidates(p)[static_cast<std::size_t>(best)]);
        const double dx = grid[p].x - pos[c].x / mass[c];
        const double dy = grid[p].y - pos[c].y / mass[c];
        const double dz = grid[p].z - pos[c].z / mass[c];
        loss += dx * dx + dy * dy + dz * dz;
    }
    return loss / static_cast<double>(s.pixel_count());
}

}  // namespace

TEST(Loss, SegMatchesBruteForce) {
    const GridShape shape(4, 8);
    std::mt19937_64 rng(3);
    Segmentation gt(shape);
    for (std::size_t i = 0; i < gt.size(); ++i) {
        gt[i] = static_cast<Segmentation::Label>(rng() % 2);
    }
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SoftAssignment s = random_soft(shape, 5, 3, seed);
        EXPECT_NEAR(loss_seg(s, gt, 2), brute_seg(s, gt, 2), 1e-12);
    }
}

TEST(Loss, CompactMatchesBruteForce) {
    const GridShape shape(4, 8);
    const SphereGrid grid(shape);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SoftAssignment s = random_soft(shape, 6, 4, seed);
        EXPECT_NEAR(loss_compact(s, grid), brute_compact(s, grid), 1e-12);
    }
}

TEST(Loss, ConstantGroundTruthCostsNothing) {
    const GridShape shape(4, 8);
    const SoftAssignment s = random_soft(shape, 5, 3, 1);
    EXPECT_LE(loss_seg(s, Segmentation(shape, 0)), 1e-10);
}

TEST(Loss, PurePartitionCostsNothing) {
    const GridShape shape(4, 8);
    SoftAssignment s(shape, 1, 4);
    Segmentation gt(shape);
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        const int c = static_cast<int>(p % 8) / 2;
        s.candidates(p)[0] = c;
        s.weights(p)[0] = 1.0;
        gt[p] = c / 2;
    }
    EXPECT_LE(loss_seg(s, gt), 1e-10);
}

TEST(Loss, SinglePixelSuperpixelsAreCompact) {
    const GridShape shape(2, 4);
    SoftAssignment s(shape, 1, 8);
    for (std::size_t p = 0; p < 8; ++p) {
        s.candidates(p)[0] = static_cast<int>(p);
        s.weights(p)[0] = 1.0;
    }
    EXPECT_NEAR(loss_compact(s, SphereGrid(shape)), 0.0, 1e-15);
}

TEST(Loss, UniformSingleSuperpixelGivesSpatialVariance) {
    const GridShape shape(4, 8);
    const SphereGrid grid(shape);
    SoftAssignment s(shape, 1, 1);
    SpherePoint mean{0, 0, 0};
    for (std::size_t p = 0; p < 32; ++p) {
        s.candidates(p)[0] = 0;
        s.weights(p)[0] = 1.0;
        mean.x += grid[p].x / 32;
        mean.y += grid[p].y / 32;
        mean.z += grid[p].z / 32;
    }
    double var = 0.0;
    for (std::size_t p = 0; p < 32; ++p) {
        var += squared_chord_distance(grid[p], mean) / 32;
    }
    EXPECT_NEAR(loss_compact(s, grid), var, 1e-12);
}

TEST(Loss, ClassOutOfRangeThrows) {
    const GridShape shape(2, 4);
    const SoftAssignment s = random_soft(shape, 3, 2, 1);
    Segmentation gt(shape, 0);
    gt[3] = 5;
    EXPECT_THROW(loss_seg(s, gt, 2), InvalidInput);
}

TEST(LossGradient, MatchesFiniteDifferencesAcrossSettings) {
    SynthOptions o;
    o.height = 8;
    o.width = 16;
    const SynthSample sample = make_band_image(o, 0);
    const SphereGrid grid(sample.rgb.shape());
    const FeatureNet net = make_feature_net({3, 2}, 3, PaddingMode::Circular, 1, 1.0);
    FeatureStack stack = compute_features(sample.rgb, grid, &net);
    const ClusterInit init = make_cluster_init(hammersley_sphere(5), grid);
    for (auto [t, tau, lambda] : {std::tuple{1, 1.0, 1.0}, std::tuple{2, 0.3, 0.0}, std::tuple{4, 2.0, 3.0}}) {
        ObjectiveOptions opts;
        opts.cluster.iterations = t;
        opts.cluster.temperature = tau;
        opts.lambda = lambda;
        const LossGradient g = loss_gradient(stack, init, sample.gt, opts);
        EXPECT_NEAR(g.report.total, loss_total(stack, init, sample.gt, opts).total, 1e-14);
        for (std::size_t i = 0; i < stack.values().size(); i += 13) {
            const double saved = stack.values()[i];
            stack.values()[i] = saved + 1e-6;
            const double up = loss_total(stack, init, sample.gt, opts).total;
            stack.values()[i] = saved - 1e-6;
            const double down = loss_total(stack, init, sample.gt, opts).total;
            stack.values()[i] = saved;
            const double fd = (up - down) / 2e-6;
            EXPECT_NEAR(g.features[i], fd, 1e-6 + 1e-4 * std::abs(fd)) << "coordinate " << i;
        }
    }
}

TEST(LossGradient, PositionsAreInertWithoutSpatialTerms) {
    SynthOptions o;
    o.height = 8;
    o.width = 16;
    const SynthSample sample = make_band_image(o, 1);
    const SphereGrid grid(sample.rgb.shape());
    const FeatureStack stack = compute_features(sample.rgb, grid);
    ObjectiveOptions opts;
    opts.lambda = 0.0;
    opts.cluster.spatial_weight = 0.0;
    const LossGradient g = loss_gradient(stack, make_cluster_init(hammersley_sphere(4), grid), sample.gt, opts);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        for (int d = 3; d < 6; ++d) {
            EXPECT_EQ(g.features[p * static_cast<std::size_t>(stack.dims()) + static_cast<std::size_t>(d)], 0.0);
        }
    }
}

TEST(Trainer, ZeroLearningRateLeavesTheLossFlat) {
    SynthOptions o;
    o.height = 16;
    o.width = 32;
    const auto data = make_band_dataset(o, 2);
    TrainOptions t;
    t.steps = 4;
    t.learning_rate = 0.0;
    t.superpixels = 8;
    const TrainResult r = train_toy(data, make_feature_net({3, 2}, 3, PaddingMode::Circular, 1), t);
    ASSERT_EQ(r.trace.size(), 4u);
    EXPECT_EQ(r.trace[0].total, r.trace[2].total);
    EXPECT_EQ(r.trace[1].total, r.trace[3].total);
}

// Identical learned features give zero feature-minus-centroid differences in
// those channels, so a zero-initialised output layer receives no gradient.
TEST(Trainer, ZeroInitialisedLayerIsStationary) {
    SynthOptions o;
    o.height = 32;
    o.width = 64;
    const SynthSample sample = make_band_image(o, 0);
    const ClusterInit init = make_cluster_init(hammersley_sphere(20), SphereGrid(sample.rgb.shape()));
    const FeatureNet net = make_feature_net({3, 4}, 1, PaddingMode::Circular, 1, 0.0);
    const NetGradient g = net_loss_gradient(sample, net, init, {});
    for (double v : g.layers[0].weights) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Trainer, SingleLinearLayerLearns) {
    SynthOptions o;
    o.height = 32;
    o.width = 64;
    const auto data = make_band_dataset(o, 4);
    TrainOptions t;
    t.steps = 200;
    t.learning_rate = 1.0;
    t.superpixels = 20;
    const FeatureNet net = make_feature_net({3, 4}, 1, PaddingMode::Circular, 1, 0.1);
    const TrainResult r = train_toy(data, net, t);
    const ClusterInit init = make_cluster_init(hammersley_sphere(20), SphereGrid(data[0].rgb.shape()));
    double before = 0.0, after = 0.0;
    for (const auto& s : data) {
        before += net_loss(s, net, init, t.objective).total;
        after += net_loss(s, r.net, init, t.objective).total;
    }
    EXPECT_LT(after, before);
}

TEST(Trainer, DivergenceIsReported) {
    SynthOptions o;
    o.height = 16;
    o.width = 32;
    const auto data = make_band_dataset(o, 2);
    TrainOptions t;
    t.steps = 50;
    t.learning_rate = 1e200;
    t.superpixels = 8;
    EXPECT_THROW(train_toy(data, make_feature_net({3, 4}, 3, PaddingMode::Circular, 1, 1.0), t), NumericalFailure);
}

#include <sphsp/clustering.hpp>
#include <sphsp/error.hpp>
#include <sphsp/pipeline.hpp>
#include <sphsp/synthetic.hpp>

#include <gtest/gtest.h>

#include <queue>
#include <random>

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

int max_components_per_label(const Segmentation& s) {
    const int w = s.width();
    const int h = s.height();
    std::vector<char> seen(s.size(), 0);
    std::vector<int> count(static_cast<std::size_t>(s.label_bound()), 0);
    for (std::size_t start = 0; start < s.size(); ++start) {
        if (seen[start]) {
            continue;
        }
        ++count[static_cast<std::size_t>(s[start])];
        std::queue<std::size_t> q;
        q.push(start);
        seen[start] = 1;
        while (!q.empty()) {
            const std::size_t p = q.front();
            q.pop();
            const int c = static_cast<int>(p % w);
            const int r = static_cast<int>(p / w);
            const int nb[4][2] = {{(c + 1) % w, r}, {(c + w - 1) % w, r}, {c, r - 1}, {c, r + 1}};
            for (const auto& n : nb) {
                if (n[1] < 0 || n[1] >= h) {
                    continue;
                }
                const std::size_t q2 = static_cast<std::size_t>(n[1] * w + n[0]);
                if (!seen[q2] && s[q2] == s[start]) {
                    seen[q2] = 1;
                    q.push(q2);
                }
            }
        }
    }
    return *std::max_element(count.begin(), count.end());
}

}  // namespace

TEST(Clustering, AssignHardPicksTheNearestCandidate) {
    const FeatureStack stack = sample_stack(16, 32, 1);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(12));
    const double m = 10.0;
    const Segmentation labels = assign_hard(stack, state, m);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        int best = -1;
        double bd = 0.0;
        for (int c : state.init.candidates(p)) {
            double d = 0.0;
            for (int k = 0; k < stack.dims(); ++k) {
                const double diff = stack.pixel(p)[static_cast<std::size_t>(k)] -
                                    state.centroid(c)[static_cast<std::size_t>(k)];
                d += (k >= kPositionOffset && k < kPositionOffset + 3 ? m : 1.0) * diff * diff;
            }
            if (best < 0 || d < bd || (d == bd && c < best)) {
                best = c;
                bd = d;
            }
        }
        EXPECT_EQ(labels[p], best);
    }
}

TEST(Clustering, InitialCentroidsAreMeansOfTheInitialMap) {
    const FeatureStack stack = sample_stack(8, 16, 2);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(5));
    for (int k = 0; k < 5; ++k) {
        std::vector<double> sum(static_cast<std::size_t>(stack.dims()), 0.0);
        int n = 0;
        for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
            if (state.init.initial_labels[p] == k) {
                ++n;
                for (int d = 0; d < stack.dims(); ++d) {
                    sum[static_cast<std::size_t>(d)] += stack.pixel(p)[static_cast<std::size_t>(d)];
                }
            }
        }
        for (int d = 0; d < stack.dims(); ++d) {
            EXPECT_NEAR(state.centroid(k)[static_cast<std::size_t>(d)], sum[static_cast<std::size_t>(d)] / n, 1e-12);
        }
    }
}

TEST(Clustering, UpdateCarriesEmptyClusters) {
    const FeatureStack stack = sample_stack(8, 16, 3);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(4));
    Segmentation labels(stack.shape(), 0);
    for (std::size_t p = 0; p < labels.size(); p += 2) {
        labels[p] = 2;
    }
    const CentroidUpdate u = update_centroids(stack, labels, 4, state.centroids, state.barycenters);
    for (int d = 0; d < stack.dims(); ++d) {
        EXPECT_EQ(u.centroids[static_cast<std::size_t>(stack.dims() + d)], state.centroid(1)[static_cast<std::size_t>(d)]);
        EXPECT_EQ(u.centroids[static_cast<std::size_t>(3 * stack.dims() + d)], state.centroid(3)[static_cast<std::size_t>(d)]);
    }
    EXPECT_EQ(u.barycenters[1].x, state.barycenters[1].x);
    // Position channels hold the unnormalised mean, barycenters the normalised one.
    double mx = 0, my = 0, mz = 0;
    int n = 0;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        if (labels[p] == 2) {
            const SpherePoint q = stack.position(p);
            mx += q.x;
            my += q.y;
            mz += q.z;
            ++n;
        }
    }
    EXPECT_NEAR(u.centroids[static_cast<std::size_t>(2 * stack.dims() + kPositionOffset)], mx / n, 1e-9);
    const SpherePoint nb = SpherePoint{mx, my, mz}.normalized();
    EXPECT_NEAR(u.barycenters[2].z, nb.z, 1e-12);
}

TEST(Clustering, HugeSpatialWeightFollowsBarycenters) {
    const FeatureStack stack = sample_stack(16, 32, 4);
    const SuperpixelState state = initialize_state(stack, hammersley_sphere(10));
    const Segmentation labels = assign_hard(stack, state, 1e12);
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        int best = -1;
        double bd = 0.0;
        for (int c : state.init.candidates(p)) {
            const auto cen = state.centroid(c);
            const SpherePoint q = stack.position(p);
            const double d = (q.x - cen[3]) * (q.x - cen[3]) + (q.y - cen[4]) * (q.y - cen[4]) +
                             (q.z - cen[5]) * (q.z - cen[5]);
            if (best < 0 || d < bd) {
                best = c;
                bd = d;
            }
        }
        EXPECT_EQ(labels[p], best);
    }
}

TEST(Clustering, ClusterHardIsDeterministicAndInRange) {
    const FeatureStack stack = sample_stack(32, 64, 5);
    std::vector<double> trace;
    const SuperpixelState a = cluster_hard(stack, hammersley_sphere(40), {}, &trace);
    const SuperpixelState b = cluster_hard(stack, hammersley_sphere(40), {});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(trace.size(), 10u);
    EXPECT_LT(trace.back(), trace.front());
    for (std::size_t p = 0; p < a.labels.size(); ++p) {
        EXPECT_GE(a.labels[p], 0);
        EXPECT_LT(a.labels[p], 40);
    }
}

TEST(Clustering, RejectsBadOptions) {
    const FeatureStack stack = sample_stack(8, 16, 6);
    HardClusterOptions o;
    o.iterations = 0;
    EXPECT_THROW(cluster_hard(stack, hammersley_sphere(4), o), InvalidInput);
    o.iterations = 1;
    o.spatial_weight = -1.0;
    EXPECT_THROW(cluster_hard(stack, hammersley_sphere(4), o), InvalidInput);
}

TEST(Connectivity, WrapJoinsTheSeam) {
    const GridShape shape(4, 8);
    Segmentation s(shape, 0);
    for (int r = 0; r < 4; ++r) {
        s.at(0, r) = 1;
        s.at(7, r) = 1;
    }
    const Components c = connected_components(s);
    EXPECT_EQ(c.count, 2);
    EXPECT_EQ(c.ids[shape.index(0, 2)], c.ids[shape.index(7, 2)]);
}

TEST(Connectivity, SmallFragmentsMergeIntoNeighbours) {
    const GridShape shape(8, 16);
    Segmentation s(shape, 0);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 8; ++c) {
            s.at(c, r) = 1;
        }
    }
    s.at(12, 6) = 1;  // stray pixel of label 1
    s.at(10, 2) = 2;  // tiny label, below min size
    const Segmentation out = enforce_connectivity(s, 3);
    EXPECT_EQ(out.at(12, 6), 0);
    EXPECT_EQ(out.at(10, 2), 0);
    EXPECT_EQ(out.at(3, 1), 1);
    EXPECT_EQ(max_components_per_label(out), 1);
}

TEST(Connectivity, OutputIsContiguousOnRealSegmentations) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const FeatureStack stack = sample_stack(32, 64, seed);
        const SuperpixelState st = cluster_hard(stack, hammersley_sphere(30), {});
        const Segmentation out = enforce_connectivity(st.labels, default_min_segment_size(stack.shape(), 30));
        EXPECT_EQ(max_components_per_label(out), 1);
    }
}

TEST(Connectivity, DefaultMinimumSize) {
    EXPECT_EQ(default_min_segment_size(GridShape(64, 128), 32), 64 * 128 / (4 * 32));
    EXPECT_GE(default_min_segment_size(GridShape(2, 4), 1000), 1);
}

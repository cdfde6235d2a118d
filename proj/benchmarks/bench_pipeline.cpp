#include <sphsp/augment.hpp>
#include <sphsp/clustering.hpp>
#include <sphsp/metrics.hpp>
#include <sphsp/objective.hpp>
#include <sphsp/parallel.hpp>
#include <sphsp/pipeline.hpp>
#include <sphsp/synthetic.hpp>

#include <benchmark/benchmark.h>

using namespace sphsp;

namespace {

SynthSample sample(int h) {
    SynthOptions o;
    o.height = h;
    o.width = 2 * h;
    return make_band_image(o, 0);
}

}  // namespace

static void BM_InitialLabelMap(benchmark::State& state) {
    const SphereGrid grid(GridShape(static_cast<int>(state.range(0)), 2 * static_cast<int>(state.range(0))));
    const SeedSet seeds = hammersley_sphere(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(initial_label_map(seeds, grid));
    }
}
BENCHMARK(BM_InitialLabelMap)->Args({128, 100})->Args({256, 500})->Unit(benchmark::kMillisecond);

static void BM_SegmentHard(benchmark::State& state) {
    const SynthSample s = sample(static_cast<int>(state.range(0)));
    SegmentOptions o;
    o.superpixels = static_cast<int>(state.range(1));
    set_thread_count(static_cast<int>(state.range(2)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(segment_image(s.rgb, o));
    }
    set_thread_count(0);
}
BENCHMARK(BM_SegmentHard)
    ->Args({128, 100, 1})
    ->Args({512, 500, 1})
    ->Args({512, 500, 4})
    ->Unit(benchmark::kMillisecond);

static void BM_SoftCluster(benchmark::State& state) {
    const SynthSample s = sample(static_cast<int>(state.range(0)));
    const FeatureStack stack = compute_features(s.rgb, SphereGrid(s.rgb.shape()));
    const SeedSet seeds = hammersley_sphere(100);
    for (auto _ : state) {
        benchmark::DoNotOptimize(soft_cluster(stack, seeds, {}));
    }
}
BENCHMARK(BM_SoftCluster)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_LossGradient(benchmark::State& state) {
    const SynthSample s = sample(static_cast<int>(state.range(0)));
    const SphereGrid grid(s.rgb.shape());
    const FeatureStack stack = compute_features(s.rgb, grid);
    const ClusterInit init = make_cluster_init(hammersley_sphere(50), grid);
    for (auto _ : state) {
        benchmark::DoNotOptimize(loss_gradient(stack, init, s.gt, {}));
    }
}
BENCHMARK(BM_LossGradient)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_FeatureNet(benchmark::State& state) {
    const SynthSample s = sample(static_cast<int>(state.range(0)));
    const FeatureNet net = make_feature_net({3, 16, 14}, 3, PaddingMode::Circular, 1);
    const EquirectImage lab = normalized_lab(rgb_to_lab(s.rgb));
    for (auto _ : state) {
        benchmark::DoNotOptimize(feature_net_forward(lab, net));
    }
}
BENCHMARK(BM_FeatureNet)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_Metrics(benchmark::State& state) {
    const SynthSample s = sample(256);
    SegmentOptions o;
    o.superpixels = 300;
    const Segmentation labels = segment_image(s.rgb, o);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_segmentation(labels, s.gt));
    }
}
BENCHMARK(BM_Metrics)->Unit(benchmark::kMillisecond);

static void BM_PanoStretch(benchmark::State& state) {
    const SynthSample s = sample(256);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pano_stretch(s.rgb, s.gt, 1.4, 0.8));
    }
}
BENCHMARK(BM_PanoStretch)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

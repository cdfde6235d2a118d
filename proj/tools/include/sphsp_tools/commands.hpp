#pragma once

#include <sphsp/augment.hpp>
#include <sphsp/conv.hpp>
#include <sphsp/metrics.hpp>
#include <sphsp/pipeline.hpp>
#include <sphsp/synthetic.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sphsp::tools {

namespace fs = std::filesystem;

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitBadInput = 1,
    kExitNumerical = 2,
    kExitGradcheckFailed = 3,
};

/// Settings shared by segment and bench.
struct SegmentSettings {
    int superpixels = 500;
    int iterations = 10;
    double spatial_weight = 10.0;
    std::string mode = "hard";  // hard | soft
    int soft_iterations = 3;
    double temperature = 1.0;
    bool connectivity = true;
    int min_size = 0;
    std::string padding = "circular";
    fs::path net_path;
    std::optional<GridShape> resize;

    SegmentOptions to_options() const;
};

struct SegmentConfig {
    fs::path input;
    fs::path output;
    fs::path overlay;
    fs::path csv;
    SegmentSettings settings;
};

struct EvalConfig {
    fs::path labels;
    fs::path gt;
    fs::path labels_dir;
    fs::path gt_dir;
    fs::path output;
    double epsilon = 2.0;
    std::string norm = "euclidean";
};

struct AugmentConfig {
    fs::path input;
    fs::path labels;
    fs::path output_image;
    fs::path output_labels;
    fs::path spec_in;
    fs::path spec_out;
    std::uint64_t seed = 0;
};

struct GradcheckConfig {
    int height = 16;
    int width = 32;
    int superpixels = 8;
    int iterations = 3;
    double temperature = 1.0;
    double lambda = 1.0;
    double spatial_weight = 10.0;
    int samples = 100;
    double step = 1e-5;
    double tolerance = 1e-4;
    std::uint64_t seed = 7;
    fs::path output;
    /// Test hook: scales the analytic gradient so the check must fail.
    bool corrupt = false;
};

struct GradcheckReport {
    double feature_max_rel = 0.0;
    double feature_mean_rel = 0.0;
    double weight_max_rel = 0.0;
    double weight_mean_rel = 0.0;
    double position_grad_max_abs = 0.0;
    int feature_samples = 0;
    int weight_samples = 0;
    bool pass = false;
};

struct TrainConfig {
    int train_count = 20;
    int heldout_count = 5;
    SynthOptions data{};
    int steps = 200;
    double learning_rate = 2.0;
    int superpixels = 50;
    int iterations = 3;
    double temperature = 1.0;
    double lambda = 1.0;
    double spatial_weight = 10.0;
    int eval_iterations = 10;
    std::vector<int> hidden{8};
    int learned_channels = 14;
    std::string padding = "circular";
    std::uint64_t weight_seed = 1;
    fs::path output_dir;
};

struct TrainReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double asa_untrained = 0.0;
    double asa_trained = 0.0;
};

struct SynthConfig {
    int count = 1;
    SynthOptions data{};
    fs::path output_dir;
};

struct BenchConfig {
    fs::path input_dir;
    fs::path output;
    std::vector<int> k_values{200, 400, 600, 800, 1000};
    double epsilon = 2.0;
    std::string norm = "euclidean";
    SegmentSettings settings;
};

int cmd_segment(const SegmentConfig& config);
int cmd_eval(const EvalConfig& config);
int cmd_augment(const AugmentConfig& config);
int cmd_gradcheck(const GradcheckConfig& config, GradcheckReport* report = nullptr);
int cmd_train_toy(const TrainConfig& config, TrainReport* report = nullptr);
int cmd_synth(const SynthConfig& config);
int cmd_bench(const BenchConfig& config);

/// Gradient check on a seeded toy instance; does not touch the filesystem.
GradcheckReport run_gradcheck(const GradcheckConfig& config);

/// Default toy feature net: 3 Lab inputs -> hidden widths -> learned channels.
FeatureNet make_toy_net(const TrainConfig& config, std::uint64_t seed);

/// Parses "HxW" (e.g. 256x512).
GridShape parse_shape(const std::string& text);

}  // namespace sphsp::tools

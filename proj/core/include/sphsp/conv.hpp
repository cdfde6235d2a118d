#pragma once

#include "sphsp/image.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sphsp {

enum class PaddingMode {
    /// Periodic in columns, edge-replicated in rows.
    Circular,
    Zero,
};

const char* to_string(PaddingMode mode);
PaddingMode padding_from_string(const std::string& name);

/// One convolution layer (cross-correlation). Weights are laid out
/// [out][in][ky][kx], row-major.
struct ConvSpec {
    int kernel_size = 3;
    int in_channels = 1;
    int out_channels = 1;
    std::vector<double> weights;
    std::vector<double> bias;
    PaddingMode padding = PaddingMode::Circular;

    ConvSpec() = default;
    ConvSpec(int kernel, int in, int out, PaddingMode mode = PaddingMode::Circular);

    std::size_t weight_index(int o, int c, int ky, int kx) const {
        return ((static_cast<std::size_t>(o) * in_channels + c) * kernel_size + ky) * kernel_size + kx;
    }
    /// Throws unless the kernel is odd, sizes are consistent and weights finite.
    void validate() const;

    friend bool operator==(const ConvSpec&, const ConvSpec&) = default;
};

/// Output has the same shape as the input and spec.out_channels channels.
EquirectImage conv2d_padded(const EquirectImage& input, const ConvSpec& spec);

struct ConvGradients {
    std::vector<double> weights;
    std::vector<double> bias;
};

/// Reverse pass of conv2d_padded. Accumulates parameter gradients into `grads`
/// (sized on first use) and returns the gradient with respect to the input
/// when `want_input_grad` is set.
EquirectImage conv2d_backward(const EquirectImage& input, const ConvSpec& spec,
                              const EquirectImage& grad_output, ConvGradients& grads,
                              bool want_input_grad);

/// Conv layers with ReLU between consecutive layers (none after the last).
struct FeatureNet {
    std::vector<ConvSpec> layers;

    bool empty() const { return layers.empty(); }
    int in_channels() const { return layers.empty() ? 0 : layers.front().in_channels; }
    int out_channels() const { return layers.empty() ? 0 : layers.back().out_channels; }
    void validate() const;
    void set_padding(PaddingMode mode);
    std::size_t parameter_count() const;

    friend bool operator==(const FeatureNet&, const FeatureNet&) = default;
};

/// Intermediate values kept by forward() for backward().
struct FeatureNetTrace {
    std::vector<EquirectImage> inputs;  // input of each layer (post-ReLU)
    EquirectImage output;
};

EquirectImage feature_net_forward(const EquirectImage& input, const FeatureNet& net,
                                  FeatureNetTrace* trace = nullptr);

/// Parameter gradients for every layer given d(loss)/d(output).
std::vector<ConvGradients> feature_net_backward(const FeatureNet& net, const FeatureNetTrace& trace,
                                                const EquirectImage& grad_output);

/// Seeded He-normal initialisation; the final layer is scaled by
/// `last_layer_scale` (0 gives a zero-initialised output layer).
FeatureNet make_feature_net(const std::vector<int>& channels, int kernel_size, PaddingMode mode,
                            std::uint64_t seed, double last_layer_scale = 0.1);

/// JSON encoding; doubles are written with round-trip precision so a reload
/// is bit-exact.
std::string feature_net_to_json(const FeatureNet& net);
FeatureNet feature_net_from_json(const std::string& text);
void save_feature_net(const FeatureNet& net, const std::filesystem::path& path);
FeatureNet load_feature_net(const std::filesystem::path& path);

}  // namespace sphsp

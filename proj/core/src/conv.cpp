#include "sphsp/conv.hpp"

#include "sphsp/error.hpp"
#include "sphsp/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sphsp {

const char* to_string(PaddingMode mode) {
    return mode == PaddingMode::Circular ? "circular" : "zero";
}

PaddingMode padding_from_string(const std::string& name) {
    if (name == "circular") {
        return PaddingMode::Circular;
    }
    if (name == "zero") {
        return PaddingMode::Zero;
    }
    throw InvalidInput("unknown padding mode '" + name + "' (expected circular or zero)");
}

ConvSpec::ConvSpec(int kernel, int in, int out, PaddingMode mode)
    : kernel_size(kernel), in_channels(in), out_channels(out),
      weights(static_cast<std::size_t>(out) * in * kernel * kernel, 0.0),
      bias(static_cast<std::size_t>(out), 0.0), padding(mode) {
    validate();
}

void ConvSpec::validate() const {
    require(kernel_size >= 1 && kernel_size % 2 == 1,
            "ConvSpec: kernel size must be odd, got " + std::to_string(kernel_size));
    require(in_channels >= 1 && out_channels >= 1, "ConvSpec: channel counts must be >= 1");
    require(weights.size() ==
                static_cast<std::size_t>(out_channels) * in_channels * kernel_size * kernel_size,
            "ConvSpec: weight array has wrong size");
    require(bias.size() == static_cast<std::size_t>(out_channels), "ConvSpec: bias has wrong size");
    for (double v : weights) {
        require(std::isfinite(v), "ConvSpec: non-finite weight");
    }
    for (double v : bias) {
        require(std::isfinite(v), "ConvSpec: non-finite bias");
    }
}

namespace {

/// Source row for a kernel tap, or -1 when the tap falls in zero padding.
int source_row(int row, int offset, int height, PaddingMode mode) {
    const int r = row + offset;
    if (r >= 0 && r < height) {
        return r;
    }
    return mode == PaddingMode::Circular ? std::clamp(r, 0, height - 1) : -1;
}

int source_col(int col, int offset, int width, PaddingMode mode) {
    const int c = col + offset;
    if (c >= 0 && c < width) {
        return c;
    }
    if (mode == PaddingMode::Zero) {
        return -1;
    }
    const int m = c % width;
    return m < 0 ? m + width : m;
}

}  // namespace

EquirectImage conv2d_padded(const EquirectImage& input, const ConvSpec& spec) {
    spec.validate();
    require(input.channels() == spec.in_channels,
            "conv2d_padded: input has " + std::to_string(input.channels()) +
                " channels, layer expects " + std::to_string(spec.in_channels));
    const int h = input.height();
    const int w = input.width();
    const int k = spec.kernel_size;
    const int r = k / 2;
    const int cin = spec.in_channels;
    const int cout = spec.out_channels;
    EquirectImage out(input.shape(), cout);

    parallel_for(static_cast<std::size_t>(h) * w, [&](std::size_t begin, std::size_t end) {
        std::vector<double> acc(static_cast<std::size_t>(cout));
        for (std::size_t p = begin; p < end; ++p) {
            const int row = static_cast<int>(p / static_cast<std::size_t>(w));
            const int col = static_cast<int>(p % static_cast<std::size_t>(w));
            std::copy(spec.bias.begin(), spec.bias.end(), acc.begin());
            for (int ky = 0; ky < k; ++ky) {
                const int sr = source_row(row, ky - r, h, spec.padding);
                if (sr < 0) {
                    continue;
                }
                for (int kx = 0; kx < k; ++kx) {
                    const int sc = source_col(col, kx - r, w, spec.padding);
                    if (sc < 0) {
                        continue;
                    }
                    const auto src = input.pixel(input.shape().index(sc, sr));
                    for (int o = 0; o < cout; ++o) {
                        double s = 0.0;
                        for (int c = 0; c < cin; ++c) {
                            s += spec.weights[spec.weight_index(o, c, ky, kx)] * src[c];
                        }
                        acc[o] += s;
                    }
                }
            }
            auto dst = out.pixel(p);
            std::copy(acc.begin(), acc.end(), dst.begin());
        }
    });
    return out;
}

EquirectImage conv2d_backward(const EquirectImage& input, const ConvSpec& spec,
                              const EquirectImage& grad_output, ConvGradients& grads,
                              bool want_input_grad) {
    require_same_shape(input.shape(), grad_output.shape(), "conv2d_backward");
    require(grad_output.channels() == spec.out_channels, "conv2d_backward: gradient channel mismatch");
    const int h = input.height();
    const int w = input.width();
    const int k = spec.kernel_size;
    const int r = k / 2;
    const int cin = spec.in_channels;
    const int cout = spec.out_channels;
    if (grads.weights.empty()) {
        grads.weights.assign(spec.weights.size(), 0.0);
        grads.bias.assign(spec.bias.size(), 0.0);
    }
    EquirectImage grad_input;
    if (want_input_grad) {
        grad_input = EquirectImage(input.shape(), cin);
    }
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const auto g = grad_output.pixel(input.shape().index(col, row));
            for (int o = 0; o < cout; ++o) {
                grads.bias[o] += g[o];
            }
            for (int ky = 0; ky < k; ++ky) {
                const int sr = source_row(row, ky - r, h, spec.padding);
                if (sr < 0) {
                    continue;
                }
                for (int kx = 0; kx < k; ++kx) {
                    const int sc = source_col(col, kx - r, w, spec.padding);
                    if (sc < 0) {
                        continue;
                    }
                    const std::size_t si = input.shape().index(sc, sr);
                    const auto src = input.pixel(si);
                    for (int o = 0; o < cout; ++o) {
                        const double go = g[o];
                        if (go == 0.0) {
                            continue;
                        }
                        for (int c = 0; c < cin; ++c) {
                            grads.weights[spec.weight_index(o, c, ky, kx)] += go * src[c];
                        }
                        if (want_input_grad) {
                            auto gi = grad_input.pixel(si);
                            for (int c = 0; c < cin; ++c) {
                                gi[c] += go * spec.weights[spec.weight_index(o, c, ky, kx)];
                            }
                        }
                    }
                }
            }
        }
    }
    return grad_input;
}

void FeatureNet::validate() const {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        layers[l].validate();
        if (l > 0) {
            require(layers[l].in_channels == layers[l - 1].out_channels,
                    "FeatureNet: layer " + std::to_string(l) + " expects " +
                        std::to_string(layers[l].in_channels) + " inputs but previous layer has " +
                        std::to_string(layers[l - 1].out_channels) + " outputs");
        }
    }
}

void FeatureNet::set_padding(PaddingMode mode) {
    for (auto& layer : layers) {
        layer.padding = mode;
    }
}

std::size_t FeatureNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) {
        n += layer.weights.size() + layer.bias.size();
    }
    return n;
}

EquirectImage feature_net_forward(const EquirectImage& input, const FeatureNet& net,
                                  FeatureNetTrace* trace) {
    net.validate();
    require(!net.empty(), "feature_net_forward: network has no layers");
    require(input.channels() == net.in_channels(),
            "feature_net_forward: input has " + std::to_string(input.channels()) +
                " channels, network expects " + std::to_string(net.in_channels()));
    if (trace != nullptr) {
        trace->inputs.clear();
    }
    EquirectImage x = input;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (trace != nullptr) {
            trace->inputs.push_back(x);
        }
        x = conv2d_padded(x, net.layers[l]);
        if (l + 1 < net.layers.size()) {
            for (double& v : x.data()) {
                v = std::max(v, 0.0);
            }
        }
    }
    if (trace != nullptr) {
        trace->output = x;
    }
    return x;
}

std::vector<ConvGradients> feature_net_backward(const FeatureNet& net, const FeatureNetTrace& trace,
                                                const EquirectImage& grad_output) {
    require(trace.inputs.size() == net.layers.size(), "feature_net_backward: trace does not match net");
    std::vector<ConvGradients> grads(net.layers.size());
    EquirectImage g = grad_output;
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const bool need_input = l > 0;
        EquirectImage gin = conv2d_backward(trace.inputs[l], net.layers[l], g, grads[l], need_input);
        if (need_input) {
            // ReLU mask: trace.inputs[l] is the post-ReLU output of layer l - 1.
            const auto& act = trace.inputs[l].data();
            auto& gd = gin.data();
            for (std::size_t i = 0; i < gd.size(); ++i) {
                if (act[i] <= 0.0) {
                    gd[i] = 0.0;
                }
            }
            g = std::move(gin);
        }
    }
    return grads;
}

FeatureNet make_feature_net(const std::vector<int>& channels, int kernel_size, PaddingMode mode,
                            std::uint64_t seed, double last_layer_scale) {
    require(channels.size() >= 2, "make_feature_net: need at least input and output widths");
    std::mt19937_64 rng(seed);
    FeatureNet net;
    for (std::size_t l = 0; l + 1 < channels.size(); ++l) {
        ConvSpec layer(kernel_size, channels[l], channels[l + 1], mode);
        const double fan_in = static_cast<double>(channels[l]) * kernel_size * kernel_size;
        std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / fan_in));
        const double scale = (l + 2 == channels.size()) ? last_layer_scale : 1.0;
        for (double& v : layer.weights) {
            v = scale * normal(rng);
        }
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::string feature_net_to_json(const FeatureNet& net) {
    nlohmann::json j;
    j["format"] = "sphsp-feature-net";
    j["version"] = 1;
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        j["layers"].push_back({{"kernel_size", layer.kernel_size},
                               {"in_channels", layer.in_channels},
                               {"out_channels", layer.out_channels},
                               {"padding", to_string(layer.padding)},
                               {"weights", layer.weights},
                               {"bias", layer.bias}});
    }
    return j.dump(2);
}

FeatureNet feature_net_from_json(const std::string& text) {
    FeatureNet net;
    try {
        const auto j = nlohmann::json::parse(text);
        require(j.value("format", "") == "sphsp-feature-net", "feature net: unknown format tag");
        for (const auto& jl : j.at("layers")) {
            ConvSpec layer;
            layer.kernel_size = jl.at("kernel_size").get<int>();
            layer.in_channels = jl.at("in_channels").get<int>();
            layer.out_channels = jl.at("out_channels").get<int>();
            layer.padding = padding_from_string(jl.at("padding").get<std::string>());
            layer.weights = jl.at("weights").get<std::vector<double>>();
            layer.bias = jl.at("bias").get<std::vector<double>>();
            net.layers.push_back(std::move(layer));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("feature net: malformed JSON: ") + e.what());
    }
    net.validate();
    return net;
}

void save_feature_net(const FeatureNet& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    out << feature_net_to_json(net) << '\n';
}

FeatureNet load_feature_net(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return feature_net_from_json(ss.str());
}

}  // namespace sphsp

#include "sphsp/trainer.hpp"

#include "sphsp/error.hpp"
#include "sphsp/features.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sphsp {

namespace {

struct Prepared {
    EquirectImage lab;
    EquirectImage net_input;
};

Prepared prepare(const SynthSample& sample) {
    Prepared p;
    p.lab = rgb_to_lab(sample.rgb);
    p.net_input = normalized_lab(p.lab);
    return p;
}

NetGradient gradient_on(const Prepared& prepared, const Segmentation& gt, const FeatureNet& net,
                        const ClusterInit& init, const ObjectiveOptions& objective) {
    const SphereGrid grid(prepared.lab.shape());
    FeatureNetTrace trace;
    const EquirectImage learned = feature_net_forward(prepared.net_input, net, &trace);
    const FeatureStack stack = build_feature_stack(prepared.lab, grid, &learned);
    const LossGradient lg = loss_gradient(stack, init, gt, objective);

    EquirectImage g_learned(stack.shape(), learned.channels());
    const int dims = stack.dims();
    for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
        auto dst = g_learned.pixel(p);
        for (int c = 0; c < learned.channels(); ++c) {
            dst[c] = lg.features[p * dims + kBaseChannels + c];
        }
    }
    NetGradient out;
    out.report = lg.report;
    out.layers = feature_net_backward(net, trace, g_learned);
    return out;
}

}  // namespace

NetGradient net_loss_gradient(const SynthSample& sample, const FeatureNet& net, const ClusterInit& init,
                              const ObjectiveOptions& objective) {
    return gradient_on(prepare(sample), sample.gt, net, init, objective);
}

LossReport net_loss(const SynthSample& sample, const FeatureNet& net, const ClusterInit& init,
                    const ObjectiveOptions& objective) {
    const Prepared p = prepare(sample);
    const SphereGrid grid(p.lab.shape());
    const EquirectImage learned = feature_net_forward(p.net_input, net);
    return loss_total(build_feature_stack(p.lab, grid, &learned), init, sample.gt, objective);
}

TrainResult train_toy(const std::vector<SynthSample>& dataset, FeatureNet net, const TrainOptions& options,
                      const std::function<void(int, const LossReport&)>& on_step) {
    require(!dataset.empty(), "train_toy: empty dataset");
    require(options.steps >= 0, "train_toy: steps must be >= 0");
    require(options.learning_rate >= 0.0, "train_toy: learning rate must be >= 0");
    net.validate();
    require(net.in_channels() == 3, "train_toy: the feature net must take 3 Lab channels");

    std::vector<Prepared> prepared;
    prepared.reserve(dataset.size());
    std::map<std::pair<int, int>, ClusterInit> inits;
    const SeedSet seeds = hammersley_sphere(options.superpixels);
    for (const auto& sample : dataset) {
        prepared.push_back(prepare(sample));
        const auto key = std::make_pair(sample.rgb.height(), sample.rgb.width());
        if (!inits.contains(key)) {
            inits.emplace(key, make_cluster_init(seeds, SphereGrid(sample.rgb.shape())));
        }
    }

    TrainResult result;
    double last_finite = 0.0;
    for (int step = 0; step < options.steps; ++step) {
        const std::size_t i = static_cast<std::size_t>(step) % dataset.size();
        const auto& init = inits.at({dataset[i].rgb.height(), dataset[i].rgb.width()});
        NetGradient g;
        try {
            g = gradient_on(prepared[i], dataset[i].gt, net, init, options.objective);
        } catch (const NumericalFailure&) {
            g.report.total = std::numeric_limits<double>::quiet_NaN();
        }
        if (!std::isfinite(g.report.total)) {
            std::ostringstream msg;
            msg << "train_toy: loss diverged at step " << step << " (last finite loss " << last_finite << ")";
            throw NumericalFailure(msg.str());
        }
        last_finite = g.report.total;
        result.trace.push_back(g.report);
        if (on_step) {
            on_step(step, g.report);
        }
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            auto& layer = net.layers[l];
            for (std::size_t j = 0; j < layer.weights.size(); ++j) {
                layer.weights[j] -= options.learning_rate * g.layers[l].weights[j];
            }
            for (std::size_t j = 0; j < layer.bias.size(); ++j) {
                layer.bias[j] -= options.learning_rate * g.layers[l].bias[j];
            }
        }
        for (const auto& layer : net.layers) {
            for (double v : layer.weights) {
                if (!std::isfinite(v)) {
                    std::ostringstream msg;
                    msg << "train_toy: weights diverged at step " << step << " (last finite loss "
                        << last_finite << ")";
                    throw NumericalFailure(msg.str());
                }
            }
        }
    }
    result.net = std::move(net);
    return result;
}

}  // namespace sphsp

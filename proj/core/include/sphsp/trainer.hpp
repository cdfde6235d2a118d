#pragma once

#include "sphsp/conv.hpp"
#include "sphsp/objective.hpp"
#include "sphsp/synthetic.hpp"

#include <functional>
#include <vector>

namespace sphsp {

struct TrainOptions {
    int steps = 200;
    double learning_rate = 1.0;
    int superpixels = 50;
    ObjectiveOptions objective{};
};

struct TrainResult {
    FeatureNet net;
    /// Loss at the weights used in each step (before that step's update).
    std::vector<LossReport> trace;
};

/// Gradient of the total loss on one sample with respect to every net
/// parameter, in FeatureNet layer order.
struct NetGradient {
    LossReport report;
    std::vector<ConvGradients> layers;
};
NetGradient net_loss_gradient(const SynthSample& sample, const FeatureNet& net, const ClusterInit& init,
                              const ObjectiveOptions& objective);

/// Total loss of one sample under `net` (forward only).
LossReport net_loss(const SynthSample& sample, const FeatureNet& net, const ClusterInit& init,
                    const ObjectiveOptions& objective);

/// Plain gradient descent, one sample per step in round-robin order.
/// Throws NumericalFailure if the loss becomes non-finite.
TrainResult train_toy(const std::vector<SynthSample>& dataset, FeatureNet net, const TrainOptions& options,
                      const std::function<void(int, const LossReport&)>& on_step = {});

}  // namespace sphsp

#include "sphsp_tools/commands.hpp"

#include <sphsp/trainer.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

namespace sphsp::tools {

namespace {

double relative_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

std::vector<std::size_t> sample_indices(std::size_t range, int count, std::mt19937_64& rng) {
    std::vector<std::size_t> out;
    if (range == 0) {
        return out;
    }
    std::unordered_set<std::size_t> seen;
    std::uniform_int_distribution<std::size_t> pick(0, range - 1);
    const std::size_t want = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, count)), range);
    while (out.size() < want) {
        const std::size_t i = pick(rng);
        if (seen.insert(i).second) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckConfig& config) {
    SynthOptions data;
    data.height = config.height;
    data.width = config.width;
    data.nlat = 2;
    data.nlon = 3;
    data.noise = 10.0;
    data.seed = config.seed;
    const SynthSample sample = make_band_image(data, 0);
    const SphereGrid grid(sample.rgb.shape());
    const FeatureNet net = make_feature_net({3, 6, 4}, 3, PaddingMode::Circular, config.seed, 1.0);
    const ClusterInit init = make_cluster_init(hammersley_sphere(config.superpixels), grid);

    ObjectiveOptions objective;
    objective.cluster.iterations = config.iterations;
    objective.cluster.temperature = config.temperature;
    objective.cluster.spatial_weight = config.spatial_weight;
    objective.lambda = config.lambda;

    const double corrupt = config.corrupt ? 1.5 : 1.0;
    std::mt19937_64 rng(config.seed ^ 0x9E3779B97F4A7C15ull);
    GradcheckReport report;

    // Input features.
    {
        FeatureStack stack = compute_features(sample.rgb, grid, &net);
        const LossGradient analytic = loss_gradient(stack, init, sample.gt, objective);
        const auto picks = sample_indices(stack.values().size(), config.samples, rng);
        double sum = 0.0;
        for (std::size_t i : picks) {
            const double saved = stack.values()[i];
            stack.values()[i] = saved + config.step;
            const double up = loss_total(stack, init, sample.gt, objective).total;
            stack.values()[i] = saved - config.step;
            const double down = loss_total(stack, init, sample.gt, objective).total;
            stack.values()[i] = saved;
            const double numeric = (up - down) / (2.0 * config.step);
            const double rel = relative_error(corrupt * analytic.features[i], numeric);
            report.feature_max_rel = std::max(report.feature_max_rel, rel);
            sum += rel;
        }
        report.feature_samples = static_cast<int>(picks.size());
        report.feature_mean_rel = picks.empty() ? 0.0 : sum / static_cast<double>(picks.size());
    }

    // Network parameters.
    {
        const NetGradient analytic = net_loss_gradient(sample, net, init, objective);
        // Kernel weights only: a bias of the last layer shifts a whole channel,
        // which the loss cannot see, so its gradient is exactly zero.
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            for (std::size_t j = 0; j < net.layers[l].weights.size(); ++j) {
                slots.emplace_back(l, j);
            }
        }
        const auto picks = sample_indices(slots.size(), config.samples, rng);
        double sum = 0.0;
        for (std::size_t pi : picks) {
            const auto [l, j] = slots[pi];
            const double a = analytic.layers[l].weights[j];
            FeatureNet probe = net;
            probe.layers[l].weights[j] = net.layers[l].weights[j] + config.step;
            const double up = net_loss(sample, probe, init, objective).total;
            probe.layers[l].weights[j] = net.layers[l].weights[j] - config.step;
            const double down = net_loss(sample, probe, init, objective).total;
            const double rel = relative_error(corrupt * a, (up - down) / (2.0 * config.step));
            report.weight_max_rel = std::max(report.weight_max_rel, rel);
            sum += rel;
        }
        report.weight_samples = static_cast<int>(picks.size());
        report.weight_mean_rel = picks.empty() ? 0.0 : sum / static_cast<double>(picks.size());
    }

    // Positions never enter the loss when lambda = 0 and the spatial weight is 0.
    {
        ObjectiveOptions blind = objective;
        blind.lambda = 0.0;
        blind.cluster.spatial_weight = 0.0;
        const FeatureStack stack = compute_features(sample.rgb, grid, &net);
        const LossGradient g = loss_gradient(stack, init, sample.gt, blind);
        for (std::size_t p = 0; p < stack.pixel_count(); ++p) {
            for (int d = kPositionOffset; d < kPositionOffset + 3; ++d) {
                report.position_grad_max_abs = std::max(
                    report.position_grad_max_abs,
                    std::abs(corrupt * g.features[p * static_cast<std::size_t>(stack.dims()) + d]));
            }
        }
    }

    report.pass = report.feature_max_rel <= config.tolerance && report.weight_max_rel <= config.tolerance &&
                  report.position_grad_max_abs == 0.0;
    return report;
}

}  // namespace sphsp::tools

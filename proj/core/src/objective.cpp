#include "sphsp/objective.hpp"

#include "sphsp/error.hpp"

#include <cmath>
#include <string>

namespace sphsp {

namespace {

int resolve_classes(const Segmentation& gt, int classes) {
    const int bound = classes > 0 ? classes : gt.label_bound();
    for (std::size_t p = 0; p < gt.size(); ++p) {
        if (gt[p] < 0 || gt[p] >= bound) {
            throw InvalidInput("loss_seg: class index " + std::to_string(gt[p]) + " outside [0, " +
                               std::to_string(bound) + ")");
        }
    }
    return bound;
}

/// Superpixel-pooled class histogram R / S (K x classes), zero rows for
/// zero-mass superpixels.
std::vector<double> pooled_classes(const SoftAssignment& soft, const Segmentation& gt, int classes,
                                   const std::vector<double>& mass) {
    std::vector<double> pooled(static_cast<std::size_t>(soft.superpixel_count()) * classes, 0.0);
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        const auto c = soft.candidates(p);
        const auto w = soft.weights(p);
        for (int a = 0; a < soft.width(); ++a) {
            pooled[static_cast<std::size_t>(c[a]) * classes + static_cast<std::size_t>(gt[p])] += w[a];
        }
    }
    for (int k = 0; k < soft.superpixel_count(); ++k) {
        const double m = mass[static_cast<std::size_t>(k)];
        for (int l = 0; l < classes; ++l) {
            auto& v = pooled[static_cast<std::size_t>(k) * classes + l];
            v = m > 0.0 ? v / m : 0.0;
        }
    }
    return pooled;
}

std::vector<SpherePoint> pooled_positions(const SoftAssignment& soft, const SphereGrid& grid,
                                          const std::vector<double>& mass) {
    std::vector<SpherePoint> pos(static_cast<std::size_t>(soft.superpixel_count()), SpherePoint{0, 0, 0});
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        const auto c = soft.candidates(p);
        const auto w = soft.weights(p);
        for (int a = 0; a < soft.width(); ++a) {
            auto& s = pos[static_cast<std::size_t>(c[a])];
            s.x += w[a] * grid[p].x;
            s.y += w[a] * grid[p].y;
            s.z += w[a] * grid[p].z;
        }
    }
    for (std::size_t k = 0; k < pos.size(); ++k) {
        if (mass[k] > 0.0) {
            pos[k] = {pos[k].x / mass[k], pos[k].y / mass[k], pos[k].z / mass[k]};
        }
    }
    return pos;
}

double reconstructed_probability(const SoftAssignment& soft, const std::vector<double>& pooled,
                                 int classes, std::size_t p, int label) {
    const auto c = soft.candidates(p);
    const auto w = soft.weights(p);
    double y = 0.0;
    for (int a = 0; a < soft.width(); ++a) {
        y += w[a] * pooled[static_cast<std::size_t>(c[a]) * classes + static_cast<std::size_t>(label)];
    }
    return y;
}

/// Forward record of the unrolled soft clustering.
struct Tape {
    int rounds = 0;
    int k = 0;
    int dims = 0;
    std::vector<std::vector<double>> centroids;  // C_0 .. C_{T-1}
    std::vector<SoftAssignment> assignments;     // Q_1 .. Q_T
    std::vector<std::vector<double>> masses;     // column mass of Q_1 .. Q_T
};

Tape run_forward(const FeatureStack& stack, const ClusterInit& init, const SoftClusterOptions& options) {
    require(options.iterations >= 1, "loss: iterations must be >= 1");
    Tape tape;
    tape.rounds = options.iterations;
    tape.k = init.superpixel_count();
    tape.dims = stack.dims();
    SuperpixelState state = initialize_state(stack, init);
    tape.centroids.push_back(state.centroids);
    for (int t = 0; t < options.iterations; ++t) {
        SoftAssignment q = soft_assign(stack, init, state.centroids, options.temperature,
                                       options.spatial_weight);
        tape.masses.push_back(column_mass(q));
        auto update = soft_update(stack, q, tape.k, state.centroids, state.barycenters);
        state.centroids = std::move(update.centroids);
        state.barycenters = std::move(update.barycenters);
        tape.assignments.push_back(std::move(q));
        if (t + 1 < options.iterations) {
            tape.centroids.push_back(state.centroids);
        }
    }
    return tape;
}

LossReport evaluate(const SoftAssignment& soft, const Segmentation& gt, const SphereGrid& grid,
                    double lambda) {
    LossReport r;
    r.lambda = lambda;
    r.l_seg = loss_seg(soft, gt);
    r.l_compact = loss_compact(soft, grid);
    r.total = r.l_seg + lambda * r.l_compact;
    if (!std::isfinite(r.total)) {
        throw NumericalFailure("loss is not finite");
    }
    return r;
}

}  // namespace

double loss_seg(const SoftAssignment& soft, const Segmentation& gt, int classes) {
    require_same_shape(soft.shape(), gt.shape(), "loss_seg");
    const int n_classes = resolve_classes(gt, classes);
    const auto mass = column_mass(soft);
    const auto pooled = pooled_classes(soft, gt, n_classes, mass);
    double total = 0.0;
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        total -= std::log(reconstructed_probability(soft, pooled, n_classes, p, gt[p]) + kLogEpsilon);
    }
    return total / static_cast<double>(soft.pixel_count());
}

double loss_compact(const SoftAssignment& soft, const SphereGrid& grid) {
    require_same_shape(soft.shape(), grid.shape(), "loss_compact");
    const auto mass = column_mass(soft);
    const auto pos = pooled_positions(soft, grid, mass);
    double total = 0.0;
    for (std::size_t p = 0; p < soft.pixel_count(); ++p) {
        const int k = soft.candidates(p)[static_cast<std::size_t>(soft.argmax_slot(p))];
        total += squared_chord_distance(grid[p], pos[static_cast<std::size_t>(k)]);
    }
    return total / static_cast<double>(soft.pixel_count());
}

LossReport loss_total(const FeatureStack& stack, const ClusterInit& init, const Segmentation& gt,
                      const ObjectiveOptions& options) {
    require_same_shape(stack.shape(), gt.shape(), "loss_total");
    const Tape tape = run_forward(stack, init, options.cluster);
    return evaluate(tape.assignments.back(), gt, SphereGrid(stack.shape()), options.lambda);
}

LossGradient loss_gradient(const FeatureStack& stack, const ClusterInit& init,
                           const Segmentation& gt, const ObjectiveOptions& options) {
    require_same_shape(stack.shape(), gt.shape(), "loss_gradient");
    const Tape tape = run_forward(stack, init, options.cluster);
    const SphereGrid grid(stack.shape());
    const SoftAssignment& last = tape.assignments.back();

    LossGradient out;
    out.report = evaluate(last, gt, grid, options.lambda);

    const std::size_t n = stack.pixel_count();
    const int width = last.width();
    const int k = tape.k;
    const int dims = tape.dims;
    const double inv_n = 1.0 / static_cast<double>(n);
    const auto weights = channel_weights(dims, options.cluster.spatial_weight);
    const double tau = options.cluster.temperature;

    // d(total)/d(Q_T)
    std::vector<double> gq(n * static_cast<std::size_t>(width), 0.0);
    {
        const int classes = gt.label_bound();
        const auto& mass = tape.masses.back();
        const auto pooled = pooled_classes(last, gt, classes, mass);
        std::vector<double> g_pooled(pooled.size(), 0.0);
        for (std::size_t p = 0; p < n; ++p) {
            const int label = gt[p];
            const double y = reconstructed_probability(last, pooled, classes, p, label);
            const double gy = -inv_n / (y + kLogEpsilon);
            const auto c = last.candidates(p);
            const auto w = last.weights(p);
            for (int a = 0; a < width; ++a) {
                const std::size_t row = static_cast<std::size_t>(c[a]) * classes + static_cast<std::size_t>(label);
                gq[p * width + a] += gy * pooled[row];
                g_pooled[row] += w[a] * gy;
            }
        }
        // pooled = R / S
        std::vector<double> g_mass(static_cast<std::size_t>(k), 0.0);
        for (int c = 0; c < k; ++c) {
            const double m = mass[static_cast<std::size_t>(c)];
            if (m <= 0.0) {
                continue;
            }
            double s = 0.0;
            for (int l = 0; l < classes; ++l) {
                const std::size_t row = static_cast<std::size_t>(c) * classes + l;
                s += g_pooled[row] * pooled[row];
                g_pooled[row] /= m;
            }
            g_mass[static_cast<std::size_t>(c)] = -s / m;
        }
        for (std::size_t p = 0; p < n; ++p) {
            const auto c = last.candidates(p);
            for (int a = 0; a < width; ++a) {
                const auto ci = static_cast<std::size_t>(c[a]);
                gq[p * width + a] += g_mass[ci] + g_pooled[ci * classes + static_cast<std::size_t>(gt[p])];
            }
        }
    }
    if (options.lambda != 0.0) {
        const auto& mass = tape.masses.back();
        const auto pos = pooled_positions(last, grid, mass);
        std::vector<SpherePoint> g_pos(static_cast<std::size_t>(k), SpherePoint{0, 0, 0});
        const double scale = options.lambda * inv_n;
        for (std::size_t p = 0; p < n; ++p) {
            const auto ci = static_cast<std::size_t>(last.candidates(p)[static_cast<std::size_t>(last.argmax_slot(p))]);
            g_pos[ci].x -= 2.0 * scale * (grid[p].x - pos[ci].x);
            g_pos[ci].y -= 2.0 * scale * (grid[p].y - pos[ci].y);
            g_pos[ci].z -= 2.0 * scale * (grid[p].z - pos[ci].z);
        }
        std::vector<double> g_mass(static_cast<std::size_t>(k), 0.0);
        for (std::size_t c = 0; c < g_pos.size(); ++c) {
            if (mass[c] <= 0.0) {
                g_pos[c] = {0, 0, 0};
                continue;
            }
            g_mass[c] = -(g_pos[c].x * pos[c].x + g_pos[c].y * pos[c].y + g_pos[c].z * pos[c].z) / mass[c];
            g_pos[c] = {g_pos[c].x / mass[c], g_pos[c].y / mass[c], g_pos[c].z / mass[c]};
        }
        for (std::size_t p = 0; p < n; ++p) {
            const auto c = last.candidates(p);
            for (int a = 0; a < width; ++a) {
                const auto ci = static_cast<std::size_t>(c[a]);
                gq[p * width + a] += g_mass[ci] + g_pos[ci].x * grid[p].x + g_pos[ci].y * grid[p].y +
                                     g_pos[ci].z * grid[p].z;
            }
        }
    }

    auto& gf = out.features;
    gf.assign(n * static_cast<std::size_t>(dims), 0.0);
    std::vector<double> gc_carry(static_cast<std::size_t>(k) * dims, 0.0);
    std::vector<double> gd(static_cast<std::size_t>(width));

    for (int t = tape.rounds; t >= 1; --t) {
        const SoftAssignment& q = tape.assignments[static_cast<std::size_t>(t - 1)];
        const std::vector<double>& cprev = tape.centroids[static_cast<std::size_t>(t - 1)];
        std::vector<double> gc = gc_carry;  // gradient w.r.t. C_{t-1}

        // Q_t = softmax(-D(F, C_{t-1}) / tau)
        for (std::size_t p = 0; p < n; ++p) {
            const auto c = q.candidates(p);
            const auto w = q.weights(p);
            double dot = 0.0;
            for (int a = 0; a < width; ++a) {
                dot += w[a] * gq[p * width + a];
            }
            for (int a = 0; a < width; ++a) {
                gd[a] = -w[a] * (gq[p * width + a] - dot) / tau;
            }
            const double* f = stack.pixel(p).data();
            double* gfp = gf.data() + p * dims;
            for (int a = 0; a < width; ++a) {
                if (gd[a] == 0.0) {
                    continue;
                }
                const auto ci = static_cast<std::size_t>(c[a]);
                const double* cc = cprev.data() + ci * dims;
                double* gcc = gc.data() + ci * dims;
                for (int d = 0; d < dims; ++d) {
                    const double v = 2.0 * weights[static_cast<std::size_t>(d)] * (f[d] - cc[d]) * gd[a];
                    gfp[d] += v;
                    gcc[d] -= v;
                }
            }
        }

        if (t >= 2) {
            // C_{t-1} = soft_update(Q_{t-1}, F), zero-mass columns carry C_{t-2}.
            const SoftAssignment& qp = tape.assignments[static_cast<std::size_t>(t - 2)];
            const auto& mass = tape.masses[static_cast<std::size_t>(t - 2)];
            std::fill(gc_carry.begin(), gc_carry.end(), 0.0);
            std::vector<double> g_mass(static_cast<std::size_t>(k), 0.0);
            std::vector<double> g_mean(static_cast<std::size_t>(k) * dims, 0.0);
            for (int c = 0; c < k; ++c) {
                const auto ci = static_cast<std::size_t>(c);
                if (mass[ci] <= 0.0) {
                    std::copy_n(gc.data() + ci * dims, dims, gc_carry.data() + ci * dims);
                    continue;
                }
                double s = 0.0;
                for (int d = 0; d < dims; ++d) {
                    s += gc[ci * dims + d] * cprev[ci * dims + d];
                    g_mean[ci * dims + d] = gc[ci * dims + d] / mass[ci];
                }
                g_mass[ci] = -s / mass[ci];
            }
            std::fill(gq.begin(), gq.end(), 0.0);
            for (std::size_t p = 0; p < n; ++p) {
                const auto c = qp.candidates(p);
                const auto w = qp.weights(p);
                const double* f = stack.pixel(p).data();
                double* gfp = gf.data() + p * dims;
                for (int a = 0; a < width; ++a) {
                    const auto ci = static_cast<std::size_t>(c[a]);
                    const double* gm = g_mean.data() + ci * dims;
                    double g = g_mass[ci];
                    for (int d = 0; d < dims; ++d) {
                        g += gm[d] * f[d];
                        gfp[d] += w[a] * gm[d];
                    }
                    gq[p * width + a] = g;
                }
            }
        } else {
            // C_0 = average pooling over the initial label map.
            for (std::size_t p = 0; p < n; ++p) {
                const auto ci = static_cast<std::size_t>(init.initial_labels[p]);
                const double inv = 1.0 / static_cast<double>(init.pixel_counts[ci]);
                double* gfp = gf.data() + p * dims;
                for (int d = 0; d < dims; ++d) {
                    gfp[d] += gc[ci * dims + d] * inv;
                }
            }
        }
    }
    return out;
}

}  // namespace sphsp

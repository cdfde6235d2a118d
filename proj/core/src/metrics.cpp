#include "sphsp/metrics.hpp"

#include "sphsp/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace sphsp {

std::vector<std::uint8_t> boundary_mask(const Segmentation& labels) {
    const GridShape& shape = labels.shape();
    const int h = shape.height();
    const int w = shape.width();
    std::vector<std::uint8_t> mask(labels.size(), 0);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const auto label = labels.at(col, row);
            const bool edge = labels.at(shape.wrap_col(col - 1), row) != label ||
                              labels.at(shape.wrap_col(col + 1), row) != label ||
                              (row > 0 && labels.at(col, row - 1) != label) ||
                              (row + 1 < h && labels.at(col, row + 1) != label);
            mask[shape.index(col, row)] = edge ? 1 : 0;
        }
    }
    return mask;
}

double asa(const Segmentation& s, const Segmentation& g) {
    require_same_shape(s.shape(), g.shape(), "asa");
    std::vector<std::uint64_t> keys(s.size());
    for (std::size_t p = 0; p < s.size(); ++p) {
        keys[p] = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s[p])) << 32u) |
                  static_cast<std::uint32_t>(g[p]);
    }
    std::sort(keys.begin(), keys.end());
    std::size_t total = 0;
    std::size_t i = 0;
    while (i < keys.size()) {
        const std::uint64_t superpixel = keys[i] >> 32u;
        std::size_t best = 0;
        while (i < keys.size() && (keys[i] >> 32u) == superpixel) {
            std::size_t j = i;
            while (j < keys.size() && keys[j] == keys[i]) {
                ++j;
            }
            best = std::max(best, j - i);
            i = j;
        }
        total += best;
    }
    return static_cast<double>(total) / static_cast<double>(s.size());
}

double boundary_recall(const Segmentation& s, const Segmentation& g, double epsilon, PixelNorm norm) {
    require_same_shape(s.shape(), g.shape(), "boundary_recall");
    require(epsilon >= 0.0, "boundary_recall: epsilon must be >= 0");
    const GridShape& shape = s.shape();
    const int h = shape.height();
    const int w = shape.width();
    const auto bs = boundary_mask(s);
    const auto bg = boundary_mask(g);
    const int radius = static_cast<int>(std::ceil(epsilon));
    std::size_t gt_count = 0;
    std::size_t recalled = 0;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            if (!bg[shape.index(col, row)]) {
                continue;
            }
            ++gt_count;
            bool hit = false;
            for (int dr = -radius; dr <= radius && !hit; ++dr) {
                const int r = row + dr;
                if (r < 0 || r >= h) {
                    continue;
                }
                for (int dc = -radius; dc <= radius && !hit; ++dc) {
                    const int m = std::abs(dc) % w;
                    const int adc = std::min(m, w - m);
                    const double d = norm == PixelNorm::Euclidean
                                         ? std::sqrt(static_cast<double>(dr * dr + adc * adc))
                                         : static_cast<double>(std::max(std::abs(dr), adc));
                    if (d < epsilon && bs[shape.index(shape.wrap_col(col + dc), r)]) {
                        hit = true;
                    }
                }
            }
            if (hit) {
                ++recalled;
            }
        }
    }
    if (gt_count == 0) {
        return 1.0;
    }
    return static_cast<double>(recalled) / static_cast<double>(gt_count);
}

double contour_density(const Segmentation& s) {
    const auto mask = boundary_mask(s);
    std::size_t n = 0;
    for (auto v : mask) {
        n += v;
    }
    return static_cast<double>(n) / static_cast<double>(s.size());
}

MetricsReport evaluate_segmentation(const Segmentation& s, const Segmentation& g, double epsilon,
                                    PixelNorm norm) {
    MetricsReport r;
    r.asa = asa(s, g);
    r.br = boundary_recall(s, g, epsilon, norm);
    r.cd = contour_density(s);
    r.k_effective = s.distinct_count();
    r.epsilon = epsilon;
    return r;
}

std::string metrics_to_json(const MetricsReport& report) {
    const nlohmann::json j = {{"asa", report.asa},
                              {"br", report.br},
                              {"cd", report.cd},
                              {"k_effective", report.k_effective},
                              {"epsilon", report.epsilon}};
    return j.dump(2);
}

std::optional<double> contour_density_at_recall(std::vector<CurvePoint> curve, double recall) {
    std::sort(curve.begin(), curve.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.k < b.k; });
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& a = curve[i];
        const auto& b = curve[i + 1];
        const double lo = std::min(a.br, b.br);
        const double hi = std::max(a.br, b.br);
        if (recall < lo || recall > hi) {
            continue;
        }
        if (hi == lo) {
            return a.cd;
        }
        const double t = (recall - a.br) / (b.br - a.br);
        return a.cd + t * (b.cd - a.cd);
    }
    return std::nullopt;
}

}  // namespace sphsp

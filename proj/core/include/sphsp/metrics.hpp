#pragma once

#include "sphsp/image.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sphsp {

enum class PixelNorm { Euclidean, Chebyshev };

struct MetricsReport {
    double asa = 0.0;
    double br = 0.0;
    double cd = 0.0;
    int k_effective = 0;
    double epsilon = 2.0;
};

/// True where a 4-neighbour (columns wrap, rows do not) carries another label.
std::vector<std::uint8_t> boundary_mask(const Segmentation& labels);

/// Achievable segmentation accuracy: (1/N) sum_i max_j |S_i intersect G_j|.
double asa(const Segmentation& s, const Segmentation& g);

/// Fraction of ground-truth boundary pixels with a superpixel boundary pixel
/// at distance < epsilon (column offsets taken modulo width). 1 when the
/// ground truth has no boundary.
double boundary_recall(const Segmentation& s, const Segmentation& g, double epsilon = 2.0,
                       PixelNorm norm = PixelNorm::Euclidean);

/// |B(S)| / N.
double contour_density(const Segmentation& s);

MetricsReport evaluate_segmentation(const Segmentation& s, const Segmentation& g, double epsilon = 2.0,
                                    PixelNorm norm = PixelNorm::Euclidean);

std::string metrics_to_json(const MetricsReport& report);

/// A (CD, BR) measurement for one superpixel count.
struct CurvePoint {
    int k = 0;
    double br = 0.0;
    double cd = 0.0;
};

/// CD at the given recall, interpolated linearly between the two points
/// bracketing it in BR (points sorted by K). Empty when no pair brackets it.
std::optional<double> contour_density_at_recall(std::vector<CurvePoint> curve, double recall);

}  // namespace sphsp

#include "sphsp/features.hpp"

#include "sphsp/error.hpp"

#include <algorithm>
#include <cmath>

namespace sphsp {

namespace {

// D65 reference white, derived from the sRGB matrix rows so white maps to a = b = 0.
constexpr double kM[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                             {0.2126729, 0.7151522, 0.0721750},
                             {0.0193339, 0.1191920, 0.9503041}};
constexpr double kWhiteX = kM[0][0] + kM[0][1] + kM[0][2];
constexpr double kWhiteY = kM[1][0] + kM[1][1] + kM[1][2];
constexpr double kWhiteZ = kM[2][0] + kM[2][1] + kM[2][2];

double srgb_to_linear(double v) {
    const double c = std::clamp(v / 255.0, 0.0, 1.0);
    return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

double linear_to_srgb(double c) {
    const double v = c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
    return 255.0 * v;
}

double lab_f_inverse(double f) {
    constexpr double delta = 6.0 / 29.0;
    return f > delta ? f * f * f : 3.0 * delta * delta * (f - 4.0 / 29.0);
}

}  // namespace

std::array<double, 3> lab_to_rgb(double L, double a, double b) {
    const double fy = (L + 16.0) / 116.0;
    const double X = kWhiteX * lab_f_inverse(fy + a / 500.0);
    const double Y = kWhiteY * lab_f_inverse(fy);
    const double Z = kWhiteZ * lab_f_inverse(fy - b / 200.0);
    // Inverse of kM by cofactors.
    const double det = kM[0][0] * (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) -
                       kM[0][1] * (kM[1][0] * kM[2][2] - kM[1][2] * kM[2][0]) +
                       kM[0][2] * (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]);
    double inv[3][3];
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            const int r1 = (c + 1) % 3, r2 = (c + 2) % 3, c1 = (r + 1) % 3, c2 = (r + 2) % 3;
            inv[r][c] = (kM[r1][c1] * kM[r2][c2] - kM[r1][c2] * kM[r2][c1]) / det;
        }
    }
    std::array<double, 3> out{};
    for (int r = 0; r < 3; ++r) {
        out[static_cast<std::size_t>(r)] = linear_to_srgb(inv[r][0] * X + inv[r][1] * Y + inv[r][2] * Z);
    }
    return out;
}

EquirectImage rgb_to_lab(const EquirectImage& rgb) {
    require(rgb.channels() == 3, "rgb_to_lab: expected 3 channels, got " +
                                     std::to_string(rgb.channels()));
    EquirectImage lab(rgb.shape(), 3);
    for (std::size_t i = 0; i < rgb.pixel_count(); ++i) {
        const auto src = rgb.pixel(i);
        const double r = srgb_to_linear(src[0]);
        const double g = srgb_to_linear(src[1]);
        const double b = srgb_to_linear(src[2]);
        const double X = kM[0][0] * r + kM[0][1] * g + kM[0][2] * b;
        const double Y = kM[1][0] * r + kM[1][1] * g + kM[1][2] * b;
        const double Z = kM[2][0] * r + kM[2][1] * g + kM[2][2] * b;
        const double fx = lab_f(X / kWhiteX);
        const double fy = lab_f(Y / kWhiteY);
        const double fz = lab_f(Z / kWhiteZ);
        auto dst = lab.pixel(i);
        dst[0] = 116.0 * fy - 16.0;
        dst[1] = 500.0 * (fx - fy);
        dst[2] = 200.0 * (fy - fz);
    }
    return lab;
}

double normalize_lightness(double L) { return std::clamp(L / 50.0 - 1.0, -1.0, 1.0); }

double normalize_chroma(double ab) {
    return std::clamp(2.0 * (ab + 128.0) / 255.0 - 1.0, -1.0, 1.0);
}

EquirectImage normalized_lab(const EquirectImage& lab) {
    require(lab.channels() == 3, "normalized_lab: expected 3 channels");
    EquirectImage out(lab.shape(), 3);
    for (std::size_t i = 0; i < lab.pixel_count(); ++i) {
        const auto src = lab.pixel(i);
        auto dst = out.pixel(i);
        dst[0] = normalize_lightness(src[0]);
        dst[1] = normalize_chroma(src[1]);
        dst[2] = normalize_chroma(src[2]);
    }
    return out;
}

}  // namespace sphsp

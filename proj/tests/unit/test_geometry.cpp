#include <sphsp/error.hpp>
#include <sphsp/geometry.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace sphsp;

TEST(Geometry, PixelCentresFollowTheEquirectangularLayout) {
    const GridShape shape(8, 16);
    for (int row = 0; row < 8; ++row) {
        for (int col = 0; col < 16; ++col) {
            const double phi = (row + 0.5) * std::numbers::pi / 8;
            const double theta = (col + 0.5) * 2 * std::numbers::pi / 16;
            const SpherePoint p = pixel_to_sphere({col, row}, shape);
            EXPECT_NEAR(p.x, std::sin(phi) * std::cos(theta), 1e-15);
            EXPECT_NEAR(p.y, std::sin(phi) * std::sin(theta), 1e-15);
            EXPECT_NEAR(p.z, std::cos(phi), 1e-15);
            EXPECT_NEAR(p.norm(), 1.0, 1e-15);
        }
    }
}

TEST(Geometry, RoundTripOnSmallAndOddGrids) {
    for (auto [h, w] : {std::pair{2, 4}, std::pair{3, 5}, std::pair{7, 9}, std::pair{64, 128}}) {
        const GridShape shape(h, w);
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const PixelIndex back = sphere_to_pixel(pixel_to_sphere({col, row}, shape), shape);
                EXPECT_EQ(back.col, col);
                EXPECT_EQ(back.row, row);
            }
        }
    }
}

TEST(Geometry, NonCanonicalFlag) {
    EXPECT_FALSE(GridShape(4, 8).non_canonical());
    EXPECT_TRUE(GridShape(4, 9).non_canonical());
}

TEST(Geometry, PolesAndSeamMapInsideTheGrid) {
    const GridShape shape(4, 8);
    const PixelIndex north = sphere_to_pixel({0, 0, 1}, shape);
    EXPECT_EQ(north.row, 0);
    const PixelIndex south = sphere_to_pixel({0, 0, -1}, shape);
    EXPECT_EQ(south.row, 3);
    // Just below theta = 2 pi wraps to the last column, y = -0 to the first.
    const PixelIndex last = sphere_to_pixel({1.0, -1e-12, 0.0}, shape);
    EXPECT_EQ(last.col, 7);
    const PixelIndex first = sphere_to_pixel({1.0, -0.0, 0.0}, shape);
    EXPECT_EQ(first.col, 0);
}

TEST(Geometry, HandEvaluatedExamples) {
    const GridShape shape(4, 8);
    const PixelIndex east = sphere_to_pixel({1, 0, 0}, shape);
    EXPECT_EQ(east.col, 0);
    EXPECT_EQ(east.row, 2);
    const PixelIndex pole = sphere_to_pixel({0, 0, 1}, shape);
    EXPECT_EQ(pole.col, 0);
    EXPECT_EQ(pole.row, 0);
    // z changes sign between rows 1 and 2.
    EXPECT_GT(pixel_to_sphere({0, 1}, shape).z, 0.0);
    EXPECT_LT(pixel_to_sphere({0, 2}, shape).z, 0.0);
}

TEST(Geometry, InvalidInputsThrow) {
    EXPECT_THROW(GridShape(1, 4), InvalidInput);
    EXPECT_THROW(GridShape(4, 1), InvalidInput);
    const GridShape shape(4, 8);
    EXPECT_THROW(pixel_to_sphere({8, 0}, shape), InvalidInput);
    EXPECT_THROW(pixel_to_sphere({0, -1}, shape), InvalidInput);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(sphere_to_pixel({nan, 0, 1}, shape), InvalidInput);
}

TEST(Geometry, ChordDistance) {
    EXPECT_DOUBLE_EQ(chord_distance({0, 0, 1}, {0, 0, -1}), 2.0);
    EXPECT_NEAR(chord_distance({1, 0, 0}, {0, 1, 0}), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(squared_chord_distance({1, 0, 0}, {0, 1, 0}), 2.0);
}

TEST(Geometry, SeamNeighboursAreClose) {
    const GridShape shape(32, 64);
    const double seam = chord_distance(pixel_to_sphere({0, 16}, shape), pixel_to_sphere({63, 16}, shape));
    const double inner = chord_distance(pixel_to_sphere({30, 16}, shape), pixel_to_sphere({31, 16}, shape));
    EXPECT_NEAR(seam, inner, 1e-12);
}

TEST(Geometry, RotateAzimuthMatchesColumnShift) {
    const GridShape shape(8, 16);
    const double step = 2 * std::numbers::pi / 16;
    const SpherePoint a = rotate_azimuth(pixel_to_sphere({3, 2}, shape), 5 * step);
    const SpherePoint b = pixel_to_sphere({8, 2}, shape);
    EXPECT_NEAR(a.x, b.x, 1e-14);
    EXPECT_NEAR(a.y, b.y, 1e-14);
    EXPECT_EQ(a.z, b.z);
}

TEST(Geometry, SphereGridCachesPixelCentres) {
    const GridShape shape(6, 12);
    const SphereGrid grid(shape);
    ASSERT_EQ(grid.size(), shape.pixel_count());
    const SpherePoint p = pixel_to_sphere({7, 4}, shape);
    EXPECT_EQ(grid.at(7, 4).x, p.x);
    EXPECT_EQ(grid[shape.index(7, 4)].z, p.z);
}

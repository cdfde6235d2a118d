#include <sphsp/error.hpp>
#include <sphsp/image_io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace sphsp;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() : path_(fs::temp_directory_path() / ("sphsp_io_" + std::to_string(std::random_device{}()))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

EquirectImage random_rgb(const GridShape& shape) {
    EquirectImage img(shape, 3);
    std::mt19937_64 rng(1);
    for (double& v : img.data()) {
        v = static_cast<double>(rng() % 256);
    }
    return img;
}

}  // namespace

TEST(ImageIo, PngAndPpmRoundTrip) {
    TempDir dir;
    const EquirectImage img = random_rgb(GridShape(5, 9));
    for (const char* name : {"a.png", "a.ppm"}) {
        write_rgb_image(dir / name, img);
        EXPECT_EQ(read_rgb_image(dir / name), img) << name;
    }
}

TEST(ImageIo, WritingRoundsAndClamps) {
    TempDir dir;
    EquirectImage img(GridShape(2, 4), 3, 12.4);
    img.data()[0] = -5.0;
    img.data()[1] = 300.0;
    write_rgb_image(dir / "c.png", img);
    const EquirectImage back = read_rgb_image(dir / "c.png");
    EXPECT_EQ(back.data()[0], 0.0);
    EXPECT_EQ(back.data()[1], 255.0);
    EXPECT_EQ(back.data()[2], 12.0);
}

TEST(ImageIo, LabelsRoundTripAt16Bits) {
    TempDir dir;
    Segmentation s(GridShape(4, 8));
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = static_cast<Segmentation::Label>(i * 2000 % 65536);
    }
    write_label_image(dir / "l.png", s);
    EXPECT_EQ(read_label_image(dir / "l.png"), s);
    s[0] = 70000;
    EXPECT_THROW(write_label_image(dir / "bad.png", s), InvalidInput);
}

TEST(ImageIo, LabelCsv) {
    TempDir dir;
    const Segmentation s(GridShape(2, 3), std::vector<Segmentation::Label>{1, 2, 3, 4, 5, 6});
    write_label_csv(dir / "l.csv", s);
    std::ifstream in(dir / "l.csv");
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(all, "1,2,3\n4,5,6\n");
}

TEST(ImageIo, BadFilesThrow) {
    TempDir dir;
    EXPECT_THROW(read_rgb_image(dir / "missing.png"), InvalidInput);
    std::ofstream(dir / "junk.png") << "not an image";
    EXPECT_THROW(read_rgb_image(dir / "junk.png"), InvalidInput);
    EXPECT_THROW(read_label_image(dir / "junk.png"), InvalidInput);
}

TEST(ImageIo, ResizeAndOverlay) {
    const EquirectImage flat(GridShape(4, 8), 3, 50.0);
    const EquirectImage big = resize_image(flat, GridShape(8, 16));
    EXPECT_EQ(big.height(), 8);
    for (double v : big.data()) {
        EXPECT_NEAR(v, 50.0, 1e-12);
    }
    Segmentation s(GridShape(4, 8), 0);
    s.at(4, 1) = 1;
    const Segmentation up = resize_labels(s, GridShape(8, 16));
    EXPECT_EQ(up.at(8, 2), 1);
    EXPECT_EQ(up.at(0, 0), 0);
    const EquirectImage ov = draw_boundaries(flat, s);
    EXPECT_EQ(ov.at(4, 1, 0), 255.0);
    EXPECT_EQ(ov.at(0, 3, 0), 50.0);
}

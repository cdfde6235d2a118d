#include "sphsp/image_io.hpp"

#include "sphsp/error.hpp"
#include "sphsp/metrics.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

namespace sphsp {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

/// Raw PNG samples after expanding palettes and sub-byte depths.
struct RawPng {
    int width = 0;
    int height = 0;
    int channels = 0;
    int bit_depth = 8;
    std::vector<std::uint16_t> samples;
};

RawPng read_png_raw(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.string().c_str(), "rb"));
    require(file != nullptr, "cannot open " + path.string());
    png_byte header[8];
    require(std::fread(header, 1, 8, file.get()) == 8 && png_sig_cmp(header, 0, 8) == 0,
            path.string() + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw InvalidInput("png_create_info_struct failed");
    }
    RawPng raw;
    std::vector<png_bytep> rows;
    std::vector<png_byte> buffer;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InvalidInput("failed to decode " + path.string());
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    if (depth == 16) {
        png_set_swap(png);  // host order for little-endian reads below
    }
    png_read_update_info(png, info);
    raw.width = static_cast<int>(png_get_image_width(png, info));
    raw.height = static_cast<int>(png_get_image_height(png, info));
    raw.channels = png_get_channels(png, info);
    raw.bit_depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    buffer.resize(rowbytes * static_cast<std::size_t>(raw.height));
    rows.resize(static_cast<std::size_t>(raw.height));
    for (int r = 0; r < raw.height; ++r) {
        rows[static_cast<std::size_t>(r)] = buffer.data() + rowbytes * static_cast<std::size_t>(r);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const std::size_t count = static_cast<std::size_t>(raw.width) * raw.height * raw.channels;
    raw.samples.resize(count);
    if (raw.bit_depth == 16) {
        for (std::size_t i = 0; i < count; ++i) {
            raw.samples[i] = static_cast<std::uint16_t>(buffer[2 * i] | (buffer[2 * i + 1] << 8));
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            raw.samples[i] = buffer[i];
        }
    }
    return raw;
}

void write_png_raw(const std::filesystem::path& path, int width, int height, int channels, int bit_depth,
                   const std::vector<std::uint16_t>& samples) {
    FilePtr file(std::fopen(path.string().c_str(), "wb"));
    require(file != nullptr, "cannot write " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    require(png != nullptr, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw InvalidInput("png_create_info_struct failed");
    }
    const int bytes = bit_depth / 8;
    const std::size_t rowbytes = static_cast<std::size_t>(width) * channels * bytes;
    std::vector<png_byte> buffer(rowbytes * static_cast<std::size_t>(height));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (bytes == 2) {
            buffer[2 * i] = static_cast<png_byte>(samples[i] >> 8);  // PNG is big-endian
            buffer[2 * i + 1] = static_cast<png_byte>(samples[i] & 0xFF);
        } else {
            buffer[i] = static_cast<png_byte>(samples[i]);
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int r = 0; r < height; ++r) {
        rows[static_cast<std::size_t>(r)] = buffer.data() + rowbytes * static_cast<std::size_t>(r);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InvalidInput("failed to encode " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

int read_pnm_int(std::istream& in) {
    int c = in.peek();
    while (in && (std::isspace(c) || c == '#')) {
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int v = -1;
    in >> v;
    require(static_cast<bool>(in) && v >= 0, "malformed PNM header");
    return v;
}

EquirectImage read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path.string());
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    require(magic == "P6" || magic == "P5", path.string() + ": only binary P5/P6 PNM is supported");
    const int channels = magic == "P6" ? 3 : 1;
    const int width = read_pnm_int(in);
    const int height = read_pnm_int(in);
    const int maxval = read_pnm_int(in);
    require(maxval >= 1 && maxval <= 65535, path.string() + ": bad maxval");
    in.get();
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> data(static_cast<std::size_t>(width) * height * channels * bytes);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
    require(static_cast<std::size_t>(in.gcount()) == data.size(), path.string() + ": truncated pixel data");
    EquirectImage img(GridShape(height, width), 3);
    const double scale = 255.0 / maxval;
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        auto dst = img.pixel(p);
        for (int c = 0; c < 3; ++c) {
            const std::size_t s = p * channels + (channels == 3 ? c : 0);
            const int v = bytes == 2 ? (data[2 * s] << 8) | data[2 * s + 1] : data[s];
            dst[c] = v * scale;
        }
    }
    return img;
}

}  // namespace

EquirectImage read_rgb_image(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
        return read_pnm(path);
    }
    const RawPng raw = read_png_raw(path);
    EquirectImage img(GridShape(raw.height, raw.width), 3);
    const double scale = raw.bit_depth == 16 ? 255.0 / 65535.0 : 1.0;
    const bool grey = raw.channels <= 2;
    for (std::size_t p = 0; p < img.pixel_count(); ++p) {
        auto dst = img.pixel(p);
        const std::size_t base = p * static_cast<std::size_t>(raw.channels);
        for (int c = 0; c < 3; ++c) {
            dst[c] = raw.samples[base + (grey ? 0 : static_cast<std::size_t>(c))] * scale;
        }
    }
    return img;
}

void write_rgb_image(const std::filesystem::path& path, const EquirectImage& image) {
    require(image.channels() == 3, "write_rgb_image: expected 3 channels");
    std::vector<std::uint16_t> samples(image.data().size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        samples[i] = static_cast<std::uint16_t>(std::clamp(std::round(image.data()[i]), 0.0, 255.0));
    }
    if (lower_extension(path) == ".ppm") {
        std::ofstream out(path, std::ios::binary);
        require(static_cast<bool>(out), "cannot write " + path.string());
        out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
        for (auto v : samples) {
            out.put(static_cast<char>(v));
        }
        return;
    }
    write_png_raw(path, image.width(), image.height(), 3, 8, samples);
}

Segmentation read_label_image(const std::filesystem::path& path) {
    const RawPng raw = read_png_raw(path);
    require(raw.channels == 1, path.string() + ": label maps must be single-channel");
    Segmentation labels(GridShape(raw.height, raw.width));
    for (std::size_t p = 0; p < labels.size(); ++p) {
        labels[p] = raw.samples[p];
    }
    return labels;
}

void write_label_image(const std::filesystem::path& path, const Segmentation& labels) {
    std::vector<std::uint16_t> samples(labels.size());
    for (std::size_t p = 0; p < labels.size(); ++p) {
        require(labels[p] >= 0 && labels[p] <= 65535, "write_label_image: label outside 16-bit range");
        samples[p] = static_cast<std::uint16_t>(labels[p]);
    }
    write_png_raw(path, labels.width(), labels.height(), 1, 16, samples);
}

void write_label_csv(const std::filesystem::path& path, const Segmentation& labels) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path.string());
    for (int row = 0; row < labels.height(); ++row) {
        for (int col = 0; col < labels.width(); ++col) {
            if (col > 0) {
                out << ',';
            }
            out << labels.at(col, row);
        }
        out << '\n';
    }
}

EquirectImage draw_boundaries(const EquirectImage& image, const Segmentation& labels, double r, double g,
                              double b) {
    require_same_shape(image.shape(), labels.shape(), "draw_boundaries");
    require(image.channels() == 3, "draw_boundaries: expected 3 channels");
    EquirectImage out = image;
    const auto mask = boundary_mask(labels);
    for (std::size_t p = 0; p < mask.size(); ++p) {
        if (mask[p]) {
            auto px = out.pixel(p);
            px[0] = r;
            px[1] = g;
            px[2] = b;
        }
    }
    return out;
}

EquirectImage resize_image(const EquirectImage& image, const GridShape& shape) {
    EquirectImage out(shape, image.channels());
    const double sx = static_cast<double>(image.width()) / shape.width();
    const double sy = static_cast<double>(image.height()) / shape.height();
    for (int row = 0; row < shape.height(); ++row) {
        const double v = std::clamp((row + 0.5) * sy - 0.5, 0.0, image.height() - 1.0);
        const int r0 = static_cast<int>(std::floor(v));
        const int r1 = std::min(r0 + 1, image.height() - 1);
        const double fv = v - r0;
        for (int col = 0; col < shape.width(); ++col) {
            const double u = (col + 0.5) * sx - 0.5;
            const double u0 = std::floor(u);
            const double fu = u - u0;
            const int c0 = image.shape().wrap_col(static_cast<int>(u0));
            const int c1 = image.shape().wrap_col(static_cast<int>(u0) + 1);
            for (int c = 0; c < image.channels(); ++c) {
                const double top = (1 - fu) * image.at(c0, r0, c) + fu * image.at(c1, r0, c);
                const double bottom = (1 - fu) * image.at(c0, r1, c) + fu * image.at(c1, r1, c);
                out.at(col, row, c) = (1 - fv) * top + fv * bottom;
            }
        }
    }
    return out;
}

Segmentation resize_labels(const Segmentation& labels, const GridShape& shape) {
    Segmentation out(shape);
    for (int row = 0; row < shape.height(); ++row) {
        const int sr = std::min(labels.height() - 1,
                                static_cast<int>((row + 0.5) * labels.height() / shape.height()));
        for (int col = 0; col < shape.width(); ++col) {
            const int sc = std::min(labels.width() - 1,
                                    static_cast<int>((col + 0.5) * labels.width() / shape.width()));
            out.at(col, row) = labels.at(sc, sr);
        }
    }
    return out;
}

}  // namespace sphsp

#include "bscp/image_io.hpp"

#include <png.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "bscp/error.hpp"

namespace bscp {
namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayImage read_png(const std::filesystem::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str()))
        throw ShapeError("cannot decode PNG '" + path.string() + "': " + image.message);
    image.format = PNG_FORMAT_GRAY;
    GrayImage out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        std::string message = image.message;
        png_image_free(&image);
        throw ShapeError("cannot decode PNG '" + path.string() + "': " + message);
    }
    return out;
}

// PGM header tokens are whitespace separated and may carry '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string skip;
            std::getline(in, skip);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!token.empty()) return token;
            continue;
        }
        token.push_back(c);
    }
    return token;
}

GrayImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ShapeError("cannot open '" + path.string() + "'");
    if (next_token(in) != "P5") throw ShapeError("'" + path.string() + "' is not a binary PGM");
    GrayImage out;
    int maxval = 0;
    try {
        out.width = std::stoi(next_token(in));
        out.height = std::stoi(next_token(in));
        maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw ShapeError("malformed PGM header in '" + path.string() + "'");
    }
    if (out.width <= 0 || out.height <= 0 || maxval <= 0 || maxval > 65535)
        throw ShapeError("malformed PGM header in '" + path.string() + "'");
    const std::size_t count = static_cast<std::size_t>(out.width) * out.height;
    out.pixels.resize(count);
    if (maxval < 256) {
        in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(count));
        if (in.gcount() != static_cast<std::streamsize>(count)) throw ShapeError("truncated PGM '" + path.string() + "'");
        if (maxval != 255)
            for (auto& p : out.pixels) p = static_cast<std::uint8_t>(std::min(255, p * 255 / maxval));
    } else {
        std::vector<unsigned char> raw(count * 2);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw ShapeError("truncated PGM '" + path.string() + "'");
        for (std::size_t i = 0; i < count; ++i) {
            const int v = (raw[2 * i] << 8) | raw[2 * i + 1];
            out.pixels[i] = static_cast<std::uint8_t>(std::min(255, v * 255 / maxval));
        }
    }
    return out;
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
    std::array<unsigned char, 8> signature{};
    {
        FilePtr f(std::fopen(path.c_str(), "rb"));
        if (!f) throw ShapeError("cannot open '" + path.string() + "'");
        if (std::fread(signature.data(), 1, signature.size(), f.get()) < 2)
            throw ShapeError("'" + path.string() + "' is too short to be an image");
    }
    if (png_sig_cmp(signature.data(), 0, signature.size()) == 0) return read_png(path);
    if (signature[0] == 'P' && signature[1] == '5') return read_pgm(path);
    throw ShapeError("unsupported image format: '" + path.string() + "'");
}

void write_png(const std::filesystem::path& path, const GrayImage& image) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(image.width);
    png.height = static_cast<png_uint_32>(image.height);
    png.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), 0, nullptr))
        throw ShapeError("cannot write PNG '" + path.string() + "': " + png.message);
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ShapeError("cannot write '" + path.string() + "'");
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()), static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace bscp

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pano {

/// 2D float image, row-major. Pixel values are nominally in [0,1] but the
/// container itself does not enforce a range.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<float> px;

    ImageF() = default;
    ImageF(int w, int h, float fill = 0.0f) : width(w), height(h), px(static_cast<size_t>(w) * h, fill) {}

    float& at(int row, int col) { return px[static_cast<size_t>(row) * width + col]; }
    float at(int row, int col) const { return px[static_cast<size_t>(row) * width + col]; }
    bool same_dims(const ImageF& o) const { return width == o.width && height == o.height; }
};

/// Binary mask image, row-major, 0 = background, 1 = foreground.
struct MaskImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> px;

    MaskImage() = default;
    MaskImage(int w, int h, uint8_t fill = 0) : width(w), height(h), px(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int row, int col) { return px[static_cast<size_t>(row) * width + col]; }
    uint8_t at(int row, int col) const { return px[static_cast<size_t>(row) * width + col]; }

    size_t count() const {
        size_t n = 0;
        for (uint8_t v : px) n += (v != 0);
        return n;
    }
};

// ---------------------------------------------------------------------------
// PGM I/O (binary P5). 16-bit samples are big-endian per the Netpbm format.
// ---------------------------------------------------------------------------

inline void write_pgm(const std::string& path, const ImageF& img, int bits = 16) {
    if (bits != 8 && bits != 16) throw std::invalid_argument("write_pgm: bits must be 8 or 16");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open '" + path + "' for writing");
    const int maxval = (1 << bits) - 1;
    out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    for (float v : img.px) {
        const double c = std::clamp(static_cast<double>(v), 0.0, 1.0);
        const unsigned q = static_cast<unsigned>(std::lround(c * maxval));
        if (bits == 8) {
            out.put(static_cast<char>(q & 0xff));
        } else {
            out.put(static_cast<char>((q >> 8) & 0xff));
            out.put(static_cast<char>(q & 0xff));
        }
    }
    if (!out) throw std::runtime_error("write_pgm: write failed for '" + path + "'");
}

inline void write_pgm(const std::string& path, const MaskImage& mask) {
    ImageF img(mask.width, mask.height);
    for (size_t i = 0; i < mask.px.size(); ++i) img.px[i] = mask.px[i] ? 1.0f : 0.0f;
    write_pgm(path, img, 8);
}

namespace detail {

inline int pgm_next_token(std::istream& in) {
    // Skips whitespace and '#' comment lines, returns the next integer.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("read_pgm: malformed header");
    return value;
}

} // namespace detail

/// Reads a binary P5 PGM (8- or 16-bit) and normalizes samples to [0,1].
inline ImageF read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open '" + path + "'");
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("read_pgm: '" + path + "' is not a binary PGM");
    const int w = detail::pgm_next_token(in);
    const int h = detail::pgm_next_token(in);
    const int maxval = detail::pgm_next_token(in);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw std::runtime_error("read_pgm: bad dimensions in '" + path + "'");
    in.get(); // single whitespace after maxval
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(static_cast<size_t>(w) * h * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size())
        throw std::runtime_error("read_pgm: truncated pixel data in '" + path + "'");
    ImageF img(w, h);
    for (size_t i = 0; i < img.px.size(); ++i) {
        unsigned v = bytes == 1 ? raw[i] : (static_cast<unsigned>(raw[2 * i]) << 8) | raw[2 * i + 1];
        img.px[i] = static_cast<float>(static_cast<double>(v) / maxval);
    }
    return img;
}

} // namespace pano

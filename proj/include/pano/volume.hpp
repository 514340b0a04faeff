#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pano/vec.hpp"

namespace pano {

/// Intensity window [lo, hi): values are affinely mapped and clamped to [0,1].
struct WindowSpec {
    double lo = 0.0;
    double hi = 1.0;

    void validate() const {
        if (!(lo < hi)) throw std::invalid_argument("WindowSpec: lo must be < hi");
    }
};

/// CBCT voxel volume as stored on disk: int16 samples in x-fastest order plus
/// the linear rescale that maps raw values to HU-like units.
struct Volume {
    Vec3i dims;
    Vec3d spacing{1.0, 1.0, 1.0}; // mm per voxel
    double rescale_slope = 1.0;
    double rescale_intercept = 0.0;
    std::vector<int16_t> raw;

    size_t voxel_count() const {
        return static_cast<size_t>(dims.x) * static_cast<size_t>(dims.y) * static_cast<size_t>(dims.z);
    }
    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) + static_cast<size_t>(dims.x) * (static_cast<size_t>(y) + static_cast<size_t>(dims.y) * z);
    }

    void validate() const {
        if (dims.x < 1 || dims.y < 1 || dims.z < 1) throw std::invalid_argument("Volume: dims must be >= 1");
        if (!(spacing.x > 0 && spacing.y > 0 && spacing.z > 0)) throw std::invalid_argument("Volume: spacing must be > 0");
        if (raw.size() != voxel_count()) throw std::invalid_argument("Volume: raw size does not match dims");
        if (!std::isfinite(rescale_slope) || !std::isfinite(rescale_intercept))
            throw std::invalid_argument("Volume: rescale must be finite");
    }
};

/// Float voxel grid sharing the Volume layout; holds rescaled or windowed data.
struct FloatVolume {
    Vec3i dims;
    Vec3d spacing{1.0, 1.0, 1.0};
    std::vector<float> values;

    FloatVolume() = default;
    FloatVolume(Vec3i d, Vec3d s, float fill = 0.0f)
        : dims(d), spacing(s),
          values(static_cast<size_t>(d.x) * static_cast<size_t>(d.y) * static_cast<size_t>(d.z), fill) {}

    size_t index(int x, int y, int z) const {
        return static_cast<size_t>(x) + static_cast<size_t>(dims.x) * (static_cast<size_t>(y) + static_cast<size_t>(dims.y) * z);
    }
    float at(int x, int y, int z) const { return values[index(x, y, z)]; }
    float& at(int x, int y, int z) { return values[index(x, y, z)]; }
};

// ---------------------------------------------------------------------------
// PVOL1 file format
//
//   PVOL1 nx ny nz sx sy sz slope intercept little\n
//
// followed by nx*ny*nz little-endian int16 values, x fastest, then y, then z.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc{}) throw std::runtime_error("format_double failed");
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& tok, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw std::runtime_error(std::string("load_volume: malformed header field '") + what + "'");
    return v;
}

inline long long parse_int(const std::string& tok, const char* what) {
    long long v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw std::runtime_error(std::string("load_volume: malformed header field '") + what + "'");
    return v;
}

} // namespace detail

inline void write_volume(const std::string& path, const Volume& v) {
    v.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_volume: cannot open '" + path + "' for writing");
    out << "PVOL1 " << v.dims.x << " " << v.dims.y << " " << v.dims.z << " "
        << detail::format_double(v.spacing.x) << " " << detail::format_double(v.spacing.y) << " "
        << detail::format_double(v.spacing.z) << " " << detail::format_double(v.rescale_slope) << " "
        << detail::format_double(v.rescale_intercept) << " little\n";
    std::vector<unsigned char> bytes(v.raw.size() * 2);
    for (size_t i = 0; i < v.raw.size(); ++i) {
        const uint16_t u = static_cast<uint16_t>(v.raw[i]);
        bytes[2 * i] = static_cast<unsigned char>(u & 0xff);
        bytes[2 * i + 1] = static_cast<unsigned char>((u >> 8) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write_volume: write failed for '" + path + "'");
}

inline Volume load_volume(const std::string& path) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("load_volume: no such file '" + path + "'");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_volume: cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("load_volume: missing header line in '" + path + "'");
    std::istringstream hs(header);
    std::vector<std::string> tok;
    for (std::string t; hs >> t;) tok.push_back(t);
    if (tok.size() != 10) throw std::runtime_error("load_volume: header must have 10 fields, got " + std::to_string(tok.size()));
    if (tok[0] != "PVOL1") throw std::runtime_error("load_volume: bad magic '" + tok[0] + "'");
    if (tok[9] != "little") throw std::runtime_error("load_volume: unsupported endianness tag '" + tok[9] + "'");

    Volume v;
    const long long nx = detail::parse_int(tok[1], "nx");
    const long long ny = detail::parse_int(tok[2], "ny");
    const long long nz = detail::parse_int(tok[3], "nz");
    if (nx < 1 || ny < 1 || nz < 1) throw std::runtime_error("load_volume: dims must be >= 1");
    // Guard against overflow before materializing the payload.
    constexpr long long kMaxVoxels = 1LL << 31;
    if (ny != 0 && nx > kMaxVoxels / ny) throw std::runtime_error("load_volume: dims overflow");
    const long long nxy = nx * ny;
    if (nz != 0 && nxy > kMaxVoxels / nz) throw std::runtime_error("load_volume: dims overflow");
    v.dims = {static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nz)};
    v.spacing = {detail::parse_double(tok[4], "sx"), detail::parse_double(tok[5], "sy"), detail::parse_double(tok[6], "sz")};
    v.rescale_slope = detail::parse_double(tok[7], "slope");
    v.rescale_intercept = detail::parse_double(tok[8], "intercept");

    const size_t n = static_cast<size_t>(nxy) * static_cast<size_t>(nz);
    std::vector<unsigned char> bytes(n * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<size_t>(in.gcount()) != bytes.size())
        throw std::runtime_error("load_volume: truncated payload in '" + path + "': expected " + std::to_string(n) +
                                 " voxels, got " + std::to_string(in.gcount() / 2));
    if (in.peek() != std::ifstream::traits_type::eof())
        throw std::runtime_error("load_volume: trailing bytes after payload in '" + path + "'");
    v.raw.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const uint16_t u = static_cast<uint16_t>(bytes[2 * i]) | (static_cast<uint16_t>(bytes[2 * i + 1]) << 8);
        v.raw[i] = static_cast<int16_t>(u);
    }
    v.validate();
    return v;
}

// ---------------------------------------------------------------------------
// Value transforms
// ---------------------------------------------------------------------------

/// raw * slope + intercept, elementwise.
inline FloatVolume rescale(const Volume& v) {
    v.validate();
    FloatVolume out(v.dims, v.spacing);
    for (size_t i = 0; i < v.raw.size(); ++i)
        out.values[i] = static_cast<float>(v.raw[i] * v.rescale_slope + v.rescale_intercept);
    return out;
}

inline float apply_window(float x, const WindowSpec& w) {
    const double t = (static_cast<double>(x) - w.lo) / (w.hi - w.lo);
    return static_cast<float>(std::clamp(t, 0.0, 1.0));
}

/// clamp((x - lo) / (hi - lo), 0, 1) for every voxel.
inline FloatVolume window_values(const FloatVolume& v, const WindowSpec& w) {
    w.validate();
    FloatVolume out(v.dims, v.spacing);
    for (size_t i = 0; i < v.values.size(); ++i) out.values[i] = apply_window(v.values[i], w);
    return out;
}

enum class SampleMode { nearest, trilinear };

/// Samples the volume at a continuous point in voxel coordinates.
/// The point must lie inside [0, dims-1] on every axis.
inline float sample(const FloatVolume& v, Vec3d p, SampleMode mode) {
    if (p.x < 0 || p.x > v.dims.x - 1 || p.y < 0 || p.y > v.dims.y - 1 || p.z < 0 || p.z > v.dims.z - 1)
        throw std::out_of_range("sample: point outside volume");
    if (mode == SampleMode::nearest) {
        const int i = static_cast<int>(std::lround(p.x));
        const int j = static_cast<int>(std::lround(p.y));
        const int k = static_cast<int>(std::lround(p.z));
        return v.at(i, j, k);
    }
    const int i0 = std::min(static_cast<int>(std::floor(p.x)), v.dims.x - 1);
    const int j0 = std::min(static_cast<int>(std::floor(p.y)), v.dims.y - 1);
    const int k0 = std::min(static_cast<int>(std::floor(p.z)), v.dims.z - 1);
    const int i1 = std::min(i0 + 1, v.dims.x - 1);
    const int j1 = std::min(j0 + 1, v.dims.y - 1);
    const int k1 = std::min(k0 + 1, v.dims.z - 1);
    const double fx = p.x - i0;
    const double fy = p.y - j0;
    const double fz = p.z - k0;

    auto lerp = [](double a, double b, double t) { return a + (b - a) * t; };
    const double c00 = lerp(v.at(i0, j0, k0), v.at(i1, j0, k0), fx);
    const double c10 = lerp(v.at(i0, j1, k0), v.at(i1, j1, k0), fx);
    const double c01 = lerp(v.at(i0, j0, k1), v.at(i1, j0, k1), fx);
    const double c11 = lerp(v.at(i0, j1, k1), v.at(i1, j1, k1), fx);
    return static_cast<float>(lerp(lerp(c00, c10, fy), lerp(c01, c11, fy), fz));
}

} // namespace pano

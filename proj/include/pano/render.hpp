#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pano/geometry.hpp"
#include "pano/image.hpp"
#include "pano/volume.hpp"

namespace pano {

struct RenderParams {
    double beta = 0.29;                       // attenuation per unit windowed intensity per mm
    WindowSpec render_window{-175.0, 3096.0}; // suppresses sub-soft-tissue values
    double delta_vox = 0.5;                   // sample spacing along a ray, voxel units

    void validate() const {
        if (!(beta > 0)) throw std::invalid_argument("RenderParams: beta must be > 0");
        if (!(delta_vox > 0)) throw std::invalid_argument("RenderParams: delta must be > 0");
        render_window.validate();
    }
};

/// Beer-Lambert transmittance of one pencil beam: exp(-beta * delta * sum).
/// An empty sample list attenuates nothing and returns 1.
inline double transmittance(std::span<const double> sigmas, double beta, double delta) {
    double sum = 0.0;
    for (double s : sigmas) sum += s;
    return std::exp(-beta * delta * sum);
}

/// Panorama image in [0,1]: one row per ROI axial slice (superior first), one
/// column per fan ray.
struct Panorama {
    int width = 0;
    int height = 0;
    std::vector<float> px;
    std::vector<std::pair<std::string, std::string>> provenance;

    float& at(int row, int col) { return px[static_cast<size_t>(row) * width + col]; }
    float at(int row, int col) const { return px[static_cast<size_t>(row) * width + col]; }

    ImageF image() const {
        ImageF img(width, height);
        img.px = px;
        return img;
    }
};

namespace detail {

// In-plane bilinear read; outside the slice contributes nothing, which lets
// the trough exceed the scanned field of view at the posterior extremes.
inline double sample_slice(const FloatVolume& v, double x, double y, int z) {
    if (x < 0 || x > v.dims.x - 1 || y < 0 || y > v.dims.y - 1) return 0.0;
    const int i0 = std::min(static_cast<int>(x), v.dims.x - 1);
    const int j0 = std::min(static_cast<int>(y), v.dims.y - 1);
    const int i1 = std::min(i0 + 1, v.dims.x - 1);
    const int j1 = std::min(j0 + 1, v.dims.y - 1);
    const double fx = x - i0, fy = y - j0;
    const double top = v.at(i0, j0, z) + (v.at(i1, j0, z) - v.at(i0, j0, z)) * fx;
    const double bot = v.at(i0, j1, z) + (v.at(i1, j1, z) - v.at(i0, j1, z)) * fx;
    return top + (bot - top) * fy;
}

} // namespace detail

/// Renders one panorama column from a windowed volume. Rows run superior to
/// inferior: index 0 is slice z_hi-1. Sample spacing is converted to mm per
/// ray so anisotropic in-plane spacing integrates correct path lengths.
inline std::vector<double> render_column(const FloatVolume& windowed, const Ray& ray, int z_lo, int z_hi,
                                         const RenderParams& params) {
    if (z_lo < 0 || z_hi > windowed.dims.z || z_lo >= z_hi)
        throw std::invalid_argument("render_column: bad slice range");
    const double delta_mm =
        params.delta_vox * std::hypot(ray.direction.x * windowed.spacing.x, ray.direction.y * windowed.spacing.y);
    std::vector<double> column(static_cast<size_t>(z_hi - z_lo), 0.0);
    for (int z = z_hi - 1; z >= z_lo; --z) {
        double sum = 0.0;
        for (const Vec2& p : ray.samples) sum += detail::sample_slice(windowed, p.x, p.y, z);
        const double t = std::exp(-params.beta * delta_mm * sum);
        column[z_hi - 1 - z] = 1.0 - t;
    }
    return column;
}

/// Renders all columns; column order follows the fan. Columns are written to
/// disjoint pixels by index, so any worker count produces identical output.
inline Panorama render_panorama(const FloatVolume& windowed, const RayFan& fan, int z_lo, int z_hi,
                                const RenderParams& params, int threads = 1) {
    params.validate();
    if (fan.rays.empty()) throw std::invalid_argument("render_panorama: empty fan");
    if (z_lo < 0 || z_hi > windowed.dims.z || z_lo >= z_hi)
        throw std::invalid_argument("render_panorama: bad slice range");

    Panorama pano;
    pano.width = static_cast<int>(fan.rays.size());
    pano.height = z_hi - z_lo;
    pano.px.assign(static_cast<size_t>(pano.width) * pano.height, 0.0f);

    RenderParams col_params = params;
    col_params.delta_vox = fan.delta_vox;

    auto render_range = [&](int col_begin, int col_end) {
        for (int col = col_begin; col < col_end; ++col) {
            const std::vector<double> column = render_column(windowed, fan.rays[col], z_lo, z_hi, col_params);
            for (int row = 0; row < pano.height; ++row) pano.at(row, col) = static_cast<float>(column[row]);
        }
    };

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, pano.width));
    if (workers == 1) {
        render_range(0, pano.width);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            const int begin = static_cast<int>(static_cast<long long>(pano.width) * w / workers);
            const int end = static_cast<int>(static_cast<long long>(pano.width) * (w + 1) / workers);
            pool.emplace_back(render_range, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }
    return pano;
}

} // namespace pano

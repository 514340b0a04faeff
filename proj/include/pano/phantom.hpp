#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "pano/vec.hpp"
#include "pano/volume.hpp"

namespace pano {

/// Parametric head phantom: an elliptical dental arch carrying ellipsoid
/// crowns over cylinder roots, an alveolar ridge ring bridging the crowns, a
/// mandible and maxilla slab, and a soft-tissue head, optionally tilted about
/// the volume's vertical axis. Intensities are raw values; defaults map to
/// air -1000, soft tissue 40, bone 700, enamel 1800, metal 3000 HU under
/// slope 1 / intercept -1000.
struct PhantomSpec {
    Vec3i dims{128, 128, 128};
    Vec3d spacing{1.0, 1.0, 1.0}; // mm per voxel

    double arch_rx_mm = 36.0; // arch semi-axis, left-right
    double arch_ry_mm = 30.0; // arch semi-axis, antero-posterior
    double arch_center_y_mm = 60.0;

    int tooth_count = 16;
    std::set<int> missing_teeth;
    std::set<int> implant_teeth;

    double tilt_deg = 0.0; // axial-plane rotation about the volume center

    double soft_raw = 1040.0;
    double bone_raw = 1700.0;
    double enamel_raw = 2800.0;
    double metal_raw = 4000.0;
    double rescale_slope = 1.0;
    double rescale_intercept = -1000.0;

    double jaw_z_lo_mm = 40.0;
    double jaw_z_hi_mm = 88.0;

    void validate() const {
        if (dims.x < 32 || dims.y < 32 || dims.z < 32) throw std::invalid_argument("PhantomSpec: dims too small");
        if (!(spacing.x > 0 && spacing.y > 0 && spacing.z > 0)) throw std::invalid_argument("PhantomSpec: bad spacing");
        if (tooth_count < 1) throw std::invalid_argument("PhantomSpec: tooth_count must be >= 1");
        for (int t : missing_teeth)
            if (t < 0 || t >= tooth_count) throw std::invalid_argument("PhantomSpec: missing tooth index out of range");
        for (int t : implant_teeth)
            if (t < 0 || t >= tooth_count) throw std::invalid_argument("PhantomSpec: implant tooth index out of range");
        if (!(std::abs(tilt_deg) < 45.0)) throw std::invalid_argument("PhantomSpec: |tilt| must be < 45 degrees");
        const double s = rescale_slope, c = rescale_intercept;
        if (!(soft_raw * s + c < bone_raw * s + c && bone_raw * s + c < enamel_raw * s + c &&
              enamel_raw * s + c < metal_raw * s + c))
            throw std::invalid_argument("PhantomSpec: intensity levels must be ordered soft < bone < enamel < metal");
        if (!(jaw_z_lo_mm < jaw_z_hi_mm)) throw std::invalid_argument("PhantomSpec: jaw z extent inverted");

        const double margin = 8.0;
        const double cx = (dims.x - 1) * spacing.x / 2.0;
        const double lx = (dims.x - 1) * spacing.x;
        const double ly = (dims.y - 1) * spacing.y;
        const double lz = (dims.z - 1) * spacing.z;
        if (cx - arch_rx_mm - margin < 0 || cx + arch_rx_mm + margin > lx ||
            arch_center_y_mm - arch_ry_mm - margin < 0 || arch_center_y_mm + arch_ry_mm + margin > ly)
            throw std::invalid_argument("PhantomSpec: dims too small for arch");
        if (jaw_z_lo_mm < 2.0 || jaw_z_hi_mm > lz - 2.0) throw std::invalid_argument("PhantomSpec: jaw z extent outside volume");
    }
};

/// Default spec scaled to a cubic volume: same physical jaw regardless of
/// resolution, so a 256-voxel / 0.5 mm phantom matches the 128 / 1.0 one.
inline PhantomSpec make_phantom_spec(int dims, double spacing_mm) {
    PhantomSpec spec;
    spec.dims = {dims, dims, dims};
    spec.spacing = {spacing_mm, spacing_mm, spacing_mm};
    const double extent = (dims - 1) * spacing_mm;
    spec.arch_center_y_mm = 0.47 * extent;
    spec.jaw_z_lo_mm = 0.31 * extent;
    spec.jaw_z_hi_mm = 0.69 * extent;
    return spec;
}

struct ToothTruth {
    int index = 0;
    bool present = true;
    bool implant = false;
    double param_deg = 0.0; // arch parameter, 0 at the anterior apex
    Vec3d center_vox;       // crown center in (tilted) volume voxel coordinates
};

struct PhantomTruth {
    double tilt_deg = 0.0;
    Vec2 arch_center_vox;              // arch center in volume voxel coordinates (tilt applied)
    double arch_rx_vox = 0.0, arch_ry_vox = 0.0;
    std::vector<ToothTruth> teeth;
    int crown_z_lo = 0, crown_z_hi = 0; // half-open slice range of the crown band
    int jaw_z_lo = 0, jaw_z_hi = 0;     // half-open slice range of the whole jaw
};

namespace detail {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double seeded_phase(uint64_t& state) {
    return 2.0 * std::numbers::pi * (splitmix64(state) >> 11) / 9007199254740992.0;
}

// Equal-arc-length tooth parameters over [-span, span] degrees of the arch
// ellipse, inverted from a dense cumulative arc table.
inline std::vector<double> arc_equal_params(double rx, double ry, double span_deg, int count) {
    constexpr int kSteps = 4096;
    const double lo = -span_deg * std::numbers::pi / 180.0;
    const double hi = span_deg * std::numbers::pi / 180.0;
    std::vector<double> cum(kSteps + 1, 0.0);
    const double dt = (hi - lo) / kSteps;
    for (int i = 1; i <= kSteps; ++i) {
        const double t = lo + (i - 0.5) * dt;
        cum[i] = cum[i - 1] + dt * std::hypot(rx * std::cos(t), ry * std::sin(t));
    }
    const double total = cum.back();
    std::vector<double> params(count);
    for (int i = 0; i < count; ++i) {
        const double target = count == 1 ? total / 2.0 : total * i / (count - 1);
        const auto it = std::lower_bound(cum.begin(), cum.end(), target);
        const size_t hi_idx = std::min<size_t>(std::max<ptrdiff_t>(it - cum.begin(), 1), kSteps);
        const double f = (target - cum[hi_idx - 1]) / std::max(cum[hi_idx] - cum[hi_idx - 1], 1e-12);
        const double t = lo + (hi_idx - 1 + f) * dt;
        params[i] = t * 180.0 / std::numbers::pi;
    }
    return params;
}

} // namespace detail

inline std::pair<Volume, PhantomTruth> generate_phantom(const PhantomSpec& spec, uint64_t seed) {
    spec.validate();

    const double sx = spec.spacing.x, sy = spec.spacing.y, sz = spec.spacing.z;
    const double axial_cx = (spec.dims.x - 1) * sx / 2.0;
    const double axial_cy = (spec.dims.y - 1) * sy / 2.0;
    const double arch_cx = axial_cx; // arch is centered on the mirror axis
    const double arch_cy = spec.arch_center_y_mm;
    const double Aa = spec.arch_rx_mm, Ab = spec.arch_ry_mm;

    // Tooth layout along the arch.
    const std::vector<double> params = detail::arc_equal_params(Aa, Ab, 80.0, spec.tooth_count);
    double spacing_mm = std::numeric_limits<double>::infinity();
    if (spec.tooth_count >= 2) {
        // Arc spacing is uniform by construction; recover it from the table.
        constexpr int kSteps = 2048;
        double arc = 0.0;
        const double lo = -80.0 * std::numbers::pi / 180.0, hi = -lo;
        for (int i = 0; i < kSteps; ++i) {
            const double t = lo + (i + 0.5) * (hi - lo) / kSteps;
            arc += (hi - lo) / kSteps * std::hypot(Aa * std::cos(t), Ab * std::sin(t));
        }
        spacing_mm = arc / (spec.tooth_count - 1);
    }
    const double crown_tan = std::min(2.4, 0.36 * spacing_mm);
    const double crown_rad = 2.4;
    if (spec.tooth_count >= 2 && spacing_mm < 2.0 * crown_tan + 1.0)
        throw std::invalid_argument("generate_phantom: teeth overlap; arch too small for tooth_count");
    const double root_r = std::min(1.4, 0.25 * spacing_mm);

    // Vertical layout, all in mm of z.
    const double jz = spec.jaw_z_hi_mm - spec.jaw_z_lo_mm;
    const double mand_hi = spec.jaw_z_lo_mm + 0.30 * jz;
    const double root_lo = spec.jaw_z_lo_mm + 0.25 * jz;
    const double root_hi = spec.jaw_z_lo_mm + 0.55 * jz;
    const double crown_c = spec.jaw_z_lo_mm + 0.62 * jz;
    const double crown_v = 0.09 * jz;
    const double ridge_lo = spec.jaw_z_lo_mm + 0.45 * jz;
    const double ridge_hi = spec.jaw_z_lo_mm + 0.78 * jz;
    const double maxi_lo = spec.jaw_z_lo_mm + 0.80 * jz;

    // Alveolar ridge: bone brightens toward the arch line with a quadratic
    // radial ramp. The above-threshold core of the ramp is what jaw detection
    // segments, and it must stay wide enough (several voxels) to survive a
    // 3x3 opening and bridge the separate crowns into one component.
    const double in_plane = std::max(spec.spacing.x, spec.spacing.y);
    const double ramp_w = std::max(3.0, 3.2 * in_plane); // ramp half-width, mm
    const double ramp_gain = 0.45;                       // peak brightening at the arch line
    const double bone_r_in = -(ramp_w + 4.0), bone_r_out = ramp_w + 1.0; // slab radial band, mm

    // Deterministic in-plane texture. It must be even in (x - mirror axis) to
    // keep untilted phantoms exactly mirror-symmetric, and independent of z so
    // axial MIPs preserve the full value distribution instead of truncating it
    // at each material's maximum.
    uint64_t rng = seed * 0x9e3779b97f4a7c15ULL + 0x1234abcd5678ef01ULL;
    const double ph_bone = detail::seeded_phase(rng);
    const double ph_enamel = detail::seeded_phase(rng);
    const double ph_metal = detail::seeded_phase(rng);
    // Wavelengths sit well above the tooth pitch so texture ripple cannot
    // masquerade as per-tooth structure in rendered profiles.
    const double kx = 2.0 * std::numbers::pi / 23.0; // texture wavelengths, mm
    const double ky = 2.0 * std::numbers::pi / 31.0;
    auto texture = [&](double mx, double my, double phase) {
        return std::cos(kx * (mx - arch_cx)) * std::cos(ky * (my - arch_cy) + phase);
    };

    struct Tooth {
        Vec2 base;   // model mm
        Vec2 radial; // unit, outward from arch center
        bool present = true;
        bool implant = false;
    };
    std::vector<Tooth> teeth(spec.tooth_count);
    for (int t = 0; t < spec.tooth_count; ++t) {
        const double rad = params[t] * std::numbers::pi / 180.0;
        teeth[t].base = {arch_cx + Aa * std::sin(rad), arch_cy + Ab * std::cos(rad)};
        teeth[t].radial = normalized({teeth[t].base.x - arch_cx, teeth[t].base.y - arch_cy});
        teeth[t].present = spec.missing_teeth.count(t) == 0;
        teeth[t].implant = spec.implant_teeth.count(t) != 0;
    }

    const double head_a = Aa + 10.0, head_b = Ab + 14.0;
    const double head_cy = arch_cy - 2.0;
    const double head_z_lo = 2.0, head_z_hi = (spec.dims.z - 1) * sz - 2.0;

    const double tilt = spec.tilt_deg * std::numbers::pi / 180.0;
    const double ct = std::cos(tilt), st = std::sin(tilt);

    Volume vol;
    vol.dims = spec.dims;
    vol.spacing = spec.spacing;
    vol.rescale_slope = spec.rescale_slope;
    vol.rescale_intercept = spec.rescale_intercept;
    vol.raw.assign(vol.voxel_count(), 0);

    enum Material : int { kAir = 0, kSoft, kBone, kEnamel, kMetal };

    struct ColumnTooth {
        int index;
        double crown_z_half; // crown half-height at this footprint, mm; < 0 when outside
        bool in_root;
    };

    std::vector<int16_t> column(spec.dims.z);
    for (int j = 0; j < spec.dims.y; ++j) {
        for (int i = 0; i < spec.dims.x; ++i) {
            // Model coordinates: undo the tilt about the volume's axial center.
            const double wx = i * sx, wy = j * sy;
            const double dx = wx - axial_cx, dy = wy - axial_cy;
            const double mx = axial_cx + ct * dx + st * dy;
            const double my = axial_cy - st * dx + ct * dy;

            const double ex = (mx - arch_cx) / Aa, ey = (my - arch_cy) / Ab;
            const double s = std::sqrt(ex * ex + ey * ey);
            const double dist = std::hypot(mx - arch_cx, my - arch_cy);
            const double radial = s > 1e-9 ? dist * (1.0 - 1.0 / s) : -std::min(Aa, Ab);

            const bool in_bone_2d = radial >= bone_r_in && radial <= bone_r_out;
            const bool in_ramp_2d = std::abs(radial) <= ramp_w;
            const double ramp_boost = in_ramp_2d ? ramp_gain * (1.0 - (radial / ramp_w) * (radial / ramp_w)) : 0.0;
            const double hx = (mx - arch_cx) / head_a, hy = (my - head_cy) / head_b;
            const bool in_head_2d = hx * hx + hy * hy <= 1.0;

            ColumnTooth near[4];
            int near_count = 0;
            for (int t = 0; t < spec.tooth_count && near_count < 4; ++t) {
                if (!teeth[t].present) continue;
                const Vec2 d{mx - teeth[t].base.x, my - teeth[t].base.y};
                const double dr = d.x * teeth[t].radial.x + d.y * teeth[t].radial.y;
                const double dt2 = d.x * -teeth[t].radial.y + d.y * teeth[t].radial.x;
                const double frac = (dr * dr) / (crown_rad * crown_rad) + (dt2 * dt2) / (crown_tan * crown_tan);
                const bool root_hit = dr * dr + dt2 * dt2 <= root_r * root_r;
                if (frac < 1.0 || root_hit) {
                    near[near_count].index = t;
                    near[near_count].crown_z_half = frac < 1.0 ? crown_v * std::sqrt(1.0 - frac) : -1.0;
                    near[near_count].in_root = root_hit;
                    ++near_count;
                }
            }

            for (int k = 0; k < spec.dims.z; ++k) {
                const double mz = k * sz;
                int mat = kAir;
                double boost = 0.0;
                if (in_head_2d && mz >= head_z_lo && mz <= head_z_hi) mat = kSoft;
                if (in_bone_2d && ((mz >= spec.jaw_z_lo_mm && mz < mand_hi) || (mz >= maxi_lo && mz < spec.jaw_z_hi_mm)))
                    mat = kBone;
                if (in_ramp_2d && mz >= ridge_lo && mz < ridge_hi) {
                    mat = std::max(mat, static_cast<int>(kBone));
                    boost = ramp_boost;
                }
                for (int n = 0; n < near_count; ++n) {
                    const bool in_crown = near[n].crown_z_half > 0 && std::abs(mz - crown_c) <= near[n].crown_z_half;
                    const bool in_root = near[n].in_root && mz >= root_lo && mz < root_hi;
                    if (in_crown || in_root)
                        mat = std::max(mat, static_cast<int>(teeth[near[n].index].implant ? kMetal : kEnamel));
                }

                double raw = 0.0;
                switch (mat) {
                    case kAir: raw = 0.0; break;
                    case kSoft: raw = spec.soft_raw; break;
                    case kBone: raw = spec.bone_raw * (1.0 + boost) * (1.0 + 0.05 * texture(mx, my, ph_bone)); break;
                    case kEnamel: raw = spec.enamel_raw * (1.0 + 0.04 * texture(mx, my, ph_enamel)); break;
                    case kMetal: raw = spec.metal_raw * (1.0 + 0.02 * texture(mx, my, ph_metal)); break;
                }
                column[k] = static_cast<int16_t>(std::lround(raw));
            }
            for (int k = 0; k < spec.dims.z; ++k) vol.raw[vol.index(i, j, k)] = column[k];
        }
    }

    PhantomTruth truth;
    truth.tilt_deg = spec.tilt_deg;
    truth.arch_center_vox = {arch_cx / sx, arch_cy / sy};
    truth.arch_rx_vox = Aa / sx;
    truth.arch_ry_vox = Ab / sy;
    truth.jaw_z_lo = static_cast<int>(std::ceil(spec.jaw_z_lo_mm / sz));
    truth.jaw_z_hi = static_cast<int>(std::floor(spec.jaw_z_hi_mm / sz)) + 1;
    truth.crown_z_lo = static_cast<int>(std::ceil((crown_c - crown_v) / sz));
    truth.crown_z_hi = static_cast<int>(std::floor((crown_c + crown_v) / sz)) + 1;
    for (int t = 0; t < spec.tooth_count; ++t) {
        ToothTruth tt;
        tt.index = t;
        tt.present = teeth[t].present;
        tt.implant = teeth[t].implant;
        tt.param_deg = params[t];
        // Crown centers in world coordinates: apply the tilt, convert to voxels.
        const double dx = teeth[t].base.x - axial_cx, dy = teeth[t].base.y - axial_cy;
        tt.center_vox = {(axial_cx + ct * dx - st * dy) / sx, (axial_cy + st * dx + ct * dy) / sy, crown_c / sz};
        truth.teeth.push_back(tt);
    }
    return {std::move(vol), std::move(truth)};
}

} // namespace pano

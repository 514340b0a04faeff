#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pano/jaw_detect.hpp"
#include "pano/vec.hpp"

namespace pano {

/// Axis-aligned ellipse in axial-plane voxel coordinates.
struct Ellipse {
    Vec2 center;
    double rx = 1.0; // semi-axis along x
    double ry = 1.0; // semi-axis along y

    /// Normalized quadratic form; 1 on the boundary, < 1 inside.
    double form(Vec2 p) const {
        const double u = (p.x - center.x) / rx;
        const double v = (p.y - center.y) / ry;
        return u * u + v * v;
    }

    /// Point at parameter phi (degrees); 0 is the anterior apex (+y), positive
    /// sweeps toward +x.
    Vec2 point_at(double phi_deg) const {
        const double t = phi_deg * std::numbers::pi / 180.0;
        return {center.x + rx * std::sin(t), center.y + ry * std::cos(t)};
    }

    void validate() const {
        if (!(rx > 0) || !(ry > 0)) throw std::invalid_argument("Ellipse: semi-axes must be > 0");
    }
};

/// Source-detector rotation-center trajectory fitted to the jaw bounding box.
inline Ellipse build_trajectory(const JawGeometry& jaw) {
    const double w = jaw.x_max - jaw.x_min;
    const double h = jaw.y_max - jaw.y_min;
    if (!(w > 0) || !(h > 0)) throw std::invalid_argument("build_trajectory: zero-area jaw bounding box");
    Ellipse e;
    e.center = {(jaw.x_min + jaw.x_max) / 2.0, (jaw.y_min + jaw.y_max) / 2.0};
    e.rx = w / 2.0;
    e.ry = h / 2.0;
    return e;
}

struct TangentSlope {
    bool vertical = false;
    double slope = 0.0;
};

/// Slope of the tangent line at a point on the ellipse. Points with y at the
/// center height have a vertical tangent.
inline TangentSlope tangent_slope(const Ellipse& e, Vec2 p) {
    e.validate();
    if (std::abs(e.form(p) - 1.0) > 1e-6) throw std::invalid_argument("tangent_slope: point not on ellipse");
    const double dy = p.y - e.center.y;
    if (std::abs(dy) <= 1e-9 * e.ry) return {true, 0.0};
    return {false, -(e.ry * e.ry) * (p.x - e.center.x) / ((e.rx * e.rx) * dy)};
}

/// Elliptical annulus confining ray samples. The anterior apex lies on the
/// y semi-axis, so the y padding sets the incisor-side thickness and the x
/// padding the molar-side thickness.
struct FocalTrough {
    Ellipse inner;
    Ellipse outer;
    double incisor_thickness = 0.0; // voxels, anterior apex gap
    double molar_thickness = 0.0;   // voxels, lateral gap
};

inline FocalTrough build_trough(const JawGeometry& jaw, double t_incisor, double t_molar) {
    if (!(t_molar > 0) || !(t_incisor >= t_molar))
        throw std::invalid_argument("build_trough: need t_incisor >= t_molar > 0");
    const Ellipse base = build_trajectory(jaw);
    FocalTrough tr;
    tr.incisor_thickness = t_incisor;
    tr.molar_thickness = t_molar;
    tr.outer = {base.center, base.rx + t_molar / 2.0, base.ry + t_incisor / 2.0};
    tr.inner = {base.center, base.rx - t_molar / 2.0, base.ry - t_incisor / 2.0};
    if (!(tr.inner.rx > 0) || !(tr.inner.ry > 0))
        throw std::invalid_argument("build_trough: inner ellipse collapsed; trough too thick for jaw");
    return tr;
}

inline bool trough_contains(const FocalTrough& tr, Vec2 p) {
    return tr.outer.form(p) <= 1.0 && tr.inner.form(p) >= 1.0;
}

/// One panorama column: the tangent point on the trajectory, the tangent-line
/// slope there, the sampling direction, and the in-trough sample points at
/// uniform spacing. Sampling marches along the inward normal through the
/// tangent point, so a column reads the trough cross-section at its own
/// angular position and nowhere else.
struct Ray {
    double param_deg = 0.0; // tangent-point parameter, 0 at the anterior apex
    Vec2 tangent_point;
    TangentSlope tangent;
    Vec2 direction;            // unit, points into the jaw
    std::vector<Vec2> samples; // ordered outer -> inner, spacing = fan delta
};

struct RayFan {
    Ellipse trajectory;
    double delta_vox = 0.5;
    std::vector<Ray> rays; // ordered left-posterior -> anterior -> right-posterior
};

namespace detail {

// Tangent parameters marched symmetrically out of the anterior apex; the
// increment grows linearly from shift_min at the apex to shift_max at the
// posterior ends, which keeps tangent points near-equidistant along the arch.
inline std::vector<double> fan_parameters(double sweep_deg, double shift_min, double shift_max) {
    const double half = sweep_deg / 2.0;
    std::vector<double> up{0.0};
    double phi = 0.0;
    while (true) {
        const double step = shift_min + (shift_max - shift_min) * (phi / half);
        phi += step;
        if (phi > half + 1e-9) break;
        up.push_back(std::min(phi, half));
    }
    std::vector<double> all;
    all.reserve(2 * up.size() - 1);
    for (size_t i = up.size(); i-- > 1;) all.push_back(-up[i]);
    for (double v : up) all.push_back(v);
    return all;
}

} // namespace detail

inline RayFan build_ray_fan(const Ellipse& traj, const FocalTrough& trough, double sweep_deg,
                            double shift_min_deg, double shift_max_deg, double delta_vox) {
    traj.validate();
    if (!(sweep_deg > 0) || sweep_deg > 180.0) throw std::invalid_argument("build_ray_fan: sweep must be in (0, 180]");
    if (!(shift_min_deg > 0) || !(shift_min_deg <= shift_max_deg))
        throw std::invalid_argument("build_ray_fan: need 0 < shift_min <= shift_max");
    if (!(delta_vox > 0)) throw std::invalid_argument("build_ray_fan: delta must be > 0");

    RayFan fan;
    fan.trajectory = traj;
    fan.delta_vox = delta_vox;
    for (double phi : detail::fan_parameters(sweep_deg, shift_min_deg, shift_max_deg)) {
        Ray ray;
        ray.param_deg = phi;
        ray.tangent_point = traj.point_at(phi);
        ray.tangent = tangent_slope(traj, ray.tangent_point);
        // Inward normal: negative gradient of the quadratic form.
        const Vec2 grad{(ray.tangent_point.x - traj.center.x) / (traj.rx * traj.rx),
                        (ray.tangent_point.y - traj.center.y) / (traj.ry * traj.ry)};
        ray.direction = normalized({-grad.x, -grad.y});

        // Contiguous in-trough run through the tangent point; marching stops
        // at the first membership failure on each side so a column never
        // picks up the far side of the arch.
        std::vector<Vec2> inward;
        for (int n = 0;; ++n) {
            const Vec2 p = ray.tangent_point + (n * delta_vox) * ray.direction;
            if (!trough_contains(trough, p)) break;
            inward.push_back(p);
        }
        std::vector<Vec2> outward;
        for (int n = -1;; --n) {
            const Vec2 p = ray.tangent_point + (n * delta_vox) * ray.direction;
            if (!trough_contains(trough, p)) break;
            outward.push_back(p);
        }
        ray.samples.reserve(inward.size() + outward.size());
        for (size_t i = outward.size(); i-- > 0;) ray.samples.push_back(outward[i]);
        for (const Vec2& p : inward) ray.samples.push_back(p);
        fan.rays.push_back(std::move(ray));
    }
    if (fan.rays.empty()) throw std::runtime_error("build_ray_fan: empty fan");
    return fan;
}

} // namespace pano

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pano/geometry.hpp"
#include "pano/image.hpp"
#include "pano/jaw_detect.hpp"
#include "pano/metrics.hpp"
#include "pano/phantom.hpp"
#include "pano/render.hpp"
#include "pano/volume.hpp"

namespace pano {

/// Full synthesis configuration. File format: one `key=value` per line, `#`
/// comments allowed; command-line flags override file values. Defaults follow
/// the documented windowing constants; everything is overridable.
struct PipelineConfig {
    std::string input;
    std::string output;

    WindowSpec preprocess_window{225.0, 3096.0}; // jaw detection contrast
    WindowSpec render_window{-175.0, 3096.0};    // synthesis floor
    WindowSpec soft_tissue_window{-125.0, 225.0}; // reference soft-tissue range
    double air_hu = -1000.0;                      // fill for resampled out-of-field voxels

    double sweep_deg = 180.0;
    double shift_min_deg = 0.4;
    double shift_max_deg = 0.8;
    double delta_vox = 0.5;
    double beta = 0.29; // calibrated so a phantom molar crown renders near 0.6
    double trough_incisor_vox = 11.0;
    double trough_molar_vox = 8.0;

    bool tilt_correct = true;
    std::string debug_dir;
    int threads = 1;
    int pgm_bits = 16;
    bool quiet = false; // not a config-file key; suppresses stage logging

    void validate() const {
        preprocess_window.validate();
        render_window.validate();
        soft_tissue_window.validate();
        if (!(sweep_deg > 0) || sweep_deg > 180.0) throw std::invalid_argument("config: sweep_deg must be in (0, 180]");
        if (!(shift_min_deg > 0) || !(shift_min_deg <= shift_max_deg))
            throw std::invalid_argument("config: need 0 < shift_min <= shift_max");
        if (!(delta_vox > 0)) throw std::invalid_argument("config: delta must be > 0");
        if (!(beta > 0)) throw std::invalid_argument("config: beta must be > 0");
        if (!(trough_molar_vox > 0) || !(trough_incisor_vox >= trough_molar_vox))
            throw std::invalid_argument("config: need trough_incisor >= trough_molar > 0");
        if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
        if (pgm_bits != 8 && pgm_bits != 16) throw std::invalid_argument("config: pgm_bits must be 8 or 16");
        if (!std::isfinite(air_hu)) throw std::invalid_argument("config: air_hu must be finite");
    }

    std::vector<std::pair<std::string, std::string>> snapshot() const {
        auto d = [](double v) { return detail::format_double(v); };
        return {
            {"input", input},
            {"output", output},
            {"preprocess_lo", d(preprocess_window.lo)},
            {"preprocess_hi", d(preprocess_window.hi)},
            {"render_lo", d(render_window.lo)},
            {"render_hi", d(render_window.hi)},
            {"soft_lo", d(soft_tissue_window.lo)},
            {"soft_hi", d(soft_tissue_window.hi)},
            {"air_hu", d(air_hu)},
            {"sweep_deg", d(sweep_deg)},
            {"shift_min", d(shift_min_deg)},
            {"shift_max", d(shift_max_deg)},
            {"delta", d(delta_vox)},
            {"beta", d(beta)},
            {"trough_incisor", d(trough_incisor_vox)},
            {"trough_molar", d(trough_molar_vox)},
            {"tilt_correct", tilt_correct ? "1" : "0"},
            {"debug_dir", debug_dir},
            {"threads", std::to_string(threads)},
            {"pgm_bits", std::to_string(pgm_bits)},
        };
    }
};

/// Applies `key=value` lines from a config file. Unknown keys are rejected.
inline void apply_config_file(PipelineConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        const std::string entry = line.substr(first, last - first + 1);
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) + " is not key=value");
        const std::string key = entry.substr(0, eq);
        const std::string value = entry.substr(eq + 1);
        auto num = [&]() { return detail::parse_double(value, key.c_str()); };
        if (key == "input") cfg.input = value;
        else if (key == "output") cfg.output = value;
        else if (key == "preprocess_lo") cfg.preprocess_window.lo = num();
        else if (key == "preprocess_hi") cfg.preprocess_window.hi = num();
        else if (key == "render_lo") cfg.render_window.lo = num();
        else if (key == "render_hi") cfg.render_window.hi = num();
        else if (key == "soft_lo") cfg.soft_tissue_window.lo = num();
        else if (key == "soft_hi") cfg.soft_tissue_window.hi = num();
        else if (key == "air_hu") cfg.air_hu = num();
        else if (key == "sweep_deg") cfg.sweep_deg = num();
        else if (key == "shift_min") cfg.shift_min_deg = num();
        else if (key == "shift_max") cfg.shift_max_deg = num();
        else if (key == "delta") cfg.delta_vox = num();
        else if (key == "beta") cfg.beta = num();
        else if (key == "trough_incisor") cfg.trough_incisor_vox = num();
        else if (key == "trough_molar") cfg.trough_molar_vox = num();
        else if (key == "tilt_correct") cfg.tilt_correct = num() != 0;
        else if (key == "debug_dir") cfg.debug_dir = value;
        else if (key == "threads") cfg.threads = static_cast<int>(num());
        else if (key == "pgm_bits") cfg.pgm_bits = static_cast<int>(num());
        else throw std::invalid_argument("config: unknown key '" + key + "' on line " + std::to_string(lineno));
    }
}

struct PipelineResult {
    Panorama panorama;
    JawGeometry jaw;          // post-correction geometry actually used
    Ellipse trajectory;
    FocalTrough trough;
    RayFan fan;
    int roi_lo = 0, roi_hi = 0;
    double tilt_estimate_deg = 0.0; // estimate on the input volume
    double tilt_applied_deg = 0.0;  // rotation actually applied
    double residual_tilt_deg = 0.0; // estimate after correction
};

namespace detail {

class StageTimer {
public:
    explicit StageTimer(bool quiet) : quiet_(quiet) {}
    template <typename F>
    auto run(const std::string& name, F&& f) -> decltype(f()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(f())>) {
                f();
                log(name, start);
            } else {
                auto result = f();
                log(name, start);
                return result;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("stage " + name + ": " + e.what());
        }
    }

private:
    void log(const std::string& name, std::chrono::steady_clock::time_point start) const {
        if (quiet_) return;
        const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream os;
        os << "[pano] stage " << name << ": " << ms << " ms\n";
        std::cerr << os.str();
    }
    bool quiet_;
};

inline ImageF normalize_for_dump(const ImageF& img) {
    ImageF out = img;
    float hi = 0.0f;
    for (float v : out.px) hi = std::max(hi, v);
    if (hi > 0)
        for (float& v : out.px) v = v / hi;
    return out;
}

inline void draw_point(ImageF& img, double x, double y, float value) {
    const int c = static_cast<int>(std::lround(x)), r = static_cast<int>(std::lround(y));
    if (r >= 0 && r < img.height && c >= 0 && c < img.width) img.at(r, c) = value;
}

inline void draw_ellipse(ImageF& img, const Ellipse& e, float value) {
    for (int i = 0; i < 720; ++i) {
        const Vec2 p = e.point_at(i * 0.5);
        draw_point(img, p.x, p.y, value);
    }
}

inline void dump_geometry_overlay(const std::string& path, const ImageF& axial_mip, const Ellipse& traj,
                                  const FocalTrough& trough, const RayFan& fan) {
    ImageF img = normalize_for_dump(axial_mip);
    for (float& v : img.px) v *= 0.6f;
    draw_ellipse(img, trough.inner, 0.8f);
    draw_ellipse(img, trough.outer, 0.8f);
    draw_ellipse(img, traj, 1.0f);
    for (size_t i = 0; i < fan.rays.size(); i += 10)
        for (const Vec2& p : fan.rays[i].samples) draw_point(img, p.x, p.y, 1.0f);
    write_pgm(path, img, 8);
}

inline void dump_contour_overlay(const std::string& path, const ImageF& axial_mip, const std::vector<Vec2>& contour) {
    ImageF img = normalize_for_dump(axial_mip);
    for (float& v : img.px) v *= 0.6f;
    for (const Vec2& p : contour) draw_point(img, p.x, p.y, 1.0f);
    write_pgm(path, img, 8);
}

struct JawDetection {
    MipImage axial_mip;
    MaskImage mask;
    std::vector<Vec2> contour;
    JawGeometry jaw;
    double threshold = 0.0;
};

inline JawDetection detect_jaw_axial(const FloatVolume& pre, int roi_lo, int roi_hi) {
    JawDetection det;
    det.axial_mip = compute_mip(pre, MipAxis::axial, roi_lo, roi_hi);
    const Histogram hist = build_histogram(det.axial_mip.image);
    const GaussianFit fit = fit_gaussian(hist);
    det.threshold = teeth_threshold(fit);
    det.mask = binarize_and_clean(det.axial_mip.image, det.threshold);
    det.contour = extract_contour(det.mask);
    det.jaw = make_jaw_geometry(det.contour, roi_lo, roi_hi);
    return det;
}

} // namespace detail

inline void write_provenance(const std::string& path, const PipelineConfig& cfg, const PipelineResult& res) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : cfg.snapshot()) out << k << "=" << v << "\n";
    auto d = [](double v) { return detail::format_double(v); };
    out << "derived_tilt_estimate_deg=" << d(res.tilt_estimate_deg) << "\n";
    out << "derived_tilt_applied_deg=" << d(res.tilt_applied_deg) << "\n";
    out << "derived_residual_tilt_deg=" << d(res.residual_tilt_deg) << "\n";
    out << "derived_roi_lo=" << res.roi_lo << "\n";
    out << "derived_roi_hi=" << res.roi_hi << "\n";
    out << "derived_bbox=" << d(res.jaw.x_min) << " " << d(res.jaw.x_max) << " " << d(res.jaw.y_min) << " "
        << d(res.jaw.y_max) << "\n";
    out << "derived_trajectory=" << d(res.trajectory.center.x) << " " << d(res.trajectory.center.y) << " "
        << d(res.trajectory.rx) << " " << d(res.trajectory.ry) << "\n";
    out << "derived_ray_count=" << res.fan.rays.size() << "\n";
    out << "derived_panorama_width=" << res.panorama.width << "\n";
    out << "derived_panorama_height=" << res.panorama.height << "\n";
}

/// Runs load -> rescale -> window -> jaw detection -> tilt correction ->
/// trough/trajectory/fan -> render. Stage failures carry the stage name.
/// When cfg.output is non-empty the panorama and a provenance sidecar are
/// written; on an empty-jaw failure diagnostic MIP dumps are emitted.
inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.input.empty()) throw std::invalid_argument("config: input path required");
    detail::StageTimer timer(cfg.quiet);
    namespace fs = std::filesystem;
    const bool dump = !cfg.debug_dir.empty();
    if (dump) fs::create_directories(cfg.debug_dir);
    auto dump_path = [&](const char* name) { return (fs::path(cfg.debug_dir) / name).string(); };

    const Volume vol = timer.run("load", [&] { return load_volume(cfg.input); });
    FloatVolume hu = timer.run("rescale", [&] { return rescale(vol); });
    FloatVolume pre = timer.run("preprocess_window", [&] { return window_values(hu, cfg.preprocess_window); });

    const MipImage coronal = timer.run("coronal_mip", [&] { return compute_mip(pre, MipAxis::coronal, 0, pre.dims.y); });
    if (dump) write_pgm(dump_path("01_coronal_mip.pgm"), detail::normalize_for_dump(coronal.image), 8);

    MaskImage coronal_mask;
    try {
        coronal_mask = timer.run("coronal_mask", [&] {
            const GaussianFit fit = fit_gaussian(build_histogram(coronal.image));
            return binarize_and_clean(coronal.image, teeth_threshold(fit));
        });
    } catch (const std::exception&) {
        if (!cfg.output.empty())
            write_pgm(cfg.output + ".diag_coronal_mip.pgm", detail::normalize_for_dump(coronal.image), 8);
        throw;
    }
    if (dump) write_pgm(dump_path("02_coronal_mask.pgm"), coronal_mask);

    const auto [roi_lo, roi_hi] = timer.run("roi", [&] {
        Histogram zprofile;
        zprofile.centers.resize(coronal_mask.height);
        zprofile.counts.assign(coronal_mask.height, 0.0);
        for (int r = 0; r < coronal_mask.height; ++r) {
            zprofile.centers[r] = r;
            for (int c = 0; c < coronal_mask.width; ++c) zprofile.counts[r] += coronal_mask.at(r, c);
        }
        return roi_slices(fit_gaussian(zprofile), pre.dims.z);
    });

    detail::JawDetection det;
    try {
        det = timer.run("jaw_detect", [&] { return detail::detect_jaw_axial(pre, roi_lo, roi_hi); });
    } catch (const std::exception&) {
        if (!cfg.output.empty()) {
            const MipImage axial = compute_mip(pre, MipAxis::axial, roi_lo, roi_hi);
            write_pgm(cfg.output + ".diag_axial_mip.pgm", detail::normalize_for_dump(axial.image), 8);
        }
        throw;
    }
    if (dump) {
        write_pgm(dump_path("03_axial_mip.pgm"), detail::normalize_for_dump(det.axial_mip.image), 8);
        write_pgm(dump_path("04_axial_mask.pgm"), det.mask);
        detail::dump_contour_overlay(dump_path("05_contour_overlay.pgm"), det.axial_mip.image, det.contour);
    }

    PipelineResult res;
    res.roi_lo = roi_lo;
    res.roi_hi = roi_hi;
    res.tilt_estimate_deg = det.jaw.tilt_deg;
    res.residual_tilt_deg = det.jaw.tilt_deg;

    const bool apply_tilt = cfg.tilt_correct && !det.jaw.tilt_low_confidence && std::abs(det.jaw.tilt_deg) > 0.05;
    if (apply_tilt) {
        res.tilt_applied_deg = det.jaw.tilt_deg;
        hu = timer.run("tilt_correct", [&] { return correct_tilt(hu, det.jaw.tilt_deg, static_cast<float>(cfg.air_hu)); });
        pre = timer.run("preprocess_window", [&] { return window_values(hu, cfg.preprocess_window); });
        det = timer.run("jaw_redetect", [&] { return detail::detect_jaw_axial(pre, roi_lo, roi_hi); });
        res.residual_tilt_deg = det.jaw.tilt_deg;
        if (dump) {
            write_pgm(dump_path("06_axial_mip_corrected.pgm"), detail::normalize_for_dump(det.axial_mip.image), 8);
            write_pgm(dump_path("07_axial_mask_corrected.pgm"), det.mask);
            detail::dump_contour_overlay(dump_path("08_contour_overlay_corrected.pgm"), det.axial_mip.image,
                                         det.contour);
        }
    }
    res.jaw = det.jaw;

    res.trajectory = timer.run("trajectory", [&] { return build_trajectory(det.jaw); });
    res.trough = timer.run("trough", [&] { return build_trough(det.jaw, cfg.trough_incisor_vox, cfg.trough_molar_vox); });
    res.fan = timer.run("ray_fan", [&] {
        return build_ray_fan(res.trajectory, res.trough, cfg.sweep_deg, cfg.shift_min_deg, cfg.shift_max_deg,
                             cfg.delta_vox);
    });
    if (dump)
        detail::dump_geometry_overlay(dump_path("09_geometry_overlay.pgm"), det.axial_mip.image, res.trajectory,
                                      res.trough, res.fan);

    const FloatVolume rw = timer.run("render_window", [&] { return window_values(hu, cfg.render_window); });
    RenderParams params;
    params.beta = cfg.beta;
    params.render_window = cfg.render_window;
    params.delta_vox = cfg.delta_vox;
    res.panorama = timer.run("render", [&] { return render_panorama(rw, res.fan, roi_lo, roi_hi, params, cfg.threads); });
    res.panorama.provenance = cfg.snapshot();

    if (!cfg.output.empty()) {
        timer.run("write", [&] {
            write_pgm(cfg.output, res.panorama.image(), cfg.pgm_bits);
            write_provenance(cfg.output + ".meta", cfg, res);
        });
    }
    return res;
}

/// Structured-text sidecar with the generation ground truth.
inline void write_phantom_truth(const std::string& path, const PhantomSpec& spec, const PhantomTruth& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    auto d = [](double v) { return detail::format_double(v); };
    out << "tilt_deg=" << d(truth.tilt_deg) << "\n";
    out << "tooth_count=" << spec.tooth_count << "\n";
    out << "arch_center_x_vox=" << d(truth.arch_center_vox.x) << "\n";
    out << "arch_center_y_vox=" << d(truth.arch_center_vox.y) << "\n";
    out << "arch_rx_vox=" << d(truth.arch_rx_vox) << "\n";
    out << "arch_ry_vox=" << d(truth.arch_ry_vox) << "\n";
    out << "jaw_z_lo=" << truth.jaw_z_lo << "\n";
    out << "jaw_z_hi=" << truth.jaw_z_hi << "\n";
    out << "crown_z_lo=" << truth.crown_z_lo << "\n";
    out << "crown_z_hi=" << truth.crown_z_hi << "\n";
    for (const ToothTruth& t : truth.teeth) {
        std::ostringstream key;
        key << "tooth_" << (t.index < 10 ? "0" : "") << t.index;
        out << key.str() << "_present=" << (t.present ? 1 : 0) << "\n";
        out << key.str() << "_implant=" << (t.implant ? 1 : 0) << "\n";
        out << key.str() << "_param_deg=" << d(t.param_deg) << "\n";
        out << key.str() << "_x_vox=" << d(t.center_vox.x) << "\n";
        out << key.str() << "_y_vox=" << d(t.center_vox.y) << "\n";
        out << key.str() << "_z_vox=" << d(t.center_vox.z) << "\n";
    }
}

} // namespace pano

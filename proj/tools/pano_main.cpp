// Command-line front end: synthesize panoramic X-rays from PVOL1 CBCT
// volumes, generate test phantoms, and compare PGM images.
//
// Exit codes: 0 success, 1 pipeline/stage failure, 2 usage or validation error.

#include <cstdint>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pano/metrics.hpp"
#include "pano/phantom.hpp"
#include "pano/pipeline.hpp"

namespace {

int run_synthesize(const std::string& config_path, pano::PipelineConfig& cfg,
                   const std::vector<std::function<void()>>& overrides) {
    try {
        if (!config_path.empty()) pano::apply_config_file(cfg, config_path);
        for (const auto& apply : overrides) apply();
        cfg.validate();
        if (cfg.input.empty() || cfg.output.empty())
            throw std::invalid_argument("config: input and output paths are required");
    } catch (const std::exception& e) {
        std::cerr << "pano synthesize: " << e.what() << "\n";
        return 2;
    }
    try {
        const pano::PipelineResult res = pano::run_pipeline(cfg);
        std::cout << "output=" << cfg.output << "\n";
        std::cout << "width=" << res.panorama.width << "\n";
        std::cout << "height=" << res.panorama.height << "\n";
        std::cout << "tilt_estimate_deg=" << res.tilt_estimate_deg << "\n";
        std::cout << "tilt_applied_deg=" << res.tilt_applied_deg << "\n";
        std::cout << "roi=" << res.roi_lo << ".." << res.roi_hi << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "pano synthesize: " << e.what() << "\n";
        return 1;
    }
}

int run_phantom(const pano::PhantomSpec& spec, uint64_t seed, const std::string& output, std::string truth_path) {
    try {
        spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "pano phantom: " << e.what() << "\n";
        return 2;
    }
    try {
        const auto [vol, truth] = pano::generate_phantom(spec, seed);
        pano::write_volume(output, vol);
        if (truth_path.empty()) truth_path = output + ".truth";
        pano::write_phantom_truth(truth_path, spec, truth);
        std::cout << "volume=" << output << "\n";
        std::cout << "truth=" << truth_path << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "pano phantom: " << e.what() << "\n";
        return 1;
    }
}

int run_compare(const std::string& a_path, const std::string& b_path) {
    pano::ImageF a, b;
    try {
        a = pano::read_pgm(a_path);
        b = pano::read_pgm(b_path);
    } catch (const std::exception& e) {
        std::cerr << "pano compare: " << e.what() << "\n";
        return 1;
    }
    if (!a.same_dims(b)) {
        std::cerr << "pano compare: dimension mismatch (" << a.width << "x" << a.height << " vs " << b.width << "x"
                  << b.height << ")\n";
        return 2;
    }
    const pano::MetricReport rep = pano::compare_images(a, b);
    std::cout << "ssim=" << rep.ssim << "\n";
    if (std::isinf(rep.psnr_db)) std::cout << "psnr_db=inf\n";
    else std::cout << "psnr_db=" << rep.psnr_db << "\n";
    std::cout << "width=" << rep.width << "\n";
    std::cout << "height=" << rep.height << "\n";
    std::cout << "ssim_window=" << rep.ssim_window << "\n";
    return 0;
}

std::set<int> parse_index_list(const std::string& csv) {
    std::set<int> out;
    std::string token;
    std::istringstream ss(csv);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        out.insert(std::stoi(token));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panoramic X-ray synthesis from CBCT volumes"};
    app.require_subcommand(1);

    // --- synthesize ---
    auto* syn = app.add_subcommand("synthesize", "Render a panoramic X-ray from a PVOL1 volume");
    pano::PipelineConfig cfg;
    std::string config_path;
    struct Flags {
        std::string input, output, debug_dir;
        double sweep = 0, smin = 0, smax = 0, beta = 0, delta = 0, tinc = 0, tmol = 0;
        int threads = 0, pgm_bits = 0;
        bool no_tilt = false;
    } fl;
    syn->add_option("--input", fl.input, "Input PVOL1 volume");
    syn->add_option("--output", fl.output, "Output panorama PGM");
    syn->add_option("--config", config_path, "key=value config file");
    auto* o_sweep = syn->add_option("--sweep-deg", fl.sweep, "Total angular sweep (degrees)");
    auto* o_smin = syn->add_option("--shift-min", fl.smin, "Ray shift at the anterior apex (degrees)");
    auto* o_smax = syn->add_option("--shift-max", fl.smax, "Ray shift at the posterior ends (degrees)");
    auto* o_beta = syn->add_option("--beta", fl.beta, "Attenuation correction factor");
    auto* o_delta = syn->add_option("--delta", fl.delta, "Ray sample spacing (voxels)");
    auto* o_tinc = syn->add_option("--trough-incisor", fl.tinc, "Trough thickness at the incisors (voxels)");
    auto* o_tmol = syn->add_option("--trough-molar", fl.tmol, "Trough thickness at the molars (voxels)");
    auto* o_thr = syn->add_option("--threads", fl.threads, "Render worker count (0 = hardware)");
    auto* o_bits = syn->add_option("--pgm-bits", fl.pgm_bits, "Output PGM depth (8 or 16)");
    syn->add_flag("--no-tilt-correct", fl.no_tilt, "Skip sagittal tilt correction");
    syn->add_option("--debug-dir", fl.debug_dir, "Directory for stage debug dumps");

    // --- phantom ---
    auto* ph = app.add_subcommand("phantom", "Generate a synthetic head phantom (PVOL1 + truth sidecar)");
    pano::PhantomSpec spec;
    std::string ph_output, ph_truth, ph_missing, ph_implants;
    uint64_t seed = 0;
    int ph_dims = 128;
    double ph_spacing = 1.0;
    ph->add_option("--output", ph_output, "Output PVOL1 path")->required();
    ph->add_option("--truth", ph_truth, "Truth sidecar path (default: <output>.truth)");
    ph->add_option("--dims", ph_dims, "Cubic volume size (voxels)");
    ph->add_option("--spacing", ph_spacing, "Isotropic voxel spacing (mm)");
    ph->add_option("--teeth", spec.tooth_count, "Tooth count");
    ph->add_option("--missing", ph_missing, "Missing tooth indices (csv)");
    ph->add_option("--implants", ph_implants, "Implant tooth indices (csv)");
    ph->add_option("--tilt", spec.tilt_deg, "Jaw tilt (degrees)");
    ph->add_option("--arch-a", spec.arch_rx_mm, "Arch semi-axis, left-right (mm)");
    ph->add_option("--arch-b", spec.arch_ry_mm, "Arch semi-axis, antero-posterior (mm)");
    ph->add_option("--seed", seed, "Texture seed");

    // --- compare ---
    auto* cmp = app.add_subcommand("compare", "SSIM/PSNR report for two PGM images");
    std::string cmp_a, cmp_b;
    cmp->add_option("a", cmp_a, "First image")->required();
    cmp->add_option("b", cmp_b, "Second image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (syn->parsed()) {
        // File config first, then explicit flags on top.
        std::vector<std::function<void()>> overrides;
        if (!fl.input.empty()) overrides.emplace_back([&] { cfg.input = fl.input; });
        if (!fl.output.empty()) overrides.emplace_back([&] { cfg.output = fl.output; });
        if (!fl.debug_dir.empty()) overrides.emplace_back([&] { cfg.debug_dir = fl.debug_dir; });
        if (o_sweep->count()) overrides.emplace_back([&] { cfg.sweep_deg = fl.sweep; });
        if (o_smin->count()) overrides.emplace_back([&] { cfg.shift_min_deg = fl.smin; });
        if (o_smax->count()) overrides.emplace_back([&] { cfg.shift_max_deg = fl.smax; });
        if (o_beta->count()) overrides.emplace_back([&] { cfg.beta = fl.beta; });
        if (o_delta->count()) overrides.emplace_back([&] { cfg.delta_vox = fl.delta; });
        if (o_tinc->count()) overrides.emplace_back([&] { cfg.trough_incisor_vox = fl.tinc; });
        if (o_tmol->count()) overrides.emplace_back([&] { cfg.trough_molar_vox = fl.tmol; });
        if (o_thr->count()) overrides.emplace_back([&] { cfg.threads = fl.threads; });
        if (o_bits->count()) overrides.emplace_back([&] { cfg.pgm_bits = fl.pgm_bits; });
        if (fl.no_tilt) overrides.emplace_back([&] { cfg.tilt_correct = false; });
        return run_synthesize(config_path, cfg, overrides);
    }
    if (ph->parsed()) {
        // Scale the default layout to the requested field of view, keeping
        // any explicitly set arch/teeth/tilt values.
        pano::PhantomSpec scaled = pano::make_phantom_spec(ph_dims, ph_spacing);
        scaled.tooth_count = spec.tooth_count;
        scaled.tilt_deg = spec.tilt_deg;
        scaled.arch_rx_mm = spec.arch_rx_mm;
        scaled.arch_ry_mm = spec.arch_ry_mm;
        spec = scaled;
        try {
            spec.missing_teeth = parse_index_list(ph_missing);
            spec.implant_teeth = parse_index_list(ph_implants);
        } catch (const std::exception&) {
            std::cerr << "pano phantom: bad index list\n";
            return 2;
        }
        return run_phantom(spec, seed, ph_output, ph_truth);
    }
    return run_compare(cmp_a, cmp_b);
}

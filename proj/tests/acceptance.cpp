// Acceptance suite: each criterion prints one [PASS]/[FAIL] line; the exit
// code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "pano/metrics.hpp"
#include "pano/phantom.hpp"
#include "pano/pipeline.hpp"

using namespace pano;
namespace fs = std::filesystem;

namespace {

struct Checker {
    std::vector<std::string> errors;
    void require(bool ok, const std::string& what) {
        if (!ok) errors.push_back(what);
    }
    template <typename T>
    void close(T actual, T expected, double tol, const std::string& what) {
        const double err = std::abs(static_cast<double>(actual) - static_cast<double>(expected));
        if (!(err <= tol)) {
            std::ostringstream os;
            os << what << ": got " << actual << ", want " << expected << " (err " << err << ", tol " << tol << ")";
            errors.push_back(os.str());
        }
    }
};

std::string file_bytes(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "pano_acceptance";
    fs::create_directories(dir);
    return dir;
}

// The standard phantom: 128^3 at 1 mm, 16 teeth, seed 42.
PhantomSpec standard_spec() { return make_phantom_spec(128, 1.0); }

PipelineConfig standard_config(const std::string& input, const std::string& output) {
    PipelineConfig cfg;
    cfg.input = input;
    cfg.output = output;
    cfg.quiet = true;
    return cfg;
}

double relative_gap(double actual, double expected) {
    return std::abs(actual - expected) / std::max(1.0, std::abs(expected));
}

// ---------------------------------------------------------------------------
// 1. Equation suite
// ---------------------------------------------------------------------------
void criterion_equations(Checker& c) {
    GaussianFit f;
    f.mu = 500;
    f.sigma = 50;
    c.require(relative_gap(teeth_threshold(f), 600.0) < 1e-9, "teeth_threshold(500, 50)");
    f.mu = 0;
    f.sigma = 1;
    c.require(relative_gap(teeth_threshold(f), 2.0) < 1e-9, "teeth_threshold(0, 1)");
    f.mu = 100;
    f.sigma = 0.5;
    c.require(relative_gap(teeth_threshold(f), 101.0) < 1e-9, "teeth_threshold(100, 0.5)");

    f.mu = 100;
    f.sigma = 10;
    c.require(roi_slices(f, 1000) == std::pair<int, int>{75, 115}, "roi_slices(100, 10)");
    f.mu = 2;
    f.sigma = 10;
    c.require(roi_slices(f, 50) == std::pair<int, int>{0, 17}, "roi_slices clamps to (0, 17)");

    const Ellipse circle{{0, 0}, 7, 7};
    const TangentSlope top = tangent_slope(circle, {0, 7});
    c.require(!top.vertical && std::abs(top.slope) < 1e-9, "tangent at circle top is horizontal");
    const double s = 7.0 / std::sqrt(2.0);
    const TangentSlope diag = tangent_slope(circle, {s, s});
    c.require(!diag.vertical && relative_gap(diag.slope, -1.0) < 1e-9, "tangent at 45 degrees is -1");
    c.require(tangent_slope(circle, {7, 0}).vertical, "tangent at (r, 0) is vertical");

    c.require(transmittance({}, 1.0, 1.0) == 1.0, "empty transmittance is 1");
    const std::vector<double> sigmas(100, 0.01);
    c.require(relative_gap(transmittance(sigmas, 1.0, 1.0), std::exp(-1.0)) < 1e-9, "transmittance e^-1");
}

// ---------------------------------------------------------------------------
// 2. Tangency property
// ---------------------------------------------------------------------------
void criterion_tangency(Checker& c) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> axis(5.0, 100.0), center(-100.0, 100.0), angle(0.0, 360.0);
    double worst = 0.0;
    int vertical = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const Ellipse e{{center(rng), center(rng)}, axis(rng), axis(rng)};
        const Vec2 p = e.point_at(angle(rng));
        const TangentSlope t = tangent_slope(e, p);
        if (t.vertical) {
            ++vertical;
            worst = std::max(worst, std::abs(std::abs(p.x - e.center.x) - e.rx) / e.rx);
            continue;
        }
        const double d = t.slope * e.center.x + (p.y - t.slope * p.x) - e.center.y;
        const double lhs = e.ry * e.ry + e.rx * e.rx * t.slope * t.slope;
        worst = std::max(worst, std::abs(lhs - d * d) / lhs);
    }
    std::ostringstream os;
    os << "worst normalized discriminant " << worst << " (" << vertical << " vertical)";
    c.require(worst < 1e-6, os.str());
}

// ---------------------------------------------------------------------------
// 3. MIP oracle
// ---------------------------------------------------------------------------
void criterion_mip(Checker& c) {
    for (int seedidx = 0; seedidx < 100; ++seedidx) {
        std::mt19937 rng(3000 + seedidx);
        std::uniform_real_distribution<float> val(-100.0f, 100.0f);
        FloatVolume v({16, 16, 16}, {1, 1, 1});
        for (auto& x : v.values) x = val(rng);
        std::uniform_int_distribution<int> pick(0, 15);
        int lo = pick(rng), hi = pick(rng);
        if (lo > hi) std::swap(lo, hi);
        ++hi;

        const MipImage axial = compute_mip(v, MipAxis::axial, lo, hi);
        const MipImage coronal = compute_mip(v, MipAxis::coronal, lo, hi);
        for (int b = 0; b < 16 && c.errors.size() < 4; ++b)
            for (int a = 0; a < 16; ++a) {
                float za = -1e30f, zc = -1e30f;
                for (int k = lo; k < hi; ++k) {
                    za = std::max(za, v.at(a, b, k));
                    zc = std::max(zc, v.at(a, k, b));
                }
                if (axial.image.at(b, a) != za) {
                    c.require(false, "axial MIP mismatch at seed " + std::to_string(seedidx));
                    break;
                }
                if (coronal.image.at(b, a) != zc) {
                    c.require(false, "coronal MIP mismatch at seed " + std::to_string(seedidx));
                    break;
                }
            }
    }
}

// ---------------------------------------------------------------------------
// 4. Beer-Lambert oracle
// ---------------------------------------------------------------------------
void criterion_beer_lambert(Checker& c) {
    std::mt19937_64 rng(4000);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // Analytic single-voxel attenuation: integer-aligned axis rays, so exactly
    // one sample reads the full voxel value.
    double worst_single = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 16 + static_cast<int>(u(rng) * 16);
        FloatVolume v({n, n, 3}, {0.5 + u(rng), 0.5 + u(rng), 1.0}, 0.0f);
        const int vx = 1 + static_cast<int>(u(rng) * (n - 2));
        const int vy = 1 + static_cast<int>(u(rng) * (n - 2));
        v.at(vx, vy, 1) = static_cast<float>(0.5 + 0.5 * u(rng));
        const double sigma = v.at(vx, vy, 1); // as stored

        RenderParams params;
        params.beta = 0.05 + u(rng);
        params.delta_vox = 1.0;
        Ray ray;
        const bool along_x = u(rng) < 0.5;
        ray.direction = along_x ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        for (int k = 0; k < n; ++k)
            ray.samples.push_back(along_x ? Vec2{static_cast<double>(k), static_cast<double>(vy)}
                                          : Vec2{static_cast<double>(vx), static_cast<double>(k)});
        const auto col = render_column(v, ray, 0, 3, params);
        const double delta_mm = along_x ? v.spacing.x : v.spacing.y;
        const double expected = 1.0 - std::exp(-params.beta * sigma * delta_mm);
        worst_single = std::max(worst_single, std::abs(static_cast<double>(col[1]) - expected));
        if (col[0] != 0.0f || col[2] != 0.0f) c.require(false, "air rows must stay zero");
    }
    {
        std::ostringstream os;
        os << "single-voxel worst error " << worst_single;
        c.require(worst_single < 1e-9, os.str());
    }

    // Serial-summation oracle on arbitrary rays in long double.
    std::uniform_real_distribution<float> val(0.0f, 1.0f);
    double worst_serial = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        FloatVolume v({24, 24, 2}, {1, 1, 1});
        std::mt19937 vr(5000 + trial);
        for (auto& x : v.values) x = val(vr);
        Ray ray;
        const double angle = 2 * std::numbers::pi * u(rng);
        ray.direction = {std::cos(angle), std::sin(angle)};
        Vec2 p{1.0 + 21.0 * u(rng), 1.0 + 21.0 * u(rng)};
        const int count = 10 + static_cast<int>(u(rng) * 200);
        RenderParams params;
        params.beta = 0.05 + u(rng);
        params.delta_vox = 0.25 + u(rng);
        for (int k = 0; k < count; ++k)
            ray.samples.push_back(p + (k * params.delta_vox) * ray.direction);

        const auto col = render_column(v, ray, 0, 2, params);
        for (int z = 0; z < 2; ++z) {
            long double sum = 0.0L;
            for (size_t k = ray.samples.size(); k-- > 0;) {
                const double x = ray.samples[k].x, y = ray.samples[k].y;
                if (x < 0 || x > 23 || y < 0 || y > 23) continue;
                const int i0 = std::min(static_cast<int>(x), 23), j0 = std::min(static_cast<int>(y), 23);
                const int i1 = std::min(i0 + 1, 23), j1 = std::min(j0 + 1, 23);
                const long double fx = x - i0, fy = y - j0;
                const long double top = v.at(i0, j0, z) + (v.at(i1, j0, z) - v.at(i0, j0, z)) * fx;
                const long double bot = v.at(i0, j1, z) + (v.at(i1, j1, z) - v.at(i0, j1, z)) * fx;
                sum += top + (bot - top) * fy;
            }
            const long double delta_mm = params.delta_vox * std::hypot(ray.direction.x, ray.direction.y);
            const long double t_oracle = std::exp(-static_cast<long double>(params.beta) * delta_mm * sum);
            const double diff = std::abs(static_cast<double>(col[1 - z]) - static_cast<double>(1.0L - t_oracle));
            worst_serial = std::max(worst_serial, diff);
        }
    }
    std::ostringstream os;
    os << "serial-summation worst error " << worst_serial;
    c.require(worst_serial < 1e-12, os.str());
}

// ---------------------------------------------------------------------------
// 5. Tilt recovery
// ---------------------------------------------------------------------------
void criterion_tilt(Checker& c) {
    const fs::path dir = work_dir();
    for (double tilt : {-10.0, -7.0, 0.0, 5.0, 10.0}) {
        const auto start = std::chrono::steady_clock::now();
        PhantomSpec spec = standard_spec();
        spec.tilt_deg = tilt;
        const auto [vol, truth] = generate_phantom(spec, 42);
        const std::string input = (dir / "tilt.pvol").string();
        write_volume(input, vol);

        PipelineConfig cfg = standard_config(input, "");
        const PipelineResult res = run_pipeline(cfg);
        {
            std::ostringstream os;
            os << "tilt " << tilt << ": estimate " << res.tilt_estimate_deg;
            c.close(res.tilt_estimate_deg, tilt, 1.0, os.str());
        }
        {
            std::ostringstream os;
            os << "tilt " << tilt << ": residual " << res.residual_tilt_deg;
            c.require(std::abs(res.residual_tilt_deg) < 1.0, os.str());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        c.require(secs < 30.0, "tilt " + std::to_string(tilt) + " took too long");
    }
}

// ---------------------------------------------------------------------------
// 6. Tooth-count fidelity
// ---------------------------------------------------------------------------
std::vector<int> profile_peaks(const std::vector<double>& profile, int min_separation) {
    // Local maxima of a lightly smoothed profile, pruned by prominence and
    // separation; prominence is measured against the neighborhood minimum.
    const int n = static_cast<int>(profile.size());
    std::vector<double> smooth(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0;
        int cnt = 0;
        for (int k = -2; k <= 2; ++k) {
            const int j = i + k;
            if (j >= 0 && j < n) {
                acc += profile[j];
                ++cnt;
            }
        }
        smooth[i] = acc / cnt;
    }
    double lo = *std::min_element(smooth.begin(), smooth.end());
    double hi = *std::max_element(smooth.begin(), smooth.end());
    const double min_prominence = 0.08 * (hi - lo);

    std::vector<std::pair<double, int>> candidates;
    for (int i = 1; i + 1 < n; ++i) {
        if (smooth[i] < smooth[i - 1] || smooth[i] < smooth[i + 1]) continue;
        if (smooth[i] == smooth[i - 1]) continue; // plateau: keep leftmost only
        double left_min = smooth[i], right_min = smooth[i];
        for (int j = i; j >= 0 && j >= i - 3 * min_separation; --j) left_min = std::min(left_min, smooth[j]);
        for (int j = i; j < n && j <= i + 3 * min_separation; ++j) right_min = std::min(right_min, smooth[j]);
        const double prominence = smooth[i] - std::max(left_min, right_min);
        if (prominence >= min_prominence) candidates.emplace_back(smooth[i], i);
    }
    std::sort(candidates.rbegin(), candidates.rend());
    std::vector<int> peaks;
    for (const auto& [value, idx] : candidates) {
        bool clash = false;
        for (int p : peaks)
            if (std::abs(p - idx) < min_separation) clash = true;
        if (!clash) peaks.push_back(idx);
    }
    std::sort(peaks.begin(), peaks.end());
    return peaks;
}

void criterion_tooth_count(Checker& c) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = work_dir();
    PhantomSpec spec = make_phantom_spec(256, 0.5);
    spec.tooth_count = 16;
    spec.missing_teeth = {3, 12};
    const auto [vol, truth] = generate_phantom(spec, 42);
    const std::string input = (dir / "teeth.pvol").string();
    write_volume(input, vol);

    PipelineConfig cfg = standard_config(input, "");
    cfg.tilt_correct = false;
    // Same physical trough as the 1 mm default, in 0.5 mm voxels.
    cfg.trough_incisor_vox = 22.0;
    cfg.trough_molar_vox = 16.0;
    const PipelineResult res = run_pipeline(cfg);

    // Column profile restricted to the crown band (rows are superior-first).
    std::vector<double> profile(res.panorama.width, 0.0);
    const int row_lo = std::max(0, res.roi_hi - truth.crown_z_hi);
    const int row_hi = std::min(res.panorama.height, res.roi_hi - truth.crown_z_lo);
    for (int col = 0; col < res.panorama.width; ++col) {
        double acc = 0;
        for (int row = row_lo; row < row_hi; ++row) acc += res.panorama.at(row, col);
        profile[col] = acc / std::max(1, row_hi - row_lo);
    }

    // Predicted column for each present tooth: the ray passing closest to the
    // tooth's crown center.
    std::vector<int> predicted;
    for (const ToothTruth& tooth : truth.teeth) {
        if (!tooth.present) continue;
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < static_cast<int>(res.fan.rays.size()); ++j) {
            const Ray& ray = res.fan.rays[j];
            const Vec2 d{tooth.center_vox.x - ray.tangent_point.x, tooth.center_vox.y - ray.tangent_point.y};
            const double perp = std::abs(d.x * -ray.direction.y + d.y * ray.direction.x);
            if (perp < best_d) {
                best_d = perp;
                best = j;
            }
        }
        predicted.push_back(best);
    }

    int min_sep = res.panorama.width;
    for (size_t i = 0; i + 1 < predicted.size(); ++i)
        min_sep = std::min(min_sep, predicted[i + 1] - predicted[i]);
    const std::vector<int> peaks = profile_peaks(profile, std::max(4, min_sep / 2));

    {
        std::ostringstream os;
        os << "found " << peaks.size() << " peaks, want 14";
        c.require(peaks.size() == 14, os.str());
    }
    for (size_t i = 0; i < predicted.size(); ++i) {
        int best = -1;
        for (int p : peaks)
            if (best < 0 || std::abs(p - predicted[i]) < std::abs(best - predicted[i])) best = p;
        std::ostringstream os;
        os << "tooth at column " << predicted[i] << ": nearest peak " << best;
        c.require(best >= 0 && std::abs(best - predicted[i]) <= 3, os.str());
    }
    // Conversely, no stray peaks: every peak sits at some present tooth, so
    // the missing teeth contribute none.
    for (int p : peaks) {
        int nearest = predicted.empty() ? -1 : predicted[0];
        for (int q : predicted)
            if (std::abs(q - p) < std::abs(nearest - p)) nearest = q;
        std::ostringstream os;
        os << "peak at column " << p << " has no tooth nearby (nearest predicted " << nearest << ")";
        c.require(std::abs(nearest - p) <= 3, os.str());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 60.0, "tooth-count criterion took too long");
}

// ---------------------------------------------------------------------------
// 7. Trough confinement
// ---------------------------------------------------------------------------
void criterion_trough_confinement(Checker& c) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = work_dir();
    const PhantomSpec spec = standard_spec();
    const auto [vol, truth] = generate_phantom(spec, 42);
    const std::string input = (dir / "trough.pvol").string();
    write_volume(input, vol);

    PipelineConfig cfg = standard_config(input, "");
    const PipelineResult res = run_pipeline(cfg);

    // Re-render with every voxel outside the trough (with a bilinear-stencil
    // guard band of 2 voxels) forced to metal level.
    const Volume raw = load_volume(input);
    FloatVolume hu = rescale(raw);
    if (std::abs(res.tilt_applied_deg) > 0) hu = correct_tilt(hu, res.tilt_applied_deg, static_cast<float>(cfg.air_hu));
    const FloatVolume rw = window_values(hu, cfg.render_window);

    FloatVolume corrupted = rw;
    Ellipse outer = res.trough.outer;
    outer.rx += 2.0;
    outer.ry += 2.0;
    Ellipse inner = res.trough.inner;
    inner.rx = std::max(1.0, inner.rx - 2.0);
    inner.ry = std::max(1.0, inner.ry - 2.0);
    size_t corrupted_count = 0;
    for (int z = 0; z < rw.dims.z; ++z)
        for (int y = 0; y < rw.dims.y; ++y)
            for (int x = 0; x < rw.dims.x; ++x) {
                const Vec2 p{static_cast<double>(x), static_cast<double>(y)};
                if (outer.form(p) > 1.0 || inner.form(p) < 1.0) {
                    corrupted.at(x, y, z) = 1.0f;
                    ++corrupted_count;
                }
            }

    RenderParams params;
    params.beta = cfg.beta;
    params.delta_vox = cfg.delta_vox;
    const Panorama clean = render_panorama(rw, res.fan, res.roi_lo, res.roi_hi, params, 1);
    const Panorama dirty = render_panorama(corrupted, res.fan, res.roi_lo, res.roi_hi, params, 1);

    c.require(corrupted_count > rw.values.size() / 2, "corruption must touch most of the volume");
    size_t changed = 0;
    for (size_t i = 0; i < clean.px.size(); ++i) changed += clean.px[i] != dirty.px[i];
    std::ostringstream os;
    os << changed << " of " << clean.px.size() << " pixels changed after corrupting " << corrupted_count << " voxels";
    c.require(changed == 0, os.str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 60.0, "trough confinement took too long");
}

// ---------------------------------------------------------------------------
// 8. Determinism across worker counts
// ---------------------------------------------------------------------------
void criterion_determinism(Checker& c) {
    const fs::path dir = work_dir();
    const PhantomSpec spec = standard_spec();
    const auto [vol, truth] = generate_phantom(spec, 42);
    const std::string input = (dir / "det.pvol").string();
    write_volume(input, vol);

    PipelineConfig cfg = standard_config(input, (dir / "det1.pgm").string());
    cfg.threads = 1;
    run_pipeline(cfg);
    cfg.output = (dir / "det8.pgm").string();
    cfg.threads = 8;
    run_pipeline(cfg);
    c.require(file_bytes((dir / "det1.pgm").string()) == file_bytes((dir / "det8.pgm").string()),
              "thread counts 1 and 8 must write identical bytes");
}

// ---------------------------------------------------------------------------
// 9. SSIM oracle
// ---------------------------------------------------------------------------
void criterion_ssim(Checker& c) {
    std::mt19937 rng(9000);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        ImageF a(16, 16), b(16, 16);
        for (auto& v : a.px) v = u(rng);
        for (auto& v : b.px) v = u(rng);
        // Direct windowed-formula reference.
        double total = 0;
        long count = 0;
        for (int r = 0; r + 8 <= 16; ++r)
            for (int col = 0; col + 8 <= 16; ++col) {
                double ma = 0, mb = 0, vaa = 0, vbb = 0, vab = 0;
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        ma += a.at(r + i, col + j);
                        mb += b.at(r + i, col + j);
                    }
                ma /= 64;
                mb /= 64;
                for (int i = 0; i < 8; ++i)
                    for (int j = 0; j < 8; ++j) {
                        const double da = a.at(r + i, col + j) - ma, db = b.at(r + i, col + j) - mb;
                        vaa += da * da;
                        vbb += db * db;
                        vab += da * db;
                    }
                vaa /= 64;
                vbb /= 64;
                vab /= 64;
                total += ((2 * ma * mb + C1) * (2 * vab + C2)) / ((ma * ma + mb * mb + C1) * (vaa + vbb + C2));
                ++count;
            }
        worst = std::max(worst, std::abs(ssim(a, b) - total / count));
        if (trial == 0) c.require(ssim(a, a) == 1.0, "ssim(x, x) must be exactly 1");
    }
    std::ostringstream os;
    os << "worst reference gap " << worst;
    c.require(worst < 1e-9, os.str());
}

// ---------------------------------------------------------------------------
// 10. End-to-end golden regression
// ---------------------------------------------------------------------------
void criterion_golden(Checker& c) {
    const fs::path dir = work_dir();
    const PhantomSpec spec = standard_spec();
    const auto [vol, truth] = generate_phantom(spec, 42);
    const std::string input = (dir / "golden.pvol").string();
    write_volume(input, vol);

    PipelineConfig cfg = standard_config(input, (dir / "golden_a.pgm").string());
    run_pipeline(cfg);
    cfg.output = (dir / "golden_b.pgm").string();
    run_pipeline(cfg);

    c.require(file_bytes((dir / "golden_a.pgm").string()) == file_bytes((dir / "golden_b.pgm").string()),
              "golden panorama must reproduce byte-identically");
    const ImageF a = read_pgm((dir / "golden_a.pgm").string());
    const ImageF b = read_pgm((dir / "golden_b.pgm").string());
    c.require(ssim(a, b) == 1.0, "ssim vs golden must be exactly 1.0");
}

struct Criterion {
    int id;
    std::string name;
    std::function<void(Checker&)> fn;
    double time_limit_s; // 0 = untimed
};

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "equation suite (teeth_threshold, roi_slices, tangent_slope, transmittance)", criterion_equations, 1.0},
        {2, "tangency property on 10000 randomized ellipse/point pairs", criterion_tangency, 5.0},
        {3, "MIP equals triple-loop max on 100 random 16^3 volumes", criterion_mip, 5.0},
        {4, "Beer-Lambert analytic and serial-summation oracles", criterion_beer_lambert, 10.0},
        {5, "tilt recovery within 1 degree across {-10,-7,0,5,10}", criterion_tilt, 150.0},
        {6, "tooth-count fidelity: 14 peaks at predicted arc positions", criterion_tooth_count, 60.0},
        {7, "trough confinement: outside-trough corruption changes nothing", criterion_trough_confinement, 60.0},
        {8, "byte-identical output across 1 and 8 render threads", criterion_determinism, 0.0},
        {9, "SSIM direct-formula oracle and exact self-similarity", criterion_ssim, 0.0},
        {10, "end-to-end golden regression on the standard phantom", criterion_golden, 0.0},
    };

    int failures = 0;
    for (const Criterion& cr : criteria) {
        Checker checker;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.fn(checker);
        } catch (const std::exception& e) {
            checker.errors.push_back(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (cr.time_limit_s > 0 && secs > cr.time_limit_s) {
            std::ostringstream os;
            os << "exceeded time limit: " << secs << " s > " << cr.time_limit_s << " s";
            checker.errors.push_back(os.str());
        }
        if (checker.errors.empty()) {
            std::printf("[PASS] criterion %d: %s (%.2f s)\n", cr.id, cr.name.c_str(), secs);
        } else {
            ++failures;
            std::printf("[FAIL] criterion %d: %s (%.2f s)\n", cr.id, cr.name.c_str(), secs);
            for (const std::string& e : checker.errors) std::printf("       - %s\n", e.c_str());
        }
        std::fflush(stdout);
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    else std::printf("all %zu criteria passed\n", criteria.size());
    return failures;
}

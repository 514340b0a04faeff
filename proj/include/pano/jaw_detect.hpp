#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "pano/image.hpp"
#include "pano/vec.hpp"
#include "pano/volume.hpp"

namespace pano {

enum class MipAxis { axial, coronal };

/// Maximum intensity projection of a windowed volume along one axis.
/// axial projects along z onto an (x,y) image; coronal projects along y
/// onto an (x,z) image. Rows follow the surviving slower axis.
struct MipImage {
    ImageF image;
    MipAxis axis = MipAxis::axial;
    int range_lo = 0; // slice range along the projection axis, half-open
    int range_hi = 0;
};

inline MipImage compute_mip(const FloatVolume& v, MipAxis axis, int lo, int hi) {
    const int extent = axis == MipAxis::axial ? v.dims.z : v.dims.y;
    if (lo < 0 || hi > extent || lo >= hi) throw std::invalid_argument("compute_mip: empty or out-of-range slice range");
    MipImage out;
    out.axis = axis;
    out.range_lo = lo;
    out.range_hi = hi;
    if (axis == MipAxis::axial) {
        out.image = ImageF(v.dims.x, v.dims.y, -std::numeric_limits<float>::infinity());
        for (int z = lo; z < hi; ++z)
            for (int y = 0; y < v.dims.y; ++y)
                for (int x = 0; x < v.dims.x; ++x)
                    out.image.at(y, x) = std::max(out.image.at(y, x), v.at(x, y, z));
    } else {
        out.image = ImageF(v.dims.x, v.dims.z, -std::numeric_limits<float>::infinity());
        for (int z = 0; z < v.dims.z; ++z)
            for (int y = lo; y < hi; ++y)
                for (int x = 0; x < v.dims.x; ++x)
                    out.image.at(z, x) = std::max(out.image.at(z, x), v.at(x, y, z));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Histograms and Gaussian fitting
// ---------------------------------------------------------------------------

struct Histogram {
    std::vector<double> centers;
    std::vector<double> counts;

    size_t nonzero_bins() const {
        size_t n = 0;
        for (double c : counts) n += (c > 0.0);
        return n;
    }
};

/// Histogram of image intensities over [lo, hi] with uniform bins.
/// Pixels <= lo are excluded: after windowing, the below-window mass collapses
/// onto exactly lo and would otherwise dominate any fit.
inline Histogram build_histogram(const ImageF& img, int bins = 256, double lo = 0.0, double hi = 1.0) {
    if (bins < 1 || !(lo < hi)) throw std::invalid_argument("build_histogram: bad binning");
    Histogram h;
    h.centers.resize(bins);
    h.counts.assign(bins, 0.0);
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) h.centers[b] = lo + (b + 0.5) * width;
    for (float v : img.px) {
        if (!(v > lo) || v > hi) continue;
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        h.counts[b] += 1.0;
    }
    return h;
}

struct GaussianFit {
    double mu = 0.0;
    double sigma = 0.0;
    double amplitude = 0.0;
    double residual = 0.0; // RMS of count residuals at the returned parameters
};

namespace detail {

struct GaussParams {
    double a, mu, sigma;
};

inline double gauss_rms(const Histogram& h, const GaussParams& p) {
    double ss = 0.0;
    for (size_t i = 0; i < h.centers.size(); ++i) {
        const double d = (h.centers[i] - p.mu) / p.sigma;
        const double r = p.a * std::exp(-0.5 * d * d) - h.counts[i];
        ss += r * r;
    }
    return std::sqrt(ss / h.centers.size());
}

// Log-parabola (Caruana) initialization over the dominant peak: a parabola is
// least-squares fitted to ln(counts) across the contiguous half-maximum
// region around the tallest bin. Restricting the window to one mode keeps the
// refinement in that mode's basin when the histogram is multimodal.
inline GaussParams gauss_init(const Histogram& h) {
    size_t peak = 0;
    for (size_t i = 1; i < h.counts.size(); ++i)
        if (h.counts[i] > h.counts[peak]) peak = i;
    size_t lo = peak, hi = peak;
    const double half = h.counts[peak] / 2.0;
    while (lo > 0 && h.counts[lo - 1] >= half) --lo;
    while (hi + 1 < h.counts.size() && h.counts[hi + 1] >= half) ++hi;

    const double step = h.centers.size() > 1 ? h.centers[1] - h.centers[0] : 1.0;
    if (hi - lo >= 2) {
        // Normal equations for ln c = a0 + a1 x + a2 x^2 over the region,
        // with x relative to the peak center for conditioning.
        double s[5] = {0, 0, 0, 0, 0};
        double t0 = 0, t1 = 0, t2 = 0;
        for (size_t i = lo; i <= hi; ++i) {
            const double x = h.centers[i] - h.centers[peak];
            const double y = std::log(h.counts[i]);
            double xp = 1.0;
            for (int k = 0; k < 5; ++k, xp *= x) s[k] += xp;
            t0 += y;
            t1 += y * x;
            t2 += y * x * x;
        }
        const double m[3][4] = {{s[0], s[1], s[2], t0}, {s[1], s[2], s[3], t1}, {s[2], s[3], s[4], t2}};
        double a[3][4];
        std::copy(&m[0][0], &m[0][0] + 12, &a[0][0]);
        bool ok = true;
        for (int col = 0; col < 3 && ok; ++col) {
            int piv = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
            if (std::abs(a[piv][col]) < 1e-12) ok = false;
            if (!ok) break;
            std::swap(a[piv], a[col]);
            for (int r = 0; r < 3; ++r) {
                if (r == col) continue;
                const double f = a[r][col] / a[col][col];
                for (int c2 = col; c2 < 4; ++c2) a[r][c2] -= f * a[col][c2];
            }
        }
        if (ok) {
            const double a0 = a[0][3] / a[0][0], a1 = a[1][3] / a[1][1], a2 = a[2][3] / a[2][2];
            if (a2 < -1e-12) {
                GaussParams p;
                p.sigma = std::sqrt(-1.0 / (2.0 * a2));
                p.mu = h.centers[peak] - a1 / (2.0 * a2);
                p.a = std::exp(a0 - a1 * a1 / (4.0 * a2));
                if (std::isfinite(p.mu) && std::isfinite(p.a) && p.sigma > 0 && p.sigma < 100 * step * (hi - lo + 1))
                    return p;
            }
        }
    }
    // Moments of the half-maximum region.
    double mass = 0, mean = 0;
    for (size_t i = lo; i <= hi; ++i) {
        mass += h.counts[i];
        mean += h.counts[i] * h.centers[i];
    }
    mean /= mass;
    double var = 0;
    for (size_t i = lo; i <= hi; ++i) var += h.counts[i] * (h.centers[i] - mean) * (h.centers[i] - mean);
    var /= mass;
    GaussParams p;
    p.mu = mean;
    p.sigma = std::max(std::sqrt(var), 0.5 * step);
    p.a = h.counts[peak];
    return p;
}

} // namespace detail

/// Least-squares fit of a * exp(-(x-mu)^2 / (2 sigma^2)) to histogram counts.
/// Log-parabola initialization, then up to 100 damped Gauss-Newton steps;
/// converged when the relative parameter step drops below 1e-6. On
/// non-convergence the best parameters so far are returned and the residual
/// field carries the misfit.
inline GaussianFit fit_gaussian(const Histogram& h) {
    if (h.centers.size() < 3 || h.centers.size() != h.counts.size())
        throw std::invalid_argument("fit_gaussian: need at least 3 bins");
    if (h.nonzero_bins() < 3) {
        size_t nz = h.nonzero_bins();
        if (nz <= 1) throw std::invalid_argument("fit_gaussian: degenerate histogram (all mass in one bin)");
        throw std::invalid_argument("fit_gaussian: need at least 3 nonzero bins");
    }

    const double sigma_floor = 0.25 * (h.centers[1] - h.centers[0]);
    detail::GaussParams p = detail::gauss_init(h);
    p.sigma = std::max(p.sigma, sigma_floor);
    double best_rms = detail::gauss_rms(h, p);
    detail::GaussParams best = p;

    double lambda = 1e-3;
    for (int iter = 0; iter < 100; ++iter) {
        // Normal equations for residuals r_i = model_i - counts_i.
        double JTJ[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double JTr[3] = {0, 0, 0};
        for (size_t i = 0; i < h.centers.size(); ++i) {
            const double d = (h.centers[i] - p.mu) / p.sigma;
            const double e = std::exp(-0.5 * d * d);
            const double model = p.a * e;
            const double r = model - h.counts[i];
            const double J[3] = {e, model * d / p.sigma, model * d * d / p.sigma};
            for (int a = 0; a < 3; ++a) {
                JTr[a] += J[a] * r;
                for (int b = 0; b < 3; ++b) JTJ[a][b] += J[a] * J[b];
            }
        }
        for (int a = 0; a < 3; ++a) JTJ[a][a] *= 1.0 + lambda;

        // Solve the 3x3 system by Gaussian elimination with partial pivoting.
        double M[3][4];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) M[a][b] = JTJ[a][b];
            M[a][3] = -JTr[a];
        }
        bool singular = false;
        for (int col = 0; col < 3 && !singular; ++col) {
            int piv = col;
            for (int r2 = col + 1; r2 < 3; ++r2)
                if (std::abs(M[r2][col]) > std::abs(M[piv][col])) piv = r2;
            if (std::abs(M[piv][col]) < 1e-300) {
                singular = true;
                break;
            }
            std::swap(M[piv], M[col]);
            for (int r2 = 0; r2 < 3; ++r2) {
                if (r2 == col) continue;
                const double f = M[r2][col] / M[col][col];
                for (int c2 = col; c2 < 4; ++c2) M[r2][c2] -= f * M[col][c2];
            }
        }
        if (singular) break;
        double da = M[0][3] / M[0][0];
        double dmu = M[1][3] / M[1][1];
        double dsigma = M[2][3] / M[2][2];

        // Trust bounds: a step may not fling the model outside the data.
        const double range = h.centers.back() - h.centers.front();
        da = std::clamp(da, -2.0 * std::abs(p.a), 2.0 * std::abs(p.a));
        dmu = std::clamp(dmu, -0.25 * range, 0.25 * range);
        dsigma = std::clamp(dsigma, -0.5 * p.sigma, 0.5 * range);

        detail::GaussParams q{p.a + da, p.mu + dmu, p.sigma + dsigma};
        q.sigma = std::max(q.sigma, sigma_floor);
        q.mu = std::clamp(q.mu, h.centers.front() - range, h.centers.back() + range);
        const double rms = detail::gauss_rms(h, q);
        if (rms <= best_rms) {
            best_rms = rms;
            best = q;
        }
        if (rms < detail::gauss_rms(h, p)) {
            const double scale = std::abs(p.a) + std::abs(p.mu) + std::abs(p.sigma);
            const double step = std::abs(da) + std::abs(dmu) + std::abs(dsigma);
            p = q;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (step < 1e-6 * scale) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }

    GaussianFit fit;
    fit.amplitude = std::abs(best.a);
    fit.mu = best.mu;
    fit.sigma = std::abs(best.sigma);
    fit.residual = best_rms;
    if (!(fit.sigma > 0) || !(fit.amplitude > 0)) throw std::runtime_error("fit_gaussian: fit collapsed");
    return fit;
}

/// Teeth segmentation threshold from the fitted MIP histogram.
inline double teeth_threshold(const GaussianFit& fit) { return fit.mu + 2.0 * fit.sigma; }

/// ROI slice limits from the fitted coronal-mask z profile, clamped to the
/// volume's [0, nz) range and returned half-open.
inline std::pair<int, int> roi_slices(const GaussianFit& fit, int nz) {
    int a = static_cast<int>(std::lround(fit.mu - 2.5 * fit.sigma));
    int b = static_cast<int>(std::lround(fit.mu + 1.5 * fit.sigma));
    a = std::clamp(a, 0, nz);
    b = std::clamp(b, 0, nz);
    if (a >= b) throw std::runtime_error("roi_slices: range collapsed after clamping");
    return {a, b};
}

// ---------------------------------------------------------------------------
// Mask cleanup and contour extraction
// ---------------------------------------------------------------------------

namespace detail {

inline MaskImage erode3(const MaskImage& m) {
    MaskImage out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) {
            uint8_t keep = 1;
            for (int dr = -1; dr <= 1 && keep; ++dr)
                for (int dc = -1; dc <= 1 && keep; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || rr >= m.height || cc < 0 || cc >= m.width || !m.at(rr, cc)) keep = 0;
                }
            out.at(r, c) = keep;
        }
    return out;
}

inline MaskImage dilate3(const MaskImage& m) {
    MaskImage out(m.width, m.height);
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c) {
            uint8_t hit = 0;
            for (int dr = -1; dr <= 1 && !hit; ++dr)
                for (int dc = -1; dc <= 1 && !hit; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if (rr >= 0 && rr < m.height && cc >= 0 && cc < m.width && m.at(rr, cc)) hit = 1;
                }
            out.at(r, c) = hit;
        }
    return out;
}

// Background flood fill from the border (4-connected); unreached background
// pixels are enclosed holes.
inline void fill_holes(MaskImage& m) {
    MaskImage reached(m.width, m.height);
    std::deque<std::pair<int, int>> queue;
    auto push = [&](int r, int c) {
        if (r < 0 || r >= m.height || c < 0 || c >= m.width) return;
        if (m.at(r, c) || reached.at(r, c)) return;
        reached.at(r, c) = 1;
        queue.emplace_back(r, c);
    };
    for (int c = 0; c < m.width; ++c) {
        push(0, c);
        push(m.height - 1, c);
    }
    for (int r = 0; r < m.height; ++r) {
        push(r, 0);
        push(r, m.width - 1);
    }
    while (!queue.empty()) {
        auto [r, c] = queue.front();
        queue.pop_front();
        push(r - 1, c);
        push(r + 1, c);
        push(r, c - 1);
        push(r, c + 1);
    }
    for (int r = 0; r < m.height; ++r)
        for (int c = 0; c < m.width; ++c)
            if (!m.at(r, c) && !reached.at(r, c)) m.at(r, c) = 1;
}

// Keeps the largest 8-connected component. Ties break to the larger count
// first, then the smaller centroid row, then discovery order.
inline MaskImage largest_component(const MaskImage& m) {
    MaskImage seen(m.width, m.height);
    MaskImage best;
    size_t best_count = 0;
    double best_centroid_row = 0.0;
    for (int r0 = 0; r0 < m.height; ++r0)
        for (int c0 = 0; c0 < m.width; ++c0) {
            if (!m.at(r0, c0) || seen.at(r0, c0)) continue;
            MaskImage comp(m.width, m.height);
            std::deque<std::pair<int, int>> queue{{r0, c0}};
            seen.at(r0, c0) = 1;
            comp.at(r0, c0) = 1;
            size_t count = 0;
            double row_sum = 0.0;
            while (!queue.empty()) {
                auto [r, c] = queue.front();
                queue.pop_front();
                ++count;
                row_sum += r;
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr, cc = c + dc;
                        if (rr < 0 || rr >= m.height || cc < 0 || cc >= m.width) continue;
                        if (!m.at(rr, cc) || seen.at(rr, cc)) continue;
                        seen.at(rr, cc) = 1;
                        comp.at(rr, cc) = 1;
                        queue.emplace_back(rr, cc);
                    }
            }
            const double centroid_row = row_sum / count;
            const bool take = count > best_count || (count == best_count && centroid_row < best_centroid_row);
            if (take) {
                best = std::move(comp);
                best_count = count;
                best_centroid_row = centroid_row;
            }
        }
    if (best_count == 0) return MaskImage(m.width, m.height);
    return best;
}

} // namespace detail

/// Threshold at t, then 3x3 opening, 3x3 closing, hole filling, and largest
/// connected component. Throws if nothing survives.
inline MaskImage binarize_and_clean(const ImageF& img, double t) {
    MaskImage m(img.width, img.height);
    for (size_t i = 0; i < img.px.size(); ++i) m.px[i] = img.px[i] >= t ? 1 : 0;
    m = detail::dilate3(detail::erode3(m));  // opening
    m = detail::erode3(detail::dilate3(m));  // closing
    detail::fill_holes(m);
    m = detail::largest_component(m);
    if (m.count() == 0) throw std::runtime_error("binarize_and_clean: empty mask after cleaning");
    return m;
}

/// Moore-neighbor boundary trace of a single-component mask. Returns pixel
/// centers as (x=col, y=row); the polygon is closed, front() == back().
inline std::vector<Vec2> extract_contour(const MaskImage& m) {
    int sr = -1, sc = -1;
    for (int r = 0; r < m.height && sr < 0; ++r)
        for (int c = 0; c < m.width; ++c)
            if (m.at(r, c)) {
                sr = r;
                sc = c;
                break;
            }
    if (sr < 0) throw std::runtime_error("extract_contour: empty mask");

    // Moore neighborhood in clockwise order starting from west.
    static constexpr std::array<std::pair<int, int>, 8> kOffsets{{
        {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}}};
    auto fg = [&](int r, int c) { return r >= 0 && r < m.height && c >= 0 && c < m.width && m.at(r, c); };

    std::vector<Vec2> poly;
    poly.push_back({static_cast<double>(sc), static_cast<double>(sr)});
    int r = sr, c = sc;
    int entry = 0; // start pixel was reached scanning from the west
    int first_move = -1;
    const int max_steps = 4 * m.width * m.height + 8;
    for (int step = 0; step < max_steps; ++step) {
        const int pr = r, pc = c;
        int found = -1;
        for (int k = 0; k < 8; ++k) {
            const int dir = (entry + k) % 8;
            const int rr = r + kOffsets[dir].first;
            const int cc = c + kOffsets[dir].second;
            if (fg(rr, cc)) {
                found = dir;
                r = rr;
                c = cc;
                break;
            }
        }
        if (found < 0) break; // isolated pixel
        // Terminate when the walk is about to repeat its opening move from
        // the start pixel; reaching the start from another direction means a
        // spur passes through it and the walk must continue.
        if (first_move < 0) first_move = found;
        else if (pr == sr && pc == sc && found == first_move) break;
        if (r != sr || c != sc) poly.push_back({static_cast<double>(c), static_cast<double>(r)});
        // Resume the clockwise scan just past the pixel we came from.
        entry = (found + 6) % 8;
    }
    poly.push_back(poly.front());
    return poly;
}

// ---------------------------------------------------------------------------
// Jaw geometry and tilt
// ---------------------------------------------------------------------------

/// Jaw contour plus derived quantities consumed by the trough/trajectory
/// builders. Coordinates are axial-plane voxel coordinates (x, y).
struct JawGeometry {
    std::vector<Vec2> contour; // closed polygon, front() == back()
    double x_min = 0, x_max = 0, y_min = 0, y_max = 0;
    double tilt_deg = 0.0;
    bool tilt_low_confidence = false;
    int roi_lo = 0, roi_hi = 0; // half-open axial slice range
};

struct TiltEstimate {
    double degrees = 0.0;
    bool low_confidence = false;
};

/// Tilt of the region enclosed by the contour, from its second central
/// moments (computed exactly via the shoelace/Green formulas). The reported
/// angle is between the region's short principal axis and the +y (anterior)
/// axis, positive counterclockwise, in (-90, 90]. Near-isotropic regions
/// (eigenvalue ratio < 1.05) report 0 with the low-confidence flag set.
inline TiltEstimate estimate_tilt(const std::vector<Vec2>& contour) {
    if (contour.size() < 4) throw std::invalid_argument("estimate_tilt: degenerate contour");
    double a2 = 0, cx = 0, cy = 0, sxx = 0, syy = 0, sxy = 0;
    for (size_t i = 0; i + 1 < contour.size(); ++i) {
        const Vec2 p = contour[i], q = contour[i + 1];
        const double cross = p.x * q.y - q.x * p.y;
        a2 += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
        sxx += (p.x * p.x + p.x * q.x + q.x * q.x) * cross;
        syy += (p.y * p.y + p.y * q.y + q.y * q.y) * cross;
        sxy += (p.x * q.y + 2 * p.x * p.y + 2 * q.x * q.y + q.x * p.y) * cross;
    }
    const double area = 0.5 * a2;
    if (std::abs(area) < 1e-9) return {0.0, true};
    cx /= 3.0 * a2;
    cy /= 3.0 * a2;
    const double mxx = sxx / (12.0 * area) - cx * cx;
    const double myy = syy / (12.0 * area) - cy * cy;
    const double mxy = sxy / (24.0 * area) - cx * cy;

    // Eigen decomposition of [[mxx, mxy], [mxy, myy]].
    const double tr = mxx + myy;
    const double det = mxx * myy - mxy * mxy;
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    const double l_max = tr / 2.0 + disc;
    const double l_min = tr / 2.0 - disc;
    if (l_min <= 0 || l_max / l_min < 1.05) return {0.0, true};

    // Eigenvector of the smaller eigenvalue = short axis of the region.
    Vec2 v;
    if (std::abs(mxy) > 1e-12) {
        v = {l_min - myy, mxy};
    } else {
        v = mxx <= myy ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    }
    if (v.y < 0 || (v.y == 0 && v.x < 0)) v = {-v.x, -v.y};
    double deg = std::atan2(-v.x, v.y) * 180.0 / std::numbers::pi;
    if (deg <= -90.0) deg += 180.0;
    if (deg > 90.0) deg -= 180.0;
    return {deg, false};
}

/// Rotates every axial slice by -angle_deg about the axial center with
/// bilinear resampling; voxels pulled from outside the field get `fill`.
inline FloatVolume correct_tilt(const FloatVolume& v, double angle_deg, float fill) {
    if (!(std::abs(angle_deg) < 45.0)) throw std::invalid_argument("correct_tilt: |angle| must be < 45 degrees");
    const double phi = angle_deg * std::numbers::pi / 180.0;
    const double cs = std::cos(phi), sn = std::sin(phi);
    const double cx = (v.dims.x - 1) / 2.0;
    const double cy = (v.dims.y - 1) / 2.0;
    FloatVolume out(v.dims, v.spacing);
    for (int z = 0; z < v.dims.z; ++z) {
        for (int j = 0; j < v.dims.y; ++j) {
            for (int i = 0; i < v.dims.x; ++i) {
                // Undoing a +angle tilt: source = R(+angle) * (p - c) + c.
                const double dx = i - cx, dy = j - cy;
                const double sx = cx + cs * dx - sn * dy;
                const double sy = cy + sn * dx + cs * dy;
                float value = fill;
                if (sx >= 0 && sx <= v.dims.x - 1 && sy >= 0 && sy <= v.dims.y - 1) {
                    const int i0 = std::min(static_cast<int>(std::floor(sx)), v.dims.x - 1);
                    const int j0 = std::min(static_cast<int>(std::floor(sy)), v.dims.y - 1);
                    const int i1 = std::min(i0 + 1, v.dims.x - 1);
                    const int j1 = std::min(j0 + 1, v.dims.y - 1);
                    const double fx = sx - i0, fy = sy - j0;
                    const double top = v.at(i0, j0, z) + (v.at(i1, j0, z) - v.at(i0, j0, z)) * fx;
                    const double bot = v.at(i0, j1, z) + (v.at(i1, j1, z) - v.at(i0, j1, z)) * fx;
                    value = static_cast<float>(top + (bot - top) * fy);
                }
                out.at(i, j, z) = value;
            }
        }
    }
    return out;
}

/// Contour -> bounding box + tilt, bundled for the geometry builders.
inline JawGeometry make_jaw_geometry(const std::vector<Vec2>& contour, int roi_lo, int roi_hi) {
    JawGeometry jaw;
    jaw.contour = contour;
    jaw.x_min = jaw.y_min = std::numeric_limits<double>::infinity();
    jaw.x_max = jaw.y_max = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : contour) {
        jaw.x_min = std::min(jaw.x_min, p.x);
        jaw.x_max = std::max(jaw.x_max, p.x);
        jaw.y_min = std::min(jaw.y_min, p.y);
        jaw.y_max = std::max(jaw.y_max, p.y);
    }
    const TiltEstimate tilt = estimate_tilt(contour);
    jaw.tilt_deg = tilt.degrees;
    jaw.tilt_low_confidence = tilt.low_confidence;
    jaw.roi_lo = roi_lo;
    jaw.roi_hi = roi_hi;
    return jaw;
}

} // namespace pano

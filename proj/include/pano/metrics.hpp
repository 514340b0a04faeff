#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pano/image.hpp"

namespace pano {

struct MetricReport {
    double ssim = 0.0;
    double psnr_db = 0.0; // +infinity for identical images
    int width = 0;
    int height = 0;
    int ssim_window = 8;
};

/// Mean local SSIM over an 8x8 uniform sliding window at stride 1, with the
/// standard stabilizers C1 = 0.01^2 and C2 = 0.03^2 on unit dynamic range.
/// Window statistics are population moments (divide by N).
inline double ssim(const ImageF& a, const ImageF& b, int window = 8) {
    if (!a.same_dims(b)) throw std::invalid_argument("ssim: image dimensions differ");
    if (a.width < 1 || a.height < 1) throw std::invalid_argument("ssim: empty image");
    const int win = std::min({window, a.width, a.height});
    constexpr double C1 = 0.01 * 0.01;
    constexpr double C2 = 0.03 * 0.03;

    // Summed-area tables over a, b, a^2, b^2, ab with a zero top/left border.
    const int W = a.width + 1, H = a.height + 1;
    std::vector<double> sa(static_cast<size_t>(W) * H, 0.0), sb = sa, saa = sa, sbb = sa, sab = sa;
    for (int r = 0; r < a.height; ++r) {
        for (int c = 0; c < a.width; ++c) {
            const size_t k = static_cast<size_t>(r + 1) * W + (c + 1);
            const size_t up = k - W, left = k - 1, diag = up - 1;
            const double va = a.at(r, c), vb = b.at(r, c);
            sa[k] = va + sa[up] + sa[left] - sa[diag];
            sb[k] = vb + sb[up] + sb[left] - sb[diag];
            saa[k] = va * va + saa[up] + saa[left] - saa[diag];
            sbb[k] = vb * vb + sbb[up] + sbb[left] - sbb[diag];
            sab[k] = va * vb + sab[up] + sab[left] - sab[diag];
        }
    }
    auto box = [W, win](const std::vector<double>& s, int r, int c) {
        const size_t k00 = static_cast<size_t>(r) * W + c;
        const size_t k01 = k00 + win;
        const size_t k10 = static_cast<size_t>(r + win) * W + c;
        const size_t k11 = k10 + win;
        return s[k11] - s[k01] - s[k10] + s[k00];
    };

    const double n = static_cast<double>(win) * win;
    double total = 0.0;
    long count = 0;
    for (int r = 0; r + win <= a.height; ++r) {
        for (int c = 0; c + win <= a.width; ++c) {
            const double mu_a = box(sa, r, c) / n;
            const double mu_b = box(sb, r, c) / n;
            const double var_a = box(saa, r, c) / n - mu_a * mu_a;
            const double var_b = box(sbb, r, c) / n - mu_b * mu_b;
            const double cov = box(sab, r, c) / n - mu_a * mu_b;
            const double num = (2.0 * mu_a * mu_b + C1) * (2.0 * cov + C2);
            const double den = (mu_a * mu_a + mu_b * mu_b + C1) * (var_a + var_b + C2);
            total += num / den;
            ++count;
        }
    }
    return total / count;
}

/// 10 log10(1 / MSE) on unit dynamic range; identical images report +inf.
inline double psnr(const ImageF& a, const ImageF& b) {
    if (!a.same_dims(b)) throw std::invalid_argument("psnr: image dimensions differ");
    double se = 0.0;
    for (size_t i = 0; i < a.px.size(); ++i) {
        const double d = static_cast<double>(a.px[i]) - b.px[i];
        se += d * d;
    }
    const double mse = se / a.px.size();
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

inline MetricReport compare_images(const ImageF& a, const ImageF& b) {
    MetricReport rep;
    rep.ssim = ssim(a, b);
    rep.psnr_db = psnr(a, b);
    rep.width = a.width;
    rep.height = a.height;
    rep.ssim_window = std::min({8, a.width, a.height});
    return rep;
}

} // namespace pano

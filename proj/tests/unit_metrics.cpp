#include <doctest.h>

#include <cmath>
#include <random>

#include "pano/metrics.hpp"

using namespace pano;

namespace {

ImageF random_image(int w, int h, std::mt19937& rng) {
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    ImageF img(w, h);
    for (auto& v : img.px) v = u(rng);
    return img;
}

// Direct per-window SSIM, no shared code with the summed-area implementation.
double ssim_reference(const ImageF& a, const ImageF& b, int win) {
    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
    double total = 0;
    long count = 0;
    for (int r = 0; r + win <= a.height; ++r) {
        for (int c = 0; c + win <= a.width; ++c) {
            double ma = 0, mb = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    ma += a.at(r + i, c + j);
                    mb += b.at(r + i, c + j);
                }
            const double n = win * win;
            ma /= n;
            mb /= n;
            double va = 0, vb = 0, cov = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double da = a.at(r + i, c + j) - ma;
                    const double db = b.at(r + i, c + j) - mb;
                    va += da * da;
                    vb += db * db;
                    cov += da * db;
                }
            va /= n;
            vb /= n;
            cov /= n;
            total += ((2 * ma * mb + C1) * (2 * cov + C2)) / ((ma * ma + mb * mb + C1) * (va + vb + C2));
            ++count;
        }
    }
    return total / count;
}

} // namespace

TEST_CASE("ssim of identical images is exactly 1") {
    std::mt19937 rng(113);
    const ImageF img = random_image(20, 14, rng);
    CHECK(ssim(img, img) == 1.0);
}

TEST_CASE("ssim of an inverted high-contrast pattern is negative") {
    ImageF a(16, 16);
    for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 16; ++c) a.at(r, c) = ((r + c) % 2) ? 1.0f : 0.0f;
    ImageF b = a;
    for (auto& v : b.px) v = 1.0f - v;
    CHECK(ssim(a, b) < 0.0);
}

TEST_CASE("ssim matches the direct-formula reference on random pairs") {
    std::mt19937 rng(127);
    for (int trial = 0; trial < 20; ++trial) {
        const ImageF a = random_image(16, 16, rng);
        const ImageF b = random_image(16, 16, rng);
        CHECK(std::abs(ssim(a, b) - ssim_reference(a, b, 8)) < 1e-9);
    }
}

TEST_CASE("ssim is symmetric") {
    std::mt19937 rng(131);
    const ImageF a = random_image(24, 16, rng);
    const ImageF b = random_image(24, 16, rng);
    CHECK(ssim(a, b) == ssim(b, a));
}

TEST_CASE("ssim degrades with noise amplitude") {
    std::mt19937 rng(137);
    ImageF base(32, 32);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c) base.at(r, c) = 0.5f + 0.4f * std::sin(r * 0.4f) * std::cos(c * 0.3f);
    double prev = 1.0;
    for (double amp : {0.01, 0.05, 0.15}) {
        std::uniform_real_distribution<float> noise(-static_cast<float>(amp), static_cast<float>(amp));
        double mean = 0;
        for (int rep = 0; rep < 5; ++rep) {
            ImageF noisy = base;
            for (auto& v : noisy.px) v = std::clamp(v + noise(rng), 0.0f, 1.0f);
            mean += ssim(base, noisy);
        }
        mean /= 5;
        CHECK(mean < prev);
        prev = mean;
    }
}

TEST_CASE("ssim rejects dimension mismatches") {
    ImageF a(8, 8), b(8, 9);
    CHECK_THROWS_AS(ssim(a, b), std::invalid_argument);
    CHECK_THROWS_AS(psnr(a, b), std::invalid_argument);
}

TEST_CASE("psnr closed forms") {
    ImageF zeros(10, 10, 0.0f), ones(10, 10, 1.0f);
    CHECK(std::isinf(psnr(zeros, zeros)));
    CHECK(psnr(zeros, ones) == doctest::Approx(0.0));

    // MSE = 0.01 -> 20 dB, up to float storage of the 0.1 level.
    ImageF a(10, 10, 0.0f), b(10, 10, 0.1f);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-6));

    // Exactly representable difference: MSE = 0.015625 -> 10 log10(64) dB.
    ImageF c(10, 10, 0.0f), d(10, 10, 0.125f);
    CHECK(psnr(c, d) == doctest::Approx(10.0 * std::log10(64.0)).epsilon(1e-12));
}

TEST_CASE("compare_images bundles both metrics") {
    std::mt19937 rng(139);
    const ImageF a = random_image(16, 12, rng);
    const MetricReport rep = compare_images(a, a);
    CHECK(rep.ssim == 1.0);
    CHECK(std::isinf(rep.psnr_db));
    CHECK(rep.width == 16);
    CHECK(rep.height == 12);
    CHECK(rep.ssim_window == 8);
}

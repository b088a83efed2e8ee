#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "ffsrm/detail/cumulant.hpp"
#include "ffsrm/geometry.hpp"
#include "ffsrm/metrics.hpp"
#include "ffsrm/photokinetics.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/render.hpp"
#include "ffsrm/sacd.hpp"
#include "ffsrm/sofi.hpp"
#include "helpers.hpp"

using namespace ffsrm;
using detail::LagMode;

namespace {

constexpr double kTau = 6.283185307179586476925;

// Distinct-lag second cumulant computed independently of the library kernels.
double oracle_k2_distinct(const std::vector<double>& trace) {
    const size_t n = trace.size();
    long double mean = 0.0L;
    for (double v : trace) mean += v;
    mean /= static_cast<long double>(n);
    long double acc = 0.0L;
    for (size_t i = 0; i + 1 < n; ++i)
        acc += (static_cast<long double>(trace[i]) - mean) *
               (static_cast<long double>(trace[i + 1]) - mean);
    return static_cast<double>(acc / static_cast<long double>(n - 1));
}

std::vector<double> bin_trace(const std::vector<double>& trace, int b) {
    std::vector<double> out(trace.size() / static_cast<size_t>(b));
    for (size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (int j = 0; j < b; ++j) s += trace[i * static_cast<size_t>(b) + j];
        out[i] = s / b;
    }
    return out;
}

Image gaussian_image(int size, double sigma_px, double amplitude) {
    Image img(size, size, 80.0);
    const double c = (size - 1) / 2.0;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            img.at(y, x) = amplitude * std::exp(-((y - c) * (y - c) + (x - c) * (x - c)) /
                                                (2.0 * sigma_px * sigma_px));
    return img;
}

const optics::Psf3D& scene_psf() {
    static const auto psf = optics::gibson_lanni_psf(OpticalConfig{}, [] {
        optics::PsfGridSpec g;
        g.lateral_extent_nm = 800.0;
        g.axial_extent_nm = 200.0;
        g.axial_step_nm = 100.0;
        return g;
    }());
    return psf;
}

// Blinking emitters on the centre row of a 32x32 field, with camera noise.
ImageStack emitter_stack(const std::vector<double>& xs_nm, int frames, uint64_t seed) {
    sim::EmitterSet set;
    set.sample_name = "two_point";
    set.field_width_nm = 2560.0;
    set.field_height_nm = 2560.0;
    for (double x : xs_nm) {
        sim::Emitter e;
        e.x_nm = x;
        e.y_nm = 1240.0;
        set.emitters.push_back(e);
    }
    sim::FovSpec fov;
    fov.width_px = 32;
    fov.height_px = 32;
    const auto on = sim::simulate_blinking(static_cast<int>(xs_nm.size()), frames,
                                           sim::preset_medium_fluctuation(), seed);
    const auto clean = sim::render_stack(set, on, scene_psf(), OpticalConfig{}, fov);
    return sim::apply_camera_noise(clean, sim::CameraNoiseParams{}, seed + 101);
}

}  // namespace

TEST_SUITE("sacd") {

TEST_CASE("fourier interpolation at unit magnification is the identity") {
    Image img(5, 7, 65.0, 2);
    for (size_t i = 0; i < img.data.size(); ++i) img.data[i] = 0.25 * static_cast<double>(i);
    const Image out = sacd::fourier_interpolate(img, 1);
    CHECK(out.height == 5);
    CHECK(out.width == 7);
    CHECK(out.pixel_size_nm == 65.0);
    CHECK(out.upscale_factor == 2);
    CHECK(out.data == img.data);
    CHECK_THROWS_AS(sacd::fourier_interpolate(img, 0), std::invalid_argument);
}

TEST_CASE("fourier interpolation preserves constants and rescales the grid") {
    Image img(6, 5, 80.0);
    std::fill(img.data.begin(), img.data.end(), 4.25);
    const Image out = sacd::fourier_interpolate(img, 3);
    CHECK(out.height == 18);
    CHECK(out.width == 15);
    CHECK(out.pixel_size_nm == doctest::Approx(80.0 / 3.0).epsilon(1e-15));
    CHECK(out.upscale_factor == 3);
    for (double v : out.data) CHECK(v == doctest::Approx(4.25).epsilon(1e-12));
}

TEST_CASE("fourier interpolation matches trigonometric resampling") {
    // Odd sizes: every bin maps to a unique signed frequency.
    {
        const int h = 9, w = 11, mag = 3;
        Image img(h, w, 80.0);
        auto f = [&](double y, double x) {
            return 3.0 + std::cos(kTau * (2.0 * y / h + 3.0 * x / w) + 0.7);
        };
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) img.at(y, x) = f(y, x);
        const Image out = sacd::fourier_interpolate(img, mag);
        for (int Y = 0; Y < out.height; ++Y)
            for (int X = 0; X < out.width; ++X)
                CHECK(out.at(Y, X) ==
                      doctest::Approx(f(Y / static_cast<double>(mag),
                                        X / static_cast<double>(mag))).epsilon(1e-9));
        // Original samples sit at the magnified grid positions.
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                CHECK(out.at(y * mag, x * mag) == doctest::Approx(img.at(y, x)).epsilon(1e-9));
    }
    // Even sizes, signal strictly below Nyquist.
    {
        const int n = 8, mag = 2;
        Image img(n, n, 80.0);
        auto f = [&](double y, double x) {
            return 3.0 + std::cos(kTau * (2.0 * y / n + 3.0 * x / n) + 0.3);
        };
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) img.at(y, x) = f(y, x);
        const Image out = sacd::fourier_interpolate(img, mag);
        for (int Y = 0; Y < out.height; ++Y)
            for (int X = 0; X < out.width; ++X)
                CHECK(out.at(Y, X) ==
                      doctest::Approx(f(Y / 2.0, X / 2.0)).epsilon(1e-9));
    }
}

TEST_CASE("even-size Nyquist bins are split symmetrically") {
    // 2 + cos(pi y) sampled on four rows; the symmetric split interpolates it
    // as 2 + cos(pi Y / 2) on the doubled grid.
    Image img(4, 1, 80.0);
    img.data = {3.0, 1.0, 3.0, 1.0};
    const Image out = sacd::fourier_interpolate(img, 2);
    const std::vector<double> expect = {3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0, 2.0};
    REQUIRE(out.data.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("stack interpolation matches per-frame interpolation") {
    ImageStack stack = test_util::random_stack(3, 6, 5, 91);
    stack.provenance = "unit";
    const ImageStack big = sacd::fourier_interpolate(stack, 3);
    CHECK(big.frames == 3);
    CHECK(big.height == 18);
    CHECK(big.width == 15);
    CHECK(big.pixel_size_nm == doctest::Approx(80.0 / 3.0).epsilon(1e-15));
    CHECK(big.provenance == "unit");
    for (int t = 0; t < 3; ++t) {
        const Image single = sacd::fourier_interpolate(stack.frame_image(t), 3);
        const auto* frame = big.frame(t);
        for (size_t i = 0; i < single.data.size(); ++i) CHECK(frame[i] == single.data[i]);
    }
    const ImageStack same = sacd::fourier_interpolate(stack, 1);
    CHECK(same.data == stack.data);
}

TEST_CASE("richardson-lucy with a delta kernel returns the input") {
    Image data(8, 8, 80.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(1.0, 10.0);
    for (double& v : data.data) v = uni(rng);

    Image delta(3, 3, 80.0);
    delta.at(1, 1) = 1.0;

    const Image zero = sacd::lucy_richardson(data, delta, 0);
    CHECK(zero.data == data.data);

    const Image five = sacd::lucy_richardson(data, delta, 5);
    for (size_t i = 0; i < data.data.size(); ++i)
        CHECK(five.data[i] == doctest::Approx(data.data[i]).epsilon(1e-12));
}

TEST_CASE("richardson-lucy conserves flux") {
    const Image data = gaussian_image(16, 1.5, 100.0);
    const Image kernel = gaussian_image(5, 1.0, 1.0);
    const Image out = sacd::lucy_richardson(data, kernel, 10);
    const double flux_in = std::accumulate(data.data.begin(), data.data.end(), 0.0);
    const double flux_out = std::accumulate(out.data.begin(), out.data.end(), 0.0);
    CHECK(flux_out == doctest::Approx(flux_in).epsilon(1e-3));
}

TEST_CASE("richardson-lucy sharpens a blurred point") {
    const Image data = gaussian_image(33, 2.0, 50.0);
    const Image kernel = gaussian_image(13, 2.0, 1.0);
    const Image out = sacd::lucy_richardson(data, kernel, 10);
    for (double v : out.data) CHECK(v >= 0.0);

    const auto before = metrics::line_profile(data, 16.0, 2.0, 16.0, 30.0);
    const auto after = metrics::line_profile(out, 16.0, 2.0, 16.0, 30.0);
    const auto fit_before = metrics::gaussian_fit_fwhm(before.values, before.spacing_nm);
    const auto fit_after = metrics::gaussian_fit_fwhm(after.values, after.spacing_nm);
    REQUIRE(fit_before.converged);
    REQUIRE(fit_after.converged);
    CHECK(fit_after.fwhm_nm < fit_before.fwhm_nm);
}

TEST_CASE("richardson-lucy rejects hollow kernels and negative iteration counts") {
    const Image data = gaussian_image(16, 1.5, 10.0);
    Image hollow(3, 3, 80.0);
    CHECK_THROWS_AS(sacd::lucy_richardson(data, hollow, 3), std::invalid_argument);
    Image negative(3, 3, 80.0);
    negative.at(1, 1) = -2.0;
    CHECK_THROWS_AS(sacd::lucy_richardson(data, negative, 3), std::invalid_argument);
    const Image kernel = gaussian_image(5, 1.0, 1.0);
    CHECK_THROWS_AS(sacd::lucy_richardson(data, kernel, -1), std::invalid_argument);
    // Kernels larger than the image are cropped, not rejected.
    const Image wide = gaussian_image(21, 2.0, 1.0);
    const Image out = sacd::lucy_richardson(data, wide, 2);
    CHECK(std::accumulate(out.data.begin(), out.data.end(), 0.0) > 0.0);
}

TEST_CASE("mpac of a constant stack is zero") {
    ImageStack stack(16, 3, 4, 80.0);
    std::fill(stack.data.begin(), stack.data.end(), 7.5);
    for (int order = 2; order <= 6; ++order) {
        const Image out = sacd::mpac(stack, order, true);
        for (double v : out.data) CHECK(v == 0.0);
    }
}

TEST_CASE("mpac order 2 matches the lagged product oracle") {
    const ImageStack single = test_util::random_stack(9, 4, 5, 303);
    const Image out1 = sacd::mpac(single, 2, false);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x) {
            const auto trace = pixel_trace(single, y, x);
            CHECK(out1.at(y, x) ==
                  doctest::Approx(std::fabs(oracle_k2_distinct(trace))).epsilon(1e-12));
        }

    const ImageStack multi = test_util::random_stack(16, 3, 4, 304);
    const Image out2 = sacd::mpac(multi, 2, true);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 4; ++x) {
            const auto trace = pixel_trace(multi, y, x);
            double acc = 0.0;
            for (int b : {1, 2, 4})
                acc += std::fabs(oracle_k2_distinct(bin_trace(trace, b)));
            CHECK(out2.at(y, x) == doctest::Approx(acc / 3.0).epsilon(1e-12));
        }
}

TEST_CASE("multi-plane mpac skips planes that are too short") {
    // Order 4 on eight frames: the 2x and 4x binned planes fall below
    // order + 1 frames, so the multi-plane average reduces to one plane.
    const ImageStack stack = test_util::random_stack(8, 3, 3, 11);
    const Image multi = sacd::mpac(stack, 4, true);
    const Image single = sacd::mpac(stack, 4, false);
    CHECK(multi.data == single.data);
}

TEST_CASE("mpac rejects bad orders and short stacks") {
    const ImageStack stack = test_util::random_stack(20, 2, 2, 5);
    CHECK_THROWS_AS(sacd::mpac(stack, 1, true), std::invalid_argument);
    CHECK_THROWS_AS(sacd::mpac(stack, 7, true), std::invalid_argument);
    const ImageStack three = test_util::random_stack(3, 2, 2, 6);
    CHECK_THROWS_AS(sacd::mpac(three, 2, true), std::invalid_argument);
    const ImageStack eleven = test_util::random_stack(11, 2, 2, 7);
    CHECK_THROWS_AS(sacd::mpac(eleven, 6, true), std::invalid_argument);
    CHECK_NOTHROW(sacd::mpac(eleven, 5, true));
}

TEST_CASE("blinking scene cumulants are finite and non-negative") {
    const ImageStack noisy = emitter_stack({1320.0}, 16, 21);
    const Image out = sacd::mpac(noisy, 2, true);
    double peak = 0.0;
    for (double v : out.data) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        peak = std::max(peak, v);
    }
    CHECK(peak > 0.0);
}

TEST_CASE("zero-iteration pipeline degenerates to the distinct cumulant") {
    Image delta(3, 3, 80.0);
    delta.at(1, 1) = 1.0;

    // Five frames: the binned planes are skipped even with multi_plane on.
    const ImageStack small = test_util::random_stack(5, 6, 6, 404);
    sacd::SacdParams params;
    params.magnification = 1;
    params.lr_iterations = 0;
    params.order = 2;
    const auto result = sacd::sacd_reconstruct(small, delta, params);
    const Image direct = sofi::temporal_cumulant(small, 2, LagMode::DistinctFrames);
    REQUIRE(result.image.data.size() == direct.data.size());
    for (size_t i = 0; i < direct.data.size(); ++i)
        CHECK(result.image.data[i] == std::fabs(direct.data[i]));
    CHECK(result.method == Method::Sacd);
    CHECK(result.input_frames == 5);
    CHECK(result.image.upscale_factor == 1);

    // Longer stack with multi-plane averaging disabled explicitly.
    const ImageStack longer = test_util::random_stack(40, 4, 4, 405);
    params.multi_plane = false;
    const auto result2 = sacd::sacd_reconstruct(longer, delta, params);
    const Image direct2 = sofi::temporal_cumulant(longer, 2, LagMode::DistinctFrames);
    for (size_t i = 0; i < direct2.data.size(); ++i)
        CHECK(result2.image.data[i] == std::fabs(direct2.data[i]));
}

TEST_CASE("pipeline output is non-negative and annotated") {
    const ImageStack stack = test_util::random_stack(12, 8, 8, 500);
    const Image kernel = gaussian_image(7, 1.2, 1.0);
    sacd::SacdParams params;
    params.magnification = 2;
    params.lr_iterations = 2;
    params.order = 2;
    const auto result = sacd::sacd_reconstruct(stack, kernel, params);
    CHECK(result.image.height == 16);
    CHECK(result.image.width == 16);
    CHECK(result.image.upscale_factor == 2);
    for (double v : result.image.data) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }
    bool has_order = false;
    for (const auto& [key, value] : result.parameters)
        if (key == "order" && value == "2") has_order = true;
    CHECK(has_order);
}

TEST_CASE("default parameters resolve a 250 nm pair from sixteen frames") {
    const ImageStack noisy = emitter_stack({1155.0, 1405.0}, 16, 33);
    const Image kernel = optics::psf_slice(scene_psf(), 0.0, 80.0 / 8.0);
    const auto result = sacd::sacd_reconstruct(noisy, kernel, sacd::SacdParams{});
    CHECK(result.image.height == 256);
    CHECK(result.image.pixel_size_nm == doctest::Approx(10.0).epsilon(1e-12));

    // Profile along the emitter row; 1240 nm lands on output row 123.5.
    const auto profile = metrics::line_profile(result.image, 123.5, 95.0, 123.5, 160.0);
    const auto dip = metrics::dip_ratio(profile.values);
    REQUIRE(dip.has_value());
    CHECK(*dip >= 0.2);
}

TEST_CASE("background rejection does not degrade with cumulant order") {
    const Image kernel = optics::psf_slice(scene_psf(), 0.0, 40.0);
    const std::vector<int> orders = {2, 3, 4};
    std::vector<std::vector<double>> bg(orders.size());

    for (uint64_t seed = 50; seed < 56; ++seed) {
        const ImageStack noisy = emitter_stack({1320.0}, 24, seed);
        for (size_t k = 0; k < orders.size(); ++k) {
            sacd::SacdParams params;
            params.magnification = 2;
            params.lr_iterations = 2;
            params.order = orders[k];
            const auto result = sacd::sacd_reconstruct(noisy, kernel, params);
            double peak = 0.0;
            for (double v : result.image.data) peak = std::max(peak, v);
            REQUIRE(peak > 0.0);
            double sum = 0.0;
            int count = 0;
            for (int y = 4; y < 16; ++y)
                for (int x = 4; x < 16; ++x) {
                    sum += result.image.at(y, x);
                    ++count;
                }
            bg[k].push_back(sum / count / peak);
        }
    }

    // Normalized background must not grow with the order (3 sigma over seeds).
    for (size_t k = 0; k + 1 < orders.size(); ++k) {
        std::vector<double> diff(bg[k].size());
        for (size_t s = 0; s < diff.size(); ++s) diff[s] = bg[k][s] - bg[k + 1][s];
        const double n = static_cast<double>(diff.size());
        const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / n;
        double var = 0.0;
        for (double d : diff) var += (d - mean) * (d - mean);
        var /= n - 1.0;
        const double se = std::sqrt(var / n);
        CHECK(mean > -3.0 * se);
    }
}

TEST_CASE("parameter validation rejects bad configurations") {
    sacd::SacdParams params;
    CHECK_NOTHROW(params.validate(16));
    CHECK_THROWS_AS(params.validate(3), std::invalid_argument);

    sacd::SacdParams bad = params;
    bad.magnification = 0;
    CHECK_THROWS_AS(bad.validate(16), std::invalid_argument);
    bad = params;
    bad.lr_iterations = -1;
    CHECK_THROWS_AS(bad.validate(16), std::invalid_argument);
    bad = params;
    bad.order = 1;
    CHECK_THROWS_AS(bad.validate(16), std::invalid_argument);
    bad.order = 7;
    CHECK_THROWS_AS(bad.validate(16), std::invalid_argument);
    bad = params;
    bad.psf_exponent = -0.5;
    CHECK_THROWS_AS(bad.validate(16), std::invalid_argument);
}

}  // TEST_SUITE("sacd")

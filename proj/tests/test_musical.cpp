#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "ffsrm/abbe.hpp"
#include "ffsrm/musical.hpp"
#include "ffsrm/photokinetics.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/render.hpp"
#include "helpers.hpp"

using namespace ffsrm;

namespace {

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

// Same sampling rule the indicator uses for its PSF vector: the focal slice
// evaluated at the window's pixel centres for an emitter at (py, px).
std::vector<double> psf_pattern(const Image& focal, double pixel_size_nm, int origin_y,
                                int origin_x, int side, double py, double px) {
    auto bilinear = [&](double y, double x) {
        const int y0 = static_cast<int>(std::floor(y));
        const int x0 = static_cast<int>(std::floor(x));
        const double fy = y - y0;
        const double fx = x - x0;
        auto sample = [&](int yy, int xx) {
            if (yy < 0 || yy >= focal.height || xx < 0 || xx >= focal.width) return 0.0;
            return focal.at(yy, xx);
        };
        return (1.0 - fy) * ((1.0 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
               fy * ((1.0 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
    };
    std::vector<double> out(static_cast<size_t>(side) * side);
    for (int wy = 0; wy < side; ++wy)
        for (int wx = 0; wx < side; ++wx) {
            const double dy_nm = (origin_y + wy + 0.5 - py) * pixel_size_nm;
            const double dx_nm = (origin_x + wx + 0.5 - px) * pixel_size_nm;
            out[static_cast<size_t>(wy) * side + wx] =
                bilinear(focal.height / 2 + dy_nm / focal.pixel_size_nm,
                         focal.width / 2 + dx_nm / focal.pixel_size_nm);
        }
    return out;
}

// Rank-1 stack: one spatial pattern modulated by per-frame brightness.
ImageStack rank1_stack(const std::vector<double>& pattern, int side,
                       const std::vector<double>& brightness) {
    ImageStack stack(static_cast<int>(brightness.size()), side, side, 80.0);
    for (size_t t = 0; t < brightness.size(); ++t)
        for (size_t i = 0; i < pattern.size(); ++i)
            stack.data[t * pattern.size() + i] = brightness[t] * pattern[i];
    return stack;
}

ImageStack noise_stack(int frames, int h, int w, double lambda, uint64_t seed) {
    ImageStack stack(frames, h, w, 80.0);
    std::mt19937_64 rng(seed);
    std::poisson_distribution<int> poisson(lambda);
    for (double& v : stack.data) v = static_cast<double>(poisson(rng));
    return stack;
}

// Blinking emitter in the middle of a 16x16 field, with camera noise.
ImageStack emitter_scene(int frames, uint64_t seed) {
    sim::EmitterSet set;
    set.sample_name = "two_point";
    set.field_width_nm = 1280.0;
    set.field_height_nm = 1280.0;
    sim::Emitter e;
    e.x_nm = 680.0;  // centre of pixel (8, 8)
    e.y_nm = 680.0;
    set.emitters = {e};
    sim::FovSpec fov;
    fov.width_px = 16;
    fov.height_px = 16;
    const auto on = sim::simulate_blinking(1, frames, sim::preset_medium_fluctuation(), seed);
    const auto clean = sim::render_stack(set, on, scene_psf(), OpticalConfig{}, fov);
    return sim::apply_camera_noise(clean, sim::CameraNoiseParams{}, seed + 7);
}

}  // namespace

TEST_SUITE("musical") {

TEST_CASE("a static emitter yields a rank-1 window decomposition") {
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const auto pattern = psf_pattern(focal, 80.0, 0, 0, 5, 2.5, 2.5);
    const std::vector<double> brightness = {1.0, 0.5, 2.0, 1.5, 0.75, 1.25};
    const ImageStack stack = rank1_stack(pattern, 5, brightness);

    const auto svd = musical::window_svd(stack, 0, 0, 5);
    REQUIRE(svd.singular_values.size() == 25);
    REQUIRE(svd.eigenimages.rows() == 25);
    REQUIRE(svd.eigenimages.cols() == 25);

    // One nonzero singular value, equal to |pattern| |brightness|.
    double pat2 = 0.0, bri2 = 0.0;
    for (double v : pattern) pat2 += v * v;
    for (double c : brightness) bri2 += c * c;
    const double s1 = svd.singular_values[0];
    CHECK(s1 == doctest::Approx(std::sqrt(pat2 * bri2)).epsilon(1e-12));
    for (size_t i = 1; i < svd.singular_values.size(); ++i) {
        CHECK(svd.singular_values[i] <= 1e-10 * s1);
        CHECK(svd.singular_values[i] >= 0.0);
    }

    // Leading eigenimage is the pattern direction.
    Eigen::VectorXd p(25);
    for (int i = 0; i < 25; ++i) p(i) = pattern[static_cast<size_t>(i)];
    p.normalize();
    CHECK(std::fabs(svd.eigenimages.col(0).dot(p)) == doctest::Approx(1.0).epsilon(1e-10));

    // Full basis is orthonormal.
    const Eigen::MatrixXd gram =
        svd.eigenimages.transpose() * svd.eigenimages - Eigen::MatrixXd::Identity(25, 25);
    CHECK(gram.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("squared singular values match the brute-force covariance spectrum") {
    const ImageStack stack = test_util::random_stack(12, 8, 8, 808);
    const auto svd = musical::window_svd(stack, 2, 1, 5);

    Eigen::MatrixXd a(25, 12);
    for (int wy = 0; wy < 5; ++wy)
        for (int wx = 0; wx < 5; ++wx)
            for (int t = 0; t < 12; ++t)
                a(wy * 5 + wx, t) = stack.at(t, 2 + wy, 1 + wx);
    const Eigen::MatrixXd cov = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    REQUIRE(eig.info() == Eigen::Success);
    std::vector<double> lambdas(eig.eigenvalues().data(),
                                eig.eigenvalues().data() + eig.eigenvalues().size());
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());

    const double top = lambdas[0];
    for (size_t i = 0; i < svd.singular_values.size(); ++i) {
        const double s2 = svd.singular_values[i] * svd.singular_values[i];
        if (lambdas[i] > 1e-9 * top)
            CHECK(s2 == doctest::Approx(lambdas[i]).epsilon(1e-9));
        else
            CHECK(s2 <= 1e-9 * top);
    }
    // Descending order.
    for (size_t i = 1; i < svd.singular_values.size(); ++i)
        CHECK(svd.singular_values[i] <= svd.singular_values[i - 1]);
}

TEST_CASE("duplicated frames leave the singular directions alone") {
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const auto pattern = psf_pattern(focal, 80.0, 0, 0, 5, 2.5, 2.5);
    const ImageStack base = rank1_stack(pattern, 5, {1.0, 0.5, 2.0});
    const ImageStack extended = rank1_stack(pattern, 5, {1.0, 0.5, 2.0, 2.0});

    const auto a = musical::window_svd(base, 0, 0, 5);
    const auto b = musical::window_svd(extended, 0, 0, 5);
    CHECK(std::fabs(a.eigenimages.col(0).dot(b.eigenimages.col(0))) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(b.singular_values[1] <= 1e-10 * b.singular_values[0]);

    // Doubling the whole stack rescales the spectrum but keeps every
    // direction: the frame matrix gram doubles.
    const ImageStack stack = test_util::random_stack(6, 6, 6, 909);
    ImageStack twice(12, 6, 6, 80.0);
    std::copy(stack.data.begin(), stack.data.end(), twice.data.begin());
    std::copy(stack.data.begin(), stack.data.end(),
              twice.data.begin() + static_cast<long>(stack.data.size()));
    const auto one = musical::window_svd(stack, 0, 0, 5);
    const auto two = musical::window_svd(twice, 0, 0, 5);
    for (int i = 0; i < 6; ++i) {
        CHECK(two.singular_values[static_cast<size_t>(i)] ==
              doctest::Approx(std::sqrt(2.0) * one.singular_values[static_cast<size_t>(i)])
                  .epsilon(1e-9));
        CHECK(std::fabs(one.eigenimages.col(i).dot(two.eigenimages.col(i))) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("window bounds are enforced") {
    const ImageStack stack = test_util::random_stack(4, 6, 6, 3);
    CHECK_THROWS_AS(musical::window_svd(stack, -1, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(musical::window_svd(stack, 0, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(musical::window_svd(stack, 0, 0, 0), std::invalid_argument);
    CHECK_NOTHROW(musical::window_svd(stack, 1, 1, 5));
}

TEST_CASE("default window side covers twice the abbe limit") {
    OpticalConfig config;  // 510 nm / 1.42 / 80 nm -> 2*180/80 + 1 = 5.5 -> 7
    CHECK(musical::default_window_side(config) == 7);
    config.pixel_size_nm = 100.0;
    CHECK(musical::default_window_side(config) == 5);
    config.pixel_size_nm = 400.0;
    CHECK(musical::default_window_side(config) == 3);
    config = OpticalConfig{};
    config.emission_wavelength_nm = 600.0;
    config.numerical_aperture = 1.0;
    CHECK(musical::default_window_side(config) == 9);
}

TEST_CASE("singular value spectrum reports the second-value range") {
    // Rank-1 stack covering exactly one window: s2 = 0 -> -inf sentinel.
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const auto pattern = psf_pattern(focal, 80.0, 0, 0, 5, 2.5, 2.5);
    const ImageStack rank1 = rank1_stack(pattern, 5, {1.0, 2.0, 0.5});
    const auto summary = musical::singular_value_spectrum(rank1, OpticalConfig{}, 5);
    REQUIRE(summary.second_log10.size() == 1);
    CHECK(std::isinf(summary.min_log10));
    CHECK(summary.min_log10 < 0.0);
    CHECK(summary.mid_log10 == summary.min_log10);
    CHECK(summary.max_log10 == summary.min_log10);

    // mid is the median of the per-window values by definition.
    const ImageStack random = test_util::random_stack(10, 12, 12, 72);
    const auto spread = musical::singular_value_spectrum(random, OpticalConfig{}, 5);
    std::vector<double> sorted = spread.second_log10;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(!sorted.empty());
    CHECK(spread.min_log10 == sorted.front());
    CHECK(spread.max_log10 == sorted.back());
    const size_t n = sorted.size();
    const double median =
        n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    CHECK(spread.mid_log10 == median);

    // Fully dark windows are skipped.
    ImageStack half = test_util::random_stack(10, 12, 12, 73);
    for (int t = 0; t < half.frames; ++t)
        for (int y = 0; y < 12; ++y)
            for (int x = 0; x < 7; ++x)
                half.data[static_cast<size_t>(t) * 144 + static_cast<size_t>(y) * 12 + x] = 0.0;
    const auto partial = musical::singular_value_spectrum(half, OpticalConfig{}, 5);
    CHECK(partial.second_log10.size() == 15);  // 5x5 windows minus the dark 2 columns

    ImageStack dark(4, 12, 12, 80.0);
    CHECK_THROWS_AS(musical::singular_value_spectrum(dark, OpticalConfig{}, 5),
                    std::runtime_error);
    const ImageStack tiny = test_util::random_stack(4, 4, 4, 74);
    CHECK_THROWS_AS(musical::singular_value_spectrum(tiny, OpticalConfig{}, 5),
                    std::invalid_argument);
}

TEST_CASE("pure noise concentrates the second singular values") {
    const ImageStack stack = noise_stack(30, 44, 44, 50.0, 2025);
    const auto summary = musical::singular_value_spectrum(stack, OpticalConfig{}, 7);
    REQUIRE(summary.second_log10.size() >= 100);
    for (double v : summary.second_log10) CHECK(std::isfinite(v));
    CHECK(summary.max_log10 - summary.min_log10 < 0.5);
}

TEST_CASE("indicator saturates on the emitter and decays far away") {
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const auto pattern = psf_pattern(focal, 80.0, 0, 0, 5, 2.5, 2.5);
    const ImageStack stack = rank1_stack(pattern, 5, {1.0, 0.5, 2.0, 1.5});
    const auto svd = musical::window_svd(stack, 0, 0, 5);
    const OpticalConfig config;

    // At the emitter the PSF vector lies in the rank-1 signal span.
    const double at = musical::musical_indicator(svd, focal, config, 2.5, 2.5, -0.5, 4.0);
    CHECK(at == doctest::Approx(std::pow(10.0, 12.0)).epsilon(1e-12));

    // Three lateral Abbe widths away the indicator collapses below 1.
    const double limit_px = optics::abbe_limits(config).lateral_nm / config.pixel_size_nm;
    const double far = musical::musical_indicator(svd, focal, config, 2.5,
                                                  2.5 + 3.0 * limit_px, -0.5, 4.0);
    CHECK(far < 1.0);
    CHECK(far >= 0.0);
}

TEST_CASE("doubling alpha squares the indicator") {
    const ImageStack stack = test_util::random_stack(8, 5, 5, 55);
    const auto svd = musical::window_svd(stack, 0, 0, 5);
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const OpticalConfig config;

    const double base = musical::musical_indicator(svd, focal, config, 1.2, 3.4, -0.5, 2.0);
    const double doubled = musical::musical_indicator(svd, focal, config, 1.2, 3.4, -0.5, 4.0);
    REQUIRE(base > 0.0);
    REQUIRE(base * base < std::pow(10.0, 12.0));  // stays below the cap
    CHECK(doubled == doctest::Approx(base * base).epsilon(1e-12));
}

TEST_CASE("lowering the threshold never shrinks the indicator") {
    const ImageStack stack = test_util::random_stack(8, 5, 5, 56);
    const auto svd = musical::window_svd(stack, 0, 0, 5);
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const OpticalConfig config;

    for (double x : {0.7, 1.5, 2.5, 3.9}) {
        const double strict = musical::musical_indicator(svd, focal, config, 2.0, x, -0.1, 4.0);
        const double loose = musical::musical_indicator(svd, focal, config, 2.0, x, -3.0, 4.0);
        CHECK(loose >= strict);
    }
}

TEST_CASE("indicator rejects dark windows and bad parameters") {
    ImageStack dark(4, 5, 5, 80.0);
    const auto svd = musical::window_svd(dark, 0, 0, 5);
    const Image focal = optics::lateral_slice(scene_psf(), 0.0);
    const OpticalConfig config;
    CHECK_THROWS_AS(musical::musical_indicator(svd, focal, config, 2.5, 2.5, -0.5, 4.0),
                    std::invalid_argument);

    const ImageStack lit = test_util::random_stack(4, 5, 5, 57);
    const auto good = musical::window_svd(lit, 0, 0, 5);
    CHECK_THROWS_AS(musical::musical_indicator(good, focal, config, 2.5, 2.5, 0.1, 4.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(musical::musical_indicator(good, focal, config, 2.5, 2.5, -0.5, 0.0),
                    std::invalid_argument);
}

TEST_CASE("reconstruction is deterministic and scale invariant") {
    const ImageStack noisy = emitter_scene(24, 64);
    musical::MusicalParams params;
    params.subpixels = 4;
    params.window_side = 7;

    const auto first = musical::musical_reconstruct(noisy, scene_psf(), OpticalConfig{}, params);
    const auto second = musical::musical_reconstruct(noisy, scene_psf(), OpticalConfig{}, params);
    CHECK(first.image.data == second.image.data);

    ImageStack doubled = noisy;
    for (double& v : doubled.data) v *= 2.0;
    const auto scaled = musical::musical_reconstruct(doubled, scene_psf(), OpticalConfig{}, params);
    CHECK(scaled.image.data == first.image.data);

    CHECK(first.image.height == 64);
    CHECK(first.image.width == 64);
    CHECK(first.image.upscale_factor == 4);
    CHECK(first.image.pixel_size_nm == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(first.method == Method::Musical);
    CHECK(first.input_frames == 24);
    for (double v : first.image.data) {
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
    }

    // The indicator peaks near the emitter: brightest subpixel within one
    // camera pixel of the true position.
    size_t best = 0;
    for (size_t i = 1; i < first.image.data.size(); ++i)
        if (first.image.data[i] > first.image.data[best]) best = i;
    const double by = (static_cast<double>(best / 64) + 0.5) * first.image.pixel_size_nm;
    const double bx = (static_cast<double>(best % 64) + 0.5) * first.image.pixel_size_nm;
    CHECK(std::fabs(by - 680.0) <= 80.0);
    CHECK(std::fabs(bx - 680.0) <= 80.0);
}

TEST_CASE("reconstruction validates its inputs") {
    const ImageStack noisy = emitter_scene(6, 65);
    musical::MusicalParams params;

    musical::MusicalParams bad = params;
    bad.subpixels = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.threshold = 0.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = params;
    bad.window_side = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.window_side = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.window_side = 0;
    CHECK_NOTHROW(bad.validate());

    // Stack smaller than the window.
    const ImageStack tiny = test_util::random_stack(6, 4, 4, 66);
    params.window_side = 7;
    CHECK_THROWS_AS(musical::musical_reconstruct(tiny, scene_psf(), OpticalConfig{}, params),
                    std::invalid_argument);

    // Single-frame stacks carry no fluctuation information.
    ImageStack single(1, 16, 16, 80.0);
    std::fill(single.data.begin(), single.data.end(), 1.0);
    params.window_side = 7;
    CHECK_THROWS_AS(musical::musical_reconstruct(single, scene_psf(), OpticalConfig{}, params),
                    std::invalid_argument);
}

}  // TEST_SUITE("musical")

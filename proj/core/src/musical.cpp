#include "ffsrm/musical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

#include "ffsrm/abbe.hpp"
#include "ffsrm/parallel.hpp"

namespace ffsrm::musical {

namespace {

std::vector<int> window_origins(int image_extent, int side) {
    const int stride = std::max(1, side / 2);
    std::vector<int> origins;
    for (int o = 0; o + side <= image_extent; o += stride) origins.push_back(o);
    if (origins.empty() || origins.back() != image_extent - side)
        origins.push_back(image_extent - side);
    return origins;
}

double bilinear_or_zero(const Image& img, double y, double x) {
    const int y0 = static_cast<int>(std::floor(y));
    const int x0 = static_cast<int>(std::floor(x));
    const double fy = y - y0;
    const double fx = x - x0;
    auto sample = [&](int yy, int xx) {
        if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width) return 0.0;
        return img.at(yy, xx);
    };
    return (1.0 - fy) * ((1.0 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
           fy * ((1.0 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
}

// PSF vector: focal slice sampled at the window's pixel centres for an
// emitter hypothesized at frame coordinates (py, px).
void fill_psf_vector(Eigen::VectorXd& g, const WindowSvd& svd, const Image& focal,
                     double pixel_size_nm, double py, double px) {
    const int side = svd.side;
    for (int wy = 0; wy < side; ++wy)
        for (int wx = 0; wx < side; ++wx) {
            const double dy_nm = (svd.origin_y + wy + 0.5 - py) * pixel_size_nm;
            const double dx_nm = (svd.origin_x + wx + 0.5 - px) * pixel_size_nm;
            g(wy * side + wx) = bilinear_or_zero(
                focal, focal.height / 2 + dy_nm / focal.pixel_size_nm,
                focal.width / 2 + dx_nm / focal.pixel_size_nm);
        }
}

int count_signal(const WindowSvd& svd, double threshold) {
    const double s1 = svd.singular_values.empty() ? 0.0 : svd.singular_values[0];
    if (!(s1 > 0.0)) return 0;
    int n = 0;
    for (double s : svd.singular_values)
        if (s > 0.0 && std::log10(s / s1) >= threshold) ++n;
    return n;
}

double indicator_value(const WindowSvd& svd, int n_signal, const Eigen::VectorXd& g,
                       double alpha, double cap) {
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) return 0.0;
    double gs2 = 0.0;
    for (int i = 0; i < n_signal; ++i) {
        const double proj = svd.eigenimages.col(i).dot(g);
        gs2 += proj * proj;
    }
    const double gn2 = g2 - gs2;
    if (gn2 <= 0.0) return cap;
    return std::min(std::pow(gs2 / gn2, 0.5 * alpha), cap);
}

}  // namespace

void MusicalParams::validate() const {
    if (subpixels < 1) throw std::invalid_argument("musical: subpixels must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("musical: alpha must be positive");
    if (threshold > 0.0)
        throw std::invalid_argument(
            "musical: threshold is log10 relative to the first singular value and cannot be positive");
    if (window_side != 0 && (window_side < 3 || window_side % 2 == 0))
        throw std::invalid_argument("musical: window side must be an odd integer >= 3");
}

int default_window_side(const OpticalConfig& config) {
    const auto limits = optics::abbe_limits(config);
    const double pixels = 2.0 * limits.lateral_nm / config.pixel_size_nm;
    int side = static_cast<int>(std::ceil(pixels + 1.0));
    if (side % 2 == 0) ++side;
    return std::max(side, 3);
}

WindowSvd window_svd(const ImageStack& stack, int origin_y, int origin_x, int side) {
    if (side < 1) throw std::invalid_argument("window_svd: side must be positive");
    if (origin_y < 0 || origin_x < 0 || origin_y + side > stack.height ||
        origin_x + side > stack.width)
        throw std::invalid_argument("window_svd: window exceeds the stack");

    const int d = side * side;
    Eigen::MatrixXd a(d, stack.frames);
    for (int wy = 0; wy < side; ++wy)
        for (int wx = 0; wx < side; ++wx)
            for (int t = 0; t < stack.frames; ++t)
                a(wy * side + wx, t) = stack.at(t, origin_y + wy, origin_x + wx);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU);

    WindowSvd out;
    out.origin_y = origin_y;
    out.origin_x = origin_x;
    out.side = side;
    out.eigenimages = svd.matrixU();
    out.singular_values.assign(static_cast<size_t>(d), 0.0);
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size() && i < d; ++i)
        out.singular_values[static_cast<size_t>(i)] = sv(i);
    return out;
}

SpectrumSummary singular_value_spectrum(const ImageStack& stack,
                                        const OpticalConfig& config,
                                        int window_side) {
    const int side = window_side > 0 ? window_side : default_window_side(config);
    if (stack.height < side || stack.width < side)
        throw std::invalid_argument("spectrum: stack smaller than the analysis window");

    const auto ys = window_origins(stack.height, side);
    const auto xs = window_origins(stack.width, side);
    SpectrumSummary summary;
    for (int oy : ys)
        for (int ox : xs) {
            const WindowSvd w = window_svd(stack, oy, ox, side);
            if (!(w.singular_values[0] > 0.0)) continue;  // dark window
            summary.second_log10.push_back(
                w.singular_values[1] > 0.0
                    ? std::log10(w.singular_values[1] / w.singular_values[0])
                    : -std::numeric_limits<double>::infinity());
        }
    if (summary.second_log10.empty())
        throw std::runtime_error("spectrum: every window is completely dark");
    std::vector<double> sorted = summary.second_log10;
    std::sort(sorted.begin(), sorted.end());
    summary.min_log10 = sorted.front();
    summary.max_log10 = sorted.back();
    const size_t n = sorted.size();
    summary.mid_log10 = n % 2 == 1 ? sorted[n / 2]
                                   : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return summary;
}

double musical_indicator(const WindowSvd& wsvd, const Image& focal_slice,
                         const OpticalConfig& config, double test_y_px,
                         double test_x_px, double threshold, double alpha) {
    if (threshold > 0.0)
        throw std::invalid_argument(
            "musical: threshold is log10 relative to the first singular value and cannot be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("musical: alpha must be positive");
    const int n_signal = count_signal(wsvd, threshold);
    if (n_signal == 0)
        throw std::invalid_argument("musical: empty signal subspace (dark window)");
    Eigen::VectorXd g(wsvd.side * wsvd.side);
    fill_psf_vector(g, wsvd, focal_slice, config.pixel_size_nm, test_y_px, test_x_px);
    return indicator_value(wsvd, n_signal, g, alpha, std::pow(10.0, 3.0 * alpha));
}

ReconstructionResult musical_reconstruct(const ImageStack& stack,
                                         const optics::Psf3D& psf,
                                         const OpticalConfig& config,
                                         const MusicalParams& params) {
    params.validate();
    config.validate();
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("musical: invalid input stack: " + report.issues.front());
    if (stack.frames < 2) throw std::invalid_argument("musical: need at least 2 frames");

    const int side = params.window_side > 0 ? params.window_side
                                            : default_window_side(config);
    if (stack.height < side || stack.width < side)
        throw std::invalid_argument("musical: stack smaller than the analysis window");

    const int sub = params.subpixels;
    const Image focal = optics::lateral_slice(psf, 0.0);
    const double cap = std::pow(10.0, 3.0 * params.alpha);

    const auto ys = window_origins(stack.height, side);
    const auto xs = window_origins(stack.width, side);
    const size_t n_windows = ys.size() * xs.size();
    const int wpix = side * sub;  // subpixel extent of one window

    std::vector<std::vector<double>> window_values(n_windows);

    parallel_for(n_windows, [&](size_t wi) {
        const int oy = ys[wi / xs.size()];
        const int ox = xs[wi % xs.size()];
        const WindowSvd svd = window_svd(stack, oy, ox, side);

        std::vector<double>& values = window_values[wi];
        values.assign(static_cast<size_t>(wpix) * wpix, 0.0);
        const int n_signal = count_signal(svd, params.threshold);
        if (n_signal == 0) return;  // dark window contributes zeros

        Eigen::VectorXd g(side * side);
        for (int sy = 0; sy < wpix; ++sy) {
            const double py = oy + (sy + 0.5) / sub;  // camera px, window-relative + origin
            for (int sx = 0; sx < wpix; ++sx) {
                const double px = ox + (sx + 0.5) / sub;
                fill_psf_vector(g, svd, focal, config.pixel_size_nm, py, px);
                values[static_cast<size_t>(sy) * wpix + sx] =
                    indicator_value(svd, n_signal, g, params.alpha, cap);
            }
        }
    });

    // Deterministic stitch: accumulate window results in index order.
    Image out(stack.height * sub, stack.width * sub, stack.pixel_size_nm / sub, sub);
    std::vector<int> counts(out.pixel_count(), 0);
    for (size_t wi = 0; wi < n_windows; ++wi) {
        const int oy = ys[wi / xs.size()] * sub;
        const int ox = xs[wi % xs.size()] * sub;
        const std::vector<double>& values = window_values[wi];
        for (int sy = 0; sy < wpix; ++sy)
            for (int sx = 0; sx < wpix; ++sx) {
                const size_t idx = static_cast<size_t>(oy + sy) * out.width + (ox + sx);
                out.data[idx] += values[static_cast<size_t>(sy) * wpix + sx];
                ++counts[idx];
            }
    }
    for (size_t i = 0; i < out.data.size(); ++i)
        if (counts[i] > 0) out.data[i] /= counts[i];

    ReconstructionResult result;
    result.method = Method::Musical;
    result.input_frames = stack.frames;
    result.image = std::move(out);
    result.param("window_side", side);
    result.param("subpixels", sub);
    result.param("alpha", params.alpha);
    result.param("threshold", params.threshold);
    return result;
}

}  // namespace ffsrm::musical

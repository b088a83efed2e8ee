#include "ffsrm/sacd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ffsrm/detail/cumulant.hpp"
#include "ffsrm/detail/fft.hpp"
#include "ffsrm/parallel.hpp"
#include "ffsrm/psf.hpp"

namespace ffsrm::sacd {

void SacdParams::validate(int frames) const {
    if (magnification < 1) throw std::invalid_argument("sacd: magnification must be >= 1");
    if (lr_iterations < 0) throw std::invalid_argument("sacd: iterations must be >= 0");
    if (order < 2 || order > 6) throw std::invalid_argument("sacd: order must be in 2..6");
    if (frames < 2 * order)
        throw std::invalid_argument("sacd: need at least 2*order frames");
    if (psf_exponent < 0.0)
        throw std::invalid_argument("sacd: psf exponent must be non-negative");
}

Image fourier_interpolate(const Image& image, int magnification) {
    if (magnification < 1)
        throw std::invalid_argument("fourier_interpolate: magnification must be >= 1");
    if (magnification == 1) return image;

    const int h = image.height;
    const int w = image.width;
    const int H = h * magnification;
    const int W = w * magnification;

    std::vector<std::complex<double>> small(image.data.begin(), image.data.end());
    detail::fft2_forward(small, h, w);

    // Frequency bins move to the same signed frequency in the big spectrum;
    // an even-size Nyquist bin is shared between +N/2 and -N/2.
    auto targets = [](int k, int n, int big) {
        std::vector<std::pair<int, double>> out;
        const int nyquist = n / 2;
        if (n % 2 == 0 && k == nyquist) {
            out.push_back({nyquist, 0.5});
            out.push_back({big - nyquist, 0.5});
        } else {
            const int f = k <= nyquist ? k : k - n;
            out.push_back({f >= 0 ? f : big + f, 1.0});
        }
        return out;
    };

    std::vector<std::complex<double>> big(static_cast<size_t>(H) * W, {0.0, 0.0});
    for (int ky = 0; ky < h; ++ky) {
        const auto ty = targets(ky, h, H);
        for (int kx = 0; kx < w; ++kx) {
            const auto tx = targets(kx, w, W);
            const std::complex<double> v = small[static_cast<size_t>(ky) * w + kx];
            for (const auto& [by, wy] : ty)
                for (const auto& [bx, wx] : tx)
                    big[static_cast<size_t>(by) * W + bx] += wy * wx * v;
        }
    }
    detail::fft2_backward(big, H, W);

    Image out(H, W, image.pixel_size_nm / magnification,
              image.upscale_factor * magnification);
    const double norm = 1.0 / (static_cast<double>(h) * w);
    for (size_t i = 0; i < big.size(); ++i)
        out.data[i] = std::max(big[i].real() * norm, 0.0);
    return out;
}

ImageStack fourier_interpolate(const ImageStack& stack, int magnification) {
    if (magnification == 1) return stack;
    ImageStack out(stack.frames, stack.height * magnification,
                   stack.width * magnification, stack.pixel_size_nm / magnification);
    out.provenance = stack.provenance;
    parallel_for(static_cast<size_t>(stack.frames), [&](size_t t) {
        const Image frame = fourier_interpolate(stack.frame_image(static_cast<int>(t)),
                                                magnification);
        std::copy(frame.data.begin(), frame.data.end(), out.frame(static_cast<int>(t)));
    });
    return out;
}

namespace {

// Kernel spectrum with the kernel centre aligned to the origin (wrapped),
// cropped symmetrically if it exceeds the image and normalized to unit sum.
std::vector<std::complex<double>> kernel_spectrum(const Image& kernel, int H, int W) {
    int kh = kernel.height;
    int kw = kernel.width;
    int oy = 0, ox = 0;
    if (kh > H) {
        const int crop = H % 2 == 0 ? H - 1 : H;
        oy = (kh - crop) / 2;
        kh = crop;
    }
    if (kw > W) {
        const int crop = W % 2 == 0 ? W - 1 : W;
        ox = (kw - crop) / 2;
        kw = crop;
    }
    double mass = 0.0;
    for (int y = 0; y < kh; ++y)
        for (int x = 0; x < kw; ++x) mass += std::max(kernel.at(oy + y, ox + x), 0.0);
    if (!(mass > 0.0)) throw std::invalid_argument("lucy_richardson: kernel has no mass");

    std::vector<std::complex<double>> spec(static_cast<size_t>(H) * W, {0.0, 0.0});
    const int cy = kh / 2;
    const int cx = kw / 2;
    for (int y = 0; y < kh; ++y)
        for (int x = 0; x < kw; ++x) {
            const double v = std::max(kernel.at(oy + y, ox + x), 0.0) / mass;
            const int Y = ((y - cy) % H + H) % H;
            const int X = ((x - cx) % W + W) % W;
            spec[static_cast<size_t>(Y) * W + X] += v;
        }
    detail::fft2_forward(spec, H, W);
    return spec;
}

}  // namespace

Image lucy_richardson(const Image& data, const Image& kernel, int iterations) {
    if (iterations < 0) throw std::invalid_argument("lucy_richardson: iterations must be >= 0");
    if (iterations == 0) return data;

    const int H = data.height;
    const int W = data.width;
    const size_t n = data.pixel_count();
    const auto fk = kernel_spectrum(kernel, H, W);

    double peak = 0.0;
    for (double v : data.data) peak = std::max(peak, v);
    const double eps = 1e-12 * std::max(peak, 1.0);
    const double norm = 1.0 / static_cast<double>(n);

    std::vector<double> estimate(n);
    for (size_t i = 0; i < n; ++i) estimate[i] = std::max(data.data[i], 0.0);

    std::vector<std::complex<double>> buf(n);
    for (int it = 0; it < iterations; ++it) {
        for (size_t i = 0; i < n; ++i) buf[i] = estimate[i];
        detail::fft2_forward(buf, H, W);
        for (size_t i = 0; i < n; ++i) buf[i] *= fk[i];
        detail::fft2_backward(buf, H, W);
        // ratio of data to the blurred estimate, floored to stay finite
        for (size_t i = 0; i < n; ++i) {
            const double denom = std::max(buf[i].real() * norm, eps);
            buf[i] = std::max(data.data[i], 0.0) / denom;
        }
        detail::fft2_forward(buf, H, W);
        for (size_t i = 0; i < n; ++i) buf[i] *= std::conj(fk[i]);
        detail::fft2_backward(buf, H, W);
        for (size_t i = 0; i < n; ++i)
            estimate[i] = std::max(estimate[i] * buf[i].real() * norm, 0.0);
    }

    Image out(H, W, data.pixel_size_nm, data.upscale_factor);
    out.data.assign(estimate.begin(), estimate.end());
    return out;
}

Image mpac(const ImageStack& stack, int order, bool multi_plane) {
    if (order < 2 || order > 6) throw std::invalid_argument("mpac: order must be in 2..6");
    if (stack.frames < 2 * order)
        throw std::invalid_argument("mpac: need at least 2*order frames");
    const std::vector<int> candidate_bins = multi_plane ? std::vector<int>{1, 2, 4}
                                                        : std::vector<int>{1};
    std::vector<int> bins;
    for (int b : candidate_bins)
        if (stack.frames / b >= order + 1) bins.push_back(b);
    if (bins.empty())
        throw std::invalid_argument("mpac: stack too short for the requested order");

    Image out(stack.height, stack.width, stack.pixel_size_nm);
    const size_t npix = stack.frame_pixels();

    parallel_for(static_cast<size_t>(stack.height), [&](size_t y) {
        std::vector<double> trace(static_cast<size_t>(stack.frames));
        std::vector<double> binned;
        for (int x = 0; x < stack.width; ++x) {
            const size_t offset = y * stack.width + static_cast<size_t>(x);
            for (int t = 0; t < stack.frames; ++t)
                trace[static_cast<size_t>(t)] = stack.data[static_cast<size_t>(t) * npix + offset];
            double acc = 0.0;
            for (int b : bins) {
                const size_t nb = static_cast<size_t>(stack.frames / b);
                binned.resize(nb);
                for (size_t i = 0; i < nb; ++i) {
                    double s = 0.0;
                    for (int j = 0; j < b; ++j) s += trace[i * b + j];
                    binned[i] = s / b;
                }
                acc += std::fabs(detail::trace_cumulant_distinct_ext(binned.data(), nb, order));
            }
            out.data[offset] = acc / static_cast<double>(bins.size());
        }
    });
    return out;
}

ReconstructionResult sacd_reconstruct(const ImageStack& stack, const Image& kernel,
                                      const SacdParams& params) {
    params.validate(stack.frames);
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("sacd: invalid input stack: " + report.issues.front());

    ImageStack upsampled = fourier_interpolate(stack, params.magnification);
    if (params.lr_iterations > 0) {
        parallel_for(static_cast<size_t>(upsampled.frames), [&](size_t t) {
            const Image frame = lucy_richardson(upsampled.frame_image(static_cast<int>(t)),
                                                kernel, params.lr_iterations);
            std::copy(frame.data.begin(), frame.data.end(),
                      upsampled.frame(static_cast<int>(t)));
        });
    }

    Image cumulant = mpac(upsampled, params.order, params.multi_plane);
    ReconstructionResult result;
    result.method = Method::Sacd;
    result.input_frames = stack.frames;
    if (params.lr_iterations > 0) {
        const double exponent =
            params.psf_exponent > 0.0 ? params.psf_exponent : params.order;
        result.image = lucy_richardson(cumulant, optics::psf_power(kernel, exponent),
                                       params.lr_iterations);
    } else {
        result.image = cumulant;
    }
    result.image.upscale_factor = params.magnification;
    result.param("magnification", params.magnification);
    result.param("lr_iterations", params.lr_iterations);
    result.param("order", params.order);
    result.param("psf_exponent",
                 params.psf_exponent > 0.0 ? params.psf_exponent : params.order);
    result.param("multi_plane", params.multi_plane ? "true" : "false");
    return result;
}

}  // namespace ffsrm::sacd

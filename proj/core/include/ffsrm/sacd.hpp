#pragma once

#include "ffsrm/image.hpp"
#include "ffsrm/reconstruction.hpp"

namespace ffsrm::sacd {

struct SacdParams {
    int magnification = 8;
    int lr_iterations = 10;   // 0 skips both deconvolution stages
    int order = 2;            // autocorrelation cumulant order, 2..6
    double psf_exponent = 0.0;  // kernel power for the final stage; 0 -> order
    bool multi_plane = true;    // average temporal bin 1/2/4 planes

    void validate(int frames) const;
};

// Band-limited upsampling by zero-padding the centred spectrum. Even input
// sizes split the Nyquist bin symmetrically. Output is the real part with
// negative ringing clamped to zero.
Image fourier_interpolate(const Image& image, int magnification);
ImageStack fourier_interpolate(const ImageStack& stack, int magnification);

// Richardson-Lucy deconvolution with periodic (FFT) convolution. The kernel
// is normalized to unit sum; ratios are floored at 1e-12 times the data peak.
Image lucy_richardson(const Image& data, const Image& kernel, int iterations);

// Mean of the absolute distinct-frame cumulant over temporal binning planes
// (1x, 2x, 4x frame averaging; planes without enough frames are skipped).
Image mpac(const ImageStack& stack, int order, bool multi_plane);

// Full pipeline: interpolate frames, deconvolve each, cumulate, deconvolve
// the cumulant with the kernel raised to the order. kernel must be sampled
// at the magnified pixel pitch.
ReconstructionResult sacd_reconstruct(const ImageStack& stack, const Image& kernel,
                                      const SacdParams& params);

}  // namespace ffsrm::sacd

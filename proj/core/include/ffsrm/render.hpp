#pragma once

#include <cstdint>

#include "ffsrm/geometry.hpp"
#include "ffsrm/image.hpp"
#include "ffsrm/optical_config.hpp"
#include "ffsrm/photokinetics.hpp"
#include "ffsrm/psf.hpp"

namespace ffsrm::sim {

// Field-of-view window into the scene. Pixel (ix, iy) integrates around its
// centre at origin + (ix + 0.5) * pixel.
struct FovSpec {
    int width_px = 64;
    int height_px = 64;
    double origin_x_nm = 0.0;
    double origin_y_nm = 0.0;
};

// Noise-free photon image stack: every emitter splats its depth-dependent
// camera-pitch kernel, weighted by rate and per-frame on fraction. Sub-pixel
// positions are handled by bilinear splatting, which preserves the kernel
// mass exactly.
ImageStack render_stack(const EmitterSet& set, const OnFractions& blinking,
                        const optics::Psf3D& psf, const OpticalConfig& config,
                        const FovSpec& fov);

// Camera model: normalize the stack to its global maximum, then draw
// value ~ Poisson(gain_a * normalized + offset_b) per pixel per frame.
struct CameraNoiseParams {
    double gain_a = 200.0;
    double offset_b = 50.0;

    void validate() const;
};

ImageStack apply_camera_noise(const ImageStack& stack, const CameraNoiseParams& params,
                              uint64_t seed);

}  // namespace ffsrm::sim

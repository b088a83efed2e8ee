#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace ffsrm {

// Single 2D image, row-major doubles. upscale_factor records how many output
// pixels one camera pixel was expanded into (1 for camera-grid images).
struct Image {
    int height = 0;
    int width = 0;
    double pixel_size_nm = 0.0;
    int upscale_factor = 1;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w, double pix_nm, int upscale = 1)
        : height(h), width(w), pixel_size_nm(pix_nm), upscale_factor(upscale),
          data(static_cast<size_t>(h) * w, 0.0) {}

    double& at(int y, int x) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t pixel_count() const { return static_cast<size_t>(height) * width; }
};

// Time series of frames, frame-major contiguous storage.
// allow_negative marks stacks whose pixels may legitimately go below zero
// (e.g. signed difference frames); raw camera stacks keep it false.
struct ImageStack {
    int frames = 0;
    int height = 0;
    int width = 0;
    double pixel_size_nm = 0.0;
    bool allow_negative = false;
    std::string provenance;
    std::vector<double> data;

    ImageStack() = default;
    ImageStack(int t, int h, int w, double pix_nm)
        : frames(t), height(h), width(w), pixel_size_nm(pix_nm),
          data(static_cast<size_t>(t) * h * w, 0.0) {}

    double& at(int t, int y, int x) {
        return data[(static_cast<size_t>(t) * height + y) * width + x];
    }
    double at(int t, int y, int x) const {
        return data[(static_cast<size_t>(t) * height + y) * width + x];
    }
    double* frame(int t) { return data.data() + static_cast<size_t>(t) * height * width; }
    const double* frame(int t) const {
        return data.data() + static_cast<size_t>(t) * height * width;
    }
    size_t frame_pixels() const { return static_cast<size_t>(height) * width; }

    Image frame_image(int t) const {
        Image im(height, width, pixel_size_nm);
        const double* src = frame(t);
        std::copy(src, src + frame_pixels(), im.data.begin());
        return im;
    }
};

struct StackValidation {
    bool valid = true;
    std::vector<std::string> issues;
};

// Checks dimensional consistency, finiteness and the sign convention.
// Structural defects (zero dims, size mismatch) are always reported;
// negative pixels are an issue only when allow_negative is false.
StackValidation validate_stack(const ImageStack& stack);

// Extracts the per-pixel temporal trace (length stack.frames).
std::vector<double> pixel_trace(const ImageStack& stack, int y, int x);

}  // namespace ffsrm

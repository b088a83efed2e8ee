#pragma once

#include <optional>
#include <vector>

#include "ffsrm/image.hpp"

namespace ffsrm::metrics {

// Intensity samples along a segment, bilinearly interpolated at one-pixel
// spacing in pixel-centre coordinates. width > 1 averages that many parallel
// lines spaced one pixel apart, centred on the segment.
struct LineProfile {
    std::vector<double> values;
    double spacing_nm = 0.0;
};

LineProfile line_profile(const Image& image, double y0_px, double x0_px,
                         double y1_px, double x1_px, int width_px = 1);

struct GaussianFit {
    double amplitude = 0.0;
    double center_samples = 0.0;
    double sigma_samples = 0.0;
    double offset = 0.0;
    double fwhm_nm = 0.0;
    double rms_residual = 0.0;
    bool converged = false;
};

// Levenberg-Marquardt fit of offset + amplitude * gaussian to the samples.
// The data is normalized internally, so the recovered width and centre are
// invariant to affine intensity changes. fwhm = 2 sqrt(2 ln 2) sigma.
GaussianFit gaussian_fit_fwhm(const std::vector<double>& samples,
                              double sample_spacing_nm);

// Depth of the valley between the two highest local maxima:
// 1 - min_between / mean(peaks). Endpoints count as maxima. Empty when
// fewer than two separated maxima exist.
std::optional<double> dip_ratio(const std::vector<double>& values);

struct Rect {
    int y = 0, x = 0, height = 0, width = 0;
};

// Mean object intensity over mean background intensity.
double sbr(const Image& image, const Rect& object, const Rect& background);

// Display normalization: scale to unit peak, then raise to gamma.
Image intensity_adjust(const Image& image, double gamma);

// L2 distance between the unit-L2-normalized images (same dimensions).
double normalized_l2_distance(const Image& a, const Image& b);

}  // namespace ffsrm::metrics

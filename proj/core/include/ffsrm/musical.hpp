#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ffsrm/image.hpp"
#include "ffsrm/optical_config.hpp"
#include "ffsrm/psf.hpp"
#include "ffsrm/reconstruction.hpp"

namespace ffsrm::musical {

struct MusicalParams {
    int subpixels = 10;
    double alpha = 4.0;
    // Signal/noise split: singular values with log10(s_i / s_1) >= threshold
    // span the signal subspace. Relative scale, so the threshold cannot be
    // positive.
    double threshold = -0.5;
    int window_side = 0;  // 0 -> smallest odd side covering twice the Abbe limit

    void validate() const;
};

// SVD of one analysis window: rows are window pixels, columns are frames.
// eigenimages holds the complete orthonormal basis (full U), so the noise
// subspace includes the null space when frames < pixels; singular_values is
// zero-padded to the full basis size.
struct WindowSvd {
    int origin_y = 0;
    int origin_x = 0;
    int side = 0;
    std::vector<double> singular_values;
    Eigen::MatrixXd eigenimages;
};

WindowSvd window_svd(const ImageStack& stack, int origin_y, int origin_x, int side);

int default_window_side(const OpticalConfig& config);

// Distribution of the per-window second singular value (log10 relative to
// the first), the paper's guidance for choosing the threshold. Windows whose
// second singular value is exactly zero report -inf; fully dark windows are
// skipped. mid is the median.
struct SpectrumSummary {
    std::vector<double> second_log10;  // one entry per window with s1 > 0
    double min_log10 = 0.0;
    double mid_log10 = 0.0;
    double max_log10 = 0.0;
};

SpectrumSummary singular_value_spectrum(const ImageStack& stack,
                                        const OpticalConfig& config,
                                        int window_side = 0);

// Subspace indicator (|P_signal g| / |P_noise g|)^alpha for one window at a
// test point in frame pixel-centre coordinates, capped at 10^(3 alpha).
// focal_slice is the in-focus PSF plane (lateral_slice(psf, 0)); its
// pixel_size_nm carries the PSF sampling pitch. Errors when the window is
// dark (empty signal subspace) or the threshold is positive.
double musical_indicator(const WindowSvd& wsvd, const Image& focal_slice,
                         const OpticalConfig& config, double test_y_px,
                         double test_x_px, double threshold, double alpha);

// MUSICAL indicator stitched over overlapping windows (stride = side / 2),
// evaluated on a subpixel grid. The indicator at a test point is
// (|P_signal g| / |P_noise g|)^alpha for the PSF vector g sampled at the
// window's pixel centres, capped at 10^(3 alpha); overlaps average.
ReconstructionResult musical_reconstruct(const ImageStack& stack,
                                         const optics::Psf3D& psf,
                                         const OpticalConfig& config,
                                         const MusicalParams& params);

}  // namespace ffsrm::musical

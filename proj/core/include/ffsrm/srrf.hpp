#pragma once

#include "ffsrm/image.hpp"
#include "ffsrm/reconstruction.hpp"

namespace ffsrm::srrf {

enum class TemporalMode { Tra, Trppm, Trac2, Trac3, Trac4 };

TemporalMode temporal_mode_from_name(const std::string& name);
const char* temporal_mode_name(TemporalMode mode);

struct SrrfParams {
    double ring_radius_px = 0.5;
    int axes = 6;  // ring carries 2 * axes sample points
    int magnification = 5;
    TemporalMode mode = TemporalMode::Trac2;
    bool intensity_weighting = true;
    bool gradient_smoothing = false;
    bool minimize_patterning = false;

    void validate() const;
};

// Radiality of one frame on the magnified grid. Ring samples measure how
// well the local gradient lines converge on the centre: each contributes
// sign * (1 - d/r)^2 where d is the centre's distance to the gradient line
// and the sign is positive for inward gradients. Zero-gradient samples
// contribute nothing. Values are signed.
Image radiality_map(const Image& frame, const SrrfParams& params);

// Temporal projection of a (signed) radiality stack; output clamped at 0.
Image temporal_combine(const ImageStack& radiality, TemporalMode mode);

ReconstructionResult srrf_reconstruct(const ImageStack& stack, const SrrfParams& params);

}  // namespace ffsrm::srrf

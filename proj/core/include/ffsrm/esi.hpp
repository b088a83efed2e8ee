#pragma once

#include <vector>

#include "ffsrm/image.hpp"
#include "ffsrm/reconstruction.hpp"

namespace ffsrm::esi {

struct EsiParams {
    int moment_order = 4;
    int bins = 100;
    int output_images = 1;  // >1 splits the stack into that many blocks

    void validate(int frames) const;
};

// Shannon entropy (base 2) of a trace over equal-width bins. The two-argument
// form bins between the trace's own min and max; the range overload lets the
// caller fix a shared range. A degenerate range gives zero entropy.
double trace_entropy(const std::vector<double>& trace, int bins);
double trace_entropy(const std::vector<double>& trace, int bins, double lo, double hi);

// n-th central moment of a trace.
double central_moment(const std::vector<double>& trace, int order);

// Entropy-weighted moment image on a doubled grid (2H-1 x 2W-1). Odd output
// pixels sit between camera pixels and use a virtual trace: the per-frame
// geometric mean of the two (or four, diagonally) flanking pixels. Binning
// spans the block's global intensity range.
std::vector<ReconstructionResult> esi_reconstruct(const ImageStack& stack,
                                                  const EsiParams& params);

}  // namespace ffsrm::esi

#pragma once

#include "ffsrm/detail/cumulant.hpp"
#include "ffsrm/image.hpp"
#include "ffsrm/reconstruction.hpp"

namespace ffsrm::sofi {

using detail::LagMode;

struct SofiParams {
    int order = 2;
    LagMode lag = LagMode::DistinctFrames;
    bool balanced = false;

    void validate(int frames) const;
};

// Per-pixel temporal cumulant of the given order. Orders above 1 can carry
// negative pixels; the result keeps the camera grid.
Image temporal_cumulant(const ImageStack& stack, int order, LagMode lag);

// Balanced map |k_order|^(1/order), flattening the brightness/blinking
// response across orders.
Image bsofi_balance(const ImageStack& stack, int order, LagMode lag);

ReconstructionResult sofi_reconstruct(const ImageStack& stack, const SofiParams& params);

}  // namespace ffsrm::sofi

#pragma once

#include "ffsrm/image.hpp"

namespace ffsrm::hawk {

enum class NegativesMode { Separate, Absolute };
enum class OrderMode { ByLevel, ByTime };

struct HawkParams {
    int levels = 5;
    NegativesMode negatives = NegativesMode::Separate;
    OrderMode order = OrderMode::ByLevel;

    void validate(int frames) const;
};

// Output frame count for a given input length. Separate mode doubles the
// per-level count 2 * sum_l (T - 2^l + 1); absolute mode keeps the sum.
int hawk_frame_count(int frames, const HawkParams& params);

// Sliding undecimated Haar decomposition along time. Level l compares the
// mean of frames [t, t + 2^(l-1)) against the mean of [t + 2^(l-1), t + 2^l).
// In Separate mode each coefficient frame is split into its positive part
// followed by its negated negative part, so output pixels stay non-negative.
ImageStack hawk_transform(const ImageStack& stack, const HawkParams& params);

}  // namespace ffsrm::hawk

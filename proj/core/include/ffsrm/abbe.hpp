#pragma once

#include "ffsrm/optical_config.hpp"

namespace ffsrm::optics {

struct AbbeLimits {
    double lateral_nm = 0.0;
    double axial_nm = 0.0;
};

// Diffraction limits: lateral = lambda / (2 NA), axial = 2 lambda / NA^2.
AbbeLimits abbe_limits(const OpticalConfig& config);

}  // namespace ffsrm::optics

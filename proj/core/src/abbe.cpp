#include "ffsrm/abbe.hpp"

namespace ffsrm::optics {

AbbeLimits abbe_limits(const OpticalConfig& config) {
    config.validate();
    AbbeLimits out;
    out.lateral_nm = config.emission_wavelength_nm / (2.0 * config.numerical_aperture);
    out.axial_nm = 2.0 * config.emission_wavelength_nm /
                   (config.numerical_aperture * config.numerical_aperture);
    return out;
}

}  // namespace ffsrm::optics

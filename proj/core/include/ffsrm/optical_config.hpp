#pragma once

#include <stdexcept>

namespace ffsrm {

// Imaging-system description shared by the simulator and the reconstruction
// methods that need physical units.
struct OpticalConfig {
    double emission_wavelength_nm = 510.0;
    double numerical_aperture = 1.42;
    double pixel_size_nm = 80.0;
    double immersion_refractive_index = 1.515;
    double sample_refractive_index = 1.515;

    void validate() const {
        if (!(emission_wavelength_nm > 0.0))
            throw std::invalid_argument("emission wavelength must be positive");
        if (!(numerical_aperture > 0.0))
            throw std::invalid_argument("numerical aperture must be positive");
        if (!(pixel_size_nm > 0.0))
            throw std::invalid_argument("pixel size must be positive");
        if (!(immersion_refractive_index > 0.0) || !(sample_refractive_index > 0.0))
            throw std::invalid_argument("refractive indices must be positive");
        if (numerical_aperture >= immersion_refractive_index)
            throw std::invalid_argument("NA must be below the immersion refractive index");
    }
};

}  // namespace ffsrm

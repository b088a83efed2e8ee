#pragma once

#include <vector>

#include "ffsrm/image.hpp"
#include "ffsrm/optical_config.hpp"

namespace ffsrm::optics {

// Sampling grid for the 3D PSF. Extents are half-widths around the focal
// point; both must be integer multiples of their step.
struct PsfGridSpec {
    double lateral_extent_nm = 1200.0;
    double lateral_step_nm = 20.0;
    double axial_extent_nm = 1200.0;
    double axial_step_nm = 50.0;

    void validate() const;
};

// Layer description for the Gibson-Lanni aberration term. The defaults match
// the design values, which collapses the aberration integrand to zero and
// yields the axially symmetric, depth-independent diffraction PSF.
struct GibsonLanniLayers {
    double particle_depth_nm = 0.0;
    double coverslip_thickness_nm = 170000.0;
    double design_coverslip_thickness_nm = 170000.0;
    double coverslip_refractive_index = 1.515;
    double design_coverslip_refractive_index = 1.515;
    double quadrature_rel_tol = 1e-6;
};

// Sampled intensity PSF on a z-major grid of odd lateral size, normalized so
// the values sum to 1 over the full grid.
struct Psf3D {
    int nz = 0;
    int n_lat = 0;
    double axial_step_nm = 0.0;
    double lateral_step_nm = 0.0;
    std::vector<double> values;

    double at(int z, int y, int x) const {
        return values[(static_cast<size_t>(z) * n_lat + y) * n_lat + x];
    }
    double& at(int z, int y, int x) {
        return values[(static_cast<size_t>(z) * n_lat + y) * n_lat + x];
    }
    int z_center() const { return nz / 2; }
    int lat_center() const { return n_lat / 2; }
    double axial_extent_nm() const { return z_center() * axial_step_nm; }
    double lateral_extent_nm() const { return lat_center() * lateral_step_nm; }
};

Psf3D gibson_lanni_psf(const OpticalConfig& config, const PsfGridSpec& grid = {},
                       const GibsonLanniLayers& layers = {});

// Lateral plane at an axial offset from focus, linearly interpolated between
// the two nearest sampled slices (zero outside the axial extent). Native
// lateral pitch.
Image lateral_slice(const Psf3D& psf, double z_offset_nm);

// Camera-pitch convolution kernel for an emitter at the given axial offset:
// each camera pixel integrates the lateral slice over its footprint
// (supersampled at the native pitch). Kernel sums to the slice mass.
Image psf_slice(const Psf3D& psf, double z_offset_nm, double camera_pixel_nm);

// Pixelwise power of a kernel, renormalized to unit sum.
Image psf_power(const Image& kernel, double exponent);

}  // namespace ffsrm::optics

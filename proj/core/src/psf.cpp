#include "ffsrm/psf.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "ffsrm/detail/quadrature.hpp"
#include "ffsrm/parallel.hpp"

namespace ffsrm::optics {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Abramowitz & Stegun 9.4.1 / 9.4.3 polynomial approximation of J0
// (absolute error below 5e-8, ample against the 1e-6 quadrature tolerance).
double bessel_j0(double x) {
    const double ax = std::fabs(x);
    if (ax < 3.0) {
        const double t = (x / 3.0) * (x / 3.0);
        return 1.0 + t * (-2.2499997 +
                     t * (1.2656208 +
                     t * (-0.3163866 +
                     t * (0.0444479 +
                     t * (-0.0039444 + t * 0.0002100)))));
    }
    const double t = 3.0 / ax;
    const double f0 = 0.79788456 +
                 t * (-0.00000077 +
                 t * (-0.00552740 +
                 t * (-0.00009512 +
                 t * (0.00137237 +
                 t * (-0.00072805 + t * 0.00014476)))));
    const double theta0 = ax - 0.78539816 +
                     t * (-0.04166397 +
                     t * (-0.00003954 +
                     t * (0.00262573 +
                     t * (-0.00054125 +
                     t * (-0.00029333 + t * 0.00013558)))));
    return f0 * std::cos(theta0) / std::sqrt(ax);
}

double path_root(double n, double na2_rho2) {
    const double v = n * n - na2_rho2;
    return v > 0.0 ? std::sqrt(v) : 0.0;  // supercritical rays are evanescent
}

struct PupilModel {
    double k;           // 2 pi / lambda
    double na;
    double n_sample;
    double n_immersion;
    GibsonLanniLayers layers;

    double opd(double rho, double defocus_nm) const {
        const double na2_rho2 = na * na * rho * rho;
        const double in_sample = path_root(n_sample, na2_rho2);
        double value = defocus_nm * in_sample;
        value += layers.particle_depth_nm * (in_sample - path_root(n_immersion, na2_rho2));
        value += layers.coverslip_thickness_nm *
                 path_root(layers.coverslip_refractive_index, na2_rho2);
        value -= layers.design_coverslip_thickness_nm *
                 path_root(layers.design_coverslip_refractive_index, na2_rho2);
        return value;
    }

    double intensity(double radius_nm, double defocus_nm) const {
        const double radial_arg = k * na * radius_nm;
        const auto integrand = [&](double rho) {
            const double phase = k * opd(rho, defocus_nm);
            return std::polar(bessel_j0(radial_arg * rho) * rho, phase);
        };
        const auto integral =
            detail::gauss_kronrod(integrand, 0.0, 1.0, layers.quadrature_rel_tol);
        return std::norm(integral.value);
    }
};

}  // namespace

void PsfGridSpec::validate() const {
    if (!(lateral_extent_nm > 0.0) || !(axial_extent_nm > 0.0) ||
        !(lateral_step_nm > 0.0) || !(axial_step_nm > 0.0))
        throw std::invalid_argument("PSF grid extents and steps must be positive");
    const double lat_n = lateral_extent_nm / lateral_step_nm;
    const double ax_n = axial_extent_nm / axial_step_nm;
    if (std::fabs(lat_n - std::round(lat_n)) > 1e-9 ||
        std::fabs(ax_n - std::round(ax_n)) > 1e-9)
        throw std::invalid_argument("PSF grid extents must be multiples of the steps");
}

Psf3D gibson_lanni_psf(const OpticalConfig& config, const PsfGridSpec& grid,
                       const GibsonLanniLayers& layers) {
    config.validate();
    grid.validate();
    if (grid.lateral_step_nm > 0.5 * config.pixel_size_nm)
        throw std::invalid_argument(
            "PSF grid too coarse: lateral step must be at most half the camera pixel");

    PupilModel model;
    model.k = 2.0 * kPi / config.emission_wavelength_nm;
    model.na = config.numerical_aperture;
    model.n_sample = config.sample_refractive_index;
    model.n_immersion = config.immersion_refractive_index;
    model.layers = layers;

    Psf3D psf;
    const int lat_half = static_cast<int>(std::round(grid.lateral_extent_nm / grid.lateral_step_nm));
    const int ax_half = static_cast<int>(std::round(grid.axial_extent_nm / grid.axial_step_nm));
    psf.n_lat = 2 * lat_half + 1;
    psf.nz = 2 * ax_half + 1;
    psf.lateral_step_nm = grid.lateral_step_nm;
    psf.axial_step_nm = grid.axial_step_nm;
    psf.values.assign(static_cast<size_t>(psf.nz) * psf.n_lat * psf.n_lat, 0.0);

    // Every lateral position with the same dy^2+dx^2 shares one radial
    // integral; cache per slice keyed by that integer.
    const size_t key_count = static_cast<size_t>(2 * lat_half * lat_half + 1);
    parallel_for(static_cast<size_t>(psf.nz), [&](size_t iz) {
        const double defocus = (static_cast<int>(iz) - ax_half) * grid.axial_step_nm;
        std::vector<double> cache(key_count, -1.0);
        for (int iy = 0; iy < psf.n_lat; ++iy) {
            const int dy = iy - lat_half;
            for (int ix = 0; ix < psf.n_lat; ++ix) {
                const int dx = ix - lat_half;
                const size_t key = static_cast<size_t>(dy) * dy + static_cast<size_t>(dx) * dx;
                if (cache[key] < 0.0) {
                    const double radius = std::sqrt(static_cast<double>(key)) * grid.lateral_step_nm;
                    cache[key] = model.intensity(radius, defocus);
                }
                psf.at(static_cast<int>(iz), iy, ix) = cache[key];
            }
        }
    });

    double total = 0.0;
    for (double v : psf.values) total += v;
    if (!(total > 0.0)) throw std::runtime_error("PSF normalization failed: zero mass");
    for (double& v : psf.values) v /= total;
    return psf;
}

Image lateral_slice(const Psf3D& psf, double z_offset_nm) {
    Image out(psf.n_lat, psf.n_lat, psf.lateral_step_nm);
    const double zc = psf.z_center() + z_offset_nm / psf.axial_step_nm;
    const int z0 = static_cast<int>(std::floor(zc));
    const double frac = zc - z0;
    const bool lo_ok = z0 >= 0 && z0 < psf.nz;
    const bool hi_ok = z0 + 1 >= 0 && z0 + 1 < psf.nz;
    if (!lo_ok && !hi_ok) return out;
    for (int y = 0; y < psf.n_lat; ++y)
        for (int x = 0; x < psf.n_lat; ++x) {
            double v = 0.0;
            if (lo_ok) v += (1.0 - frac) * psf.at(z0, y, x);
            if (hi_ok) v += frac * psf.at(z0 + 1, y, x);
            out.at(y, x) = v;
        }
    return out;
}

namespace {

double bilinear_or_zero(const Image& img, double y, double x) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto sample = [&](int yy, int xx) {
        if (yy < 0 || yy >= img.height || xx < 0 || xx >= img.width) return 0.0;
        return img.at(yy, xx);
    };
    return (1.0 - fy) * ((1.0 - fx) * sample(y0, x0) + fx * sample(y0, x0 + 1)) +
           fy * ((1.0 - fx) * sample(y0 + 1, x0) + fx * sample(y0 + 1, x0 + 1));
}

}  // namespace

Image psf_slice(const Psf3D& psf, double z_offset_nm, double camera_pixel_nm) {
    if (!(camera_pixel_nm > 0.0))
        throw std::invalid_argument("camera pixel size must be positive");
    if (std::fabs(z_offset_nm) > psf.axial_extent_nm() + 1e-9)
        throw std::invalid_argument("psf_slice: z offset outside the sampled axial range");
    const Image slice = lateral_slice(psf, z_offset_nm);
    const int sub = std::max(1, static_cast<int>(std::round(camera_pixel_nm / psf.lateral_step_nm)));
    const int half = static_cast<int>(std::ceil(psf.lateral_extent_nm() / camera_pixel_nm));
    const int n = 2 * half + 1;
    Image kernel(n, n, camera_pixel_nm);
    const double center = psf.lat_center();
    const double scale = (camera_pixel_nm / psf.lateral_step_nm) *
                         (camera_pixel_nm / psf.lateral_step_nm) / (sub * sub);
    for (int cy = 0; cy < n; ++cy)
        for (int cx = 0; cx < n; ++cx) {
            double acc = 0.0;
            for (int sy = 0; sy < sub; ++sy)
                for (int sx = 0; sx < sub; ++sx) {
                    const double off_y = ((sy + 0.5) / sub - 0.5) * camera_pixel_nm;
                    const double off_x = ((sx + 0.5) / sub - 0.5) * camera_pixel_nm;
                    const double y = center + ((cy - half) * camera_pixel_nm + off_y) / psf.lateral_step_nm;
                    const double x = center + ((cx - half) * camera_pixel_nm + off_x) / psf.lateral_step_nm;
                    acc += bilinear_or_zero(slice, y, x);
                }
            kernel.at(cy, cx) = acc * scale;
        }
    return kernel;
}

Image psf_power(const Image& kernel, double exponent) {
    if (!(exponent >= 1.0)) throw std::invalid_argument("psf_power exponent must be >= 1");
    Image out = kernel;
    double total = 0.0;
    for (double& v : out.data) {
        v = v > 0.0 ? std::pow(v, exponent) : 0.0;
        total += v;
    }
    if (!(total > 0.0)) throw std::runtime_error("psf_power: kernel has no mass");
    for (double& v : out.data) v /= total;
    return out;
}

}  // namespace ffsrm::optics

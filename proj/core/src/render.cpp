#include "ffsrm/render.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ffsrm/parallel.hpp"

namespace ffsrm::sim {

namespace {

// Kernel pre-shifted to the emitter's sub-pixel offset. Anchored at the
// top-left output pixel it touches; one pixel larger than the source kernel
// to absorb the bilinear spread.
struct Footprint {
    int anchor_x = 0;
    int anchor_y = 0;
    int size = 0;
    std::vector<double> weights;
};

Footprint build_footprint(const Image& kernel, double cx, double cy) {
    const int n = kernel.width;
    const int half = n / 2;
    const int ix = static_cast<int>(std::floor(cx));
    const int iy = static_cast<int>(std::floor(cy));
    const double fx = cx - ix;
    const double fy = cy - iy;
    const double w00 = (1.0 - fy) * (1.0 - fx);
    const double w01 = (1.0 - fy) * fx;
    const double w10 = fy * (1.0 - fx);
    const double w11 = fy * fx;

    Footprint fp;
    fp.size = n + 1;
    fp.anchor_x = ix - half;
    fp.anchor_y = iy - half;
    fp.weights.assign(static_cast<size_t>(fp.size) * fp.size, 0.0);
    for (int ky = 0; ky < n; ++ky)
        for (int kx = 0; kx < n; ++kx) {
            const double v = kernel.at(ky, kx);
            if (v == 0.0) continue;
            double* row0 = fp.weights.data() + static_cast<size_t>(ky) * fp.size + kx;
            double* row1 = row0 + fp.size;
            row0[0] += w00 * v;
            row0[1] += w01 * v;
            row1[0] += w10 * v;
            row1[1] += w11 * v;
        }
    return fp;
}

}  // namespace

ImageStack render_stack(const EmitterSet& set, const OnFractions& blinking,
                        const optics::Psf3D& psf, const OpticalConfig& config,
                        const FovSpec& fov) {
    config.validate();
    if (fov.width_px <= 0 || fov.height_px <= 0)
        throw std::invalid_argument("render_stack: FOV must be positive");
    if (blinking.n_emitters != static_cast<int>(set.emitters.size()))
        throw std::invalid_argument("render_stack: blinking table does not match emitter count");

    for (const Emitter& em : set.emitters)
        if (std::fabs(em.z_nm) > psf.axial_extent_nm()) {
            std::ostringstream os;
            os << "render_stack: emitter z = " << em.z_nm
               << " nm outside the PSF axial grid (" << psf.axial_extent_nm() << " nm)";
            throw std::invalid_argument(os.str());
        }

    const double pix = config.pixel_size_nm;
    std::vector<Footprint> footprints(set.emitters.size());
    parallel_for(set.emitters.size(), [&](size_t e) {
        const Emitter& em = set.emitters[e];
        const Image kernel = optics::psf_slice(psf, em.z_nm, pix);
        const double cx = (em.x_nm - fov.origin_x_nm) / pix - 0.5;
        const double cy = (em.y_nm - fov.origin_y_nm) / pix - 0.5;
        footprints[e] = build_footprint(kernel, cx, cy);
    });

    ImageStack stack(blinking.frames, fov.height_px, fov.width_px, pix);
    {
        std::ostringstream os;
        os << "simulate sample=" << set.sample_name << " seed=" << set.seed
           << " frames=" << blinking.frames;
        stack.provenance = os.str();
    }

    parallel_for(static_cast<size_t>(blinking.frames), [&](size_t t) {
        double* frame = stack.frame(static_cast<int>(t));
        for (size_t e = 0; e < set.emitters.size(); ++e) {
            const Footprint& fp = footprints[e];
            if (fp.size == 0) continue;
            const double w = set.emitters[e].rate * blinking.at(static_cast<int>(e), static_cast<int>(t));
            if (w <= 0.0) continue;
            const int y_lo = std::max(0, -fp.anchor_y);
            const int y_hi = std::min(fp.size, fov.height_px - fp.anchor_y);
            const int x_lo = std::max(0, -fp.anchor_x);
            const int x_hi = std::min(fp.size, fov.width_px - fp.anchor_x);
            for (int ky = y_lo; ky < y_hi; ++ky) {
                double* dst = frame + static_cast<size_t>(fp.anchor_y + ky) * fov.width_px + fp.anchor_x;
                const double* src = fp.weights.data() + static_cast<size_t>(ky) * fp.size;
                for (int kx = x_lo; kx < x_hi; ++kx) dst[kx] += w * src[kx];
            }
        }
    });
    return stack;
}

void CameraNoiseParams::validate() const {
    if (!(gain_a > 0.0)) throw std::invalid_argument("camera gain must be positive");
    if (!(offset_b >= 0.0)) throw std::invalid_argument("camera offset must be non-negative");
}

ImageStack apply_camera_noise(const ImageStack& stack, const CameraNoiseParams& params,
                              uint64_t seed) {
    params.validate();
    double peak = 0.0;
    for (double v : stack.data) {
        if (v < 0.0) throw std::invalid_argument("camera noise requires a non-negative stack");
        peak = std::max(peak, v);
    }
    if (!(peak > 0.0))
        throw std::invalid_argument("camera noise requires a stack with signal");

    ImageStack out = stack;
    out.provenance += " +camera_noise";
    std::mt19937_64 rng(seed);
    for (double& v : out.data) {
        std::poisson_distribution<long> dist(params.gain_a * (v / peak) + params.offset_b);
        v = static_cast<double>(dist(rng));
    }
    return out;
}

}  // namespace ffsrm::sim

#include "ffsrm/srrf.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffsrm/detail/cumulant.hpp"
#include "ffsrm/parallel.hpp"

namespace ffsrm::srrf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kGradientEps = 1e-12;

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 +
                  t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
                  t * (3.0 * (p1 - p2) + p3 - p0)));
}

struct Grid {
    const std::vector<double>* data;
    int h, w;

    double at(int y, int x) const {
        y = std::clamp(y, 0, h - 1);
        x = std::clamp(x, 0, w - 1);
        return (*data)[static_cast<size_t>(y) * w + x];
    }

    double bicubic(double y, double x) const {
        const int iy = static_cast<int>(std::floor(y));
        const int ix = static_cast<int>(std::floor(x));
        const double fy = y - iy;
        const double fx = x - ix;
        double rows[4];
        for (int r = 0; r < 4; ++r) {
            const int yy = iy - 1 + r;
            rows[r] = catmull_rom(at(yy, ix - 1), at(yy, ix), at(yy, ix + 1),
                                  at(yy, ix + 2), fx);
        }
        return catmull_rom(rows[0], rows[1], rows[2], rows[3], fy);
    }
};

struct RingPoint {
    double dx, dy;
};

std::vector<RingPoint> ring_points(const SrrfParams& p) {
    std::vector<RingPoint> pts(static_cast<size_t>(2 * p.axes));
    for (int k = 0; k < 2 * p.axes; ++k) {
        const double theta = kPi * k / p.axes;
        pts[static_cast<size_t>(k)] = {p.ring_radius_px * std::cos(theta),
                                       p.ring_radius_px * std::sin(theta)};
    }
    return pts;
}

std::vector<double> smooth3x3(const std::vector<double>& src, int h, int w) {
    // Binomial 3x3, clamped borders.
    static const double k[3] = {0.25, 0.5, 0.25};
    std::vector<double> tmp(src.size()), out(src.size());
    Grid g{&src, h, w};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -1; i <= 1; ++i) acc += k[i + 1] * g.at(y, x + i);
            tmp[static_cast<size_t>(y) * w + x] = acc;
        }
    Grid gt{&tmp, h, w};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -1; i <= 1; ++i) acc += k[i + 1] * gt.at(y + i, x);
            out[static_cast<size_t>(y) * w + x] = acc;
        }
    return out;
}

}  // namespace

TemporalMode temporal_mode_from_name(const std::string& name) {
    if (name == "tra") return TemporalMode::Tra;
    if (name == "trppm") return TemporalMode::Trppm;
    if (name == "trac2") return TemporalMode::Trac2;
    if (name == "trac3") return TemporalMode::Trac3;
    if (name == "trac4") return TemporalMode::Trac4;
    throw std::invalid_argument("unknown SRRF temporal mode: " + name);
}

const char* temporal_mode_name(TemporalMode mode) {
    switch (mode) {
        case TemporalMode::Tra: return "tra";
        case TemporalMode::Trppm: return "trppm";
        case TemporalMode::Trac2: return "trac2";
        case TemporalMode::Trac3: return "trac3";
        case TemporalMode::Trac4: return "trac4";
    }
    return "unknown";
}

void SrrfParams::validate() const {
    if (!(ring_radius_px > 0.0))
        throw std::invalid_argument("srrf: ring radius must be positive");
    if (axes < 2) throw std::invalid_argument("srrf: need at least 2 axes");
    if (magnification < 1) throw std::invalid_argument("srrf: magnification must be >= 1");
}

Image radiality_map(const Image& frame, const SrrfParams& params) {
    params.validate();
    const int h = frame.height;
    const int w = frame.width;
    const std::vector<double>& base =
        params.gradient_smoothing ? smooth3x3(frame.data, h, w) : frame.data;

    std::vector<double> gx(frame.pixel_count()), gy(frame.pixel_count());
    Grid gb{&base, h, w};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            gx[static_cast<size_t>(y) * w + x] = 0.5 * (gb.at(y, x + 1) - gb.at(y, x - 1));
            gy[static_cast<size_t>(y) * w + x] = 0.5 * (gb.at(y + 1, x) - gb.at(y - 1, x));
        }
    Grid ggx{&gx, h, w};
    Grid ggy{&gy, h, w};
    Grid gframe{&frame.data, h, w};

    const int mag = params.magnification;
    Image out(h * mag, w * mag, frame.pixel_size_nm / mag, mag * frame.upscale_factor);

    const auto ring = ring_points(params);
    // minimize_patterning averages the radiality over four quarter-pixel
    // ring-center offsets instead of the single centered evaluation.
    std::vector<RingPoint> centers{{0.0, 0.0}};
    if (params.minimize_patterning)
        centers = {{0.25, 0.25}, {0.25, -0.25}, {-0.25, 0.25}, {-0.25, -0.25}};

    parallel_for(static_cast<size_t>(out.height), [&](size_t oy) {
        const double base_cy = (static_cast<double>(oy) + 0.5) / mag - 0.5;
        for (int ox = 0; ox < out.width; ++ox) {
            const double base_cx = (ox + 0.5) / static_cast<double>(mag) - 0.5;
            double value = 0.0;
            for (const RingPoint& c : centers) {
                const double cy = base_cy + c.dy;
                const double cx = base_cx + c.dx;
                double r_acc = 0.0;
                for (const RingPoint& rp : ring) {
                    const double px = cx + rp.dx;
                    const double py = cy + rp.dy;
                    const double gxv = ggx.bicubic(py, px);
                    const double gyv = ggy.bicubic(py, px);
                    const double gm = std::sqrt(gxv * gxv + gyv * gyv);
                    if (gm < kGradientEps) continue;
                    const double d = std::fabs(rp.dx * gyv - rp.dy * gxv) / gm;
                    const double inward = -(rp.dx * gxv + rp.dy * gyv);
                    const double fall =
                        1.0 - std::min(d, params.ring_radius_px) / params.ring_radius_px;
                    r_acc += (inward > 0.0 ? 1.0 : -1.0) * fall * fall;
                }
                double r = r_acc / static_cast<double>(ring.size());
                if (params.intensity_weighting)
                    r *= std::max(gframe.bicubic(cy, cx), 0.0);
                value += r;
            }
            out.at(static_cast<int>(oy), ox) = value / static_cast<double>(centers.size());
        }
    });
    return out;
}

Image temporal_combine(const ImageStack& radiality, TemporalMode mode) {
    if (radiality.frames < 2)
        throw std::invalid_argument("srrf: need at least 2 radiality frames");
    const int rank = mode == TemporalMode::Trac3 ? 3 : mode == TemporalMode::Trac4 ? 4 : 2;
    if ((mode == TemporalMode::Trac3 || mode == TemporalMode::Trac4) &&
        radiality.frames < rank + 1)
        throw std::invalid_argument("srrf: stack too short for the requested TRAC order");

    Image out(radiality.height, radiality.width, radiality.pixel_size_nm);
    const size_t npix = radiality.frame_pixels();
    const size_t frames = static_cast<size_t>(radiality.frames);

    parallel_for(static_cast<size_t>(radiality.height), [&](size_t y) {
        std::vector<double> trace(frames);
        for (int x = 0; x < radiality.width; ++x) {
            const size_t offset = y * radiality.width + static_cast<size_t>(x);
            for (size_t t = 0; t < frames; ++t)
                trace[t] = radiality.data[t * npix + offset];
            double v = 0.0;
            switch (mode) {
                case TemporalMode::Tra:
                    v = detail::trace_mean(trace.data(), frames);
                    break;
                case TemporalMode::Trppm: {
                    detail::KahanSum acc;
                    for (size_t t = 0; t + 1 < frames; ++t)
                        acc.add(std::sqrt(std::max(trace[t] * trace[t + 1], 0.0)));
                    v = acc.value() / static_cast<double>(frames - 1);
                    break;
                }
                case TemporalMode::Trac2:
                case TemporalMode::Trac3:
                case TemporalMode::Trac4: {
                    const int order = mode == TemporalMode::Trac2   ? 2
                                      : mode == TemporalMode::Trac3 ? 3
                                                                    : 4;
                    v = std::fabs(detail::trace_cumulant(trace.data(), frames, order,
                                                         detail::LagMode::DistinctFrames));
                    break;
                }
            }
            out.data[offset] = std::max(v, 0.0);
        }
    });
    return out;
}

ReconstructionResult srrf_reconstruct(const ImageStack& stack, const SrrfParams& params) {
    params.validate();
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("srrf: invalid input stack: " + report.issues.front());
    if (stack.frames < 2) throw std::invalid_argument("srrf: need at least 2 frames");

    const int mag = params.magnification;
    ImageStack radiality(stack.frames, stack.height * mag, stack.width * mag,
                         stack.pixel_size_nm / mag);
    radiality.allow_negative = true;
    // Frames are independent; radiality_map already parallelizes rows.
    for (int t = 0; t < stack.frames; ++t) {
        const Image r = radiality_map(stack.frame_image(t), params);
        std::copy(r.data.begin(), r.data.end(), radiality.frame(t));
    }

    ReconstructionResult result;
    result.method = Method::Srrf;
    result.input_frames = stack.frames;
    result.image = temporal_combine(radiality, params.mode);
    result.image.upscale_factor = mag;
    result.param("mode", temporal_mode_name(params.mode));
    result.param("ring_radius_px", params.ring_radius_px);
    result.param("axes", params.axes);
    result.param("magnification", mag);
    result.param("intensity_weighting", params.intensity_weighting ? "true" : "false");
    result.param("gradient_smoothing", params.gradient_smoothing ? "true" : "false");
    result.param("minimize_patterning", params.minimize_patterning ? "true" : "false");
    return result;
}

}  // namespace ffsrm::srrf

#include "ffsrm/sofi.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffsrm/parallel.hpp"

namespace ffsrm::sofi {

void SofiParams::validate(int frames) const {
    if (order < 1 || order > 4)
        throw std::invalid_argument("sofi: order must be in 1..4");
    if (frames < order + 2)
        throw std::invalid_argument("sofi: stack length must be at least order + 2");
}

namespace {

Image cumulant_image(const ImageStack& stack, int order, LagMode lag) {
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("sofi: invalid input stack: " + report.issues.front());
    SofiParams{order, lag, false}.validate(stack.frames);

    Image out(stack.height, stack.width, stack.pixel_size_nm);
    const size_t npix = stack.frame_pixels();
    const size_t frames = static_cast<size_t>(stack.frames);
    parallel_for(static_cast<size_t>(stack.height), [&](size_t y) {
        std::vector<double> trace(frames);
        for (int x = 0; x < stack.width; ++x) {
            const size_t offset = y * stack.width + static_cast<size_t>(x);
            for (size_t t = 0; t < frames; ++t) trace[t] = stack.data[t * npix + offset];
            out.data[offset] = detail::trace_cumulant(trace.data(), frames, order, lag);
        }
    });
    return out;
}

}  // namespace

Image temporal_cumulant(const ImageStack& stack, int order, LagMode lag) {
    return cumulant_image(stack, order, lag);
}

Image bsofi_balance(const ImageStack& stack, int order, LagMode lag) {
    Image out = cumulant_image(stack, order, lag);
    const double inv = 1.0 / order;
    for (double& v : out.data) v = std::pow(std::fabs(v), inv);
    return out;
}

ReconstructionResult sofi_reconstruct(const ImageStack& stack, const SofiParams& params) {
    params.validate(stack.frames);
    ReconstructionResult result;
    result.method = Method::Sofi;
    result.input_frames = stack.frames;
    result.image = params.balanced ? bsofi_balance(stack, params.order, params.lag)
                                   : temporal_cumulant(stack, params.order, params.lag);
    result.param("order", params.order);
    result.param("lag", params.lag == LagMode::ZeroLag ? "zero" : "distinct");
    result.param("balanced", params.balanced ? "true" : "false");
    return result;
}

}  // namespace ffsrm::sofi

#include "ffsrm/hawk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ffsrm/parallel.hpp"

namespace ffsrm::hawk {

namespace {

struct Coefficient {
    int level;  // 1-based
    int t;      // first frame of the window
};

std::vector<Coefficient> coefficient_order(int frames, const HawkParams& params) {
    std::vector<Coefficient> coeffs;
    for (int l = 1; l <= params.levels; ++l) {
        const int window = 1 << l;
        for (int t = 0; t + window <= frames; ++t) coeffs.push_back({l, t});
    }
    if (params.order == OrderMode::ByTime) {
        std::stable_sort(coeffs.begin(), coeffs.end(),
                         [](const Coefficient& a, const Coefficient& b) {
                             if (a.t != b.t) return a.t < b.t;
                             return a.level < b.level;
                         });
    }
    return coeffs;
}

}  // namespace

void HawkParams::validate(int frames) const {
    if (levels < 1) throw std::invalid_argument("hawk: levels must be >= 1");
    if (frames < (1 << levels)) {
        std::ostringstream os;
        os << "hawk: " << frames << " frames cannot support level " << levels
           << " (needs at least " << (1 << levels) << ")";
        throw std::invalid_argument(os.str());
    }
}

int hawk_frame_count(int frames, const HawkParams& params) {
    params.validate(frames);
    int total = 0;
    for (int l = 1; l <= params.levels; ++l) total += frames - (1 << l) + 1;
    return params.negatives == NegativesMode::Separate ? 2 * total : total;
}

ImageStack hawk_transform(const ImageStack& stack, const HawkParams& params) {
    params.validate(stack.frames);
    const auto report = validate_stack(stack);
    if (!report.valid)
        throw std::invalid_argument("hawk: invalid input stack: " + report.issues.front());

    const auto coeffs = coefficient_order(stack.frames, params);
    const bool separate = params.negatives == NegativesMode::Separate;
    const int out_frames = separate ? 2 * static_cast<int>(coeffs.size())
                                    : static_cast<int>(coeffs.size());

    ImageStack out(out_frames, stack.height, stack.width, stack.pixel_size_nm);
    out.provenance = stack.provenance + " +hawk";
    const size_t npix = stack.frame_pixels();

    parallel_for(coeffs.size(), [&](size_t ci) {
        const Coefficient c = coeffs[ci];
        const int half = 1 << (c.level - 1);
        std::vector<double> detail(npix, 0.0);
        for (int f = 0; f < half; ++f) {
            const double* early = stack.frame(c.t + f);
            const double* late = stack.frame(c.t + half + f);
            for (size_t p = 0; p < npix; ++p) detail[p] += early[p] - late[p];
        }
        const double inv = 1.0 / half;
        if (separate) {
            double* pos = out.frame(static_cast<int>(2 * ci));
            double* neg = out.frame(static_cast<int>(2 * ci) + 1);
            for (size_t p = 0; p < npix; ++p) {
                const double d = detail[p] * inv;
                pos[p] = d > 0.0 ? d : 0.0;
                neg[p] = d < 0.0 ? -d : 0.0;
            }
        } else {
            double* dst = out.frame(static_cast<int>(ci));
            for (size_t p = 0; p < npix; ++p) dst[p] = std::fabs(detail[p] * inv);
        }
    });
    return out;
}

}  // namespace ffsrm::hawk
